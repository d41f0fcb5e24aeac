//! Metrics, evaluation protocols, and artifact persistence.
//!
//! [`metrics`] scores ranked detector output, [`experiment`] runs the
//! four generation-and-attack protocols end to end, and [`persist`]
//! reads and writes the versioned artifact files the command line
//! exchanges between stages.

pub mod experiment;
pub mod metrics;
pub mod persist;

pub use experiment::{
    run_all, run_protocol, EvalStack, ExperimentConfig, Histogram, ProtocolResult, ResultTable,
};
pub use metrics::{auc, tp_at_fpr, Protocol, ScoreSet};
pub use persist::{
    load_json, load_weights, save_json, save_weights, ProjectionSummary, WeightsFile,
    WEIGHTS_FORMAT_VERSION,
};
