//! The two-headed mapping network and its training.
//!
//! A shared residual trunk feeds two affine heads. Both heads are trained
//! to respect text similarity (signal cosines track a sharpened version
//! of embedding cosines) while a contrastive term makes the heads agree
//! on benign text and oppose each other on malicious text. The cosine gap
//! between the heads is what detection later uses to spot adversarial
//! content.

mod loss;
mod model;
mod train;

pub use loss::{
    contrastive_loss, finite_difference_grads, grad, semantic_loss, total_loss, LossConfig,
    SimilarityScale,
};
pub use model::{Affine, ForwardCache, MappingModel, ParamSet};
pub use train::{estimate_mean_cos, train, AdamW, TrainReport};

use crate::error::{Error, Result};
use crate::textcodec::Embedding;

/// Which output head of the mapping network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadKind {
    Standard,
    Adversarial,
}

/// Text polarity label used for training and attack bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Benign,
    Malicious,
}

/// Network shape and initialization parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelConfig {
    /// Input embedding dimensionality.
    pub input_dim: usize,
    /// Trunk width.
    pub hidden_dim: usize,
    /// Number of residual trunk blocks after the input projection.
    pub n_blocks: usize,
    /// Signal dimensionality of each head. Must be even so signal
    /// coordinates can balance sign-symmetrically.
    pub signal_dim: usize,
    /// Seed for uniform parameter initialization.
    pub init_seed: u64,
    /// Initial value of the learnable per-head output gain. Kept modest
    /// during training so the cosine terms stay well-conditioned; the
    /// gains are rescaled after training (see
    /// [`MappingModel::rescale_signal_median`]) so that
    /// tanh(logit_scale * signal) saturates at deployment.
    pub head_gain_init: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            input_dim: 128,
            hidden_dim: 256,
            n_blocks: 2,
            signal_dim: 300,
            init_seed: 0x5106_11ab,
            head_gain_init: 10.0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.signal_dim < 2 || self.signal_dim % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "signal_dim must be even and >= 2, got {}",
                self.signal_dim
            )));
        }
        if self.input_dim == 0 || self.hidden_dim == 0 {
            return Err(Error::InvalidConfig(
                "input_dim and hidden_dim must be positive".into(),
            ));
        }
        if self.head_gain_init <= 0.0 {
            return Err(Error::InvalidConfig("head_gain_init must be > 0".into()));
        }
        Ok(())
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    /// Sharpness of the similarity target curve (tanh slope).
    pub sharpness: f64,
    /// Contrastive hinge margin: malicious head cosines are pushed at or
    /// below its negation.
    pub margin: f64,
    /// Weight of the contrastive term in the total loss.
    pub contrastive_weight: f64,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Seed for corpus shuffling and mean-cosine pair sampling.
    pub shuffle_seed: u64,
    /// Center of the similarity target curve. `None` means estimate it
    /// from the corpus before training.
    pub mean_cos: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sharpness: 20.0,
            margin: 0.9,
            contrastive_weight: 1.0,
            learning_rate: 2e-4,
            weight_decay: 0.01,
            batch_size: 32,
            epochs: 40,
            shuffle_seed: 0x7a11,
            mean_cos: None,
        }
    }
}

impl TrainConfig {
    /// The recipe validated against the bundled synthetic corpus. The
    /// contrastive weight is raised well above the default because the
    /// semantic term sums over all batch pairs (~500 summands at batch
    /// 32) while the contrastive term has one summand per item; parity
    /// between the two requires a weight on the order of the batch size.
    pub fn for_bundled_corpus() -> Self {
        TrainConfig {
            contrastive_weight: 100.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sharpness <= 0.0 {
            return Err(Error::InvalidConfig("sharpness must be > 0".into()));
        }
        if !(0.0 < self.margin && self.margin <= 1.0) {
            return Err(Error::InvalidConfig("margin must be in (0, 1]".into()));
        }
        if self.contrastive_weight < 0.0 {
            return Err(Error::InvalidConfig(
                "contrastive_weight must be >= 0".into(),
            ));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.batch_size < 2 {
            return Err(Error::InvalidConfig("batch_size must be >= 2".into()));
        }
        Ok(())
    }

    /// Loss parameters with the similarity center resolved.
    pub fn loss_config(&self, mean_cos: f64) -> LossConfig {
        LossConfig {
            scale: SimilarityScale {
                sharpness: self.sharpness,
                center: mean_cos,
            },
            margin: self.margin,
            contrastive_weight: self.contrastive_weight,
        }
    }
}

/// Labeled embedding corpus for training.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    pub items: Vec<(Embedding, Label)>,
    pub provenance: String,
}

impl LabeledCorpus {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.items.iter().filter(|(_, l)| *l == label).count()
    }
}
