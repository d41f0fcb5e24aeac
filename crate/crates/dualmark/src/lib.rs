//! Dual-head language-model watermarking.
//!
//! The crate builds a watermarking scheme around a small mapping network
//! with two output heads that share a trunk. On benign text the heads
//! produce nearly identical signal vectors; on malicious text they are
//! trained to oppose each other. Watermark logits derived from the active
//! head bias token sampling, and three detection statistics (watermark
//! presence, head divergence, adversarial-head token polarity) separate
//! clean, watermarked, spoofed and machine-originated malicious text.
//!
//! Module map:
//! - [`textcodec`]: vocabulary, tokenizer, hashed n-gram text embeddings
//! - [`mapping`]: the two-headed mapping network, losses, training
//! - [`signal`]: vocabulary projection, watermark logits, head selection
//! - [`toylm`]: interpolated n-gram language model used as the generator
//! - [`pipeline`]: watermarked generation, detection scores, classification
//! - [`adversary`]: lexicon-based paraphrase and spoofing attacks
//! - [`corpus`]: bundled synthetic corpus, lexicon and vocabulary
//! - [`bench`]: metrics, evaluation protocols, artifact persistence

pub mod adversary;
pub mod bench;
pub mod corpus;
pub mod error;
pub mod mapping;
pub mod pipeline;
pub mod signal;
pub mod textcodec;
pub mod toylm;

pub use error::{Error, Result};
