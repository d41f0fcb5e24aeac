//! From head signals to vocabulary-sized watermark logits.
//!
//! A seeded many-to-one projection assigns every vocabulary token to one
//! signal coordinate. Watermark logits are a squashed read-out of the
//! assigned coordinate; they multiply into the language-model logits so
//! the watermark strengthens already-plausible tokens whose coordinate is
//! positive and weakens those whose coordinate is negative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mapping::{HeadKind, MappingModel};
use crate::textcodec::Embedding;

/// Many-to-one map from vocabulary ids to signal coordinates. The
/// assignment is fully determined by (seed, signal_dim, vocab_size) and is
/// regenerated from those on load, so only the triple needs persisting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionMap {
    pub seed: u64,
    pub signal_dim: usize,
    pub assignment: Vec<u32>,
}

impl ProjectionMap {
    /// Seeded uniform assignment of each token to a coordinate.
    pub fn build(vocab_size: usize, signal_dim: usize, seed: u64) -> Result<Self> {
        if signal_dim == 0 || vocab_size == 0 {
            return Err(Error::InvalidConfig(
                "projection needs nonzero vocab and signal dims".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let assignment = (0..vocab_size)
            .map(|_| rng.gen_range(0..signal_dim as u32))
            .collect();
        Ok(ProjectionMap {
            seed,
            signal_dim,
            assignment,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.assignment.len()
    }

    /// Stable digest of the assignment, used to verify that a regenerated
    /// assignment matches the one a weight file was saved with.
    pub fn checksum(&self) -> u64 {
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = 0xcbf2_9ce4_8422_2325u64 ^ (self.signal_dim as u64);
        for &c in &self.assignment {
            for byte in c.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(PRIME);
            }
        }
        h
    }

    /// Bucket occupancy histogram (tokens per signal coordinate).
    pub fn bucket_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.signal_dim];
        for &c in &self.assignment {
            counts[c as usize] += 1;
        }
        counts
    }
}

/// Median absolute signal coordinate that deployment rescaling targets.
/// At the default logit scale of 1e-3 the typical tanh argument then
/// sits around 2.5, pushing most watermark logits close to their (-1, 1)
/// extremes.
pub const SATURATION_SCALE: f64 = 2500.0;

/// Injection-side parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InjectionConfig {
    /// Head-distance threshold for switching to the adversarial head.
    pub selection_threshold: f64,
    /// Head reselection period in generated tokens.
    pub window_len: usize,
    /// Scale applied to head signals before the tanh squash.
    pub logit_scale: f64,
    /// Multiplicative watermark strength on language-model logits.
    pub strength: f64,
}

impl Default for InjectionConfig {
    fn default() -> Self {
        InjectionConfig {
            selection_threshold: 1.7,
            window_len: 12,
            logit_scale: 1e-3,
            strength: 0.1,
        }
    }
}

impl InjectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.selection_threshold && self.selection_threshold < 2.0) {
            return Err(Error::InvalidConfig(
                "selection_threshold must be in (0, 2)".into(),
            ));
        }
        if self.window_len == 0 {
            return Err(Error::InvalidConfig("window_len must be >= 1".into()));
        }
        if self.logit_scale <= 0.0 {
            return Err(Error::InvalidConfig("logit_scale must be > 0".into()));
        }
        if self.strength < 0.0 {
            return Err(Error::InvalidConfig("strength must be >= 0".into()));
        }
        Ok(())
    }
}

/// Vocabulary-sized watermark logits in (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct WatermarkLogits {
    pub values: Vec<f64>,
}

/// Expands a head signal to vocabulary-sized watermark logits:
/// `values[token] = tanh(logit_scale * signal[assignment[token]])`. The
/// tanh is evaluated once per coordinate; tokens sharing a coordinate get
/// bit-identical values.
pub fn watermark_logits(
    signal: &[f64],
    projection: &ProjectionMap,
    logit_scale: f64,
) -> Result<WatermarkLogits> {
    if signal.len() != projection.signal_dim {
        return Err(Error::DimMismatch {
            context: "watermark projection",
            expected: projection.signal_dim,
            got: signal.len(),
        });
    }
    let squashed: Vec<f64> = signal.iter().map(|s| (logit_scale * s).tanh()).collect();
    let values = projection
        .assignment
        .iter()
        .map(|&c| squashed[c as usize])
        .collect();
    Ok(WatermarkLogits { values })
}

/// Watermark logit of a single token under a head signal.
pub fn watermark_logit_of(
    signal: &[f64],
    projection: &ProjectionMap,
    logit_scale: f64,
    token: u32,
) -> Result<f64> {
    if signal.len() != projection.signal_dim {
        return Err(Error::DimMismatch {
            context: "watermark projection",
            expected: projection.signal_dim,
            got: signal.len(),
        });
    }
    let coord = *projection
        .assignment
        .get(token as usize)
        .ok_or(Error::DimMismatch {
            context: "token id vs projection vocab",
            expected: projection.vocab_size(),
            got: token as usize,
        })?;
    Ok((logit_scale * signal[coord as usize]).tanh())
}

/// Cosine distance between the two head signals of one embedding:
/// `1 - cos(standard, adversarial)`, in [0, 2]. A near-zero signal norm
/// is reported as `ZeroSignal`; callers treat that as distance 0 (benign)
/// so detection fails safe.
pub fn head_distance(model: &MappingModel, e: &Embedding) -> Result<f64> {
    let (s, a) = model.forward(e)?;
    let ns = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ns < 1e-12 || na < 1e-12 {
        return Err(Error::ZeroSignal);
    }
    let dot: f64 = s.iter().zip(&a).map(|(x, y)| x * y).sum();
    let cos = (dot / (ns * na)).clamp(-1.0, 1.0);
    Ok(1.0 - cos)
}

/// Threshold rule for the active head: distances at or above the
/// threshold select the adversarial head (ties go adversarial).
pub fn select_head(distance: f64, threshold: f64) -> HeadKind {
    if distance < threshold {
        HeadKind::Standard
    } else {
        HeadKind::Adversarial
    }
}

/// Multiplicative watermark injection:
/// `out[j] = lm[j] * (1 + strength * wm[j])`.
pub fn inject(lm_logits: &[f64], wm: &WatermarkLogits, strength: f64) -> Result<Vec<f64>> {
    if lm_logits.len() != wm.values.len() {
        return Err(Error::DimMismatch {
            context: "logit injection",
            expected: lm_logits.len(),
            got: wm.values.len(),
        });
    }
    Ok(lm_logits
        .iter()
        .zip(&wm.values)
        .map(|(l, w)| l * (1.0 + strength * w))
        .collect())
}
