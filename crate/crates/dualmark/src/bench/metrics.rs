//! Ranking metrics over detection scores.
//!
//! Both metrics treat a score set as a binary ranking problem: positives
//! should score above negatives. `auc` is the Mann-Whitney statistic
//! computed from midranks, so ties contribute one half and the value is
//! exact, not an approximation over thresholds.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pipeline::calibrate;

/// The four evaluation protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Watermarked generations against clean generations, ranked by the
    /// watermark presence score.
    Detectability,
    /// Paraphrased watermarked generations against clean generations,
    /// ranked by the watermark presence score.
    ParaRobustness,
    /// Spoofed watermarked text against paraphrased watermarked text,
    /// ranked by the head divergence score.
    SpoofRobustness,
    /// Spoofed watermarked text against machine-generated malicious
    /// text, ranked by the negated token polarity score.
    SpoofTraceability,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::Detectability,
        Protocol::ParaRobustness,
        Protocol::SpoofRobustness,
        Protocol::SpoofTraceability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Detectability => "detectability",
            Protocol::ParaRobustness => "para_robustness",
            Protocol::SpoofRobustness => "spoof_robustness",
            Protocol::SpoofTraceability => "spoof_traceability",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown protocol {s:?}")))
    }
}

/// Positive and negative score samples for one comparison.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScoreSet {
    pub positives: Vec<f64>,
    pub negatives: Vec<f64>,
}

impl ScoreSet {
    fn check(&self) -> Result<()> {
        if self.positives.is_empty() {
            return Err(Error::EmptyScores("positive scores"));
        }
        if self.negatives.is_empty() {
            return Err(Error::EmptyScores("negative scores"));
        }
        Ok(())
    }
}

/// Area under the ROC curve via the rank-sum identity. Positives and
/// negatives are pooled and ranked ascending; tied scores share their
/// midrank, so a tied positive-negative pair contributes exactly one
/// half, matching the pairwise definition.
pub fn auc(scores: &ScoreSet) -> Result<f64> {
    scores.check()?;
    let n_pos = scores.positives.len();
    let n_neg = scores.negatives.len();
    let mut pooled: Vec<(f64, bool)> = scores
        .positives
        .iter()
        .map(|&s| (s, true))
        .chain(scores.negatives.iter().map(|&s| (s, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // The tie group occupies ranks i+1 ..= j (1-based).
        let midrank = (i + 1 + j) as f64 / 2.0;
        for entry in &pooled[i..j] {
            if entry.1 {
                pos_rank_sum += midrank;
            }
        }
        i = j;
    }
    let u = pos_rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// True-positive rate at a fixed false-positive rate: the threshold is
/// calibrated on the negatives exactly as deployment calibration does,
/// and positives count only when strictly above it.
pub fn tp_at_fpr(scores: &ScoreSet, fpr: f64) -> Result<f64> {
    scores.check()?;
    let threshold = calibrate(&scores.positives, &scores.negatives, fpr)?;
    let hits = scores.positives.iter().filter(|&&s| s > threshold).count();
    Ok(hits as f64 / scores.positives.len() as f64)
}
