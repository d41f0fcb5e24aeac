//! Interpolated n-gram language model used as the generation engine.
//!
//! Each order blends an additive-smoothed estimate with the next lower
//! order, weighted by how much evidence the context carries (Witten-Bell
//! style, `lambda = total / (total + distinct)`). Contexts never seen in
//! the corpus defer entirely to shorter ones, so generated text stays
//! close to corpus phrasing instead of dissolving into smoothing noise.
//!
//! Logits are raw scores measured against the context's least likely
//! token: `ln(p / min p)`, nonnegative, with plausible tokens several
//! units above the floor, the same shape as a neural LM's pre-softmax
//! outputs. The offset cancels in softmax, so sampling follows the
//! smoothed distribution exactly; it matters only to the multiplicative
//! watermark injection, which rescales logit values in place.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};

/// Anything that can propose next-token logits over a fixed vocabulary.
pub trait LanguageModel {
    fn vocab_size(&self) -> usize;
    /// Finite logits for every vocabulary id given a (possibly empty)
    /// context of previous tokens.
    fn next_logits(&self, context: &[u32]) -> Vec<f64>;
}

/// Count-based n-gram model with interpolated additive smoothing.
#[derive(Debug, Clone)]
pub struct NGramLM {
    pub order: usize,
    pub smoothing: f64,
    vocab_size: usize,
    /// counts[o-1]: context (last o-1 tokens) -> next-token counts.
    counts: Vec<HashMap<Vec<u32>, HashMap<u32, u32>>>,
    totals: Vec<HashMap<Vec<u32>, u32>>,
    /// Digest of the training token stream.
    pub corpus_fingerprint: u64,
}

impl NGramLM {
    /// Counts n-grams per document (contexts never cross documents).
    pub fn fit(docs: &[Vec<u32>], order: usize, smoothing: f64, vocab_size: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidConfig("order must be >= 1".into()));
        }
        if smoothing <= 0.0 {
            return Err(Error::InvalidConfig("smoothing must be > 0".into()));
        }
        if vocab_size < 2 {
            return Err(Error::InvalidConfig("vocab_size must be >= 2".into()));
        }
        if docs.iter().all(|d| d.is_empty()) {
            return Err(Error::EmptyCorpus("no tokens to fit on".into()));
        }
        let mut counts = vec![HashMap::new(); order];
        let mut totals = vec![HashMap::new(); order];
        let mut fp = 0xcbf2_9ce4_8422_2325u64;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        for doc in docs {
            for &tok in doc {
                if tok as usize >= vocab_size {
                    return Err(Error::InvalidConfig(format!(
                        "token id {tok} out of vocabulary range {vocab_size}"
                    )));
                }
                fp ^= tok as u64;
                fp = fp.wrapping_mul(PRIME);
            }
            fp = fp.wrapping_mul(PRIME) ^ 0xdead; // document separator
            for o in 1..=order {
                if doc.len() < o {
                    continue;
                }
                for w in doc.windows(o) {
                    let ctx = w[..o - 1].to_vec();
                    let next = w[o - 1];
                    *counts[o - 1]
                        .entry(ctx.clone())
                        .or_insert_with(HashMap::new)
                        .entry(next)
                        .or_insert(0) += 1;
                    *totals[o - 1].entry(ctx).or_insert(0) += 1;
                }
            }
        }
        Ok(NGramLM {
            order,
            smoothing,
            vocab_size,
            counts,
            totals,
            corpus_fingerprint: fp,
        })
    }

    /// Smoothed next-token distribution of a single order given its
    /// (order-1)-token context.
    fn order_probs(&self, o: usize, ctx: &[u32]) -> Vec<f64> {
        let v = self.vocab_size as f64;
        let total = self.totals[o - 1].get(ctx).copied().unwrap_or(0) as f64;
        let denom = total + self.smoothing * v;
        let empty = HashMap::new();
        let next = self.counts[o - 1].get(ctx).unwrap_or(&empty);
        (0..self.vocab_size as u32)
            .map(|y| (next.get(&y).copied().unwrap_or(0) as f64 + self.smoothing) / denom)
            .collect()
    }

    /// Interpolated smoothed probabilities. Starting from the smoothed
    /// unigram, each higher order o folds in its estimate with weight
    /// `lambda = total / (total + distinct)` where `total` counts the
    /// context's occurrences and `distinct` its distinct successors;
    /// orders whose context never occurred keep the lower-order blend.
    /// An empty context therefore reduces to the unigram distribution.
    pub fn next_probs(&self, context: &[u32]) -> Vec<f64> {
        let usable = self.order.min(context.len() + 1);
        let mut probs = self.order_probs(1, &[]);
        for o in 2..=usable {
            let ctx = &context[context.len() - (o - 1)..];
            let total = self.totals[o - 1].get(ctx).copied().unwrap_or(0) as f64;
            if total == 0.0 {
                continue;
            }
            let distinct = self.counts[o - 1].get(ctx).map_or(0, HashMap::len) as f64;
            let lambda = total / (total + distinct);
            for (p, q) in probs.iter_mut().zip(self.order_probs(o, ctx)) {
                *p = lambda * q + (1.0 - lambda) * *p;
            }
        }
        probs
    }
}

impl LanguageModel for NGramLM {
    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Floor-relative log probabilities: `ln(p(y|ctx) / min_y p)`. The
    /// least likely token scores exactly 0, everything else positive.
    fn next_logits(&self, context: &[u32]) -> Vec<f64> {
        let probs = self.next_probs(context);
        let floor = probs.iter().cloned().fold(f64::INFINITY, f64::min);
        probs.into_iter().map(|p| (p / floor).ln()).collect()
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Temperature below which sampling collapses to argmax.
pub const ARGMAX_TEMPERATURE: f64 = 1e-6;

/// Samples a token from `softmax(logits / temperature)`. Temperatures
/// below `ARGMAX_TEMPERATURE` pick the argmax, ties resolved to the
/// lowest id.
pub fn sample(logits: &[f64], temperature: f64, rng: &mut impl Rng) -> u32 {
    assert!(!logits.is_empty(), "cannot sample from empty logits");
    assert!(temperature >= 0.0, "temperature must be nonnegative");
    if temperature < ARGMAX_TEMPERATURE {
        let mut best = 0usize;
        for (i, &l) in logits.iter().enumerate() {
            if l > logits[best] {
                best = i;
            }
        }
        return best as u32;
    }
    let scaled: Vec<f64> = logits.iter().map(|l| l / temperature).collect();
    let probs = softmax(&scaled);
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return i as u32;
        }
    }
    (probs.len() - 1) as u32
}

/// Generation sampling parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SamplerConfig {
    pub temperature: f64,
    pub seed: u64,
    pub max_tokens: usize,
    /// Optional early-stop token.
    pub stop_token: Option<u32>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            temperature: 1.0,
            seed: 0,
            max_tokens: 200,
            stop_token: None,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.temperature < 0.0 {
            return Err(Error::InvalidConfig("temperature must be >= 0".into()));
        }
        if self.max_tokens == 0 {
            return Err(Error::InvalidConfig("max_tokens must be >= 1".into()));
        }
        Ok(())
    }
}
