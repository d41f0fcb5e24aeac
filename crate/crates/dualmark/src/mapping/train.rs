//! AdamW training loop.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::loss::grad;
use super::model::{MappingModel, ParamSet};
use super::{Label, LabeledCorpus, TrainConfig};
use crate::error::{Error, Result};

/// AdamW optimizer: bias-corrected first and second moments with
/// decoupled weight decay. Moments are stored in parameter-shaped sets
/// aligned by tensor order.
#[derive(Debug, Clone)]
pub struct AdamW {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    m: ParamSet,
    v: ParamSet,
    t: u64,
}

impl AdamW {
    pub fn new(model: &MappingModel, learning_rate: f64, weight_decay: f64) -> Self {
        AdamW {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay,
            m: model.zeroed_params(),
            v: model.zeroed_params(),
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut ParamSet, grads: &ParamSet) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        let mut pt = params.tensors_mut();
        let gt = grads.tensors();
        let mut mt = self.m.tensors_mut();
        let mut vt = self.v.tensors_mut();
        for i in 0..pt.len() {
            let p = &mut pt[i].1;
            let g = gt[i].1;
            let m = &mut mt[i].1;
            let v = &mut vt[i].1;
            for k in 0..p.len() {
                m[k] = self.beta1 * m[k] + (1.0 - self.beta1) * g[k];
                v[k] = self.beta2 * v[k] + (1.0 - self.beta2) * g[k] * g[k];
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                // Decoupled decay: shrink the parameter directly, then
                // apply the adaptive step.
                p[k] -= self.learning_rate
                    * (m_hat / (v_hat.sqrt() + self.eps) + self.weight_decay * p[k]);
            }
        }
    }
}

/// Mean pairwise embedding cosine over up to `max_pairs` seeded pairs.
/// Uses all unordered pairs when there are few items, otherwise samples
/// index pairs uniformly.
pub fn estimate_mean_cos(corpus: &LabeledCorpus, seed: u64, max_pairs: usize) -> Result<f64> {
    let n = corpus.len();
    if n < 2 {
        return Err(Error::CorpusTooSmall { need: 2, got: n });
    }
    let total_pairs = n * (n - 1) / 2;
    let mut sum = 0.0;
    let mut count = 0usize;
    if total_pairs <= max_pairs {
        for i in 0..n {
            for j in (i + 1)..n {
                sum += corpus.items[i].0.cos(&corpus.items[j].0);
                count += 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while count < max_pairs {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            sum += corpus.items[i].0.cos(&corpus.items[j].0);
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Outcome of a training run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TrainReport {
    /// Mean batch loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// Similarity center used (estimated from the corpus unless given).
    pub mean_cos: f64,
    /// Total optimizer steps taken.
    pub steps: usize,
}

/// Trains the model in place. Deterministic for a fixed corpus, config
/// and seeds: epoch shuffles come from one seeded generator, batches are
/// consecutive shuffled slices, and trailing slices of fewer than two
/// items are skipped (the pairwise loss needs at least a pair).
pub fn train(
    model: &mut MappingModel,
    corpus: &LabeledCorpus,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    let benign = corpus.count(Label::Benign);
    let malicious = corpus.count(Label::Malicious);
    if benign < 2 || malicious < 2 {
        return Err(Error::CorpusUnbalanced(format!(
            "need >= 2 items per label, got {benign} benign / {malicious} malicious"
        )));
    }

    let mean_cos = match cfg.mean_cos {
        Some(x) => x,
        None => estimate_mean_cos(corpus, cfg.shuffle_seed, 10_000)?,
    };
    let loss_cfg = cfg.loss_config(mean_cos);

    let mut optimizer = AdamW::new(model, cfg.learning_rate, cfg.weight_decay);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.shuffle_seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut steps = 0usize;

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut n_batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            let batch: Vec<_> = chunk.iter().map(|&i| corpus.items[i].clone()).collect();
            let (grads, loss) = grad(model, &batch, &loss_cfg)?;
            optimizer.step(&mut model.params, &grads);
            loss_sum += loss;
            n_batches += 1;
            steps += 1;
        }
        epoch_losses.push(loss_sum / n_batches as f64);
    }

    Ok(TrainReport {
        epoch_losses,
        mean_cos,
        steps,
    })
}
