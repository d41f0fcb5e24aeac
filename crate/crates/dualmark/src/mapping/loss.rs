//! Training losses and gradients.
//!
//! The semantic loss ties signal-space cosines to a sharpened image of
//! embedding-space cosines and adds two L1 terms: each signal's
//! coordinate sum (per-item balance) and each coordinate's batch sum
//! (per-coordinate unbiasedness). The contrastive loss aligns the two
//! heads on benign items and pushes their cosine below the negated margin
//! on malicious items.
//!
//! Conventions at non-differentiable points: absolute values and the
//! hinge corner use subgradient 0, and a cosine involving a zero-norm
//! vector is defined as 0 with zero gradient.

use super::model::{ForwardCache, MappingModel, ParamSet};
use super::{HeadKind, Label};
use crate::error::{Error, Result};
use crate::textcodec::Embedding;

/// Norms below this are treated as zero vectors for cosine purposes.
const NORM_EPS: f64 = 1e-12;

/// Maps a raw cosine similarity to a training target through a sharp tanh
/// centered at the corpus mean cosine.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimilarityScale {
    pub sharpness: f64,
    pub center: f64,
}

impl SimilarityScale {
    pub fn apply(&self, x: f64) -> f64 {
        (self.sharpness * (x - self.center)).tanh()
    }
}

/// Resolved loss parameters (similarity center already estimated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub scale: SimilarityScale,
    pub margin: f64,
    pub contrastive_weight: f64,
}

fn subgrad_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

struct CosParts {
    c: f64,
    na: f64,
    nb: f64,
    defined: bool,
}

fn cos_parts(a: &[f64], b: &[f64]) -> CosParts {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na < NORM_EPS || nb < NORM_EPS {
        return CosParts {
            c: 0.0,
            na,
            nb,
            defined: false,
        };
    }
    let dot = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    CosParts {
        c: dot / (na * nb),
        na,
        nb,
        defined: true,
    }
}

/// Accumulates `coeff * d cos(a,b)/da` into `da` and the symmetric term
/// into `db`. No-op when the cosine is undefined (zero-gradient
/// convention).
fn add_cos_grad(a: &[f64], b: &[f64], parts: &CosParts, coeff: f64, da: &mut [f64], db: &mut [f64]) {
    if !parts.defined || coeff == 0.0 {
        return;
    }
    let inv_ab = 1.0 / (parts.na * parts.nb);
    let ca = parts.c / (parts.na * parts.na);
    let cb = parts.c / (parts.nb * parts.nb);
    for k in 0..a.len() {
        da[k] += coeff * (b[k] * inv_ab - ca * a[k]);
        db[k] += coeff * (a[k] * inv_ab - cb * b[k]);
    }
}

/// Upper-triangular pair targets from embedding cosines.
fn pair_targets(batch: &[Embedding], scale: &SimilarityScale) -> Vec<f64> {
    let n = batch.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(scale.apply(batch[i].cos(&batch[j])));
        }
    }
    out
}

/// Semantic loss terms for one head, with optional gradient accumulation
/// into per-item signal gradients. The single code path guarantees the
/// loss value reported by `grad` matches `semantic_loss` bit for bit.
///
/// Summation order: all pairs (i-major), then per-item balance terms,
/// then per-coordinate unbiasedness terms.
fn semantic_terms(
    signals: &[Vec<f64>],
    targets: &[f64],
    mut dsig: Option<&mut [Vec<f64>]>,
) -> f64 {
    let n = signals.len();
    let m = signals[0].len();
    let mut loss = 0.0;

    let mut pair_idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let target = targets[pair_idx];
            pair_idx += 1;
            let parts = cos_parts(&signals[i], &signals[j]);
            loss += (target - parts.c).abs();
            if let Some(ds) = dsig.as_deref_mut() {
                // d|target - c|/dc = -sign(target - c).
                let coeff = -subgrad_sign(target - parts.c);
                let (left, right) = ds.split_at_mut(j);
                add_cos_grad(
                    &signals[i],
                    &signals[j],
                    &parts,
                    coeff,
                    &mut left[i],
                    &mut right[0],
                );
            }
        }
    }

    for (i, sig) in signals.iter().enumerate() {
        let row_sum: f64 = sig.iter().sum();
        loss += row_sum.abs();
        if let Some(ds) = dsig.as_deref_mut() {
            let g = subgrad_sign(row_sum);
            if g != 0.0 {
                ds[i].iter_mut().for_each(|d| *d += g);
            }
        }
    }

    for j in 0..m {
        let col_sum: f64 = signals.iter().map(|s| s[j]).sum();
        loss += col_sum.abs();
        if let Some(ds) = dsig.as_deref_mut() {
            let g = subgrad_sign(col_sum);
            if g != 0.0 {
                for d in ds.iter_mut() {
                    d[j] += g;
                }
            }
        }
    }

    loss
}

/// Contrastive terms, with optional gradient accumulation scaled by
/// `grad_coeff` (the contrastive weight). Returns the unweighted loss.
fn contrastive_terms(
    sig_s: &[Vec<f64>],
    sig_a: &[Vec<f64>],
    labels: &[Label],
    margin: f64,
    mut dsig: Option<(&mut [Vec<f64>], &mut [Vec<f64>], f64)>,
) -> f64 {
    let mut loss = 0.0;
    for i in 0..labels.len() {
        let parts = cos_parts(&sig_s[i], &sig_a[i]);
        match labels[i] {
            Label::Benign => {
                loss += -parts.c;
                if let Some((ds, da, w)) = dsig.as_mut() {
                    add_cos_grad(&sig_s[i], &sig_a[i], &parts, -*w, &mut ds[i], &mut da[i]);
                }
            }
            Label::Malicious => {
                let hinge = parts.c + margin;
                if hinge > 0.0 {
                    loss += hinge;
                    if let Some((ds, da, w)) = dsig.as_mut() {
                        add_cos_grad(&sig_s[i], &sig_a[i], &parts, *w, &mut ds[i], &mut da[i]);
                    }
                }
            }
        }
    }
    loss
}

fn forward_batch(model: &MappingModel, embeddings: &[&Embedding]) -> Result<Vec<ForwardCache>> {
    embeddings.iter().map(|e| model.forward_cached(e)).collect()
}

/// Semantic loss of one head over a batch of at least two embeddings.
pub fn semantic_loss(
    model: &MappingModel,
    batch: &[Embedding],
    scale: &SimilarityScale,
    head: HeadKind,
) -> Result<f64> {
    if batch.len() < 2 {
        return Err(Error::BatchTooSmall {
            need: 2,
            got: batch.len(),
        });
    }
    let caches = forward_batch(model, &batch.iter().collect::<Vec<_>>())?;
    let signals: Vec<Vec<f64>> = caches
        .into_iter()
        .map(|c| match head {
            HeadKind::Standard => c.sig_s,
            HeadKind::Adversarial => c.sig_a,
        })
        .collect();
    let targets = pair_targets(batch, scale);
    Ok(semantic_terms(&signals, &targets, None))
}

/// Contrastive head-agreement loss over a labeled batch.
pub fn contrastive_loss(
    model: &MappingModel,
    batch: &[(Embedding, Label)],
    margin: f64,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::BatchTooSmall { need: 1, got: 0 });
    }
    let caches = forward_batch(model, &batch.iter().map(|(e, _)| e).collect::<Vec<_>>())?;
    let (sig_s, sig_a): (Vec<_>, Vec<_>) = caches.into_iter().map(|c| (c.sig_s, c.sig_a)).unzip();
    let labels: Vec<Label> = batch.iter().map(|(_, l)| *l).collect();
    Ok(contrastive_terms(&sig_s, &sig_a, &labels, margin, None))
}

/// Total training loss. Evaluates exactly
/// `semantic(standard) + semantic(adversarial) + weight * contrastive`,
/// in that order; `grad` reproduces the same value bit for bit.
pub fn total_loss(
    model: &MappingModel,
    batch: &[(Embedding, Label)],
    cfg: &LossConfig,
) -> Result<f64> {
    let embeddings: Vec<Embedding> = batch.iter().map(|(e, _)| e.clone()).collect();
    let sem_s = semantic_loss(model, &embeddings, &cfg.scale, HeadKind::Standard)?;
    let sem_a = semantic_loss(model, &embeddings, &cfg.scale, HeadKind::Adversarial)?;
    let con = contrastive_loss(model, batch, cfg.margin)?;
    Ok(sem_s + sem_a + cfg.contrastive_weight * con)
}

/// Analytic gradient of the total loss over a batch, plus the loss value.
/// Backpropagates through the shared trunk once per item with the summed
/// head-signal gradients.
pub fn grad(
    model: &MappingModel,
    batch: &[(Embedding, Label)],
    cfg: &LossConfig,
) -> Result<(ParamSet, f64)> {
    if batch.len() < 2 {
        return Err(Error::BatchTooSmall {
            need: 2,
            got: batch.len(),
        });
    }
    let embeddings: Vec<Embedding> = batch.iter().map(|(e, _)| e.clone()).collect();
    let labels: Vec<Label> = batch.iter().map(|(_, l)| *l).collect();
    let caches = forward_batch(model, &embeddings.iter().collect::<Vec<_>>())?;
    let sig_s: Vec<Vec<f64>> = caches.iter().map(|c| c.sig_s.clone()).collect();
    let sig_a: Vec<Vec<f64>> = caches.iter().map(|c| c.sig_a.clone()).collect();

    let m = model.cfg.signal_dim;
    let n = batch.len();
    let mut d_s = vec![vec![0.0; m]; n];
    let mut d_a = vec![vec![0.0; m]; n];

    let targets = pair_targets(&embeddings, &cfg.scale);
    let sem_s = semantic_terms(&sig_s, &targets, Some(&mut d_s));
    let sem_a = semantic_terms(&sig_a, &targets, Some(&mut d_a));
    let con = contrastive_terms(
        &sig_s,
        &sig_a,
        &labels,
        cfg.margin,
        Some((&mut d_s, &mut d_a, cfg.contrastive_weight)),
    );
    let loss = sem_s + sem_a + cfg.contrastive_weight * con;

    let mut grads = model.zeroed_params();
    for i in 0..n {
        model.backward(&caches[i], &d_s[i], &d_a[i], &mut grads);
    }
    Ok((grads, loss))
}

/// Central finite-difference gradient of the total loss, used to verify
/// the analytic gradient. Each parameter is perturbed by +/-h with exact
/// restore.
pub fn finite_difference_grads(
    model: &MappingModel,
    batch: &[(Embedding, Label)],
    cfg: &LossConfig,
    h: f64,
) -> Result<ParamSet> {
    let mut work = model.clone();
    let mut out = model.zeroed_params();
    let n_tensors = work.params.tensors().len();
    for ti in 0..n_tensors {
        let len = work.params.tensors()[ti].1.len();
        for i in 0..len {
            let orig = work.params.tensors()[ti].1[i];
            work.params.tensors_mut()[ti].1[i] = orig + h;
            let fp = total_loss(&work, batch, cfg)?;
            work.params.tensors_mut()[ti].1[i] = orig - h;
            let fm = total_loss(&work, batch, cfg)?;
            work.params.tensors_mut()[ti].1[i] = orig;
            out.tensors_mut()[ti].1[i] = (fp - fm) / (2.0 * h);
        }
    }
    Ok(out)
}
