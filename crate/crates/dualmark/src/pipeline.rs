//! Watermarked generation and three-score detection.
//!
//! Generation walks the language model token by token, reselecting the
//! active head at fixed window boundaries from the dual-head distance of
//! the conditioning text, and biases the LM logits with the active head's
//! watermark logits. Detection replays the same head-selection rule on
//! the candidate text alone (no prompt is available at detection time)
//! and aggregates three scores: mean watermark logit of the observed
//! tokens (presence), mean head distance at window boundaries (spoof
//! sensitivity), and the fraction of positive watermark logits at
//! adversarial-head positions (origin attribution).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mapping::{HeadKind, MappingModel};
use crate::signal::{
    head_distance, inject, select_head, watermark_logit_of, watermark_logits, InjectionConfig,
    ProjectionMap,
};
use crate::textcodec::{embed, embed_window, EncoderConfig};
use crate::toylm::{sample, LanguageModel, SamplerConfig};

/// Longest conditioning-text suffix (in tokens) fed to the encoder when
/// computing the boundary head distance.
pub const MAX_DIST_PREFIX: usize = 512;

/// One generated position in the audit trace.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TraceStep {
    /// 1-indexed position over generated tokens (the prompt does not
    /// count).
    pub t: usize,
    pub token: u32,
    /// Head active when this token was sampled.
    pub head: HeadKind,
    /// Watermark logit of the sampled token under the active head.
    pub wm_logit: f64,
    /// Head distance measured at this window boundary. `None` off
    /// boundaries, and at a boundary whose conditioning text is empty
    /// (reselection is skipped there and the current head carries over).
    pub boundary_dist: Option<f64>,
}

/// Everything needed to audit one generation run.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct GenerationTrace {
    pub steps: Vec<TraceStep>,
}

impl GenerationTrace {
    /// Head sequence, one entry per generated token.
    pub fn heads(&self) -> Vec<HeadKind> {
        self.steps.iter().map(|s| s.head).collect()
    }

    /// Mean stored watermark logit: the trace-side view of the presence
    /// score. Zero for an empty trace.
    pub fn mean_wm_logit(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().map(|s| s.wm_logit).sum::<f64>() / self.steps.len() as f64
    }
}

/// Where a threshold set came from.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdProvenance {
    Default,
    Calibrated { dataset: String, target_fpr: f64 },
}

/// Decision thresholds for the four-way label tree.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThresholdSet {
    /// Watermark-presence threshold; the zero default encodes "any
    /// positive mean logit counts as watermarked".
    pub theta_wd: f64,
    /// Spoof threshold on the mean boundary head distance, in [0, 2].
    pub theta_sd: f64,
    /// Attribution threshold on the adversarial-positive fraction, in
    /// [0, 1].
    pub theta_st: f64,
    pub provenance: ThresholdProvenance,
}

impl Default for ThresholdSet {
    fn default() -> Self {
        ThresholdSet {
            theta_wd: 0.0,
            theta_sd: 1.7,
            theta_st: 0.5,
            provenance: ThresholdProvenance::Default,
        }
    }
}

impl ThresholdSet {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.theta_sd) {
            return Err(Error::InvalidConfig("theta_sd must be in [0, 2]".into()));
        }
        if !(0.0..=1.0).contains(&self.theta_st) {
            return Err(Error::InvalidConfig("theta_st must be in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Detection verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionLabel {
    Unwatermarked,
    Watermarked,
    SpoofedWatermarked,
    MaliciousWatermarked,
}

/// Per-boundary diagnostic retained in the detection report.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WindowDiag {
    /// 1-indexed boundary position.
    pub t: usize,
    /// Head distance, `None` for the skipped empty-prefix boundary.
    pub dist: Option<f64>,
    /// Head active from this boundary on.
    pub head: HeadKind,
}

/// Full detection outcome.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectionReport {
    pub score_wd: f64,
    pub score_sd: f64,
    pub score_st: f64,
    /// Number of positions scored under the adversarial head.
    pub n_adv_tokens: usize,
    /// True when no adversarial positions existed; `score_st` is then a
    /// 0.0 placeholder and the label falls back to `watermarked`.
    pub st_undefined: bool,
    pub label: DetectionLabel,
    pub thresholds: ThresholdSet,
    pub per_window: Vec<WindowDiag>,
}

/// Four-way decision tree over the three scores. With no adversarial
/// positions the attribution score is undefined and a watermarked text
/// cannot be blamed on the model, so the tree fails benign.
pub fn classify(
    score_wd: f64,
    score_sd: f64,
    score_st: f64,
    n_adv_tokens: usize,
    thresholds: &ThresholdSet,
) -> DetectionLabel {
    if score_wd < thresholds.theta_wd {
        return DetectionLabel::Unwatermarked;
    }
    if n_adv_tokens == 0 {
        return DetectionLabel::Watermarked;
    }
    if score_sd < thresholds.theta_sd {
        return DetectionLabel::Watermarked;
    }
    if score_st < thresholds.theta_st {
        DetectionLabel::SpoofedWatermarked
    } else {
        DetectionLabel::MaliciousWatermarked
    }
}

/// Mean of the present boundary distances; no evaluated boundaries at
/// all (every one skipped, or text shorter than one window) means no
/// spoof evidence, so the mean defaults to 0.
fn mean_boundary_dist(windows: &[WindowDiag]) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for w in windows {
        if let Some(d) = w.dist {
            sum += d;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Threshold at the (1 - `target_fpr`) quantile of the negative scores,
/// with linear interpolation between order statistics. Higher scores
/// mean "more positive"; a text scores positive when it exceeds the
/// threshold.
pub fn calibrate(positives: &[f64], negatives: &[f64], target_fpr: f64) -> Result<f64> {
    if positives.is_empty() {
        return Err(Error::EmptyScores("positive scores"));
    }
    if negatives.is_empty() {
        return Err(Error::EmptyScores("negative scores"));
    }
    if !(0.0 < target_fpr && target_fpr < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "target_fpr must be in (0, 1), got {target_fpr}"
        )));
    }
    let mut sorted = negatives.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_r7(&sorted, 1.0 - target_fpr))
}

/// Linear-interpolation quantile (the numpy/Excel default) of an
/// ascending slice.
fn quantile_r7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Plain sampling loop without watermark bias: the strength-zero
/// reference generation.
pub fn generate_unwatermarked(
    lm: &dyn LanguageModel,
    sampler: &SamplerConfig,
    prompt: &[u32],
) -> Result<Vec<u32>> {
    sampler.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut conditioning = prompt.to_vec();
    let mut out = Vec::new();
    for _ in 1..=sampler.max_tokens {
        let logits = lm.next_logits(&conditioning);
        let y = sample(&logits, sampler.temperature, &mut rng);
        if sampler.stop_token == Some(y) {
            break;
        }
        conditioning.push(y);
        out.push(y);
    }
    Ok(out)
}

/// A trained mapping model bundled with its encoding, projection, and
/// injection parameters. Shared read-only across generation and
/// detection jobs.
pub struct Watermarker<'a> {
    model: &'a MappingModel,
    projection: &'a ProjectionMap,
    encoder: &'a EncoderConfig,
    injection: &'a InjectionConfig,
}

/// Per-position replay of the head-selection rule on candidate text.
struct Replay {
    /// Active head per position.
    heads: Vec<HeadKind>,
    /// Watermark logit of the observed token per position.
    wm_logits: Vec<f64>,
    windows: Vec<WindowDiag>,
}

impl<'a> Watermarker<'a> {
    pub fn new(
        model: &'a MappingModel,
        projection: &'a ProjectionMap,
        encoder: &'a EncoderConfig,
        injection: &'a InjectionConfig,
    ) -> Result<Self> {
        encoder.validate()?;
        injection.validate()?;
        if encoder.dim != model.cfg.input_dim {
            return Err(Error::DimMismatch {
                context: "encoder dim vs mapping model input",
                expected: model.cfg.input_dim,
                got: encoder.dim,
            });
        }
        if projection.signal_dim != model.cfg.signal_dim {
            return Err(Error::DimMismatch {
                context: "projection vs mapping model signal dim",
                expected: model.cfg.signal_dim,
                got: projection.signal_dim,
            });
        }
        Ok(Watermarker {
            model,
            projection,
            encoder,
            injection,
        })
    }

    /// The injection parameters this watermarker runs with.
    pub fn injection(&self) -> &InjectionConfig {
        self.injection
    }

    /// Head distance of the conditioning text, `None` when it is empty
    /// (nothing to condition on, reselection is skipped). A zero-norm
    /// signal counts as zero distance so detection fails benign.
    fn boundary_distance(&self, conditioning: &[u32]) -> Result<Option<f64>> {
        if conditioning.is_empty() {
            return Ok(None);
        }
        let start = conditioning.len().saturating_sub(MAX_DIST_PREFIX);
        let e = embed(&conditioning[start..], self.encoder)?;
        match head_distance(self.model, &e) {
            Ok(d) => Ok(Some(d)),
            Err(Error::ZeroSignal) => Ok(Some(0.0)),
            Err(other) => Err(other),
        }
    }

    /// Watermarked generation. Positions are 1-indexed over generated
    /// tokens; at every position with (t - 1) mod window_len = 0 the
    /// head is reselected from the full conditioning text (prompt plus
    /// generated output so far). The trace records, per token, the head,
    /// the sampled token's watermark logit, and the boundary distance
    /// where one was measured.
    pub fn generate(
        &self,
        lm: &dyn LanguageModel,
        sampler: &SamplerConfig,
        prompt: &[u32],
    ) -> Result<(Vec<u32>, GenerationTrace)> {
        sampler.validate()?;
        if lm.vocab_size() != self.projection.vocab_size() {
            return Err(Error::DimMismatch {
                context: "language model vs projection vocabulary",
                expected: self.projection.vocab_size(),
                got: lm.vocab_size(),
            });
        }
        let k = self.injection.window_len;
        let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
        let mut conditioning = prompt.to_vec();
        let mut out = Vec::new();
        let mut steps = Vec::new();
        let mut head = HeadKind::Standard;
        for t in 1..=sampler.max_tokens {
            let mut boundary_dist = None;
            if (t - 1) % k == 0 {
                if let Some(d) = self.boundary_distance(&conditioning)? {
                    head = select_head(d, self.injection.selection_threshold);
                    boundary_dist = Some(d);
                }
            }
            let e = embed_window(&conditioning, conditioning.len() + 1, self.encoder);
            let (sig_s, sig_a) = self.model.forward(&e)?;
            let sig = match head {
                HeadKind::Standard => sig_s,
                HeadKind::Adversarial => sig_a,
            };
            let wm = watermark_logits(&sig, self.projection, self.injection.logit_scale)?;
            let lm_logits = lm.next_logits(&conditioning);
            let biased = inject(&lm_logits, &wm, self.injection.strength)?;
            let y = sample(&biased, sampler.temperature, &mut rng);
            if sampler.stop_token == Some(y) {
                break;
            }
            steps.push(TraceStep {
                t,
                token: y,
                head,
                wm_logit: wm.values[y as usize],
                boundary_dist,
            });
            conditioning.push(y);
            out.push(y);
        }
        Ok((out, GenerationTrace { steps }))
    }

    /// Replays head selection over candidate text exactly as generation
    /// would have run it with an empty prompt: same boundary cadence,
    /// same skip of the empty first prefix, same window embeddings.
    fn replay(&self, tokens: &[u32]) -> Result<Replay> {
        if tokens.is_empty() {
            return Err(Error::EmptyText);
        }
        let k = self.injection.window_len;
        let mut head = HeadKind::Standard;
        let mut heads = Vec::with_capacity(tokens.len());
        let mut wm_logits = Vec::with_capacity(tokens.len());
        let mut windows = Vec::new();
        for t in 1..=tokens.len() {
            if (t - 1) % k == 0 {
                let dist = self.boundary_distance(&tokens[..t - 1])?;
                if let Some(d) = dist {
                    head = select_head(d, self.injection.selection_threshold);
                }
                windows.push(WindowDiag { t, dist, head });
            }
            let e = embed_window(tokens, t, self.encoder);
            let (sig_s, sig_a) = self.model.forward(&e)?;
            let sig = match head {
                HeadKind::Standard => sig_s,
                HeadKind::Adversarial => sig_a,
            };
            wm_logits.push(watermark_logit_of(
                &sig,
                self.projection,
                self.injection.logit_scale,
                tokens[t - 1],
            )?);
            heads.push(head);
        }
        Ok(Replay {
            heads,
            wm_logits,
            windows,
        })
    }

    /// Detection-side head sequence, one entry per token.
    pub fn head_replay(&self, tokens: &[u32]) -> Result<Vec<HeadKind>> {
        Ok(self.replay(tokens)?.heads)
    }

    /// Mean watermark logit of the observed tokens under the replayed
    /// heads.
    pub fn score_wd(&self, tokens: &[u32]) -> Result<f64> {
        let replay = self.replay(tokens)?;
        Ok(replay.wm_logits.iter().sum::<f64>() / replay.wm_logits.len() as f64)
    }

    /// Mean head distance over evaluated window boundaries.
    pub fn score_sd(&self, tokens: &[u32]) -> Result<f64> {
        Ok(mean_boundary_dist(&self.replay(tokens)?.windows))
    }

    /// Fraction of adversarial-head positions whose observed token has a
    /// positive watermark logit, with the number of such positions.
    /// No adversarial positions yields (0.0, 0).
    pub fn score_st(&self, tokens: &[u32]) -> Result<(f64, usize)> {
        let replay = self.replay(tokens)?;
        Ok(st_from_replay(&replay))
    }

    /// Runs one replay, derives all three scores, and labels the text.
    pub fn detect(&self, tokens: &[u32], thresholds: &ThresholdSet) -> Result<DetectionReport> {
        thresholds.validate()?;
        let replay = self.replay(tokens)?;
        let score_wd = replay.wm_logits.iter().sum::<f64>() / replay.wm_logits.len() as f64;
        let score_sd = mean_boundary_dist(&replay.windows);
        let (score_st, n_adv_tokens) = st_from_replay(&replay);
        let label = classify(score_wd, score_sd, score_st, n_adv_tokens, thresholds);
        Ok(DetectionReport {
            score_wd,
            score_sd,
            score_st,
            n_adv_tokens,
            st_undefined: n_adv_tokens == 0,
            label,
            thresholds: thresholds.clone(),
            per_window: replay.windows,
        })
    }
}

fn st_from_replay(replay: &Replay) -> (f64, usize) {
    let mut n = 0usize;
    let mut positive = 0usize;
    for (head, wm) in replay.heads.iter().zip(&replay.wm_logits) {
        if *head == HeadKind::Adversarial {
            n += 1;
            if *wm > 0.0 {
                positive += 1;
            }
        }
    }
    if n == 0 {
        (0.0, 0)
    } else {
        (positive as f64 / n as f64, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::ModelConfig;
    use crate::toylm::NGramLM;
    use rand::{Rng, SeedableRng};

    const VOCAB: usize = 40;

    fn fixture_lm() -> NGramLM {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let docs: Vec<Vec<u32>> = (0..30)
            .map(|_| {
                let mut tok = rng.gen_range(0..VOCAB as u32);
                (0..60)
                    .map(|_| {
                        // Drifting walk so the model has real structure.
                        tok = (tok + rng.gen_range(1..4)) % VOCAB as u32;
                        tok
                    })
                    .collect()
            })
            .collect();
        NGramLM::fit(&docs, 3, 0.1, VOCAB).unwrap()
    }

    fn fixture_model() -> MappingModel {
        MappingModel::init(&ModelConfig {
            input_dim: 32,
            hidden_dim: 16,
            n_blocks: 2,
            signal_dim: 8,
            init_seed: 7,
            head_gain_init: 10.0,
        })
        .unwrap()
    }

    fn fixture_enc() -> EncoderConfig {
        EncoderConfig {
            dim: 32,
            ..Default::default()
        }
    }

    fn fixture_proj() -> ProjectionMap {
        ProjectionMap::build(VOCAB, 8, 99).unwrap()
    }

    // The untrained fixture's boundary distances land around 0.8-0.95,
    // so this threshold makes both heads reachable in tests.
    fn switchy_injection() -> InjectionConfig {
        InjectionConfig {
            selection_threshold: 0.9,
            ..Default::default()
        }
    }

    #[test]
    fn strength_zero_equals_unwatermarked_generation() {
        let (lm, model, enc, proj) = (fixture_lm(), fixture_model(), fixture_enc(), fixture_proj());
        let inj = InjectionConfig {
            strength: 0.0,
            ..Default::default()
        };
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        let sampler = SamplerConfig {
            seed: 9,
            max_tokens: 120,
            ..Default::default()
        };
        let prompt = [3u32, 5, 7];
        let (tokens, trace) = wm.generate(&lm, &sampler, &prompt).unwrap();
        let plain = generate_unwatermarked(&lm, &sampler, &prompt).unwrap();
        assert_eq!(tokens, plain);
        assert_eq!(trace.steps.len(), 120);
    }

    #[test]
    fn head_replay_matches_generation_on_empty_prompt() {
        let (lm, model, enc, proj) = (fixture_lm(), fixture_model(), fixture_enc(), fixture_proj());
        let inj = switchy_injection();
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        let sampler = SamplerConfig {
            seed: 17,
            max_tokens: 150,
            ..Default::default()
        };
        let (tokens, trace) = wm.generate(&lm, &sampler, &[]).unwrap();
        assert_eq!(wm.head_replay(&tokens).unwrap(), trace.heads());
        // Replay-computed presence score agrees with the trace's record.
        let wd = wm.score_wd(&tokens).unwrap();
        assert!((wd - trace.mean_wm_logit()).abs() < 1e-9);
        // The untrained fixture should actually exercise both heads.
        assert!(trace.heads().contains(&HeadKind::Adversarial));
        assert!(trace.heads().contains(&HeadKind::Standard));
    }

    #[test]
    fn boundary_cadence_and_first_window_skip() {
        let (lm, model, enc, proj) = (fixture_lm(), fixture_model(), fixture_enc(), fixture_proj());
        let inj = switchy_injection();
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        let sampler = SamplerConfig {
            seed: 3,
            max_tokens: 40,
            ..Default::default()
        };
        let (_, trace) = wm.generate(&lm, &sampler, &[]).unwrap();
        let k = inj.window_len;
        for step in &trace.steps {
            if let Some(d) = step.boundary_dist {
                assert_eq!((step.t - 1) % k, 0);
                assert!((0.0..=2.0).contains(&d));
            }
        }
        // Empty prompt: the first boundary has nothing to condition on.
        assert_eq!(trace.steps[0].boundary_dist, None);
        assert!(trace.steps[k].boundary_dist.is_some());
        // The head only changes at boundaries.
        for pair in trace.steps.windows(2) {
            if pair[1].head != pair[0].head {
                assert_eq!((pair[1].t - 1) % k, 0);
            }
        }
        // With a prompt, even the first boundary is measured.
        let (_, traced) = wm.generate(&lm, &sampler, &[2, 4]).unwrap();
        assert!(traced.steps[0].boundary_dist.is_some());
    }

    #[test]
    fn window_len_one_reselects_every_token() {
        let (lm, model, enc, proj) = (fixture_lm(), fixture_model(), fixture_enc(), fixture_proj());
        let inj = InjectionConfig {
            window_len: 1,
            selection_threshold: 1.0,
            ..Default::default()
        };
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        let sampler = SamplerConfig {
            seed: 5,
            max_tokens: 25,
            ..Default::default()
        };
        let (_, trace) = wm.generate(&lm, &sampler, &[8]).unwrap();
        assert!(trace.steps.iter().all(|s| s.boundary_dist.is_some()));
    }

    #[test]
    fn boundary_mean_skips_missing_and_defaults_to_zero() {
        let diag = |t, dist| WindowDiag {
            t,
            dist,
            head: HeadKind::Standard,
        };
        let windows = vec![
            diag(1, None),
            diag(13, Some(0.1)),
            diag(25, Some(0.3)),
            diag(37, Some(1.9)),
        ];
        assert!((mean_boundary_dist(&windows) - 2.3 / 3.0).abs() < 1e-15);
        assert_eq!(mean_boundary_dist(&[diag(1, None)]), 0.0);
        assert_eq!(mean_boundary_dist(&[]), 0.0);
    }

    #[test]
    fn short_text_has_zero_spoof_score() {
        let (model, enc, proj) = (fixture_model(), fixture_enc(), fixture_proj());
        let inj = InjectionConfig::default();
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        // Shorter than one window: only the skipped first boundary.
        let sd = wm.score_sd(&[4, 9, 2]).unwrap();
        assert_eq!(sd, 0.0);
    }

    #[test]
    fn st_counts_adversarial_positions() {
        let (model, enc, proj) = (fixture_model(), fixture_enc(), fixture_proj());
        // A hair above zero: every measured boundary selects adversarial.
        let inj = InjectionConfig {
            selection_threshold: 1e-9,
            ..Default::default()
        };
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let tokens: Vec<u32> = (0..50).map(|_| rng.gen_range(0..VOCAB as u32)).collect();
        let (st, n) = wm.score_st(&tokens).unwrap();
        // First window is standard (skipped boundary keeps the initial
        // head); everything after the second boundary is adversarial.
        assert_eq!(n, tokens.len() - inj.window_len);
        // Independent recount of the positive fraction.
        let mut positive = 0usize;
        for t in (inj.window_len + 1)..=tokens.len() {
            let e = embed_window(&tokens, t, &enc);
            let (_, sig_a) = model.forward(&e).unwrap();
            let wml =
                watermark_logit_of(&sig_a, &proj, inj.logit_scale, tokens[t - 1]).unwrap();
            if wml > 0.0 {
                positive += 1;
            }
        }
        assert!((st - positive as f64 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn st_is_zero_flagged_when_no_adversarial_positions() {
        let (model, enc, proj) = (fixture_model(), fixture_enc(), fixture_proj());
        // Threshold just under 2: untrained heads never reach it.
        let inj = InjectionConfig {
            selection_threshold: 1.999,
            ..Default::default()
        };
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        let tokens: Vec<u32> = (0..40).map(|i| (i % VOCAB) as u32).collect();
        let (st, n) = wm.score_st(&tokens).unwrap();
        assert_eq!((st, n), (0.0, 0));
        let report = wm.detect(&tokens, &ThresholdSet::default()).unwrap();
        assert!(report.st_undefined);
        assert_ne!(report.label, DetectionLabel::SpoofedWatermarked);
        assert_ne!(report.label, DetectionLabel::MaliciousWatermarked);
    }

    #[test]
    fn classify_covers_all_branch_orderings() {
        let th = ThresholdSet {
            theta_wd: 0.0,
            theta_sd: 1.0,
            theta_st: 0.5,
            provenance: ThresholdProvenance::Default,
        };
        use DetectionLabel::*;
        // (wd, sd, st) relative to thresholds; n_adv fixed positive.
        let cases = [
            (-0.1, 0.5, 0.2, Unwatermarked),
            (-0.1, 0.5, 0.8, Unwatermarked),
            (-0.1, 1.5, 0.2, Unwatermarked),
            (-0.1, 1.5, 0.8, Unwatermarked),
            (0.1, 0.5, 0.2, Watermarked),
            (0.1, 0.5, 0.8, Watermarked),
            (0.1, 1.5, 0.2, SpoofedWatermarked),
            (0.1, 1.5, 0.8, MaliciousWatermarked),
        ];
        for (wd, sd, st, want) in cases {
            assert_eq!(classify(wd, sd, st, 5, &th), want, "({wd}, {sd}, {st})");
        }
        // Boundary semantics: scores at the threshold are not below it.
        assert_eq!(classify(0.0, 0.5, 0.2, 5, &th), Watermarked);
        assert_eq!(classify(0.1, 1.0, 0.5, 5, &th), MaliciousWatermarked);
        // N = 0 forces the benign watermarked label even past theta_sd.
        assert_eq!(classify(0.1, 1.5, 0.0, 0, &th), Watermarked);
        // Raising theta_wd can only move labels toward unwatermarked.
        for wd in [-0.5, 0.0, 0.3] {
            let base = classify(wd, 1.5, 0.8, 5, &th);
            let raised = classify(
                wd,
                1.5,
                0.8,
                5,
                &ThresholdSet {
                    theta_wd: th.theta_wd + 0.4,
                    ..th.clone()
                },
            );
            if base == Unwatermarked {
                assert_eq!(raised, Unwatermarked);
            }
        }
    }

    #[test]
    fn calibrate_matches_hand_quantiles() {
        let negatives: Vec<f64> = (1..=100).map(f64::from).collect();
        let th = calibrate(&[200.0], &negatives, 0.10).unwrap();
        assert!((th - 90.1).abs() < 1e-12);

        // Perfectly separated classes: threshold sits at the negative
        // mass, every positive clears it.
        let th = calibrate(&[1.0, 1.0], &[0.0, 0.0, 0.0], 0.05).unwrap();
        assert_eq!(th, 0.0);
        assert!([1.0, 1.0].iter().all(|&p| p > th));

        // Identically distributed scores: achieved FPR tracks the target.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pool: Vec<f64> = (0..500).map(|_| rng.gen::<f64>()).collect();
        let th = calibrate(&pool, &pool, 0.2).unwrap();
        let fpr = pool.iter().filter(|&&s| s > th).count() as f64 / pool.len() as f64;
        assert!((fpr - 0.2).abs() < 0.01, "achieved fpr {fpr}");

        assert!(matches!(
            calibrate(&[], &[1.0], 0.1),
            Err(Error::EmptyScores("positive scores"))
        ));
        assert!(matches!(
            calibrate(&[1.0], &[], 0.1),
            Err(Error::EmptyScores("negative scores"))
        ));
        assert!(calibrate(&[1.0], &[1.0], 0.0).is_err());
        assert!(calibrate(&[1.0], &[1.0], 1.0).is_err());
    }

    #[test]
    fn detect_report_is_consistent_and_round_trips() {
        let (lm, model, enc, proj) = (fixture_lm(), fixture_model(), fixture_enc(), fixture_proj());
        let inj = switchy_injection();
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        let sampler = SamplerConfig {
            seed: 31,
            max_tokens: 90,
            ..Default::default()
        };
        let (tokens, _) = wm.generate(&lm, &sampler, &[]).unwrap();
        let thresholds = ThresholdSet {
            theta_sd: 1.2,
            ..Default::default()
        };
        let report = wm.detect(&tokens, &thresholds).unwrap();
        assert_eq!(
            report.label,
            classify(
                report.score_wd,
                report.score_sd,
                report.score_st,
                report.n_adv_tokens,
                &thresholds
            )
        );
        assert_eq!(report.per_window.len(), (tokens.len() + 11) / 12);
        assert!((0.0..=1.0).contains(&report.score_st));
        // Single source of truth: the three public scores equal the
        // report's.
        assert_eq!(wm.score_wd(&tokens).unwrap(), report.score_wd);
        assert_eq!(wm.score_sd(&tokens).unwrap(), report.score_sd);
        assert_eq!(wm.score_st(&tokens).unwrap().0, report.score_st);
        let json = serde_json::to_string(&report).unwrap();
        let back: DetectionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn empty_text_is_rejected() {
        let (model, enc, proj) = (fixture_model(), fixture_enc(), fixture_proj());
        let inj = InjectionConfig::default();
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        assert!(matches!(wm.score_wd(&[]), Err(Error::EmptyText)));
        assert!(matches!(wm.score_sd(&[]), Err(Error::EmptyText)));
        assert!(matches!(wm.score_st(&[]), Err(Error::EmptyText)));
        assert!(matches!(
            wm.detect(&[], &ThresholdSet::default()),
            Err(Error::EmptyText)
        ));
    }

    #[test]
    fn mismatched_components_are_rejected() {
        let (lm, model, enc) = (fixture_lm(), fixture_model(), fixture_enc());
        let inj = InjectionConfig::default();
        // Projection over the wrong vocabulary size.
        let proj = ProjectionMap::build(VOCAB - 1, 8, 99).unwrap();
        let wm = Watermarker::new(&model, &proj, &enc, &inj).unwrap();
        assert!(matches!(
            wm.generate(&lm, &SamplerConfig::default(), &[]),
            Err(Error::DimMismatch { .. })
        ));
        // Projection over the wrong signal dimensionality.
        let bad_proj = ProjectionMap::build(VOCAB, 6, 99).unwrap();
        assert!(matches!(
            Watermarker::new(&model, &bad_proj, &enc, &inj),
            Err(Error::DimMismatch { .. })
        ));
        // Encoder dim not matching the model input.
        let bad_enc = EncoderConfig {
            dim: 64,
            ..fixture_enc()
        };
        let proj = fixture_proj();
        assert!(matches!(
            Watermarker::new(&model, &proj, &bad_enc, &inj),
            Err(Error::DimMismatch { .. })
        ));
    }
}
