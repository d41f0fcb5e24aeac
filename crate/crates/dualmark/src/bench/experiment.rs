//! End-to-end evaluation protocols.
//!
//! Each protocol builds two populations of documents from the bundled
//! synthetic world, scores both with one detection statistic, and ranks
//! them. Prompts come from freshly synthesized corpus documents;
//! positives and negatives draw from disjoint prompt pools and disjoint
//! sampler streams. Every stochastic choice derives from the experiment
//! seed, so a run is a pure function of its configuration and the
//! result table can be compared byte for byte across runs.
//!
//! The four comparisons:
//! - detectability: watermarked generations vs clean generations, by
//!   the watermark presence score
//! - para_robustness: paraphrased watermarked generations vs clean
//!   generations, by the watermark presence score
//! - spoof_robustness: spoofed watermarked text vs paraphrased
//!   watermarked text, by the head divergence score
//! - spoof_traceability: spoofed watermarked text vs machine-generated
//!   malicious text (watermarked from malicious prompts, then
//!   paraphrased), by the negated token polarity score. Genuinely
//!   machine-originated malicious text carries positively-biased tokens
//!   at adversarial positions while spoofed text does not, so negation
//!   puts spoofs on the high side.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{paraphrase, spoof, AttackConfig, Lexicon};
use crate::bench::metrics::{auc, tp_at_fpr, Protocol, ScoreSet};
use crate::corpus::{synth_docs, GeneratorConfig};
use crate::error::{Error, Result};
use crate::mapping::Label;
use crate::pipeline::{generate_unwatermarked, Watermarker};
use crate::textcodec::{tokenize, Vocab};
use crate::toylm::{LanguageModel, SamplerConfig};

/// Loaded components a protocol run borrows. The two language models
/// are fit per polarity class so benign prompts continue benign and
/// malicious prompts continue malicious, mirroring the two text sources
/// the detector must tell apart.
pub struct EvalStack<'a> {
    pub watermarker: &'a Watermarker<'a>,
    pub lm_benign: &'a dyn LanguageModel,
    pub lm_malicious: &'a dyn LanguageModel,
    pub lexicon: &'a Lexicon,
    pub vocab: &'a Vocab,
}

/// Protocol-run parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentConfig {
    /// Documents per side of each comparison.
    pub n_docs: usize,
    /// Target generated length in tokens.
    pub doc_len: usize,
    /// Half-width of the uniform per-document length jitter.
    pub len_jitter: usize,
    /// Tokens taken from a synthetic corpus document as the prompt.
    pub prompt_len: usize,
    pub temperature: f64,
    /// Polarity-preserving paraphrase applied to attacked copies.
    pub paraphrase: AttackConfig,
    /// Polarity-flip spoof applied to watermarked benign text.
    pub spoof: AttackConfig,
    /// Root seed; every prompt pool, sampler and attack stream derives
    /// its own stream from it.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_docs: 200,
            doc_len: 200,
            len_jitter: 30,
            prompt_len: 10,
            temperature: 1.0,
            paraphrase: AttackConfig {
                rate: 0.2,
                ..Default::default()
            },
            spoof: AttackConfig {
                rate: 0.5,
                ..Default::default()
            },
            seed: 0xe7a1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_docs < 2 {
            return Err(Error::InvalidConfig("n_docs must be >= 2".into()));
        }
        if self.doc_len == 0 {
            return Err(Error::InvalidConfig("doc_len must be >= 1".into()));
        }
        if self.len_jitter >= self.doc_len {
            return Err(Error::InvalidConfig(
                "len_jitter must be smaller than doc_len".into(),
            ));
        }
        if self.prompt_len == 0 {
            return Err(Error::InvalidConfig("prompt_len must be >= 1".into()));
        }
        if self.temperature < 0.0 {
            return Err(Error::InvalidConfig("temperature must be >= 0".into()));
        }
        self.paraphrase.validate()?;
        self.spoof.validate()
    }
}

/// Histogram over a fixed score range; out-of-range values land in the
/// edge bins so the total always matches the sample count.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u32>,
}

impl Histogram {
    pub const BINS: usize = 20;

    pub fn build(values: &[f64], lo: f64, hi: f64) -> Histogram {
        let mut counts = vec![0u32; Self::BINS];
        let width = (hi - lo) / Self::BINS as f64;
        for &v in values {
            let bin = ((v - lo) / width).floor() as i64;
            counts[bin.clamp(0, Self::BINS as i64 - 1) as usize] += 1;
        }
        Histogram { lo, hi, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

/// One protocol's summary row.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProtocolResult {
    pub protocol: Protocol,
    /// Which detection score is ranked. Traceability negates its score
    /// so that larger always means more likely positive.
    pub score: String,
    pub auc: f64,
    pub tp_at_5pct: f64,
    pub tp_at_10pct: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    /// Spoof attempts that never flipped the label; their documents are
    /// excluded from the positives.
    pub n_attack_failures: usize,
    pub pos_hist: Histogram,
    pub neg_hist: Histogram,
}

/// Full evaluation output. Carries the exact configuration and package
/// version instead of timestamps, so identical runs produce identical
/// bytes.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResultTable {
    pub package_version: String,
    pub config: ExperimentConfig,
    pub injection: crate::signal::InjectionConfig,
    pub rows: Vec<ProtocolResult>,
    /// Mean of the paraphrase- and spoof-robustness AUCs.
    pub robustness_auc_mean: f64,
    /// AUC of the two robustness score sets pooled into one ranking.
    /// The scores live on different scales (mean watermark logit vs
    /// head distance), so this conflates them; it is reported alongside
    /// the per-protocol mean, not instead of it.
    pub robustness_auc_pooled: f64,
}

impl ResultTable {
    /// One row per protocol; the overall summaries live only in the
    /// JSON form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "protocol,score,auc,tp_at_5pct,tp_at_10pct,n_pos,n_neg,n_attack_failures\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6},{},{},{}\n",
                row.protocol,
                row.score,
                row.auc,
                row.tp_at_5pct,
                row.tp_at_10pct,
                row.n_pos,
                row.n_neg,
                row.n_attack_failures
            ));
        }
        out
    }
}

// Stream tags. Positive and negative sides of a protocol, and every
// role within a side, get disjoint seed streams.
const PROMPTS: u64 = 0xA1;
const LENS: u64 = 0xA2;
const SAMPLER: u64 = 0xA3;
const ATTACK: u64 = 0xA4;
const POS: u64 = 0x10;
const NEG: u64 = 0x20;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Folds a tag chain into the root seed, one splitmix round per tag.
fn stream_seed(root: u64, tags: &[u64]) -> u64 {
    let mut x = root;
    for &t in tags {
        x = splitmix64(x ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    x
}

fn protocol_tag(protocol: Protocol) -> u64 {
    match protocol {
        Protocol::Detectability => 1,
        Protocol::ParaRobustness => 2,
        Protocol::SpoofRobustness => 3,
        Protocol::SpoofTraceability => 4,
    }
}

/// Prompt pool: prefixes of freshly synthesized documents of one
/// polarity class. The synthesizer alternates classes, so doubling the
/// count yields exactly `n_docs` prompts per class.
fn prompt_pool(
    stack: &EvalStack,
    cfg: &ExperimentConfig,
    label: Label,
    tags: &[u64],
) -> Result<Vec<Vec<u32>>> {
    let gen = GeneratorConfig {
        n_docs: 2 * cfg.n_docs,
        seed: stream_seed(cfg.seed, tags),
        ..Default::default()
    };
    let items = synth_docs(&gen)?;
    let pool: Vec<Vec<u32>> = items
        .into_iter()
        .filter(|item| item.label == Some(label))
        .map(|item| {
            let ids = tokenize(&item.text, stack.vocab).ids;
            let n = cfg.prompt_len.min(ids.len());
            ids[..n].to_vec()
        })
        .collect();
    debug_assert_eq!(pool.len(), cfg.n_docs);
    Ok(pool)
}

/// Per-document generation lengths, jittered uniformly around the
/// target.
fn doc_lens(cfg: &ExperimentConfig, tags: &[u64]) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, tags));
    (0..cfg.n_docs)
        .map(|_| cfg.doc_len - cfg.len_jitter + rng.gen_range(0..=2 * cfg.len_jitter))
        .collect()
}

fn lm_for<'a>(stack: &'a EvalStack, label: Label) -> &'a dyn LanguageModel {
    match label {
        Label::Benign => stack.lm_benign,
        Label::Malicious => stack.lm_malicious,
    }
}

/// Watermarked documents for one side of a comparison.
fn watermarked_docs(
    stack: &EvalStack,
    cfg: &ExperimentConfig,
    label: Label,
    ptag: u64,
    side: u64,
) -> Result<Vec<Vec<u32>>> {
    let prompts = prompt_pool(stack, cfg, label, &[ptag, side, PROMPTS])?;
    let lens = doc_lens(cfg, &[ptag, side, LENS]);
    let lm = lm_for(stack, label);
    prompts
        .iter()
        .zip(&lens)
        .enumerate()
        .map(|(i, (prompt, &len))| {
            let sampler = SamplerConfig {
                temperature: cfg.temperature,
                seed: stream_seed(cfg.seed, &[ptag, side, SAMPLER, i as u64]),
                max_tokens: len,
                stop_token: None,
            };
            let (tokens, _) = stack.watermarker.generate(lm, &sampler, prompt)?;
            Ok(tokens)
        })
        .collect()
}

/// Clean (unwatermarked) documents: the stand-in for text the system
/// never touched.
fn clean_docs(
    stack: &EvalStack,
    cfg: &ExperimentConfig,
    label: Label,
    ptag: u64,
    side: u64,
) -> Result<Vec<Vec<u32>>> {
    let prompts = prompt_pool(stack, cfg, label, &[ptag, side, PROMPTS])?;
    let lens = doc_lens(cfg, &[ptag, side, LENS]);
    let lm = lm_for(stack, label);
    prompts
        .iter()
        .zip(&lens)
        .enumerate()
        .map(|(i, (prompt, &len))| {
            let sampler = SamplerConfig {
                temperature: cfg.temperature,
                seed: stream_seed(cfg.seed, &[ptag, side, SAMPLER, i as u64]),
                max_tokens: len,
                stop_token: None,
            };
            generate_unwatermarked(lm, &sampler, prompt)
        })
        .collect()
}

fn paraphrased_docs(
    stack: &EvalStack,
    cfg: &ExperimentConfig,
    docs: Vec<Vec<u32>>,
    ptag: u64,
    side: u64,
) -> Result<Vec<Vec<u32>>> {
    docs.into_iter()
        .enumerate()
        .map(|(i, doc)| {
            let attack = AttackConfig {
                seed: stream_seed(cfg.seed, &[ptag, side, ATTACK, i as u64]),
                ..cfg.paraphrase.clone()
            };
            paraphrase(&doc, stack.lexicon, &attack)
        })
        .collect()
}

/// Spoofs every document and keeps only the successful flips, counting
/// the failures.
fn spoofed_docs(
    stack: &EvalStack,
    cfg: &ExperimentConfig,
    docs: Vec<Vec<u32>>,
    ptag: u64,
    side: u64,
) -> Result<(Vec<Vec<u32>>, usize)> {
    let mut kept = Vec::with_capacity(docs.len());
    let mut failures = 0usize;
    for (i, doc) in docs.into_iter().enumerate() {
        let attack = AttackConfig {
            seed: stream_seed(cfg.seed, &[ptag, side, ATTACK, i as u64]),
            ..cfg.spoof.clone()
        };
        let outcome = spoof(&doc, stack.lexicon, &attack)?;
        if outcome.success {
            kept.push(outcome.tokens);
        } else {
            failures += 1;
        }
    }
    Ok((kept, failures))
}

fn wd_scores(stack: &EvalStack, docs: &[Vec<u32>]) -> Result<Vec<f64>> {
    docs.iter().map(|d| stack.watermarker.score_wd(d)).collect()
}

fn sd_scores(stack: &EvalStack, docs: &[Vec<u32>]) -> Result<Vec<f64>> {
    docs.iter().map(|d| stack.watermarker.score_sd(d)).collect()
}

fn neg_st_scores(stack: &EvalStack, docs: &[Vec<u32>]) -> Result<Vec<f64>> {
    docs.iter()
        .map(|d| stack.watermarker.score_st(d).map(|(st, _)| -st))
        .collect()
}

/// Runs one protocol and returns its summary row plus the raw scores
/// (the caller pools the robustness scores for the overall number).
pub fn run_protocol(
    stack: &EvalStack,
    cfg: &ExperimentConfig,
    protocol: Protocol,
) -> Result<(ProtocolResult, ScoreSet)> {
    cfg.validate()?;
    let ptag = protocol_tag(protocol);
    let (score, positives, negatives, n_attack_failures) = match protocol {
        Protocol::Detectability => {
            let pos = watermarked_docs(stack, cfg, Label::Benign, ptag, POS)?;
            let neg = clean_docs(stack, cfg, Label::Benign, ptag, NEG)?;
            ("score_wd", wd_scores(stack, &pos)?, wd_scores(stack, &neg)?, 0)
        }
        Protocol::ParaRobustness => {
            let pos = watermarked_docs(stack, cfg, Label::Benign, ptag, POS)?;
            let pos = paraphrased_docs(stack, cfg, pos, ptag, POS)?;
            let neg = clean_docs(stack, cfg, Label::Benign, ptag, NEG)?;
            ("score_wd", wd_scores(stack, &pos)?, wd_scores(stack, &neg)?, 0)
        }
        Protocol::SpoofRobustness => {
            let base = watermarked_docs(stack, cfg, Label::Benign, ptag, POS)?;
            let (pos, failures) = spoofed_docs(stack, cfg, base, ptag, POS)?;
            let neg = watermarked_docs(stack, cfg, Label::Benign, ptag, NEG)?;
            let neg = paraphrased_docs(stack, cfg, neg, ptag, NEG)?;
            (
                "score_sd",
                sd_scores(stack, &pos)?,
                sd_scores(stack, &neg)?,
                failures,
            )
        }
        Protocol::SpoofTraceability => {
            let base = watermarked_docs(stack, cfg, Label::Benign, ptag, POS)?;
            let (pos, failures) = spoofed_docs(stack, cfg, base, ptag, POS)?;
            let neg = watermarked_docs(stack, cfg, Label::Malicious, ptag, NEG)?;
            let neg = paraphrased_docs(stack, cfg, neg, ptag, NEG)?;
            (
                "neg_score_st",
                neg_st_scores(stack, &pos)?,
                neg_st_scores(stack, &neg)?,
                failures,
            )
        }
    };
    let scores = ScoreSet {
        positives,
        negatives,
    };
    let (lo, hi) = match protocol {
        Protocol::Detectability | Protocol::ParaRobustness => (-1.0, 1.0),
        Protocol::SpoofRobustness => (0.0, 2.0),
        Protocol::SpoofTraceability => (-1.0, 0.0),
    };
    let result = ProtocolResult {
        protocol,
        score: score.to_string(),
        auc: auc(&scores)?,
        tp_at_5pct: tp_at_fpr(&scores, 0.05)?,
        tp_at_10pct: tp_at_fpr(&scores, 0.10)?,
        n_pos: scores.positives.len(),
        n_neg: scores.negatives.len(),
        n_attack_failures,
        pos_hist: Histogram::build(&scores.positives, lo, hi),
        neg_hist: Histogram::build(&scores.negatives, lo, hi),
    };
    Ok((result, scores))
}

/// Runs all four protocols and assembles the result table.
pub fn run_all(stack: &EvalStack, cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut rows = Vec::with_capacity(Protocol::ALL.len());
    let mut para = None;
    let mut spoof = None;
    for protocol in Protocol::ALL {
        let (row, scores) = run_protocol(stack, cfg, protocol)?;
        match protocol {
            Protocol::ParaRobustness => para = Some(scores),
            Protocol::SpoofRobustness => spoof = Some(scores),
            _ => {}
        }
        rows.push(row);
    }
    let para = para.expect("para robustness ran");
    let spoof = spoof.expect("spoof robustness ran");
    let robustness_auc_mean = (rows[1].auc + rows[2].auc) / 2.0;
    let mut pooled = para;
    pooled.positives.extend(spoof.positives);
    pooled.negatives.extend(spoof.negatives);
    let robustness_auc_pooled = auc(&pooled)?;
    Ok(ResultTable {
        package_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        injection: stack.watermarker.injection().clone(),
        rows,
        robustness_auc_mean,
        robustness_auc_pooled,
    })
}
