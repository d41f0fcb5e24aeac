//! Command-line front end. Stages exchange JSON artifacts: `train`
//! writes a weight file, `gen` turns it into watermarked documents,
//! `attack` rewrites documents, `detect` labels them, `calibrate` turns
//! score samples into thresholds, and `eval` runs the full protocol
//! suite. Every stochastic step is controlled by an explicit seed, so
//! any pipeline of these commands is reproducible byte for byte.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dualmark::adversary::{label_text, paraphrase, spoof, AttackConfig};
use dualmark::bench::{run_all, save_json, save_weights, EvalStack, ExperimentConfig};
use dualmark::bench::{load_json, load_weights};
use dualmark::corpus::{
    bundled_lexicon, bundled_vocab, label_items, read_jsonl, synth_docs, to_labeled_corpus,
    write_jsonl, CorpusItem, GeneratorConfig,
};
use dualmark::error::{Error, Result};
use dualmark::mapping::{train, Label, MappingModel, ModelConfig, TrainConfig};
use dualmark::pipeline::{calibrate, ThresholdProvenance, ThresholdSet, Watermarker};
use dualmark::signal::{InjectionConfig, ProjectionMap, SATURATION_SCALE};
use dualmark::textcodec::{detokenize, tokenize, EncoderConfig};
use dualmark::toylm::{NGramLM, SamplerConfig};

#[derive(Parser)]
#[command(
    name = "dualmark",
    version,
    about = "Dual-head language-model watermarking: train, generate, attack, detect, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train mapping weights on a labeled corpus and write a weight file.
    Train(TrainArgs),
    /// Generate watermarked documents from a weight file.
    Gen(GenArgs),
    /// Paraphrase or spoof documents.
    Attack(AttackArgs),
    /// Score and label documents against a weight file.
    Detect(DetectArgs),
    /// Calibrate one decision threshold from score samples.
    Calibrate(CalibrateArgs),
    /// Run the four evaluation protocols and write the result table.
    Eval(EvalArgs),
}

/// Injection-side parameters shared by generation and detection. The
/// two sides must agree on these for detection to replay generation.
#[derive(Args, Clone)]
struct InjectionArgs {
    /// Head reselection period in tokens.
    #[arg(long)]
    window_len: Option<usize>,
    /// Head distance at which the adversarial head takes over.
    #[arg(long)]
    selection_threshold: Option<f64>,
    /// Scale applied to head signals before the tanh squash.
    #[arg(long)]
    logit_scale: Option<f64>,
}

impl InjectionArgs {
    fn build(&self, strength: Option<f64>) -> InjectionConfig {
        let mut cfg = InjectionConfig::default();
        if let Some(k) = self.window_len {
            cfg.window_len = k;
        }
        if let Some(a) = self.selection_threshold {
            cfg.selection_threshold = a;
        }
        if let Some(g) = self.logit_scale {
            cfg.logit_scale = g;
        }
        if let Some(d) = strength {
            cfg.strength = d;
        }
        cfg
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled corpus JSONL ({"text", "label"}); defaults to the bundled
    /// synthetic corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Bundled synthetic document count when no corpus file is given.
    #[arg(long, default_value_t = 2400)]
    docs: usize,
    /// Output weight file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 40)]
    epochs: usize,
    /// Contrastive loss weight override.
    #[arg(long)]
    contrastive_weight: Option<f64>,
    /// Root seed for synthesis, initialization and shuffling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LmClass {
    Benign,
    Malicious,
}

impl LmClass {
    fn label(self) -> Label {
        match self {
            LmClass::Benign => Label::Benign,
            LmClass::Malicious => Label::Malicious,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    weights: PathBuf,
    /// Prompt documents (JSONL); each document's leading tokens seed one
    /// generation. Without this, documents generate from empty prompts.
    #[arg(long)]
    prompts: Option<PathBuf>,
    /// Documents to generate when no prompt file is given.
    #[arg(long, default_value_t = 10)]
    docs: usize,
    /// Tokens taken from each prompt document.
    #[arg(long, default_value_t = 10)]
    prompt_len: usize,
    #[arg(long, default_value_t = 200)]
    max_tokens: usize,
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    /// Polarity class of the bundled corpus the language model is fit on.
    #[arg(long, value_enum, default_value_t = LmClass::Benign)]
    lm_class: LmClass,
    /// Watermark strength; zero generates unwatermarked text.
    #[arg(long, default_value_t = 0.1)]
    strength: f64,
    #[command(flatten)]
    injection: InjectionArgs,
    /// Output documents (JSONL).
    #[arg(long)]
    out: PathBuf,
    /// Optional per-document generation traces (JSONL).
    #[arg(long)]
    traces: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AttackMode {
    Paraphrase,
    Spoof,
}

#[derive(Args)]
struct AttackArgs {
    /// Input documents (JSONL).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: AttackMode,
    /// Per-token substitution rate; defaults to 0.2 for paraphrase and
    /// 0.5 for spoof.
    #[arg(long)]
    rate: Option<f64>,
    /// Spoof retry budget.
    #[arg(long, default_value_t = 10)]
    max_attempts: usize,
    /// Output documents (JSONL), relabeled after the attack.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DetectArgs {
    /// Input documents (JSONL).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    /// Threshold set JSON; defaults to the built-in thresholds.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[command(flatten)]
    injection: InjectionArgs,
    /// Output reports, one JSON object per input document.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ScoreKind {
    Wd,
    Sd,
    St,
}

#[derive(Args)]
struct CalibrateArgs {
    /// JSON array of scores from known positives.
    #[arg(long)]
    positives: PathBuf,
    /// JSON array of scores from known negatives.
    #[arg(long)]
    negatives: PathBuf,
    /// Target false-positive rate.
    #[arg(long, default_value_t = 0.05)]
    fpr: f64,
    /// Which threshold of the set to calibrate.
    #[arg(long, value_enum)]
    score: ScoreKind,
    /// Existing threshold set to update; defaults to the built-in set.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Dataset tag recorded in the threshold provenance.
    #[arg(long, default_value = "cli")]
    dataset: String,
    /// Output threshold set JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    weights: PathBuf,
    /// Experiment configuration JSON; defaults to the built-in config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the per-side document count.
    #[arg(long)]
    docs: Option<usize>,
    /// Override the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    injection: InjectionArgs,
    #[arg(long)]
    out_json: PathBuf,
    #[arg(long)]
    out_csv: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Train(args) => run_train(args),
        Cmd::Gen(args) => run_gen(args),
        Cmd::Attack(args) => run_attack(args),
        Cmd::Detect(args) => run_detect(args),
        Cmd::Calibrate(args) => run_calibrate(args),
        Cmd::Eval(args) => run_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-document stream seed.
fn doc_seed(root: u64, i: usize) -> u64 {
    splitmix64(root ^ splitmix64(i as u64))
}

/// Reads a JSONL document file, mapping absence to the missing-artifact
/// exit path.
fn read_docs(path: &Path) -> Result<Vec<CorpusItem>> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.display().to_string()));
    }
    read_jsonl(path)
}

/// Fits the toy language model on bundled synthetic documents of one
/// polarity class.
fn fit_class_lm(label: Label) -> Result<NGramLM> {
    let vocab = bundled_vocab();
    let items = synth_docs(&GeneratorConfig::default())?;
    let docs: Vec<Vec<u32>> = items
        .iter()
        .filter(|item| item.label == Some(label))
        .map(|item| tokenize(&item.text, vocab).ids)
        .collect();
    NGramLM::fit(&docs, 3, 0.1, vocab.size())
}

fn run_train(args: TrainArgs) -> Result<()> {
    let vocab = bundled_vocab();
    let lexicon = bundled_lexicon();
    let encoder = EncoderConfig::default();
    let (mut items, provenance) = match &args.corpus {
        Some(path) => (read_docs(path)?, path.display().to_string()),
        None => {
            let gen = GeneratorConfig {
                n_docs: args.docs,
                seed: args.seed.unwrap_or(GeneratorConfig::default().seed),
                ..Default::default()
            };
            (synth_docs(&gen)?, format!("bundled synthetic corpus, seed {:#x}", gen.seed))
        }
    };
    label_items(&mut items, vocab, lexicon)?;
    let corpus = to_labeled_corpus(&items, vocab, &encoder, &provenance)?;

    let mut train_cfg = TrainConfig::for_bundled_corpus();
    train_cfg.epochs = args.epochs;
    if let Some(w) = args.contrastive_weight {
        train_cfg.contrastive_weight = w;
    }
    if let Some(seed) = args.seed {
        train_cfg.shuffle_seed = splitmix64(seed);
    }
    let mut model_cfg = ModelConfig {
        input_dim: encoder.dim,
        ..Default::default()
    };
    if let Some(seed) = args.seed {
        model_cfg.init_seed = splitmix64(seed ^ 1);
    }

    let mut model = MappingModel::init(&model_cfg)?;
    println!(
        "training on {} documents ({} parameters, {} epochs)",
        corpus.len(),
        model.params.n_params(),
        train_cfg.epochs
    );
    let report = train(&mut model, &corpus, &train_cfg)?;
    println!(
        "done: first epoch loss {:.4}, last {:.4}, similarity center {:.4}",
        report.epoch_losses.first().copied().unwrap_or(f64::NAN),
        report.epoch_losses.last().copied().unwrap_or(f64::NAN),
        report.mean_cos
    );

    // Push the head gains up so the watermark logits saturate at
    // deployment; cosines and head selection are unaffected.
    let sample: Vec<_> = corpus
        .items
        .iter()
        .take(512)
        .map(|(e, _)| e.clone())
        .collect();
    let (f_s, f_a) = model.rescale_signal_median(&sample, SATURATION_SCALE)?;
    println!("rescaled head gains by {f_s:.1} / {f_a:.1}");

    let projection = ProjectionMap::build(
        vocab.size(),
        model.cfg.signal_dim,
        args.seed.map(splitmix64).unwrap_or(0x70_9a7),
    )?;
    save_weights(&args.out, &model, &train_cfg, &encoder, &projection)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run_gen(args: GenArgs) -> Result<()> {
    let vocab = bundled_vocab();
    let lexicon = bundled_lexicon();
    let (model, _, encoder, projection) = load_weights(&args.weights)?;
    let injection = args.injection.build(Some(args.strength));
    let watermarker = Watermarker::new(&model, &projection, &encoder, &injection)?;
    let lm = fit_class_lm(args.lm_class.label())?;

    let prompts: Vec<Vec<u32>> = match &args.prompts {
        Some(path) => read_docs(path)?
            .iter()
            .map(|item| {
                let ids = tokenize(&item.text, vocab).ids;
                let n = args.prompt_len.min(ids.len());
                ids[..n].to_vec()
            })
            .collect(),
        None => vec![Vec::new(); args.docs],
    };

    let mut out_items = Vec::with_capacity(prompts.len());
    let mut traces = Vec::with_capacity(prompts.len());
    for (i, prompt) in prompts.iter().enumerate() {
        let sampler = SamplerConfig {
            temperature: args.temperature,
            seed: doc_seed(args.seed, i),
            max_tokens: args.max_tokens,
            stop_token: None,
        };
        let (tokens, trace) = watermarker.generate(&lm, &sampler, prompt)?;
        let (_, label) = label_text(&tokens, lexicon)?;
        out_items.push(CorpusItem {
            text: detokenize(&tokens, vocab),
            label: Some(label),
        });
        traces.push(trace);
    }
    write_jsonl(&out_items, &args.out)?;
    println!("wrote {} documents to {}", out_items.len(), args.out.display());
    if let Some(path) = &args.traces {
        let mut text = String::new();
        for trace in &traces {
            let line = serde_json::to_string(trace)
                .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
            text.push_str(&line);
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
        println!("wrote traces to {}", path.display());
    }
    Ok(())
}

fn run_attack(args: AttackArgs) -> Result<()> {
    let vocab = bundled_vocab();
    let lexicon = bundled_lexicon();
    let items = read_docs(&args.input)?;
    let rate = args.rate.unwrap_or(match args.mode {
        AttackMode::Paraphrase => 0.2,
        AttackMode::Spoof => 0.5,
    });
    let mut out_items = Vec::with_capacity(items.len());
    let mut spoof_failures = 0usize;
    for (i, item) in items.iter().enumerate() {
        let ids = tokenize(&item.text, vocab).ids;
        let attack = AttackConfig {
            rate,
            seed: doc_seed(args.seed, i),
            max_attempts: args.max_attempts,
        };
        let attacked = match args.mode {
            AttackMode::Paraphrase => paraphrase(&ids, lexicon, &attack)?,
            AttackMode::Spoof => {
                let outcome = spoof(&ids, lexicon, &attack)?;
                if !outcome.success {
                    spoof_failures += 1;
                }
                outcome.tokens
            }
        };
        let (_, label) = label_text(&attacked, lexicon)?;
        out_items.push(CorpusItem {
            text: detokenize(&attacked, vocab),
            label: Some(label),
        });
    }
    write_jsonl(&out_items, &args.out)?;
    match args.mode {
        AttackMode::Paraphrase => {
            println!("paraphrased {} documents at rate {rate}", out_items.len())
        }
        AttackMode::Spoof => println!(
            "spoofed {}/{} documents at rate {rate} ({spoof_failures} failures kept as-is)",
            out_items.len() - spoof_failures,
            out_items.len()
        ),
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run_detect(args: DetectArgs) -> Result<()> {
    let vocab = bundled_vocab();
    let (model, _, encoder, projection) = load_weights(&args.weights)?;
    let injection = args.injection.build(None);
    let watermarker = Watermarker::new(&model, &projection, &encoder, &injection)?;
    let thresholds = match &args.thresholds {
        Some(path) => load_json::<ThresholdSet>(path)?,
        None => ThresholdSet::default(),
    };
    thresholds.validate()?;

    let items = read_docs(&args.input)?;
    let mut lines = String::new();
    let mut counts = std::collections::BTreeMap::new();
    for item in &items {
        let ids = tokenize(&item.text, vocab).ids;
        let report = watermarker.detect(&ids, &thresholds)?;
        let label_name = serde_json::to_string(&report.label)
            .map_err(|e| Error::malformed(args.out.display().to_string(), e.to_string()))?;
        *counts
            .entry(label_name.trim_matches('"').to_string())
            .or_insert(0usize) += 1;
        let line = serde_json::to_string(&report)
            .map_err(|e| Error::malformed(args.out.display().to_string(), e.to_string()))?;
        lines.push_str(&line);
        lines.push('\n');
    }
    std::fs::write(&args.out, lines).map_err(|e| Error::io(args.out.display().to_string(), e))?;
    println!("labeled {} documents:", items.len());
    for (label, n) in counts {
        println!("  {label}: {n}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run_calibrate(args: CalibrateArgs) -> Result<()> {
    let positives: Vec<f64> = load_json(&args.positives)?;
    let negatives: Vec<f64> = load_json(&args.negatives)?;
    let theta = calibrate(&positives, &negatives, args.fpr)?;
    let mut thresholds = match &args.base {
        Some(path) => load_json::<ThresholdSet>(path)?,
        None => ThresholdSet::default(),
    };
    let name = match args.score {
        ScoreKind::Wd => {
            thresholds.theta_wd = theta;
            "theta_wd"
        }
        ScoreKind::Sd => {
            thresholds.theta_sd = theta;
            "theta_sd"
        }
        ScoreKind::St => {
            thresholds.theta_st = theta;
            "theta_st"
        }
    };
    thresholds.provenance = ThresholdProvenance::Calibrated {
        dataset: args.dataset.clone(),
        target_fpr: args.fpr,
    };
    thresholds.validate()?;
    save_json(&args.out, &thresholds)?;
    println!(
        "{name} = {theta:.6} at target fpr {} ({} positives, {} negatives)",
        args.fpr,
        positives.len(),
        negatives.len()
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let vocab = bundled_vocab();
    let lexicon = bundled_lexicon();
    let (model, _, encoder, projection) = load_weights(&args.weights)?;
    let injection = args.injection.build(None);
    let watermarker = Watermarker::new(&model, &projection, &encoder, &injection)?;

    let mut cfg = match &args.config {
        // A malformed configuration is an invalid one as far as the
        // caller is concerned; missing stays a missing artifact.
        Some(path) => load_json::<ExperimentConfig>(path).map_err(|e| match e {
            Error::MalformedFile { path, detail } => {
                Error::InvalidConfig(format!("config {path}: {detail}"))
            }
            other => other,
        })?,
        None => ExperimentConfig::default(),
    };
    if let Some(docs) = args.docs {
        cfg.n_docs = docs;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;

    let lm_benign = fit_class_lm(Label::Benign)?;
    let lm_malicious = fit_class_lm(Label::Malicious)?;
    let stack = EvalStack {
        watermarker: &watermarker,
        lm_benign: &lm_benign,
        lm_malicious: &lm_malicious,
        lexicon,
        vocab,
    };
    let table = run_all(&stack, &cfg)?;
    save_json(&args.out_json, &table)?;
    std::fs::write(&args.out_csv, table.to_csv())
        .map_err(|e| Error::io(args.out_csv.display().to_string(), e))?;

    for row in &table.rows {
        println!(
            "{:<20} {:<14} auc {:.4}  tp@5% {:.4}  tp@10% {:.4}  ({} pos / {} neg{})",
            row.protocol.to_string(),
            row.score,
            row.auc,
            row.tp_at_5pct,
            row.tp_at_10pct,
            row.n_pos,
            row.n_neg,
            if row.n_attack_failures > 0 {
                format!(", {} attack failures", row.n_attack_failures)
            } else {
                String::new()
            }
        );
    }
    println!(
        "robustness auc: mean {:.4}, pooled {:.4}",
        table.robustness_auc_mean, table.robustness_auc_pooled
    );
    println!("wrote {} and {}", args.out_json.display(), args.out_csv.display());
    Ok(())
}
