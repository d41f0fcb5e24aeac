//! Bundled vocabulary, lexicon, and synthetic document generator.
//!
//! Everything here is deterministic: the vocabulary is assembled in a
//! fixed order from the static word bank, and document synthesis is
//! driven entirely by a caller-provided seed. Benign and malicious
//! documents share the same sentence skeletons and neutral word pools
//! and differ only in which polarity pool fills the polarity slots, so
//! a document never mixes positive and negative words.

mod words;

use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{label_text, Lexicon, LexiconFile};
use crate::error::{Error, Result};
use crate::mapping::{Label, LabeledCorpus};
use crate::textcodec::{embed, tokenize, EncoderConfig, Vocab};

/// Pluralizes a noun (also the third-person verb form). The word bank
/// avoids irregular words, so the regular spelling rules suffice.
fn plural(base: &str) -> String {
    if base.ends_with('s')
        || base.ends_with('x')
        || base.ends_with('z')
        || base.ends_with("ch")
        || base.ends_with("sh")
    {
        format!("{base}es")
    } else if ends_in_consonant_y(base) {
        format!("{}ies", &base[..base.len() - 1])
    } else {
        format!("{base}s")
    }
}

fn ends_in_consonant_y(word: &str) -> bool {
    let bytes = word.as_bytes();
    bytes.len() >= 2
        && bytes[bytes.len() - 1] == b'y'
        && !matches!(bytes[bytes.len() - 2], b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Surface forms of a verb: base, third person, past, gerund.
fn verb_forms(base: &str) -> [String; 4] {
    let third = plural(base);
    let past = if base.ends_with('e') {
        format!("{base}d")
    } else if ends_in_consonant_y(base) {
        format!("{}ied", &base[..base.len() - 1])
    } else {
        format!("{base}ed")
    };
    let gerund = if base.ends_with('e') {
        format!("{}ing", &base[..base.len() - 1])
    } else {
        format!("{base}ing")
    };
    [base.to_string(), third, past, gerund]
}

/// Expanded word pools used for vocabulary assembly and slot filling.
struct WordBank {
    all_words: Vec<String>,
    noun_sing: Vec<String>,
    noun_plur: Vec<String>,
    verb_past: Vec<String>,
    adj: Vec<String>,
    adv: Vec<String>,
    pos_adj: Vec<String>,
    neg_adj: Vec<String>,
    pos_noun_sing: Vec<String>,
    neg_noun_sing: Vec<String>,
    pos_verb_past: Vec<String>,
    neg_verb_past: Vec<String>,
    lexicon_file: LexiconFile,
}

fn noun_group_forms(group: &[&str; 4]) -> Vec<[String; 2]> {
    group.iter().map(|w| [w.to_string(), plural(w)]).collect()
}

fn verb_group_forms(group: &[&str; 4]) -> Vec<[String; 4]> {
    group.iter().map(|w| verb_forms(w)).collect()
}

/// Records form-aligned synonym entries for one group: every member's
/// form f maps to the other members' form f.
fn add_group_synonyms<const N: usize>(
    file: &mut LexiconFile,
    forms: &[[String; N]],
) {
    for (i, member) in forms.iter().enumerate() {
        for f in 0..N {
            let targets: Vec<String> = forms
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, other)| other[f].clone())
                .collect();
            file.synonyms.insert(member[f].clone(), targets);
        }
    }
}

fn build_bank() -> WordBank {
    let mut all_words = Vec::new();
    let mut lexicon_file = LexiconFile {
        positive: Vec::new(),
        negative: Vec::new(),
        synonyms: Default::default(),
    };
    for &w in words::FUNCTION_WORDS {
        all_words.push(w.to_string());
    }

    let mut noun_sing = Vec::new();
    let mut noun_plur = Vec::new();
    for group in words::NOUN_GROUPS {
        let forms = noun_group_forms(group);
        for [sing, plur] in &forms {
            all_words.push(sing.clone());
            all_words.push(plur.clone());
            noun_sing.push(sing.clone());
            noun_plur.push(plur.clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }

    let mut verb_past = Vec::new();
    for group in words::VERB_GROUPS {
        let forms = verb_group_forms(group);
        for f in &forms {
            all_words.extend(f.iter().cloned());
            verb_past.push(f[2].clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }

    let mut adj = Vec::new();
    for group in words::ADJ_GROUPS {
        let forms: Vec<[String; 1]> = group.iter().map(|w| [w.to_string()]).collect();
        for [w] in &forms {
            all_words.push(w.clone());
            adj.push(w.clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }

    let mut adv = Vec::new();
    for group in words::ADV_GROUPS {
        let forms: Vec<[String; 1]> = group.iter().map(|w| [w.to_string()]).collect();
        for [w] in &forms {
            all_words.push(w.clone());
            adv.push(w.clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }

    // Polarity pools: every surface form joins the polarity list so the
    // labeler sees inflected words too.
    let mut pos_adj = Vec::new();
    for group in words::POSITIVE_ADJ_GROUPS {
        let forms: Vec<[String; 1]> = group.iter().map(|w| [w.to_string()]).collect();
        for [w] in &forms {
            all_words.push(w.clone());
            pos_adj.push(w.clone());
            lexicon_file.positive.push(w.clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }
    let mut pos_noun_sing = Vec::new();
    for group in words::POSITIVE_NOUN_GROUPS {
        let forms = noun_group_forms(group);
        for [sing, plur] in &forms {
            all_words.push(sing.clone());
            all_words.push(plur.clone());
            pos_noun_sing.push(sing.clone());
            lexicon_file.positive.push(sing.clone());
            lexicon_file.positive.push(plur.clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }
    let mut pos_verb_past = Vec::new();
    for group in words::POSITIVE_VERB_GROUPS {
        let forms = verb_group_forms(group);
        for f in &forms {
            all_words.extend(f.iter().cloned());
            lexicon_file.positive.extend(f.iter().cloned());
            pos_verb_past.push(f[2].clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }

    let mut neg_adj = Vec::new();
    for group in words::NEGATIVE_ADJ_GROUPS {
        let forms: Vec<[String; 1]> = group.iter().map(|w| [w.to_string()]).collect();
        for [w] in &forms {
            all_words.push(w.clone());
            neg_adj.push(w.clone());
            lexicon_file.negative.push(w.clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }
    let mut neg_noun_sing = Vec::new();
    for group in words::NEGATIVE_NOUN_GROUPS {
        let forms = noun_group_forms(group);
        for [sing, plur] in &forms {
            all_words.push(sing.clone());
            all_words.push(plur.clone());
            neg_noun_sing.push(sing.clone());
            lexicon_file.negative.push(sing.clone());
            lexicon_file.negative.push(plur.clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }
    let mut neg_verb_past = Vec::new();
    for group in words::NEGATIVE_VERB_GROUPS {
        let forms = verb_group_forms(group);
        for f in &forms {
            all_words.extend(f.iter().cloned());
            lexicon_file.negative.extend(f.iter().cloned());
            neg_verb_past.push(f[2].clone());
        }
        add_group_synonyms(&mut lexicon_file, &forms);
    }

    WordBank {
        all_words,
        noun_sing,
        noun_plur,
        verb_past,
        adj,
        adv,
        pos_adj,
        neg_adj,
        pos_noun_sing,
        neg_noun_sing,
        pos_verb_past,
        neg_verb_past,
        lexicon_file,
    }
}

fn bank() -> &'static WordBank {
    static BANK: OnceLock<WordBank> = OnceLock::new();
    BANK.get_or_init(build_bank)
}

/// The bundled vocabulary. Assembled once in a fixed order, so token
/// ids are stable across runs and platforms.
pub fn bundled_vocab() -> &'static Vocab {
    static VOCAB: OnceLock<Vocab> = OnceLock::new();
    VOCAB.get_or_init(|| {
        Vocab::from_words(&bank().all_words).expect("bundled word bank contains duplicates")
    })
}

/// The bundled lexicon in its serializable form.
pub fn bundled_lexicon_file() -> LexiconFile {
    bank().lexicon_file.clone()
}

/// The bundled lexicon resolved against the bundled vocabulary.
pub fn bundled_lexicon() -> &'static Lexicon {
    static LEXICON: OnceLock<Lexicon> = OnceLock::new();
    LEXICON.get_or_init(|| {
        Lexicon::resolve(&bank().lexicon_file, bundled_vocab())
            .expect("bundled lexicon is inconsistent with the bundled vocabulary")
    })
}

/// One document: raw text plus an optional polarity label.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CorpusItem {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

/// Synthetic corpus parameters.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorConfig {
    pub n_docs: usize,
    pub seed: u64,
    pub min_sentences: usize,
    pub max_sentences: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_docs: 2400,
            seed: 0x0c0a_9d0c,
            min_sentences: 2,
            max_sentences: 4,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_docs == 0 {
            return Err(Error::InvalidConfig("n_docs must be >= 1".into()));
        }
        if self.min_sentences == 0 || self.min_sentences > self.max_sentences {
            return Err(Error::InvalidConfig(
                "sentence range must satisfy 1 <= min <= max".into(),
            ));
        }
        Ok(())
    }
}

/// Generates labeled documents, alternating benign and malicious so any
/// prefix of the output is near-balanced. Polarity slots draw only from
/// the document's own class.
pub fn synth_docs(cfg: &GeneratorConfig) -> Result<Vec<CorpusItem>> {
    cfg.validate()?;
    let bank = bank();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pick = |pool: &[String], rng: &mut ChaCha8Rng| -> String {
        pool[rng.gen_range(0..pool.len())].clone()
    };
    let mut items = Vec::with_capacity(cfg.n_docs);
    for i in 0..cfg.n_docs {
        let label = if i % 2 == 0 {
            Label::Benign
        } else {
            Label::Malicious
        };
        let (p_adj, p_noun, p_verb) = match label {
            Label::Benign => (&bank.pos_adj, &bank.pos_noun_sing, &bank.pos_verb_past),
            Label::Malicious => (&bank.neg_adj, &bank.neg_noun_sing, &bank.neg_verb_past),
        };
        let n_sentences = rng.gen_range(cfg.min_sentences..=cfg.max_sentences);
        let mut tokens: Vec<String> = Vec::new();
        for _ in 0..n_sentences {
            let template =
                words::SENTENCE_TEMPLATES[rng.gen_range(0..words::SENTENCE_TEMPLATES.len())];
            for slot in template.split(' ') {
                let word = match slot {
                    "%ns" => pick(&bank.noun_sing, &mut rng),
                    "%np" => pick(&bank.noun_plur, &mut rng),
                    "%v" => pick(&bank.verb_past, &mut rng),
                    "%a" => pick(&bank.adj, &mut rng),
                    "%d" => pick(&bank.adv, &mut rng),
                    "%pa" => pick(p_adj, &mut rng),
                    "%pn" => pick(p_noun, &mut rng),
                    "%pv" => pick(p_verb, &mut rng),
                    literal => literal.to_string(),
                };
                tokens.push(word);
            }
        }
        items.push(CorpusItem {
            text: tokens.join(" "),
            label: Some(label),
        });
    }
    Ok(items)
}

/// Reads one JSON document per line; blank lines are skipped.
pub fn read_jsonl(path: &Path) -> Result<Vec<CorpusItem>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut items = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item: CorpusItem = serde_json::from_str(line).map_err(|e| {
            Error::malformed(
                path.display().to_string(),
                format!("line {}: {e}", lineno + 1),
            )
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_jsonl(items: &[CorpusItem], path: &Path) -> Result<()> {
    let mut out = String::new();
    for item in items {
        let line = serde_json::to_string(item)
            .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
        out.push_str(&line);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Fills in missing labels using the lexicon labeler. Items that
/// already carry a label are left untouched.
pub fn label_items(items: &mut [CorpusItem], vocab: &Vocab, lexicon: &Lexicon) -> Result<()> {
    for item in items.iter_mut() {
        if item.label.is_none() {
            let seq = tokenize(&item.text, vocab);
            let (_, label) = label_text(&seq.ids, lexicon)?;
            item.label = Some(label);
        }
    }
    Ok(())
}

/// Embeds labeled items into a training corpus. Every item must carry a
/// label; run [`label_items`] first for raw text.
pub fn to_labeled_corpus(
    items: &[CorpusItem],
    vocab: &Vocab,
    enc: &EncoderConfig,
    provenance: &str,
) -> Result<LabeledCorpus> {
    enc.validate()?;
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let label = item.label.ok_or_else(|| {
            Error::InvalidConfig(format!("corpus item {i} has no label; label it first"))
        })?;
        let seq = tokenize(&item.text, vocab);
        let embedding = embed(&seq.ids, enc)?;
        out.push((embedding, label));
    }
    Ok(LabeledCorpus {
        items: out,
        provenance: provenance.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textcodec::UNK_ID;

    #[test]
    fn morphology_rules() {
        assert_eq!(plural("berry"), "berries");
        assert_eq!(plural("glass"), "glasses");
        assert_eq!(plural("peach"), "peaches");
        assert_eq!(plural("day"), "days");
        assert_eq!(plural("box"), "boxes");
        assert_eq!(plural("river"), "rivers");
        assert_eq!(
            verb_forms("carry"),
            ["carry", "carries", "carried", "carrying"]
        );
        assert_eq!(verb_forms("raise"), ["raise", "raises", "raised", "raising"]);
        assert_eq!(verb_forms("wash"), ["wash", "washes", "washed", "washing"]);
        assert_eq!(verb_forms("stay"), ["stay", "stays", "stayed", "staying"]);
    }

    #[test]
    fn vocabulary_builds_without_duplicates() {
        // from_words rejects duplicates, so a successful build proves
        // every surface form is unique.
        let vocab = bundled_vocab();
        let size = vocab.size();
        assert!(
            (2500..=3100).contains(&size),
            "bundled vocabulary size {size} outside expected band"
        );
    }

    #[test]
    fn lexicon_resolves_with_expected_counts() {
        let lex = bundled_lexicon();
        let file = bundled_lexicon_file();
        // 6 adjective groups of 4, 3 noun groups of 4 with 2 forms,
        // 3 verb groups of 4 with 4 forms, per polarity.
        let expected = 6 * 4 + 3 * 4 * 2 + 3 * 4 * 4;
        assert_eq!(file.positive.len(), expected);
        assert_eq!(file.negative.len(), expected);
        let vocab = bundled_vocab();
        assert!(lex.is_positive(vocab.id("good")));
        assert!(lex.is_positive(vocab.id("rejoiced")));
        assert!(lex.is_negative(vocab.id("awful")));
        assert!(lex.is_negative(vocab.id("threatened")));
        assert!(!lex.is_positive(vocab.id("river")));
        assert!(!lex.is_negative(vocab.id("river")));
    }

    #[test]
    fn every_content_token_has_synonyms() {
        let vocab = bundled_vocab();
        let file = bundled_lexicon_file();
        // All tokens except the two reserved ids and the function words
        // belong to a group of four, so each has exactly 3 synonyms.
        let content = vocab.size() - 2 - words::FUNCTION_WORDS.len();
        assert_eq!(file.synonyms.len(), content);
        assert!(file.synonyms.values().all(|s| s.len() == 3));
        assert_eq!(
            file.synonyms.get("rivers").unwrap(),
            &vec!["streams".to_string(), "creeks".to_string(), "brooks".to_string()]
        );
        assert_eq!(
            file.synonyms.get("carried").unwrap(),
            &vec!["hauled".to_string(), "toted".to_string(), "conveyed".to_string()]
        );
    }

    #[test]
    fn synth_docs_are_deterministic_and_balanced() {
        let cfg = GeneratorConfig {
            n_docs: 40,
            seed: 11,
            ..Default::default()
        };
        let a = synth_docs(&cfg).unwrap();
        let b = synth_docs(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        let benign = a
            .iter()
            .filter(|i| i.label == Some(Label::Benign))
            .count();
        assert_eq!(benign, 20);
        let other = synth_docs(&GeneratorConfig {
            n_docs: 40,
            seed: 12,
            ..Default::default()
        })
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn synth_docs_stay_in_vocabulary_with_clean_polarity() {
        let vocab = bundled_vocab();
        let lex = bundled_lexicon();
        let cfg = GeneratorConfig {
            n_docs: 100,
            seed: 5,
            ..Default::default()
        };
        for item in synth_docs(&cfg).unwrap() {
            let seq = tokenize(&item.text, vocab);
            assert!(
                (20..=70).contains(&seq.len()),
                "doc length {} out of range",
                seq.len()
            );
            assert!(
                seq.ids.iter().all(|&id| id != UNK_ID),
                "out-of-vocabulary word in {:?}",
                item.text
            );
            let n_pos = seq.ids.iter().filter(|&&t| lex.is_positive(t)).count();
            let n_neg = seq.ids.iter().filter(|&&t| lex.is_negative(t)).count();
            let (score, derived) = label_text(&seq.ids, lex).unwrap();
            match item.label.unwrap() {
                Label::Benign => {
                    assert_eq!(n_neg, 0);
                    assert!(n_pos >= 2, "only {n_pos} positive words");
                    assert_eq!(score, 0.0);
                    assert_eq!(derived, Label::Benign);
                }
                Label::Malicious => {
                    assert_eq!(n_pos, 0);
                    assert!(n_neg >= 2, "only {n_neg} negative words");
                    assert_eq!(score, 1.0);
                    assert_eq!(derived, Label::Malicious);
                }
            }
        }
    }

    #[test]
    fn jsonl_round_trip_and_labeling() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("docs.jsonl");
        let mut items = synth_docs(&GeneratorConfig {
            n_docs: 6,
            seed: 2,
            ..Default::default()
        })
        .unwrap();
        // Strip two labels to exercise relabeling from text.
        items[0].label = None;
        items[3].label = None;
        write_jsonl(&items, &path).unwrap();
        let mut loaded = read_jsonl(&path).unwrap();
        assert_eq!(loaded, items);
        label_items(&mut loaded, bundled_vocab(), bundled_lexicon()).unwrap();
        assert_eq!(loaded[0].label, Some(Label::Benign));
        assert_eq!(loaded[3].label, Some(Label::Malicious));
    }

    #[test]
    fn jsonl_rejects_malformed_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"text\": \"ok\"}\nnot json\n").unwrap();
        let err = read_jsonl(&path).unwrap_err();
        assert!(matches!(err, Error::MalformedFile { .. }));
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn labeled_corpus_embeds_every_item() {
        let items = synth_docs(&GeneratorConfig {
            n_docs: 8,
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let enc = EncoderConfig::default();
        let corpus = to_labeled_corpus(&items, bundled_vocab(), &enc, "synthetic").unwrap();
        assert_eq!(corpus.len(), 8);
        assert_eq!(corpus.provenance, "synthetic");
        assert!(corpus.items.iter().all(|(e, _)| e.dim() == enc.dim));

        let unlabeled = vec![CorpusItem {
            text: "the river".into(),
            label: None,
        }];
        assert!(to_labeled_corpus(&unlabeled, bundled_vocab(), &enc, "x").is_err());
    }
}
