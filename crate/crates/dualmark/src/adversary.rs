//! Lexicon-driven text labeling and desk-scale attacks.
//!
//! Both attacks are substitution-only, so they preserve token count.
//! Paraphrasing swaps tokens for same-polarity synonyms and must not
//! change the polarity label; spoofing rewrites non-negative tokens into
//! negative-lexicon draws to flip a benign text malicious while leaving
//! most of the watermark intact.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mapping::Label;
use crate::textcodec::Vocab;

/// Polarity word lists plus synonym groups, resolved to token ids.
#[derive(Debug, Clone)]
pub struct Lexicon {
    positive: HashSet<u32>,
    negative: HashSet<u32>,
    /// Sorted draw list for spoof substitutions.
    negative_list: Vec<u32>,
    synonyms: HashMap<u32, Vec<u32>>,
}

/// On-disk lexicon form (token strings, not ids).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct LexiconFile {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub synonyms: BTreeMap<String, Vec<String>>,
}

impl Lexicon {
    /// Resolves word strings against the vocabulary. Every word must be
    /// in the vocabulary and the polarity sets must be disjoint; synonym
    /// substitution must also never cross polarity classes.
    pub fn resolve(file: &LexiconFile, vocab: &Vocab) -> Result<Self> {
        let lookup = |word: &str, role: &str| -> Result<u32> {
            if !vocab.contains(word) {
                return Err(Error::InvalidConfig(format!(
                    "lexicon {role} word {word:?} is not in the vocabulary"
                )));
            }
            Ok(vocab.id(word))
        };
        let positive: HashSet<u32> = file
            .positive
            .iter()
            .map(|w| lookup(w, "positive"))
            .collect::<Result<_>>()?;
        let negative: HashSet<u32> = file
            .negative
            .iter()
            .map(|w| lookup(w, "negative"))
            .collect::<Result<_>>()?;
        if let Some(id) = positive.intersection(&negative).next() {
            return Err(Error::InvalidConfig(format!(
                "token id {id} appears in both polarity lists"
            )));
        }
        let mut synonyms = HashMap::new();
        for (word, subs) in &file.synonyms {
            let id = lookup(word, "synonym")?;
            let ids: Vec<u32> = subs
                .iter()
                .map(|w| lookup(w, "synonym target"))
                .collect::<Result<_>>()?;
            for &sub in &ids {
                let same_class = (positive.contains(&id) == positive.contains(&sub))
                    && (negative.contains(&id) == negative.contains(&sub));
                if !same_class {
                    return Err(Error::InvalidConfig(format!(
                        "synonym pair {word:?} crosses polarity classes"
                    )));
                }
            }
            synonyms.insert(id, ids);
        }
        let mut negative_list: Vec<u32> = negative.iter().copied().collect();
        negative_list.sort_unstable();
        if negative_list.is_empty() {
            return Err(Error::InvalidConfig("negative lexicon is empty".into()));
        }
        Ok(Lexicon {
            positive,
            negative,
            negative_list,
            synonyms,
        })
    }

    pub fn is_positive(&self, id: u32) -> bool {
        self.positive.contains(&id)
    }

    pub fn is_negative(&self, id: u32) -> bool {
        self.negative.contains(&id)
    }

    pub fn synonyms_of(&self, id: u32) -> Option<&[u32]> {
        self.synonyms.get(&id).map(|v| v.as_slice())
    }

    pub fn load(path: &Path, vocab: &Vocab) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let file: LexiconFile = serde_json::from_str(&text)
            .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
        Self::resolve(&file, vocab)
    }
}

pub fn save_lexicon(file: &LexiconFile, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(file)
        .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Polarity score and label of a text: score is the negative share of all
/// polarity tokens, 0.5 when the text has none, and the text is labeled
/// malicious at score 0.5 or above.
pub fn label_text(tokens: &[u32], lexicon: &Lexicon) -> Result<(f64, Label)> {
    if tokens.is_empty() {
        return Err(Error::EmptyText);
    }
    let mut pos = 0usize;
    let mut neg = 0usize;
    for &t in tokens {
        if lexicon.is_positive(t) {
            pos += 1;
        } else if lexicon.is_negative(t) {
            neg += 1;
        }
    }
    let score = if pos + neg == 0 {
        0.5
    } else {
        neg as f64 / (pos + neg) as f64
    };
    let label = if score >= 0.5 {
        Label::Malicious
    } else {
        Label::Benign
    };
    Ok((score, label))
}

/// Attack parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AttackConfig {
    /// Per-token substitution probability.
    pub rate: f64,
    pub seed: u64,
    /// Spoof retry budget (reseeded attempts before giving up).
    pub max_attempts: usize,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            rate: 0.2,
            seed: 0,
            max_attempts: 10,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(Error::InvalidConfig("attack rate must be in [0, 1]".into()));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidConfig("max_attempts must be >= 1".into()));
        }
        Ok(())
    }
}

/// Synonym-substitution paraphrase: each token is independently replaced
/// with probability `rate` by a seeded uniform draw from its synonym
/// list; tokens without synonyms are left alone. Length-preserving and
/// polarity-preserving.
pub fn paraphrase(tokens: &[u32], lexicon: &Lexicon, cfg: &AttackConfig) -> Result<Vec<u32>> {
    if tokens.is_empty() {
        return Err(Error::EmptyText);
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let out = tokens
        .iter()
        .map(|&t| {
            let roll: f64 = rng.gen();
            if roll < cfg.rate {
                if let Some(subs) = lexicon.synonyms_of(t) {
                    if !subs.is_empty() {
                        return subs[rng.gen_range(0..subs.len())];
                    }
                }
            }
            t
        })
        .collect();
    Ok(out)
}

/// Result of a spoofing attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpoofOutcome {
    pub tokens: Vec<u32>,
    /// True when the output labels malicious.
    pub success: bool,
    /// Attempts consumed (1-based; equals the retry budget on failure).
    pub attempts: usize,
}

/// Polarity-flip spoof: every token outside the negative lexicon is
/// independently replaced with probability `rate` by a seeded uniform
/// draw from the negative lexicon. Retries with derived seeds until the
/// output labels malicious or the attempt budget runs out. Length is
/// always preserved.
pub fn spoof(tokens: &[u32], lexicon: &Lexicon, cfg: &AttackConfig) -> Result<SpoofOutcome> {
    if tokens.is_empty() {
        return Err(Error::EmptyText);
    }
    cfg.validate()?;
    let mut last = tokens.to_vec();
    for attempt in 0..cfg.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(attempt as u64));
        let out: Vec<u32> = tokens
            .iter()
            .map(|&t| {
                if !lexicon.is_negative(t) {
                    let roll: f64 = rng.gen();
                    if roll < cfg.rate {
                        return lexicon.negative_list[rng.gen_range(0..lexicon.negative_list.len())];
                    }
                }
                t
            })
            .collect();
        let (_, label) = label_text(&out, lexicon)?;
        if label == Label::Malicious {
            return Ok(SpoofOutcome {
                tokens: out,
                success: true,
                attempts: attempt + 1,
            });
        }
        last = out;
    }
    Ok(SpoofOutcome {
        tokens: last,
        success: false,
        attempts: cfg.max_attempts,
    })
}
