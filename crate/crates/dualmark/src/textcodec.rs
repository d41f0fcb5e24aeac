//! Vocabulary, tokenization and hashed n-gram text embeddings.
//!
//! Embeddings are bags of hashed token n-grams with +/-1 signs, L2
//! normalized. They are cheap, deterministic across platforms (only
//! integer hashing and IEEE add/mul/sqrt), and local: texts sharing most
//! of their tokens land close in cosine, unrelated texts land near zero.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Reserved vocabulary slots. The vocabulary file format fixes line 0 as
/// the unknown-word token and line 1 as the begin-of-text token used to
/// embed an empty context window.
pub const UNK_ID: u32 = 0;
pub const BOT_ID: u32 = 1;

pub const UNK_TOKEN: &str = "<unk>";
pub const BOT_TOKEN: &str = "<bot>";

/// Token inventory. Ids are line numbers in the newline-delimited
/// vocabulary file; id 0 is the unknown token, id 1 the begin-of-text
/// marker.
#[derive(Debug, Clone)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    /// Builds a vocabulary from the reserved tokens followed by `words`.
    /// Duplicate words are rejected.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Result<Self> {
        let mut tokens = Vec::with_capacity(words.len() + 2);
        tokens.push(UNK_TOKEN.to_string());
        tokens.push(BOT_TOKEN.to_string());
        tokens.extend(words.iter().map(|w| w.as_ref().to_string()));
        Self::from_tokens(tokens)
    }

    fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < 2 || tokens[0] != UNK_TOKEN || tokens[1] != BOT_TOKEN {
            return Err(Error::InvalidConfig(format!(
                "vocabulary must start with {UNK_TOKEN} and {BOT_TOKEN}"
            )));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (id, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(Error::InvalidConfig(format!("empty token at line {id}")));
            }
            if index.insert(tok.clone(), id as u32).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate token {tok:?}")));
            }
        }
        Ok(Vocab { tokens, index })
    }

    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(|s| s.as_str())
    }

    /// Id for a token string, or the unknown id.
    pub fn id(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let tokens: Vec<String> = text.lines().map(|l| l.to_string()).collect();
        Self::from_tokens(tokens).map_err(|e| match e {
            Error::InvalidConfig(detail) => Error::malformed(path.display().to_string(), detail),
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for tok in &self.tokens {
            let _ = writeln!(out, "{tok}");
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// A tokenized text: ids plus the source string when it exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub ids: Vec<u32>,
    pub text: Option<String>,
}

impl TokenSeq {
    pub fn from_ids(ids: Vec<u32>) -> Self {
        TokenSeq { ids, text: None }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Lowercases, splits at whitespace and punctuation (any run of
/// non-alphanumeric characters separates words) and maps each word to its
/// vocabulary id, unknown words to the unk id. Total: never fails, never
/// produces an out-of-range id.
pub fn tokenize(text: &str, vocab: &Vocab) -> TokenSeq {
    let lower = text.to_lowercase();
    let ids = lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| vocab.id(w))
        .collect();
    TokenSeq {
        ids,
        text: Some(text.to_string()),
    }
}

/// Inverse of `tokenize` up to token identity: joins token strings with
/// single spaces. Tokenizing the result reproduces the ids for ordinary
/// words; the two reserved tokens render as their markup strings, which
/// re-tokenize to the unknown id.
pub fn detokenize(ids: &[u32], vocab: &Vocab) -> String {
    let words: Vec<&str> = ids
        .iter()
        .map(|&id| vocab.token(id).unwrap_or(UNK_TOKEN))
        .collect();
    words.join(" ")
}

/// Hashed-embedding parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EncoderConfig {
    /// Embedding dimensionality d_e.
    pub dim: usize,
    /// Context window length used by `embed_window` (tokens looked back).
    pub prefix_len: usize,
    /// Seed folded into every feature hash.
    pub hash_seed: u64,
    /// N-gram orders contributing features.
    pub ngram_orders: Vec<usize>,
    /// Token embedded in place of an empty window.
    pub bot_token: u32,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            dim: 128,
            prefix_len: 1,
            hash_seed: 0x00c0_ffee_d00d_feed,
            ngram_orders: vec![1, 2],
            bot_token: BOT_ID,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 8 {
            return Err(Error::InvalidConfig(format!(
                "embedding dim must be >= 8, got {}",
                self.dim
            )));
        }
        if self.prefix_len < 1 {
            return Err(Error::InvalidConfig("prefix_len must be >= 1".into()));
        }
        if self.ngram_orders.is_empty() || self.ngram_orders.iter().any(|&o| o == 0) {
            return Err(Error::InvalidConfig(
                "ngram_orders must be nonempty with orders >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// L2-normalized embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
}

impl Embedding {
    /// Normalizes `values` to unit length. A zero vector is mapped to the
    /// first basis vector so the unit-norm invariant always holds.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            values.iter_mut().for_each(|v| *v = 0.0);
            values[0] = 1.0;
        } else {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        Embedding { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Cosine similarity; both sides are unit norm so this is the dot
    /// product.
    pub fn cos(&self, other: &Embedding) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// FNV-1a over the order tag and token ids, finalized with splitmix64.
/// Stable across platforms and Rust versions, unlike `DefaultHasher`.
fn feature_hash(seed: u64, order: usize, window: &[u32]) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = 0xcbf2_9ce4_8422_2325 ^ seed;
    h = h.wrapping_mul(PRIME) ^ (order as u64);
    for &id in window {
        for byte in id.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    splitmix64(h)
}

/// Embeds a token sequence: every n-gram occurrence (orders from
/// `cfg.ngram_orders`) adds +/-1 to a hashed bucket; the bucket vector is
/// then L2 normalized.
pub fn embed(ids: &[u32], cfg: &EncoderConfig) -> Result<Embedding> {
    if ids.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut buf = vec![0.0f64; cfg.dim];
    for &order in &cfg.ngram_orders {
        if order > ids.len() {
            continue;
        }
        for window in ids.windows(order) {
            let h = feature_hash(cfg.hash_seed, order, window);
            let bucket = (h % cfg.dim as u64) as usize;
            let sign = if (h >> 63) & 1 == 1 { 1.0 } else { -1.0 };
            buf[bucket] += sign;
        }
    }
    Ok(Embedding::from_values(buf))
}

/// Embedding of the context window preceding position `t` (1-indexed)
/// inside `ids`: the last `min(prefix_len, t-1)` tokens before position
/// `t`. An empty window (t = 1) embeds the reserved begin-of-text token,
/// so the function is total.
pub fn embed_window(ids: &[u32], t: usize, cfg: &EncoderConfig) -> Embedding {
    assert!(t >= 1, "positions are 1-indexed");
    let end = (t - 1).min(ids.len());
    let start = end.saturating_sub(cfg.prefix_len);
    if start == end {
        embed(&[cfg.bot_token], cfg).expect("begin-of-text window is nonempty")
    } else {
        embed(&ids[start..end], cfg).expect("window is nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_vocab() -> Vocab {
        Vocab::from_words(&["the", "cat", "sat", "mat", "dog"]).unwrap()
    }

    #[test]
    fn tokenize_empty_text() {
        let v = small_vocab();
        assert!(tokenize("", &v).ids.is_empty());
    }

    #[test]
    fn tokenize_repeats_and_unknowns() {
        let v = small_vocab();
        let the = v.id("the");
        assert_eq!(tokenize("the the", &v).ids, vec![the, the]);
        assert_eq!(tokenize("zzzqx", &v).ids, vec![UNK_ID]);
        assert_eq!(
            tokenize("The cat, sat; on the MAT!", &v).ids,
            vec![the, v.id("cat"), v.id("sat"), UNK_ID, the, v.id("mat")]
        );
    }

    #[test]
    fn detokenize_round_trips_in_vocab_text() {
        let v = small_vocab();
        let ids = tokenize("the cat sat the mat", &v).ids;
        let text = detokenize(&ids, &v);
        assert_eq!(tokenize(&text, &v).ids, ids);
    }

    #[test]
    fn vocab_file_round_trip() {
        let v = small_vocab();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.txt");
        v.save(&path).unwrap();
        let loaded = Vocab::load(&path).unwrap();
        assert_eq!(loaded.size(), v.size());
        assert_eq!(loaded.id("cat"), v.id("cat"));
        assert_eq!(loaded.token(UNK_ID), Some(UNK_TOKEN));
        assert_eq!(loaded.token(BOT_ID), Some(BOT_TOKEN));
    }

    #[test]
    fn vocab_rejects_duplicates_and_bad_header() {
        assert!(Vocab::from_tokens(vec![
            UNK_TOKEN.into(),
            BOT_TOKEN.into(),
            "a".into(),
            "a".into()
        ])
        .is_err());
        assert!(Vocab::from_tokens(vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn embed_is_unit_norm_and_deterministic() {
        let cfg = EncoderConfig::default();
        let ids = vec![4, 7, 7, 2, 9, 4];
        let a = embed(&ids, &cfg).unwrap();
        let b = embed(&ids, &cfg).unwrap();
        let norm: f64 = a.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6);
        // Bit-identical, not merely close.
        assert_eq!(a.values(), b.values());
        assert!((a.cos(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embed_rejects_empty_sequence() {
        let cfg = EncoderConfig::default();
        assert!(matches!(embed(&[], &cfg), Err(Error::EmptySequence)));
    }

    #[test]
    fn embed_changes_with_seed() {
        let mut cfg_a = EncoderConfig::default();
        let mut cfg_b = EncoderConfig::default();
        cfg_a.hash_seed = 1;
        cfg_b.hash_seed = 2;
        let ids = vec![3, 1, 4, 1, 5];
        let a = embed(&ids, &cfg_a).unwrap();
        let b = embed(&ids, &cfg_b).unwrap();
        assert!(a.cos(&b) < 0.99);
    }

    /// Monte-Carlo bound used to size downstream thresholds: sequences
    /// over disjoint token ranges (so any overlap comes from hash
    /// collisions only) stay below |cos| = 0.3 on 1000 seeded pairs.
    #[test]
    fn disjoint_token_pairs_have_small_cosine() {
        let cfg = EncoderConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0x7ac3);
        let mut max_abs: f64 = 0.0;
        for _ in 0..1000 {
            let a: Vec<u32> = (0..50).map(|_| rng.gen_range(2..1500)).collect();
            let b: Vec<u32> = (0..50).map(|_| rng.gen_range(1500..3000)).collect();
            let c = embed(&a, &cfg).unwrap().cos(&embed(&b, &cfg).unwrap());
            max_abs = max_abs.max(c.abs());
        }
        assert!(max_abs < 0.3, "max |cos| over disjoint pairs = {max_abs}");
    }

    /// Locality: replacing 10% of tokens keeps the pair far closer in
    /// cosine than unrelated sequences, with a margin of at least 0.3.
    #[test]
    fn locality_margin_over_unrelated_pairs() {
        let cfg = EncoderConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0x10ca1);
        let mut related = 0.0;
        let mut unrelated = 0.0;
        let n = 200;
        for _ in 0..n {
            let a: Vec<u32> = (0..50).map(|_| rng.gen_range(2..3000)).collect();
            let mut b = a.clone();
            for _ in 0..5 {
                let pos = rng.gen_range(0..b.len());
                b[pos] = rng.gen_range(2..3000);
            }
            let c: Vec<u32> = (0..50).map(|_| rng.gen_range(2..3000)).collect();
            let ea = embed(&a, &cfg).unwrap();
            related += ea.cos(&embed(&b, &cfg).unwrap());
            unrelated += ea.cos(&embed(&c, &cfg).unwrap());
        }
        let margin = (related - unrelated) / n as f64;
        assert!(margin >= 0.3, "locality margin = {margin}");
    }

    #[test]
    fn embed_window_examples() {
        let cfg = EncoderConfig::default();
        let ids = vec![10, 11, 12, 13, 14];
        // prefix_len 1, position 5: window is the single previous token.
        let w = embed_window(&ids, 5, &cfg);
        assert_eq!(w.values(), embed(&[13], &cfg).unwrap().values());
        // prefix_len 3, position 2: only one token precedes position 2.
        let cfg3 = EncoderConfig {
            prefix_len: 3,
            ..EncoderConfig::default()
        };
        let w = embed_window(&ids, 2, &cfg3);
        assert_eq!(w.values(), embed(&[10], &cfg3).unwrap().values());
        // Position 1: empty window embeds the begin-of-text token.
        let w = embed_window(&ids, 1, &cfg);
        assert_eq!(w.values(), embed(&[BOT_ID], &cfg).unwrap().values());
    }

    #[test]
    fn encoder_config_validation() {
        let mut cfg = EncoderConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.dim = 4;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg = EncoderConfig::default();
        cfg.ngram_orders = vec![];
        assert!(cfg.validate().is_err());
    }

    proptest! {
        /// Tokenization is total: arbitrary input never panics and every
        /// id is in range.
        #[test]
        fn tokenize_total(text in ".{0,200}") {
            let v = small_vocab();
            let seq = tokenize(&text, &v);
            prop_assert!(seq.ids.iter().all(|&id| (id as usize) < v.size()));
        }

        /// Embedding any nonempty sequence yields a unit-norm vector.
        #[test]
        fn embed_unit_norm(ids in proptest::collection::vec(0u32..5000, 1..80)) {
            let cfg = EncoderConfig::default();
            let e = embed(&ids, &cfg).unwrap();
            let norm: f64 = e.values().iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-6);
        }
    }
}
