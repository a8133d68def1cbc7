//! Text preprocessing and sparse feature extraction.
//!
//! The preprocessing chain is, in order: hyperlinks become the sentinel
//! token `abstracturl`, runs of `[^A-Za-z0-9]+` become a single space, the
//! text is lowercased, and each token is lemmatized. Stop words are kept:
//! words like "for" and "until" carry signal in debt comments.
//!
//! Features are weighted n-grams: a term's weight is
//! `ln(N * df_phrase / df_set^2)`, where `df_phrase` counts documents
//! containing the exact contiguous n-gram and `df_set` counts documents
//! containing all of its tokens in any position. For `df_phrase == df_set`
//! this reduces to the classic IDF `ln(N / df)`.

pub mod lemma;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::links::url_regex;
pub use lemma::Lemmatizer;

/// Sentinel token substituted for hyperlinks.
pub const URL_TOKEN: &str = "abstracturl";

/// A preprocessed document: ordered lowercase lemmas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDoc {
    pub tokens: Vec<String>,
    pub source_id: String,
}

impl TokenDoc {
    pub fn new(tokens: Vec<String>, source_id: impl Into<String>) -> Self {
        TokenDoc {
            tokens,
            source_id: source_id.into(),
        }
    }
}

fn bundled_lemmatizer() -> &'static Lemmatizer {
    static LEM: OnceLock<Lemmatizer> = OnceLock::new();
    LEM.get_or_init(Lemmatizer::bundled)
}

/// Preprocess raw comment text with the bundled lemma table.
pub fn preprocess(raw: &str) -> TokenDoc {
    preprocess_with(raw, bundled_lemmatizer())
}

/// Preprocess raw comment text with a caller-supplied lemma table.
pub fn preprocess_with(raw: &str, lemmatizer: &Lemmatizer) -> TokenDoc {
    let replaced = url_regex().replace_all(raw, URL_TOKEN);
    let mut cleaned = String::with_capacity(replaced.len());
    let mut last_was_space = false;
    for c in replaced.chars() {
        if c.is_ascii_alphanumeric() {
            cleaned.push(c);
            last_was_space = false;
        } else if !last_was_space {
            cleaned.push(' ');
            last_was_space = true;
        }
    }
    let lowered = cleaned.to_lowercase();
    let tokens = lowered
        .split_whitespace()
        .map(|t| lemmatizer.lemmatize(t))
        .collect();
    TokenDoc::new(tokens, "")
}

/// N-gram IDF weight: `ln(N * df_phrase / df_set^2)`.
pub fn ngram_idf_weight(df_phrase: usize, df_set: usize, n: usize) -> Result<f64> {
    if df_phrase < 1 {
        return Err(Error::Domain(format!("df_phrase must be >= 1, got {df_phrase}")));
    }
    if df_set < df_phrase {
        return Err(Error::Domain(format!(
            "df_set ({df_set}) must be >= df_phrase ({df_phrase})"
        )));
    }
    if n < df_set {
        return Err(Error::Domain(format!(
            "corpus size ({n}) must be >= df_set ({df_set})"
        )));
    }
    Ok((n as f64 * df_phrase as f64 / (df_set as f64 * df_set as f64)).ln())
}

/// One weighted vocabulary term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabTerm {
    pub ngram: Vec<String>,
    pub weight: f64,
    /// Per-class document frequency of the exact phrase.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub class_freq: BTreeMap<String, usize>,
}

/// A weighted term space. Terms are sorted by (length, lexicographic), which
/// fixes both the feature indices and all tie-breaking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramVocabulary {
    pub schema_version: u32,
    pub n_max: usize,
    /// Number of documents the vocabulary was built from.
    pub corpus_size: usize,
    pub terms: Vec<VocabTerm>,
}

impl NgramVocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of an exact n-gram, if present.
    pub fn index_of(&self, ngram: &[String]) -> Option<usize> {
        self.terms
            .binary_search_by(|t| {
                t.ngram
                    .len()
                    .cmp(&ngram.len())
                    .then_with(|| t.ngram[..].cmp(ngram))
            })
            .ok()
    }
}

/// Sparse feature vector over a vocabulary's term space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub dim: usize,
    /// (term index, value) pairs sorted by index; zero values are omitted.
    pub entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    pub fn zero(dim: usize) -> Self {
        FeatureVector {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(index as u32), |(i, _)| *i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn dot(&self, other: &FeatureVector) -> f64 {
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            match self.entries[i].0.cmp(&other.entries[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.entries[i].1 * other.entries[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }
}

/// Term counting mode for vectorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    /// Raw term frequencies (what multinomial NB consumes).
    Counts,
    /// Term frequency times vocabulary weight.
    Weighted,
}

/// Enumerate all contiguous n-grams (1..=n_max) over the labelled docs, drop
/// terms whose per-class document frequency is <= 1 in every class, and
/// weight the survivors over the full corpus.
pub fn build_ngram_vocabulary(
    docs: &[(TokenDoc, String)],
    n_max: usize,
) -> Result<NgramVocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if n_max < 1 {
        return Err(Error::Domain("n_max must be >= 1".into()));
    }
    let n_docs = docs.len();
    let words = n_docs.div_ceil(64);
    // Per-token bitsets over documents, for co-occurrence counts.
    let mut token_docs: HashMap<&str, Vec<u64>> = HashMap::new();
    for (d, (doc, _)) in docs.iter().enumerate() {
        for tok in &doc.tokens {
            let bits = token_docs
                .entry(tok.as_str())
                .or_insert_with(|| vec![0u64; words]);
            bits[d / 64] |= 1 << (d % 64);
        }
    }
    // Exact-phrase document frequencies, overall and per class.
    struct Acc {
        df_phrase: usize,
        class_freq: BTreeMap<String, usize>,
    }
    let mut phrase_df: BTreeMap<Vec<String>, Acc> = BTreeMap::new();
    for (doc, label) in docs {
        let mut seen: HashSet<&[String]> = HashSet::new();
        for k in 1..=n_max {
            if doc.tokens.len() < k {
                break;
            }
            for window in doc.tokens.windows(k) {
                seen.insert(window);
            }
        }
        for window in seen {
            let acc = phrase_df.entry(window.to_vec()).or_insert_with(|| Acc {
                df_phrase: 0,
                class_freq: BTreeMap::new(),
            });
            acc.df_phrase += 1;
            *acc.class_freq.entry(label.clone()).or_insert(0) += 1;
        }
    }
    let mut terms = Vec::new();
    for (ngram, acc) in phrase_df {
        if !acc.class_freq.values().any(|&c| c >= 2) {
            continue;
        }
        let mut bits = vec![u64::MAX; words];
        for tok in &ngram {
            let tok_bits = &token_docs[tok.as_str()];
            for (b, t) in bits.iter_mut().zip(tok_bits) {
                *b &= t;
            }
        }
        let df_set: usize = bits.iter().map(|w| w.count_ones() as usize).sum();
        let weight = ngram_idf_weight(acc.df_phrase, df_set, n_docs)?;
        terms.push(VocabTerm {
            ngram,
            weight,
            class_freq: acc.class_freq,
        });
    }
    terms.sort_by(|a, b| {
        a.ngram
            .len()
            .cmp(&b.ngram.len())
            .then_with(|| a.ngram.cmp(&b.ngram))
    });
    Ok(NgramVocabulary {
        schema_version: 1,
        n_max,
        corpus_size: n_docs,
        terms,
    })
}

/// Term frequencies of vocabulary terms in `doc`, as (index, count).
fn term_counts(doc: &TokenDoc, vocab: &NgramVocabulary) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for k in 1..=vocab.n_max {
        if doc.tokens.len() < k {
            break;
        }
        for window in doc.tokens.windows(k) {
            if let Some(idx) = vocab.index_of(window) {
                *counts.entry(idx).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Vectorize a document against a vocabulary. In `Weighted` mode each value
/// is tf times the term weight; in `Counts` mode it is the raw tf.
pub fn vectorize_mode(doc: &TokenDoc, vocab: &NgramVocabulary, mode: ValueMode) -> FeatureVector {
    let entries = term_counts(doc, vocab)
        .into_iter()
        .map(|(idx, tf)| {
            let value = match mode {
                ValueMode::Counts => tf as f64,
                ValueMode::Weighted => tf as f64 * vocab.terms[idx].weight,
            };
            (idx as u32, value)
        })
        .filter(|(_, v)| *v != 0.0)
        .collect();
    FeatureVector {
        dim: vocab.len(),
        entries,
    }
}

/// Weighted vectorization (tf times n-gram IDF weight).
pub fn vectorize(doc: &TokenDoc, vocab: &NgramVocabulary) -> FeatureVector {
    vectorize_mode(doc, vocab, ValueMode::Weighted)
}

/// Classic TF-IDF over unigrams: builds the unigram vocabulary with weights
/// `ln(N / df)` and returns one vector per document.
pub fn vectorize_tfidf(docs: &[TokenDoc]) -> Result<(NgramVocabulary, Vec<FeatureVector>)> {
    let vocab = build_tfidf_vocabulary(docs)?;
    let vectors = docs.iter().map(|d| vectorize(d, &vocab)).collect();
    Ok((vocab, vectors))
}

/// The unigram TF-IDF term space used by the baseline feature mode.
pub fn build_tfidf_vocabulary(docs: &[TokenDoc]) -> Result<NgramVocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = docs.len();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let uniq: HashSet<&str> = doc.tokens.iter().map(|t| t.as_str()).collect();
        for tok in uniq {
            *df.entry(tok).or_insert(0) += 1;
        }
    }
    let terms = df
        .into_iter()
        .map(|(tok, df)| VocabTerm {
            ngram: vec![tok.to_string()],
            weight: (n as f64 / df as f64).ln(),
            class_freq: BTreeMap::new(),
        })
        .collect();
    Ok(NgramVocabulary {
        schema_version: 1,
        n_max: 1,
        corpus_size: n,
        terms,
    })
}
