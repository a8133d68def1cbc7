//! Dictionary-plus-suffix-rule lemmatizer for lowercase tokens.
//!
//! The exception table (a versioned TSV shipped with the crate, replaceable
//! at run time) is consulted first; regular inflections are then reduced by
//! a small set of suffix rules. This trades exact NLP-toolkit parity for a
//! deterministic, auditable table.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

const BUNDLED_TABLE: &str = include_str!("../../data/lemmas.tsv");

#[derive(Debug, Clone)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
}

impl Lemmatizer {
    /// The table compiled into the crate.
    pub fn bundled() -> Self {
        Self::from_tsv_str(BUNDLED_TABLE).expect("bundled lemma table is well-formed")
    }

    /// Load a `surface<TAB>lemma` table from disk.
    pub fn from_tsv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv_str(&text)
    }

    pub fn from_tsv_str(text: &str) -> Result<Self> {
        let mut exceptions = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((surface, lemma)) = line.split_once('\t') else {
                return Err(Error::Schema {
                    line: i + 1,
                    message: "expected surface<TAB>lemma".into(),
                });
            };
            exceptions.insert(surface.trim().to_string(), lemma.trim().to_string());
        }
        Ok(Lemmatizer { exceptions })
    }

    /// Reduce one lowercase token to its lemma.
    pub fn lemmatize(&self, token: &str) -> String {
        if let Some(lemma) = self.exceptions.get(token) {
            return lemma.clone();
        }
        suffix_rules(token)
    }
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(|b| matches!(b, b'a' | b'e' | b'i' | b'o' | b'u'))
}

/// Drop a doubled final consonant (but keep l/s/z doubles: "call", "pass").
fn undouble(s: &str) -> String {
    let b = s.as_bytes();
    if b.len() >= 2 {
        let last = b[b.len() - 1];
        if last == b[b.len() - 2]
            && !matches!(last, b'l' | b's' | b'z')
            && !matches!(last, b'a' | b'e' | b'i' | b'o' | b'u')
        {
            return s[..s.len() - 1].to_string();
        }
    }
    s.to_string()
}

fn suffix_rules(token: &str) -> String {
    let n = token.len();
    if n >= 5 && token.ends_with("ies") {
        return format!("{}y", &token[..n - 3]);
    }
    if n >= 5 && token.ends_with("ied") {
        return format!("{}y", &token[..n - 3]);
    }
    if n >= 5
        && token.ends_with("es")
        && (token.ends_with("sses")
            || token.ends_with("xes")
            || token.ends_with("zes")
            || token.ends_with("ches")
            || token.ends_with("shes"))
    {
        return token[..n - 2].to_string();
    }
    if n >= 4
        && token.ends_with('s')
        && !token.ends_with("ss")
        && !token.ends_with("us")
        && !token.ends_with("is")
    {
        return token[..n - 1].to_string();
    }
    if n >= 5 && token.ends_with("ed") && !token.ends_with("eed") {
        let stem = &token[..n - 2];
        if has_vowel(stem) {
            return undouble(stem);
        }
    }
    if n >= 6 && token.ends_with("ing") {
        let stem = &token[..n - 3];
        if has_vowel(stem) {
            return undouble(stem);
        }
    }
    token.to_string()
}
