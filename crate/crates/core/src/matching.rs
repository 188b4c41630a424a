//! Cold-start matching: map a free-text wish onto the most similar existing
//! user through a TF-IDF space over user review documents.
//!
//! Weights are raw term count times `ln(N / df)`, L2-normalized. Cosine
//! similarity of two stored vectors is therefore a plain dot product.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::UserDocument;
use crate::text::Tokenizer;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("cannot build an index from zero user documents")]
    EmptyIndex,
    #[error("query has no terms in common with any user; please rephrase")]
    NoSignal,
    #[error("index file: {0}")]
    Persist(String),
}

/// Sparse vector: `(term index, weight)` pairs sorted by term index.
pub type SparseVector = Vec<(u32, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfIndex {
    /// Lexicographically sorted term list.
    terms: Vec<String>,
    idf: Vec<f64>,
    users: BTreeMap<String, SparseVector>,
    #[serde(skip)]
    term_index: HashMap<String, u32>,
}

impl TfidfIndex {
    pub fn build(docs: &BTreeMap<String, UserDocument>) -> Result<Self, MatchError> {
        if docs.is_empty() {
            return Err(MatchError::EmptyIndex);
        }
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for doc in docs.values() {
            for term in doc.tokens.keys() {
                *df.entry(term.as_str()).or_default() += 1;
            }
        }
        let n = docs.len() as f64;
        let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
        let idf: Vec<f64> = df.values().map(|&d| (n / d as f64).ln()).collect();
        let mut index = Self {
            terms,
            idf,
            users: BTreeMap::new(),
            term_index: HashMap::new(),
        };
        index.rebuild_term_index();
        let users = docs
            .iter()
            .map(|(id, doc)| {
                let counts = doc.tokens.iter().map(|(t, &c)| (t.as_str(), c));
                (id.clone(), index.weigh(counts))
            })
            .collect();
        index.users = users;
        Ok(index)
    }

    fn rebuild_term_index(&mut self) {
        self.term_index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
    }

    fn weigh<'a>(&self, counts: impl Iterator<Item = (&'a str, u32)>) -> SparseVector {
        let mut v: SparseVector = counts
            .filter_map(|(t, c)| {
                let i = *self.term_index.get(t)?;
                let w = c as f64 * self.idf[i as usize];
                (w > 0.0).then_some((i, w))
            })
            .collect();
        v.sort_by_key(|&(i, _)| i);
        let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut v {
                *w /= norm;
            }
        }
        v
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.term_index.get(term).map(|&i| self.idf[i as usize])
    }

    pub fn user_vector(&self, user_id: &str) -> Option<&SparseVector> {
        self.users.get(user_id)
    }

    pub fn users(&self) -> impl Iterator<Item = (&str, &SparseVector)> {
        self.users.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// Tokenizes `text` like the user documents and weighs it with the index
    /// idf. Unseen terms are dropped; the result may be the zero vector.
    pub fn vectorize_query(&self, tokenizer: &Tokenizer, text: &str) -> SparseVector {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for t in tokenizer.tokenize(text) {
            *counts.entry(t).or_default() += 1;
        }
        self.weigh(counts.iter().map(|(t, &c)| (t.as_str(), c)))
    }

    /// Most similar user by cosine; ties go to the smallest user id.
    pub fn match_user(&self, tokenizer: &Tokenizer, text: &str) -> Result<UserMatch, MatchError> {
        let query = self.vectorize_query(tokenizer, text);
        if query.is_empty() {
            return Err(MatchError::NoSignal);
        }
        let mut best: Option<(&str, f64)> = None;
        // BTreeMap iteration is ascending, so strict `>` keeps the smallest id on ties.
        for (user, vector) in &self.users {
            let sim = sparse_dot(&query, vector);
            if best.is_none_or(|(_, b)| sim > b) {
                best = Some((user, sim));
            }
        }
        let (user_id, similarity) = best.ok_or(MatchError::EmptyIndex)?;
        Ok(UserMatch {
            user_id: user_id.to_string(),
            similarity: similarity.clamp(0.0, 1.0),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MatchError> {
        let body = serde_json::to_string(self).map_err(|e| MatchError::Persist(e.to_string()))?;
        fs::write(path, body).map_err(|e| MatchError::Persist(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MatchError> {
        let body = fs::read_to_string(path).map_err(|e| MatchError::Persist(e.to_string()))?;
        let mut index: Self = serde_json::from_str(&body).map_err(|e| MatchError::Persist(e.to_string()))?;
        if index.terms.len() != index.idf.len() {
            return Err(MatchError::Persist("terms and idf lengths differ".into()));
        }
        index.rebuild_term_index();
        Ok(index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserMatch {
    pub user_id: String,
    pub similarity: f64,
}

/// Dot product of two index-sorted sparse vectors.
pub fn sparse_dot(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}
