//! Recommend / critique engine.
//!
//! A user is an immutable [`UserState`]: a base preference vector over the
//! keyphrase vocabulary plus a critique map. A critique overrides the
//! effective weight of one keyphrase with `+1` (positive) or `-1`
//! (negative); the base vector is never touched, so every critique can be
//! retracted exactly.
//!
//! Items are scored by the dot product of effective weights and item
//! salience. Two reference backends share that scoring and differ in how
//! they explain and which critiques they accept:
//!
//! * [`SharedBackend`]: one global explanation for the whole list, negative
//!   critiques only.
//! * [`PerItemBackend`]: one explanation per user-item pair, positive and
//!   negative critiques.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{l2_normalize_counts, Catalog, ItemProfile, KeyphraseVocabulary, ReviewCorpus};
use crate::text::Tokenizer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("unknown destination `{0}`")]
    UnknownDestination(String),
    #[error("`{0}` is not in the keyphrase vocabulary")]
    UnknownKeyphrase(String),
    #[error("the {0} backend only accepts negative critiques")]
    PositiveNotSupported(BackendKind),
    #[error("`{0}` has not been critiqued")]
    NotCritiqued(String),
    #[error("vocabulary mismatch: state has {state} dimensions, profile has {profile}")]
    VocabularyMismatch { state: usize, profile: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Polarity {
    #[serde(alias = "positive")]
    Positive,
    #[serde(alias = "negative")]
    Negative,
}

impl Polarity {
    pub fn weight(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Shared,
    PerItem,
}

impl BackendKind {
    pub fn backend(self) -> &'static dyn CritiqueBackend {
        match self {
            BackendKind::Shared => &SharedBackend,
            BackendKind::PerItem => &PerItemBackend,
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Shared => "shared",
            BackendKind::PerItem => "per_item",
        })
    }
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "shared" => Ok(BackendKind::Shared),
            "per_item" | "per-item" | "peritem" => Ok(BackendKind::PerItem),
            other => Err(format!("unknown backend `{other}` (expected shared or per_item)")),
        }
    }
}

/// Base preferences plus critiques, keyed by vocabulary index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserState {
    base: Vec<f64>,
    critiques: BTreeMap<usize, Polarity>,
}

impl UserState {
    /// State with the given base vector and no critiques.
    pub fn new(base: Vec<f64>) -> Self {
        Self {
            base,
            critiques: BTreeMap::new(),
        }
    }

    /// All-zero base, used when no preferences are known.
    pub fn zeroed(dimensions: usize) -> Self {
        Self::new(vec![0.0; dimensions])
    }

    pub fn dimensions(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn critiques(&self) -> &BTreeMap<usize, Polarity> {
        &self.critiques
    }

    pub fn critique_of(&self, k: usize) -> Option<Polarity> {
        self.critiques.get(&k).copied()
    }

    /// Critiques keyed by phrase.
    pub fn named_critiques(&self, vocab: &KeyphraseVocabulary) -> BTreeMap<String, Polarity> {
        self.critiques
            .iter()
            .map(|(&k, &p)| (vocab.phrase(k).to_string(), p))
            .collect()
    }

    pub fn effective_weight(&self, k: usize) -> f64 {
        match self.critiques.get(&k) {
            Some(p) => p.weight(),
            None => self.base[k],
        }
    }

    pub fn effective_weights(&self) -> Vec<f64> {
        (0..self.base.len()).map(|k| self.effective_weight(k)).collect()
    }

    fn with_critique(&self, k: usize, polarity: Polarity) -> Self {
        let mut next = self.clone();
        next.critiques.insert(k, polarity);
        next
    }

    fn without_critique(&self, k: usize) -> Self {
        let mut next = self.clone();
        next.critiques.remove(&k);
        next
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExplanationScope {
    Global,
    PerItem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub keyphrases: Vec<String>,
    pub scope: ExplanationScope,
}

impl Explanation {
    pub fn is_empty(&self) -> bool {
        self.keyphrases.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub item_id: String,
    pub score: f64,
    pub explanation: Explanation,
}

/// Top-N list. With the shared backend, `shared` holds the global
/// explanation that every entry also carries.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RankedList {
    pub entries: Vec<RankedEntry>,
    pub shared: Option<Explanation>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based position of `item_id`, if listed.
    pub fn rank_of(&self, item_id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.item_id == item_id).map(|p| p + 1)
    }

    pub fn item_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.item_id.as_str())
    }
}

/// Read-only item side of the model: vocabulary, catalog and profiles.
#[derive(Debug, Clone)]
pub struct ItemSpace {
    pub vocab: KeyphraseVocabulary,
    pub catalog: Catalog,
    pub profiles: BTreeMap<String, ItemProfile>,
}

impl ItemSpace {
    pub fn profile(&self, item_id: &str) -> Option<&ItemProfile> {
        self.profiles.get(item_id)
    }

    fn keyphrase_index(&self, keyphrase: &str) -> Result<usize, EngineError> {
        self.vocab
            .index_of(keyphrase)
            .ok_or_else(|| EngineError::UnknownKeyphrase(keyphrase.to_string()))
    }

    fn destination_profiles<'a>(
        &'a self,
        destination: &'a str,
    ) -> Result<impl Iterator<Item = &'a ItemProfile> + 'a, EngineError> {
        if !self.catalog.has_destination(destination) {
            return Err(EngineError::UnknownDestination(destination.to_string()));
        }
        Ok(self
            .catalog
            .items_in(destination)
            .filter_map(|item| self.profiles.get(&item.item_id)))
    }
}

/// Initial state of a matched user: L2-normalized keyphrase counts over all
/// of their reviews, with no critiques.
pub fn init_user_state(
    user_id: &str,
    corpus: &ReviewCorpus,
    vocab: &KeyphraseVocabulary,
    tokenizer: &Tokenizer,
) -> Result<UserState, EngineError> {
    if !corpus.has_user(user_id) {
        return Err(EngineError::UnknownUser(user_id.to_string()));
    }
    let mut counts = vec![0u32; vocab.len()];
    for review in corpus.reviews_by_user(user_id) {
        vocab.count_into(tokenizer, &review.text, &mut counts);
    }
    Ok(UserState::new(l2_normalize_counts(&counts)))
}

pub fn score_item(state: &UserState, profile: &ItemProfile) -> Result<f64, EngineError> {
    if state.dimensions() != profile.salience.len() {
        return Err(EngineError::VocabularyMismatch {
            state: state.dimensions(),
            profile: profile.salience.len(),
        });
    }
    Ok(score_with(&state.effective_weights(), profile))
}

fn score_with(weights: &[f64], profile: &ItemProfile) -> f64 {
    weights.iter().zip(&profile.salience).map(|(w, p)| w * p).sum()
}

/// Keyphrases with positive effective weight, strongest first.
pub fn explain_shared(state: &UserState, vocab: &KeyphraseVocabulary, k_expl: usize) -> Explanation {
    to_explanation(
        vocab,
        explain_shared_with(&state.effective_weights(), k_expl),
        ExplanationScope::Global,
    )
}

fn explain_shared_with(weights: &[f64], k_expl: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > 0.0).collect();
    ks.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    ks.truncate(k_expl);
    ks
}

/// Keyphrases the item actually has, ranked by `salience * (1 + weight)`.
/// Keyphrases with negative effective weight are never included.
pub fn explain_per_item(
    state: &UserState,
    profile: &ItemProfile,
    vocab: &KeyphraseVocabulary,
    k_expl: usize,
) -> Explanation {
    to_explanation(
        vocab,
        explain_per_item_with(&state.effective_weights(), profile, k_expl),
        ExplanationScope::PerItem,
    )
}

fn explain_per_item_with(weights: &[f64], profile: &ItemProfile, k_expl: usize) -> Vec<usize> {
    let relevance: Vec<f64> = weights
        .iter()
        .zip(&profile.salience)
        .map(|(w, p)| p * (1.0 + w))
        .collect();
    let mut ks: Vec<usize> = (0..weights.len())
        .filter(|&k| profile.salience[k] > 0.0 && weights[k] >= 0.0)
        .collect();
    ks.sort_by(|&a, &b| relevance[b].total_cmp(&relevance[a]).then(a.cmp(&b)));
    ks.truncate(k_expl);
    ks
}

fn to_explanation(vocab: &KeyphraseVocabulary, ks: Vec<usize>, scope: ExplanationScope) -> Explanation {
    Explanation {
        keyphrases: ks.into_iter().map(|k| vocab.phrase(k).to_string()).collect(),
        scope,
    }
}

/// Score ordering: descending score, then ascending item id.
pub fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

/// Model-agnostic contract every recommender/critiquing backend fulfils.
pub trait CritiqueBackend: Send + Sync {
    fn kind(&self) -> BackendKind;

    fn accepts(&self, polarity: Polarity) -> bool;

    /// Explanation(s) for an already scored and truncated list.
    fn explain(&self, space: &ItemSpace, state: &UserState, ranked: Vec<(String, f64)>, k_expl: usize) -> RankedList;

    fn recommend(
        &self,
        space: &ItemSpace,
        state: &UserState,
        destination: &str,
        top_n: usize,
        k_expl: usize,
    ) -> Result<RankedList, EngineError> {
        if top_n == 0 || k_expl == 0 {
            return Err(EngineError::InvalidParameter(
                "top_n and k_expl must be at least 1".into(),
            ));
        }
        let weights = state.effective_weights();
        let mut scored = Vec::new();
        for profile in space.destination_profiles(destination)? {
            if profile.salience.len() != weights.len() {
                return Err(EngineError::VocabularyMismatch {
                    state: weights.len(),
                    profile: profile.salience.len(),
                });
            }
            scored.push((profile.item_id.clone(), score_with(&weights, profile)));
        }
        scored.sort_by(|a, b| rank_order((&a.0, a.1), (&b.0, b.1)));
        scored.truncate(top_n);
        Ok(self.explain(space, state, scored, k_expl))
    }

    fn apply_critique(
        &self,
        space: &ItemSpace,
        state: &UserState,
        keyphrase: &str,
        polarity: Polarity,
    ) -> Result<UserState, EngineError> {
        let k = space.keyphrase_index(keyphrase)?;
        if !self.accepts(polarity) {
            return Err(EngineError::PositiveNotSupported(self.kind()));
        }
        Ok(state.with_critique(k, polarity))
    }

    fn retract_critique(
        &self,
        space: &ItemSpace,
        state: &UserState,
        keyphrase: &str,
    ) -> Result<UserState, EngineError> {
        retract_critique(space, state, keyphrase)
    }
}

pub fn retract_critique(space: &ItemSpace, state: &UserState, keyphrase: &str) -> Result<UserState, EngineError> {
    let k = space.keyphrase_index(keyphrase)?;
    if state.critique_of(k).is_none() {
        return Err(EngineError::NotCritiqued(space.vocab.phrase(k).to_string()));
    }
    Ok(state.without_critique(k))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SharedBackend;

impl CritiqueBackend for SharedBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Shared
    }

    fn accepts(&self, polarity: Polarity) -> bool {
        polarity == Polarity::Negative
    }

    fn explain(&self, space: &ItemSpace, state: &UserState, ranked: Vec<(String, f64)>, k_expl: usize) -> RankedList {
        let shared = to_explanation(
            &space.vocab,
            explain_shared_with(&state.effective_weights(), k_expl),
            ExplanationScope::Global,
        );
        RankedList {
            entries: ranked
                .into_iter()
                .map(|(item_id, score)| RankedEntry {
                    item_id,
                    score,
                    explanation: shared.clone(),
                })
                .collect(),
            shared: Some(shared),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PerItemBackend;

impl CritiqueBackend for PerItemBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::PerItem
    }

    fn accepts(&self, _polarity: Polarity) -> bool {
        true
    }

    fn explain(&self, space: &ItemSpace, state: &UserState, ranked: Vec<(String, f64)>, k_expl: usize) -> RankedList {
        let weights = state.effective_weights();
        RankedList {
            entries: ranked
                .into_iter()
                .map(|(item_id, score)| {
                    let ks = space
                        .profile(&item_id)
                        .map(|p| explain_per_item_with(&weights, p, k_expl))
                        .unwrap_or_default();
                    RankedEntry {
                        item_id,
                        score,
                        explanation: to_explanation(&space.vocab, ks, ExplanationScope::PerItem),
                    }
                })
                .collect(),
            shared: None,
        }
    }
}

/// Shorthand for `backend.backend().recommend(..)`.
pub fn recommend(
    space: &ItemSpace,
    state: &UserState,
    destination: &str,
    top_n: usize,
    k_expl: usize,
    backend: BackendKind,
) -> Result<RankedList, EngineError> {
    backend.backend().recommend(space, state, destination, top_n, k_expl)
}

pub fn apply_critique(
    space: &ItemSpace,
    state: &UserState,
    keyphrase: &str,
    polarity: Polarity,
    backend: BackendKind,
) -> Result<UserState, EngineError> {
    backend.backend().apply_critique(space, state, keyphrase, polarity)
}

/// Static keyword filtering: items of `destination` that mention every
/// selected keyphrase, in ascending item id order.
pub fn filter_static(space: &ItemSpace, destination: &str, selected: &[String]) -> Result<Vec<String>, EngineError> {
    let wanted: BTreeSet<usize> = selected
        .iter()
        .map(|s| space.keyphrase_index(s))
        .collect::<Result<_, _>>()?;
    Ok(space
        .destination_profiles(destination)?
        .filter(|p| wanted.iter().all(|&k| p.salience[k] > 0.0))
        .map(|p| p.item_id.clone())
        .collect())
}
