//! Reviews, the item catalog, keyphrase vocabulary mining and the per-item /
//! per-user documents built on top of them.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{phrase_tokens, Tokenizer};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate review_id `{0}`")]
    DuplicateReview(String),
    #[error("duplicate item_id `{0}`")]
    DuplicateItem(String),
    #[error("item `{0}` has an empty destination")]
    EmptyDestination(String),
    #[error("review corpus is empty")]
    EmptyCorpus,
    #[error("invalid mining parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    pub user_id: String,
    pub item_id: String,
    pub rating: u8,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub item_id: String,
    pub name: String,
    pub destination: String,
    pub description: String,
}

/// All reviews in load order, indexed by user and by item.
#[derive(Debug, Clone, Default)]
pub struct ReviewCorpus {
    reviews: Vec<Review>,
    by_user: BTreeMap<String, Vec<usize>>,
    by_item: HashMap<String, Vec<usize>>,
}

impl ReviewCorpus {
    pub fn new(reviews: Vec<Review>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        let mut by_user: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut by_item: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, r) in reviews.iter().enumerate() {
            validate_review(r).map_err(|message| CorpusError::Malformed { line: i + 1, message })?;
            if !seen.insert(r.review_id.as_str()) {
                return Err(CorpusError::DuplicateReview(r.review_id.clone()));
            }
            by_user.entry(r.user_id.clone()).or_default().push(i);
            by_item.entry(r.item_id.clone()).or_default().push(i);
        }
        Ok(Self {
            reviews,
            by_user,
            by_item,
        })
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn reviews(&self) -> &[Review] {
        &self.reviews
    }

    /// Distinct user ids, sorted.
    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.by_user.keys().map(String::as_str)
    }

    pub fn has_user(&self, user_id: &str) -> bool {
        self.by_user.contains_key(user_id)
    }

    pub fn reviews_by_user<'a>(&'a self, user_id: &str) -> impl Iterator<Item = &'a Review> + 'a {
        self.by_user
            .get(user_id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.reviews[i])
    }

    pub fn reviews_of_item<'a>(&'a self, item_id: &str) -> impl Iterator<Item = &'a Review> + 'a {
        self.by_item
            .get(item_id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.reviews[i])
    }
}

fn validate_review(r: &Review) -> Result<(), String> {
    if !(1..=5).contains(&r.rating) {
        return Err(format!("rating {} outside 1..=5", r.rating));
    }
    if r.text.trim().is_empty() {
        return Err("review text is empty".into());
    }
    Ok(())
}

/// Items keyed by id, with the sorted list of distinct destinations.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    items: BTreeMap<String, Item>,
    destinations: Vec<String>,
}

impl Catalog {
    pub fn new(items: Vec<Item>) -> Result<Self, CorpusError> {
        let mut map = BTreeMap::new();
        let mut destinations = BTreeSet::new();
        for item in items {
            if item.destination.trim().is_empty() {
                return Err(CorpusError::EmptyDestination(item.item_id));
            }
            destinations.insert(item.destination.clone());
            let id = item.item_id.clone();
            if map.insert(id.clone(), item).is_some() {
                return Err(CorpusError::DuplicateItem(id));
            }
        }
        Ok(Self {
            items: map,
            destinations: destinations.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, item_id: &str) -> Option<&Item> {
        self.items.get(item_id)
    }

    /// All items in ascending item_id order.
    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.items.values()
    }

    pub fn destinations(&self) -> &[String] {
        &self.destinations
    }

    pub fn has_destination(&self, destination: &str) -> bool {
        self.destinations
            .binary_search_by(|d| d.as_str().cmp(destination))
            .is_ok()
    }

    /// Items of one destination in ascending item_id order.
    pub fn items_in<'a>(&'a self, destination: &'a str) -> impl Iterator<Item = &'a Item> + 'a {
        self.items.values().filter(move |i| i.destination == destination)
    }
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let body = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_jsonl(&body)
}

pub(crate) fn parse_jsonl<T: serde::de::DeserializeOwned>(body: &str) -> Result<Vec<T>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Loads `reviews.jsonl`. Validation errors carry the 1-based file line.
pub fn load_reviews(path: impl AsRef<Path>) -> Result<ReviewCorpus, CorpusError> {
    let path = path.as_ref();
    let body = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_reviews(&body)
}

pub fn parse_reviews(body: &str) -> Result<ReviewCorpus, CorpusError> {
    let mut reviews = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let review: Review = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        validate_review(&review).map_err(|message| CorpusError::Malformed { line: line_no, message })?;
        if !seen.insert(review.review_id.clone()) {
            return Err(CorpusError::DuplicateReview(review.review_id));
        }
        reviews.push(review);
    }
    ReviewCorpus::new(reviews)
}

/// Loads `items.jsonl`.
pub fn load_items(path: impl AsRef<Path>) -> Result<Catalog, CorpusError> {
    Catalog::new(read_jsonl(path.as_ref())?)
}

pub fn parse_items(body: &str) -> Result<Catalog, CorpusError> {
    Catalog::new(parse_jsonl(body)?)
}

/// One JSON object per line, the inverse of the loaders.
pub fn to_jsonl<'a, T: Serialize + 'a>(rows: impl IntoIterator<Item = &'a T>) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row).expect("plain records always serialize"));
        out.push('\n');
    }
    out
}

/// Writes a corpus and catalog as `reviews.jsonl` and `items.jsonl` into `dir`.
pub fn write_dataset(dir: impl AsRef<Path>, corpus: &ReviewCorpus, catalog: &Catalog) -> Result<(), CorpusError> {
    let dir = dir.as_ref();
    let write = |name: &str, body: String| {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write("reviews.jsonl", to_jsonl(corpus.reviews()))?;
    write("items.jsonl", to_jsonl(catalog.items()))
}

/// Ordered keyphrase list: the explanation and critique alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyphraseVocabulary {
    phrases: Vec<String>,
    index: HashMap<String, usize>,
}

impl KeyphraseVocabulary {
    pub fn new<I, S>(phrases: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out = Vec::new();
        let mut index = HashMap::new();
        for raw in phrases {
            let tokens = phrase_tokens(raw.as_ref());
            if tokens.is_empty() || tokens.len() > 2 {
                return Err(CorpusError::InvalidVocabulary(format!(
                    "`{}` must have one or two tokens",
                    raw.as_ref()
                )));
            }
            if tokens.iter().any(|t| !t.chars().all(char::is_alphanumeric)) {
                return Err(CorpusError::InvalidVocabulary(format!(
                    "`{}` contains non-alphanumeric characters",
                    raw.as_ref()
                )));
            }
            let phrase = tokens.join(" ");
            if index.insert(phrase.clone(), out.len()).is_some() {
                return Err(CorpusError::InvalidVocabulary(format!("duplicate phrase `{phrase}`")));
            }
            out.push(phrase);
        }
        Ok(Self { phrases: out, index })
    }

    /// Parses a `vocab.txt` body: one phrase per line in rank order.
    pub fn parse(body: &str) -> Result<Self, CorpusError> {
        Self::new(body.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let body = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&body)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.phrases.join("\n");
        s.push('\n');
        s
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }

    pub fn phrase(&self, idx: usize) -> &str {
        &self.phrases[idx]
    }

    pub fn index_of(&self, phrase: &str) -> Option<usize> {
        self.index.get(phrase).copied().or_else(|| {
            let normalized = phrase_tokens(phrase).join(" ");
            self.index.get(&normalized).copied()
        })
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.index_of(phrase).is_some()
    }

    /// Counts of every vocabulary phrase in `text`, aligned with the vocabulary.
    pub fn count_into(&self, tokenizer: &Tokenizer, text: &str, counts: &mut [u32]) {
        for phrase in tokenizer.phrases(text) {
            if let Some(&k) = self.index.get(&phrase) {
                counts[k] += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningParams {
    pub size: usize,
    pub df_low: f64,
    pub df_high: f64,
    pub exclude: BTreeSet<String>,
}

impl Default for MiningParams {
    fn default() -> Self {
        Self {
            size: 90,
            df_low: 0.01,
            df_high: 0.5,
            exclude: BTreeSet::new(),
        }
    }
}

/// Mines unigram and bigram keyphrases from item review sets.
///
/// A candidate's document frequency is the fraction of catalog items whose
/// reviews contain it; candidates outside `[df_low, df_high]` or listed in
/// `exclude` are dropped. Survivors are ranked by total frequency
/// (descending), ties lexicographic.
pub fn mine_vocabulary(
    corpus: &ReviewCorpus,
    catalog: &Catalog,
    params: &MiningParams,
    tokenizer: &Tokenizer,
) -> Result<KeyphraseVocabulary, CorpusError> {
    if params.size == 0 {
        return Err(CorpusError::InvalidParameters("size must be at least 1".into()));
    }
    if !(0.0 <= params.df_low && params.df_low < params.df_high && params.df_high <= 1.0) {
        return Err(CorpusError::InvalidParameters(format!(
            "need 0 <= df_low < df_high <= 1, got [{}, {}]",
            params.df_low, params.df_high
        )));
    }
    if corpus.is_empty() || catalog.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let exclude: HashSet<String> = params.exclude.iter().map(|p| phrase_tokens(p).join(" ")).collect();

    let mut frequency: HashMap<String, u64> = HashMap::new();
    let mut item_df: HashMap<String, u64> = HashMap::new();
    for item in catalog.items() {
        let mut present = HashSet::new();
        for review in corpus.reviews_of_item(&item.item_id) {
            for phrase in tokenizer.phrases(&review.text) {
                *frequency.entry(phrase.clone()).or_default() += 1;
                present.insert(phrase);
            }
        }
        for phrase in present {
            *item_df.entry(phrase).or_default() += 1;
        }
    }

    let n_items = catalog.len() as f64;
    let mut candidates: Vec<(String, u64)> = frequency
        .into_iter()
        .filter(|(p, _)| {
            let df = item_df[p] as f64 / n_items;
            df >= params.df_low && df <= params.df_high && !exclude.contains(p)
        })
        .collect();
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    candidates.truncate(params.size);
    KeyphraseVocabulary::new(candidates.into_iter().map(|(p, _)| p))
}

/// Keyphrase counts and L2-normalized salience of one item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemProfile {
    pub item_id: String,
    /// Raw occurrence counts aligned with the vocabulary.
    pub counts: Vec<u32>,
    /// `counts` scaled to unit L2 norm, or all zeros.
    pub salience: Vec<f64>,
}

impl ItemProfile {
    pub fn from_counts(item_id: impl Into<String>, counts: Vec<u32>) -> Self {
        let salience = l2_normalize_counts(&counts);
        Self {
            item_id: item_id.into(),
            counts,
            salience,
        }
    }

    /// Non-zero counts keyed by phrase.
    pub fn count_map(&self, vocab: &KeyphraseVocabulary) -> BTreeMap<String, u32> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (vocab.phrase(k).to_string(), c))
            .collect()
    }
}

pub(crate) fn l2_normalize_counts(counts: &[u32]) -> Vec<f64> {
    let norm = counts.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt();
    if norm == 0.0 {
        vec![0.0; counts.len()]
    } else {
        counts.iter().map(|&c| c as f64 / norm).collect()
    }
}

/// Item profiles from each item's reviews plus its description.
///
/// Each text is tokenized on its own, so bigrams never span two reviews.
pub fn build_item_profiles(
    corpus: &ReviewCorpus,
    catalog: &Catalog,
    vocab: &KeyphraseVocabulary,
    tokenizer: &Tokenizer,
) -> BTreeMap<String, ItemProfile> {
    catalog
        .items()
        .map(|item| {
            let mut counts = vec![0u32; vocab.len()];
            for review in corpus.reviews_of_item(&item.item_id) {
                vocab.count_into(tokenizer, &review.text, &mut counts);
            }
            vocab.count_into(tokenizer, &item.description, &mut counts);
            (
                item.item_id.clone(),
                ItemProfile::from_counts(item.item_id.clone(), counts),
            )
        })
        .collect()
}

/// Filtered word tokens of everything one user wrote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserDocument {
    pub user_id: String,
    pub tokens: BTreeMap<String, u32>,
}

pub fn build_user_documents(corpus: &ReviewCorpus, tokenizer: &Tokenizer) -> BTreeMap<String, UserDocument> {
    corpus
        .users()
        .map(|user| {
            let mut tokens = BTreeMap::new();
            for review in corpus.reviews_by_user(user) {
                for t in tokenizer.tokenize(&review.text) {
                    *tokens.entry(t).or_insert(0) += 1;
                }
            }
            (
                user.to_string(),
                UserDocument {
                    user_id: user.to_string(),
                    tokens,
                },
            )
        })
        .collect()
}
