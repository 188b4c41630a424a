//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's tokenizer, index or scorer: every
//! oracle recomputes from raw text with plain loops and dense vectors.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use critique_core::synthetic::{generate_synthetic, SyntheticConfig};
use critique_core::{Config, ItemProfile, ReviewCorpus, System, UserState};

const STOPWORDS: &str = include_str!("../../data/stopwords.txt");

pub fn stopwords() -> HashSet<String> {
    STOPWORDS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

/// Lowercase, split on non-alphanumerics, drop stopwords and short tokens.
pub fn naive_tokens(text: &str, stop: &HashSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            if cur.chars().count() >= 3 && !stop.contains(&cur) {
                out.push(cur.clone());
            }
            cur.clear();
        }
    }
    out
}

/// Unigram and bigram occurrence counts of one text.
pub fn naive_phrase_counts(text: &str, stop: &HashSet<String>) -> HashMap<String, u32> {
    let toks = naive_tokens(text, stop);
    let mut out = HashMap::new();
    for t in &toks {
        *out.entry(t.clone()).or_insert(0) += 1;
    }
    for i in 1..toks.len() {
        *out.entry(format!("{} {}", toks[i - 1], toks[i])).or_insert(0) += 1;
    }
    out
}

/// Small seeded corpus for oracle sweeps: 2 destinations of 5-9 hotels.
pub fn small_config(seed: u64) -> SyntheticConfig {
    SyntheticConfig {
        seed,
        n_destinations: 2,
        hotels_per_destination: (5, 9),
        n_users: 24,
        reviews_per_user: 4,
        vocab_size: 40,
        features_per_hotel: 4,
        preferences_per_user: 3,
        style_words_per_user: 2,
        ..SyntheticConfig::default()
    }
}

pub fn small_system(seed: u64) -> System {
    let (corpus, catalog) = generate_synthetic(&small_config(seed)).unwrap();
    let config = Config {
        vocab_size: 30,
        ..Config::default()
    };
    System::build(corpus, catalog, config, Default::default()).unwrap()
}

/// Dense TF-IDF over users, recomputed from raw review text; returns the
/// winning user (ties to the smallest id) and its cosine.
pub fn brute_force_match(corpus: &ReviewCorpus, query: &str) -> Option<(String, f64)> {
    let stop = stopwords();
    let mut docs: BTreeMap<String, HashMap<String, f64>> = BTreeMap::new();
    for r in corpus.reviews() {
        let doc = docs.entry(r.user_id.clone()).or_default();
        for t in naive_tokens(&r.text, &stop) {
            *doc.entry(t).or_insert(0.0) += 1.0;
        }
    }
    let n = docs.len() as f64;
    let mut df: HashMap<&str, f64> = HashMap::new();
    for doc in docs.values() {
        for t in doc.keys() {
            *df.entry(t.as_str()).or_insert(0.0) += 1.0;
        }
    }
    let terms: Vec<&str> = {
        let mut t: Vec<&str> = df.keys().copied().collect();
        t.sort();
        t
    };
    let dense = |counts: &HashMap<String, f64>| -> Vec<f64> {
        let v: Vec<f64> = terms
            .iter()
            .map(|t| counts.get(*t).copied().unwrap_or(0.0) * (n / df[t]).ln())
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter().map(|x| x / norm).collect()
        } else {
            v
        }
    };
    let mut qcounts = HashMap::new();
    for t in naive_tokens(query, &stop) {
        *qcounts.entry(t).or_insert(0.0) += 1.0;
    }
    let q = dense(&qcounts);
    if q.iter().all(|&x| x == 0.0) {
        return None;
    }
    let mut best: Option<(String, f64)> = None;
    for (user, doc) in &docs {
        let u = dense(doc);
        let sim: f64 = q.iter().zip(&u).map(|(a, b)| a * b).sum();
        if best.as_ref().is_none_or(|(_, b)| sim > *b) {
            best = Some((user.clone(), sim));
        }
    }
    best
}

/// Vocabulary counts of one item recomputed from its raw texts.
pub fn recount_profile(system: &System, item_id: &str) -> Vec<u32> {
    let stop = stopwords();
    let mut total: HashMap<String, u32> = HashMap::new();
    let item = system.catalog().get(item_id).unwrap();
    let texts = system
        .corpus
        .reviews()
        .iter()
        .filter(|r| r.item_id == item_id)
        .map(|r| r.text.as_str())
        .chain(std::iter::once(item.description.as_str()));
    for text in texts {
        for (p, c) in naive_phrase_counts(text, &stop) {
            *total.entry(p).or_insert(0) += c;
        }
    }
    system
        .vocab()
        .phrases()
        .iter()
        .map(|p| total.get(p).copied().unwrap_or(0))
        .collect()
}

/// Effective weights recomputed from the base vector and critique map.
pub fn effective(state: &UserState) -> Vec<f64> {
    let mut w = state.base().to_vec();
    for (&k, p) in state.critiques() {
        w[k] = match p {
            critique_core::Polarity::Positive => 1.0,
            critique_core::Polarity::Negative => -1.0,
        };
    }
    w
}

pub fn oracle_score(weights: &[f64], profile: &ItemProfile) -> f64 {
    let mut s = 0.0;
    for (w, v) in weights.iter().zip(&profile.salience) {
        s += w * v;
    }
    s
}

/// Full scan of a destination: every item scored, sorted by score desc then
/// id asc, truncated to `top_n`.
pub fn oracle_ranking(system: &System, state: &UserState, destination: &str, top_n: usize) -> Vec<(String, f64)> {
    let w = effective(state);
    let mut all: Vec<(String, f64)> = system
        .catalog()
        .items()
        .filter(|i| i.destination == destination)
        .map(|i| {
            (
                i.item_id.clone(),
                oracle_score(&w, system.space.profile(&i.item_id).unwrap()),
            )
        })
        .collect();
    // insertion sort keeps the oracle independent of the library comparator
    for i in 1..all.len() {
        let mut j = i;
        while j > 0 {
            let (a, b) = (&all[j - 1], &all[j]);
            let swap = b.1 > a.1 || (b.1 == a.1 && b.0 < a.0);
            if !swap {
                break;
            }
            all.swap(j - 1, j);
            j -= 1;
        }
    }
    all.truncate(top_n);
    all
}

/// Items of `destination` whose recount has every selected keyphrase.
pub fn oracle_filter(system: &System, destination: &str, selected: &[usize]) -> BTreeSet<String> {
    system
        .catalog()
        .items()
        .filter(|i| i.destination == destination)
        .filter(|i| {
            let counts = recount_profile(system, &i.item_id);
            selected.iter().all(|&k| counts[k] > 0)
        })
        .map(|i| i.item_id.clone())
        .collect()
}
