//! Everything a running recommender needs, assembled once and shared
//! read-only: configuration, tokenizer, reviews, item space, TF-IDF index
//! and justification templates.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    build_item_profiles, build_user_documents, load_items, load_reviews, mine_vocabulary, Catalog, CorpusError,
    KeyphraseVocabulary, MiningParams, ReviewCorpus,
};
use crate::engine::{init_user_state, BackendKind, EngineError, ItemSpace, UserState};
use crate::justify::{JustifyError, Templates};
use crate::matching::{MatchError, TfidfIndex, UserMatch};
use crate::text::Tokenizer;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Justify(#[from] JustifyError),
    #[error("config: {0}")]
    Config(String),
    #[error("review `{review_id}` refers to unknown item `{item_id}`")]
    DanglingReview { review_id: String, item_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub top_n: usize,
    pub k_expl: usize,
    pub vocab_size: usize,
    pub df_low: f64,
    pub df_high: f64,
    pub backend: BackendKind,
    /// Keyphrases never admitted into the mined vocabulary.
    pub exclude: Vec<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            top_n: 10,
            k_expl: 6,
            vocab_size: 90,
            df_low: 0.01,
            df_high: 0.5,
            backend: BackendKind::PerItem,
            exclude: Vec::new(),
        }
    }
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SystemError> {
        let path = path.as_ref();
        let body = fs::read_to_string(path).map_err(|e| SystemError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&body)
    }

    pub fn parse(body: &str) -> Result<Self, SystemError> {
        let config: Self = toml::from_str(body).map_err(|e| SystemError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        if self.top_n == 0 || self.k_expl == 0 || self.vocab_size == 0 {
            return Err(SystemError::Config(
                "top_n, k_expl and vocab_size must be positive".into(),
            ));
        }
        if !(0.0 <= self.df_low && self.df_low < self.df_high && self.df_high <= 1.0) {
            return Err(SystemError::Config("need 0 <= df_low < df_high <= 1".into()));
        }
        Ok(())
    }

    pub fn mining_params(&self) -> MiningParams {
        MiningParams {
            size: self.vocab_size,
            df_low: self.df_low,
            df_high: self.df_high,
            exclude: self.exclude.iter().cloned().collect::<BTreeSet<_>>(),
        }
    }
}

/// Optional overrides for [`System::build`].
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub vocabulary: Option<KeyphraseVocabulary>,
    pub tokenizer: Option<Tokenizer>,
    pub templates: Option<Templates>,
    pub index: Option<TfidfIndex>,
}

#[derive(Debug, Clone)]
pub struct System {
    pub config: Config,
    pub tokenizer: Tokenizer,
    pub corpus: ReviewCorpus,
    pub space: ItemSpace,
    pub index: TfidfIndex,
    pub templates: Templates,
}

impl System {
    pub fn build(
        corpus: ReviewCorpus,
        catalog: Catalog,
        config: Config,
        overrides: Overrides,
    ) -> Result<Self, SystemError> {
        config.validate()?;
        if let Some(r) = corpus.reviews().iter().find(|r| catalog.get(&r.item_id).is_none()) {
            return Err(SystemError::DanglingReview {
                review_id: r.review_id.clone(),
                item_id: r.item_id.clone(),
            });
        }
        let tokenizer = overrides.tokenizer.unwrap_or_default();
        let vocab = match overrides.vocabulary {
            Some(v) => v,
            None => mine_vocabulary(&corpus, &catalog, &config.mining_params(), &tokenizer)?,
        };
        let profiles = build_item_profiles(&corpus, &catalog, &vocab, &tokenizer);
        let index = match overrides.index {
            Some(i) => i,
            None => TfidfIndex::build(&build_user_documents(&corpus, &tokenizer))?,
        };
        Ok(Self {
            config,
            tokenizer,
            corpus,
            space: ItemSpace {
                vocab,
                catalog,
                profiles,
            },
            index,
            templates: overrides.templates.unwrap_or_default(),
        })
    }

    /// Loads a data directory.
    ///
    /// Required: `reviews.jsonl`, `items.jsonl`. Optional: `vocab.txt`
    /// (skips mining), `stopwords.txt`, `templates.txt` + `adjectives.txt`,
    /// `index.json` (persisted TF-IDF index).
    pub fn from_dir(dir: impl AsRef<Path>, config: Config) -> Result<Self, SystemError> {
        let dir = dir.as_ref();
        let corpus = load_reviews(dir.join("reviews.jsonl"))?;
        let catalog = load_items(dir.join("items.jsonl"))?;
        let mut overrides = Overrides::default();
        if dir.join("vocab.txt").exists() {
            overrides.vocabulary = Some(KeyphraseVocabulary::load(dir.join("vocab.txt"))?);
        }
        if dir.join("stopwords.txt").exists() {
            let body = fs::read_to_string(dir.join("stopwords.txt"))
                .map_err(|e| SystemError::Config(format!("stopwords.txt: {e}")))?;
            overrides.tokenizer = Some(Tokenizer::from_stopword_list(&body));
        }
        if dir.join("templates.txt").exists() && dir.join("adjectives.txt").exists() {
            overrides.templates = Some(Templates::load(dir.join("templates.txt"), dir.join("adjectives.txt"))?);
        }
        if dir.join("index.json").exists() {
            overrides.index = Some(TfidfIndex::load(dir.join("index.json"))?);
        }
        Self::build(corpus, catalog, config, overrides)
    }

    pub fn vocab(&self) -> &KeyphraseVocabulary {
        &self.space.vocab
    }

    pub fn catalog(&self) -> &Catalog {
        &self.space.catalog
    }

    pub fn match_user(&self, text: &str) -> Result<UserMatch, MatchError> {
        self.index.match_user(&self.tokenizer, text)
    }

    pub fn init_user_state(&self, user_id: &str) -> Result<UserState, EngineError> {
        init_user_state(user_id, &self.corpus, &self.space.vocab, &self.tokenizer)
    }
}
