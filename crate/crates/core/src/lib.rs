//! Multi-step critiquing recommender.
//!
//! The pieces, bottom-up:
//!
//! - [`corpus`]: reviews, catalog, keyphrase mining and item profiles.
//! - [`matching`]: TF-IDF cold-start matching of a free-text wish to an
//!   existing user.
//! - [`engine`]: scoring, explanations and critique algebra behind a
//!   backend trait, with shared-explanation and per-item backends.
//! - [`justify`]: description highlighting and templated justifications.
//! - [`session`]: the recommendation–critiquing loop state machine.
//! - [`simulate`] and [`synthetic`]: simulated-user evaluation on seeded
//!   synthetic corpora.
//!
//! [`System`] bundles the read-only model data a running service needs.

pub mod corpus;
pub mod engine;
pub mod justify;
pub mod matching;
pub mod session;
pub mod simulate;
pub mod synthetic;
pub mod system;
pub mod text;

pub use corpus::{Catalog, Item, ItemProfile, KeyphraseVocabulary, Review, ReviewCorpus};
pub use engine::{BackendKind, CritiqueBackend, Explanation, ItemSpace, Polarity, RankedList, UserState};
pub use session::{InterfaceMode, Session, SessionError, SessionStatus, SessionStore};
pub use system::{Config, System, SystemError};
pub use text::Tokenizer;

/// Directory of the bundled fixture corpus (`reviews.jsonl`, `items.jsonl`).
pub const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture");
