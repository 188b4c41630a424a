//! The recommendation–critiquing loop as an explicit state machine.
//!
//! `AWAITING_DESTINATION -> ACTIVE -> FINISHED`, nothing else. Every
//! operation returns a new [`Session`] value; the `current` list is always
//! recomputed from scratch from `state` and `destination`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

use crate::corpus::KeyphraseVocabulary;
use crate::engine::{BackendKind, EngineError, Polarity, RankedList, UserState};
use crate::matching::MatchError;
use crate::system::System;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("query is empty")]
    EmptyQuery,
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("session is {found}, expected {expected}")]
    WrongStatus {
        expected: SessionStatus,
        found: SessionStatus,
    },
    #[error("interface {0} has no critiquing")]
    CritiqueUnavailable(InterfaceMode),
    #[error("interface {mode} cannot run on the {backend} backend")]
    IncompatibleBackend { mode: InterfaceMode, backend: BackendKind },
    #[error("no session `{0}`")]
    NotFound(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionStatus {
    AwaitingDestination,
    Active,
    Finished,
}

impl fmt::Display for SessionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionStatus::AwaitingDestination => "AWAITING_DESTINATION",
            SessionStatus::Active => "ACTIVE",
            SessionStatus::Finished => "FINISHED",
        })
    }
}

/// Which of the four interfaces drives the session.
///
/// A: static keyword filtering. B: global explanation, negative critiques.
/// C: per-item explanations, positive and negative critiques. D: as C,
/// with generated justifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InterfaceMode {
    A,
    B,
    C,
    D,
}

impl InterfaceMode {
    pub fn default_backend(self) -> BackendKind {
        match self {
            InterfaceMode::B => BackendKind::Shared,
            _ => BackendKind::PerItem,
        }
    }

    pub fn supports(self, backend: BackendKind) -> bool {
        match self {
            InterfaceMode::A => true,
            InterfaceMode::B => backend == BackendKind::Shared,
            InterfaceMode::C | InterfaceMode::D => backend == BackendKind::PerItem,
        }
    }

    pub fn critiquing(self) -> bool {
        self != InterfaceMode::A
    }

    pub fn highlights(self) -> bool {
        matches!(self, InterfaceMode::B | InterfaceMode::C)
    }

    pub fn justifications(self) -> bool {
        self == InterfaceMode::D
    }
}

impl fmt::Display for InterfaceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for InterfaceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(InterfaceMode::A),
            "B" => Ok(InterfaceMode::B),
            "C" => Ok(InterfaceMode::C),
            "D" => Ok(InterfaceMode::D),
            other => Err(format!("unknown interface `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HistoryAction {
    Positive,
    Negative,
    Retract,
}

impl From<Polarity> for HistoryAction {
    fn from(p: Polarity) -> Self {
        match p {
            Polarity::Positive => HistoryAction::Positive,
            Polarity::Negative => HistoryAction::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub step: usize,
    pub keyphrase: String,
    pub action: HistoryAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub matched_user: Option<String>,
    pub similarity: f64,
    pub backend: BackendKind,
    pub interface_mode: InterfaceMode,
    pub destination: Option<String>,
    pub state: UserState,
    pub history: Vec<HistoryEntry>,
    pub current: RankedList,
    pub status: SessionStatus,
}

impl Session {
    /// Resolves the cold-start match for `query` and opens a session.
    /// Interface A skips matching and starts from a zero preference vector.
    pub fn start(
        system: &System,
        query: &str,
        mode: InterfaceMode,
        backend: BackendKind,
    ) -> Result<Self, SessionError> {
        if query.trim().is_empty() {
            return Err(SessionError::EmptyQuery);
        }
        if mode == InterfaceMode::A {
            return Self::open(None, 0.0, UserState::zeroed(system.vocab().len()), mode, backend);
        }
        let matched = system.match_user(query)?;
        let state = system.init_user_state(&matched.user_id)?;
        Self::open(Some(matched.user_id), matched.similarity, state, mode, backend)
    }

    /// Opens a session for a known user, bypassing matching.
    pub fn for_user(
        system: &System,
        user_id: &str,
        mode: InterfaceMode,
        backend: BackendKind,
    ) -> Result<Self, SessionError> {
        let state = system.init_user_state(user_id)?;
        Self::open(Some(user_id.to_string()), 1.0, state, mode, backend)
    }

    fn open(
        matched_user: Option<String>,
        similarity: f64,
        state: UserState,
        mode: InterfaceMode,
        backend: BackendKind,
    ) -> Result<Self, SessionError> {
        if !mode.supports(backend) {
            return Err(SessionError::IncompatibleBackend { mode, backend });
        }
        Ok(Self {
            session_id: Uuid::new_v4().simple().to_string(),
            matched_user,
            similarity,
            backend,
            interface_mode: mode,
            destination: None,
            state,
            history: Vec::new(),
            current: RankedList::default(),
            status: SessionStatus::AwaitingDestination,
        })
    }

    fn expect(&self, expected: SessionStatus) -> Result<(), SessionError> {
        if self.status == expected {
            Ok(())
        } else {
            Err(SessionError::WrongStatus {
                expected,
                found: self.status,
            })
        }
    }

    fn recompute(
        system: &System,
        state: &UserState,
        destination: &str,
        backend: BackendKind,
    ) -> Result<RankedList, EngineError> {
        backend.backend().recommend(
            &system.space,
            state,
            destination,
            system.config.top_n,
            system.config.k_expl,
        )
    }

    pub fn choose_destination(&self, system: &System, destination: &str) -> Result<Self, SessionError> {
        self.expect(SessionStatus::AwaitingDestination)?;
        let current = Self::recompute(system, &self.state, destination, self.backend)?;
        Ok(Self {
            destination: Some(destination.to_string()),
            current,
            status: SessionStatus::Active,
            ..self.clone()
        })
    }

    fn active_destination(&self) -> Result<&str, SessionError> {
        self.expect(SessionStatus::Active)?;
        Ok(self.destination.as_deref().expect("active sessions have a destination"))
    }

    fn with_state(
        &self,
        system: &System,
        state: UserState,
        keyphrase: &str,
        action: HistoryAction,
    ) -> Result<Self, SessionError> {
        let destination = self.active_destination()?;
        let current = Self::recompute(system, &state, destination, self.backend)?;
        let mut history = self.history.clone();
        history.push(HistoryEntry {
            step: history.len() + 1,
            keyphrase: canonical(&system.space.vocab, keyphrase),
            action,
        });
        Ok(Self {
            state,
            history,
            current,
            ..self.clone()
        })
    }

    pub fn critique(&self, system: &System, keyphrase: &str, polarity: Polarity) -> Result<Self, SessionError> {
        self.active_destination()?;
        if !self.interface_mode.critiquing() {
            return Err(SessionError::CritiqueUnavailable(self.interface_mode));
        }
        let state = self
            .backend
            .backend()
            .apply_critique(&system.space, &self.state, keyphrase, polarity)?;
        self.with_state(system, state, keyphrase, polarity.into())
    }

    pub fn retract(&self, system: &System, keyphrase: &str) -> Result<Self, SessionError> {
        self.active_destination()?;
        if !self.interface_mode.critiquing() {
            return Err(SessionError::CritiqueUnavailable(self.interface_mode));
        }
        let state = self
            .backend
            .backend()
            .retract_critique(&system.space, &self.state, keyphrase)?;
        self.with_state(system, state, keyphrase, HistoryAction::Retract)
    }

    pub fn finish(&self) -> Result<Self, SessionError> {
        self.expect(SessionStatus::Active)?;
        Ok(Self {
            status: SessionStatus::Finished,
            ..self.clone()
        })
    }

    /// Rebuilds this session from its matched user by folding the history
    /// over a fresh session. Equal to `self` up to `session_id` and status.
    pub fn replay(&self, system: &System) -> Result<Self, SessionError> {
        let mut fresh = match &self.matched_user {
            Some(user) => Self::for_user(system, user, self.interface_mode, self.backend)?,
            None => Self::open(
                None,
                0.0,
                UserState::zeroed(system.vocab().len()),
                self.interface_mode,
                self.backend,
            )?,
        };
        fresh.similarity = self.similarity;
        if let Some(dest) = &self.destination {
            fresh = fresh.choose_destination(system, dest)?;
        }
        for entry in &self.history {
            fresh = match entry.action {
                HistoryAction::Positive => fresh.critique(system, &entry.keyphrase, Polarity::Positive)?,
                HistoryAction::Negative => fresh.critique(system, &entry.keyphrase, Polarity::Negative)?,
                HistoryAction::Retract => fresh.retract(system, &entry.keyphrase)?,
            };
        }
        Ok(fresh)
    }
}

fn canonical(vocab: &KeyphraseVocabulary, keyphrase: &str) -> String {
    vocab
        .index_of(keyphrase)
        .map_or_else(|| keyphrase.to_string(), |k| vocab.phrase(k).to_string())
}

/// Vocabulary phrases with a token starting with `prefix`
/// (case-insensitive), in vocabulary order.
pub fn search_keyphrases<'a>(vocab: &'a KeyphraseVocabulary, prefix: &str) -> Vec<&'a str> {
    let prefix = prefix.trim().to_lowercase();
    vocab
        .phrases()
        .iter()
        .filter(|p| p.split(' ').any(|tok| tok.starts_with(&prefix)))
        .map(String::as_str)
        .collect()
}

/// Concurrent in-memory session registry.
///
/// Updates to one session run under that session's lock and replace the
/// whole value, so readers never see a half-applied mutation.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.read().is_empty()
    }

    pub fn insert(&self, session: Session) -> String {
        let id = session.session_id.clone();
        self.sessions.write().insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    fn slot(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::NotFound(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Result<Session, SessionError> {
        Ok(self.slot(id)?.lock().clone())
    }

    pub fn update<F>(&self, id: &str, f: F) -> Result<Session, SessionError>
    where
        F: FnOnce(&Session) -> Result<Session, SessionError>,
    {
        let slot = self.slot(id)?;
        let mut guard = slot.lock();
        let next = f(&guard)?;
        *guard = next.clone();
        Ok(next)
    }

    /// Writes every session as a JSON array.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SessionError> {
        let mut all: Vec<Session> = self.sessions.read().values().map(|s| s.lock().clone()).collect();
        all.sort_by(|a, b| a.session_id.cmp(&b.session_id));
        let body = serde_json::to_string_pretty(&all).map_err(|e| SessionError::Snapshot(e.to_string()))?;
        fs::write(path, body).map_err(|e| SessionError::Snapshot(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SessionError> {
        let body = fs::read_to_string(path).map_err(|e| SessionError::Snapshot(e.to_string()))?;
        let all: Vec<Session> = serde_json::from_str(&body).map_err(|e| SessionError::Snapshot(e.to_string()))?;
        let store = Self::new();
        for s in all {
            store.insert(s);
        }
        Ok(store)
    }
}
