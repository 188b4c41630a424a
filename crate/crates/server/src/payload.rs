//! Request and response bodies of the HTTP API.

use std::collections::BTreeMap;

use critique_core::justify::{highlight, justify_list, HighlightSpan};
use critique_core::session::HistoryEntry;
use critique_core::{BackendKind, InterfaceMode, Item, Polarity, Session, SessionStatus, System};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub query: String,
    pub interface: InterfaceMode,
    #[serde(default)]
    pub backend: Option<BackendKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub matched_user: Option<String>,
    pub similarity: f64,
    pub interface: InterfaceMode,
    pub backend: BackendKind,
    pub status: SessionStatus,
    pub destinations: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChooseDestination {
    pub destination: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CritiqueBody {
    pub keyphrase: String,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetractBody {
    pub keyphrase: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterBody {
    #[serde(default)]
    pub keyphrases: Vec<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct PrefixQuery {
    #[serde(default)]
    pub prefix: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct DestinationQuery {
    pub destination: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct KeyphraseQuery {
    pub keyphrase: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendedItem {
    pub rank: usize,
    pub item_id: String,
    pub name: String,
    pub score: f64,
    pub explanation: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub justification: Option<String>,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highlights: Option<Vec<HighlightSpan>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendations {
    pub session_id: String,
    pub interface: InterfaceMode,
    pub backend: BackendKind,
    pub status: SessionStatus,
    pub destination: String,
    pub critiques: BTreeMap<String, Polarity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shared_explanation: Option<Vec<String>>,
    pub items: Vec<RecommendedItem>,
}

impl Recommendations {
    /// Serializes the session's current list with the extras its interface
    /// shows: highlights in B and C, justifications in D, the global
    /// explanation once at the top in B.
    pub fn build(system: &System, session: &Session) -> Result<Self, ApiError> {
        let mode = session.interface_mode;
        let justifications = if mode.justifications() {
            Some(justify_list(&system.templates, &system.space, &session.current)?)
        } else {
            None
        };
        let items = session
            .current
            .entries
            .iter()
            .enumerate()
            .map(|(pos, entry)| {
                let item = system
                    .catalog()
                    .get(&entry.item_id)
                    .ok_or_else(|| ApiError::not_found(format!("item `{}`", entry.item_id)))?;
                Ok(RecommendedItem {
                    rank: pos + 1,
                    item_id: item.item_id.clone(),
                    name: item.name.clone(),
                    score: entry.score,
                    explanation: entry.explanation.keyphrases.clone(),
                    justification: justifications.as_ref().map(|js| js[pos].text.clone()),
                    description: item.description.clone(),
                    highlights: mode
                        .highlights()
                        .then(|| highlight(&item.description, &entry.explanation.keyphrases)),
                })
            })
            .collect::<Result<Vec<_>, ApiError>>()?;
        let shared_explanation = match (mode, &session.current.shared) {
            (InterfaceMode::B, Some(shared)) => Some(shared.keyphrases.clone()),
            (InterfaceMode::B, None) => Some(Vec::new()),
            _ => None,
        };
        Ok(Self {
            session_id: session.session_id.clone(),
            interface: mode,
            backend: session.backend,
            status: session.status,
            destination: session.destination.clone().unwrap_or_default(),
            critiques: session.state.named_critiques(system.vocab()),
            shared_explanation,
            items,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub matched_user: Option<String>,
    pub similarity: f64,
    pub interface: InterfaceMode,
    pub backend: BackendKind,
    pub status: SessionStatus,
    pub destination: Option<String>,
    pub critiques: BTreeMap<String, Polarity>,
    pub history: Vec<HistoryEntry>,
}

impl SessionSummary {
    pub fn build(system: &System, session: &Session) -> Self {
        Self {
            session_id: session.session_id.clone(),
            matched_user: session.matched_user.clone(),
            similarity: session.similarity,
            interface: session.interface_mode,
            backend: session.backend,
            status: session.status,
            destination: session.destination.clone(),
            critiques: session.state.named_critiques(system.vocab()),
            history: session.history.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyphrases {
    pub prefix: String,
    pub keyphrases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogPage {
    pub destination: Option<String>,
    pub destinations: Vec<String>,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub keyphrases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Categories {
    pub categories: Vec<Category>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filtered {
    pub session_id: String,
    pub destination: String,
    pub keyphrases: Vec<String>,
    pub items: Vec<Item>,
}
