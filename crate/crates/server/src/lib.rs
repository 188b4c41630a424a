//! HTTP facade over `critique-core`.
//!
//! | method | path | body / query | response |
//! |---|---|---|---|
//! | POST | `/api/session` | `{query, interface, backend?}` | [`SessionCreated`] |
//! | GET | `/api/session/{id}` | | [`SessionSummary`] |
//! | POST | `/api/session/{id}/destination` | `{destination}` | [`Recommendations`] |
//! | GET | `/api/session/{id}/recommendations` | | [`Recommendations`] |
//! | POST | `/api/session/{id}/critique` | `{keyphrase, polarity}` | [`Recommendations`] |
//! | DELETE | `/api/session/{id}/critique` | `?keyphrase=` or `{keyphrase}` | [`Recommendations`] |
//! | POST | `/api/session/{id}/filter` | `{keyphrases}` | [`Filtered`] |
//! | POST | `/api/session/{id}/finish` | | [`SessionSummary`] |
//! | GET | `/api/keyphrases` | `?prefix=` | [`Keyphrases`] |
//! | GET | `/api/catalog` | `?destination=` | [`CatalogPage`] |
//! | GET | `/api/categories` | | [`Categories`] |
//!
//! Errors come back as [`ApiError`]. Anything outside `/api` is served from
//! the static UI directory when one is configured.

pub mod error;
pub mod payload;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequest, FromRequestParts, Path as UrlPath, Query, Request, State};
use axum::http::request::Parts;
use axum::response::Html;
use axum::routing::{get, post};
use axum::{Json, Router};
use critique_core::engine::filter_static;
use critique_core::session::search_keyphrases;
use critique_core::{Config, KeyphraseVocabulary, Session, SessionError, SessionStatus, SessionStore, System};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use error::{ApiError, ErrorCode};
pub use payload::*;

/// Contents of the `--config` TOML file: the core [`Config`] keys at the top
/// level, plus optional `[[categories]]` tables for the filter menu.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ServeConfig {
    #[serde(flatten)]
    pub core: Config,
    #[serde(default)]
    pub categories: Option<Vec<Category>>,
}

impl ServeConfig {
    pub fn parse(body: &str) -> Result<Self, String> {
        let config: Self = toml::from_str(body).map_err(|e| e.to_string())?;
        config.core.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, String> {
        let path = path.as_ref();
        let body = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&body)
    }
}

/// Six contiguous buckets over the vocabulary in its own (frequency) order.
pub fn default_categories(vocab: &KeyphraseVocabulary) -> Vec<Category> {
    let per = vocab.len().div_ceil(6).max(1);
    vocab
        .phrases()
        .chunks(per)
        .enumerate()
        .map(|(i, chunk)| Category {
            name: format!("Group {}", i + 1),
            keyphrases: chunk.to_vec(),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub system: Arc<System>,
    pub store: Arc<SessionStore>,
    pub categories: Arc<Vec<Category>>,
}

impl AppState {
    pub fn new(system: System) -> Self {
        Self::shared(Arc::new(system))
    }

    /// Fresh session store over an already shared model.
    pub fn shared(system: Arc<System>) -> Self {
        let categories = default_categories(system.vocab());
        Self {
            system,
            store: Arc::new(SessionStore::new()),
            categories: Arc::new(categories),
        }
    }

    /// Replaces the default filter menu; every keyphrase must be in the
    /// vocabulary.
    pub fn with_categories(mut self, categories: Vec<Category>) -> Result<Self, String> {
        for c in &categories {
            if let Some(bad) = c.keyphrases.iter().find(|k| !self.system.vocab().contains(k)) {
                return Err(format!("category `{}`: `{bad}` is not in the vocabulary", c.name));
            }
        }
        self.categories = Arc::new(categories);
        Ok(self)
    }
}

/// `Json` whose rejection is an [`ApiError`].
pub struct ApiJson<T>(pub T);

impl<S, T> FromRequest<S> for ApiJson<T>
where
    T: DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        let Json(v) = Json::<T>::from_request(req, state).await?;
        Ok(Self(v))
    }
}

/// `Query` whose rejection is an [`ApiError`].
pub struct ApiQuery<T>(pub T);

impl<S, T> FromRequestParts<S> for ApiQuery<T>
where
    T: DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        let Query(v) = Query::<T>::from_request_parts(parts, state).await?;
        Ok(Self(v))
    }
}

/// Single path segment whose rejection is an [`ApiError`].
pub struct SessionId(pub String);

impl<S: Send + Sync> FromRequestParts<S> for SessionId {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        let UrlPath(id) = UrlPath::<String>::from_request_parts(parts, state).await?;
        Ok(Self(id))
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn create_session(
    State(app): State<AppState>,
    ApiJson(body): ApiJson<CreateSession>,
) -> ApiResult<SessionCreated> {
    let backend = body.backend.unwrap_or_else(|| body.interface.default_backend());
    let session = Session::start(&app.system, &body.query, body.interface, backend)?;
    let created = SessionCreated {
        session_id: session.session_id.clone(),
        matched_user: session.matched_user.clone(),
        similarity: session.similarity,
        interface: session.interface_mode,
        backend: session.backend,
        status: session.status,
        destinations: app.system.catalog().destinations().to_vec(),
    };
    app.store.insert(session);
    Ok(Json(created))
}

async fn get_session(State(app): State<AppState>, SessionId(id): SessionId) -> ApiResult<SessionSummary> {
    let session = app.store.get(&id)?;
    Ok(Json(SessionSummary::build(&app.system, &session)))
}

fn require_active(session: &Session) -> Result<&str, ApiError> {
    match (session.status, session.destination.as_deref()) {
        (SessionStatus::Active, Some(dest)) => Ok(dest),
        (found, _) => Err(SessionError::WrongStatus {
            expected: SessionStatus::Active,
            found,
        }
        .into()),
    }
}

async fn choose_destination(
    State(app): State<AppState>,
    SessionId(id): SessionId,
    ApiJson(body): ApiJson<ChooseDestination>,
) -> ApiResult<Recommendations> {
    let session = app
        .store
        .update(&id, |s| s.choose_destination(&app.system, &body.destination))?;
    Ok(Json(Recommendations::build(&app.system, &session)?))
}

async fn recommendations(State(app): State<AppState>, SessionId(id): SessionId) -> ApiResult<Recommendations> {
    let session = app.store.get(&id)?;
    require_active(&session)?;
    Ok(Json(Recommendations::build(&app.system, &session)?))
}

async fn critique(
    State(app): State<AppState>,
    SessionId(id): SessionId,
    ApiJson(body): ApiJson<CritiqueBody>,
) -> ApiResult<Recommendations> {
    let session = app
        .store
        .update(&id, |s| s.critique(&app.system, &body.keyphrase, body.polarity))?;
    Ok(Json(Recommendations::build(&app.system, &session)?))
}

async fn retract(
    State(app): State<AppState>,
    SessionId(id): SessionId,
    ApiQuery(query): ApiQuery<KeyphraseQuery>,
    body: Bytes,
) -> ApiResult<Recommendations> {
    let keyphrase = match query.keyphrase {
        Some(k) => k,
        None if !body.is_empty() => {
            serde_json::from_slice::<RetractBody>(&body)
                .map_err(|e| ApiError::bad_request(format!("invalid body: {e}")))?
                .keyphrase
        }
        None => return Err(ApiError::bad_request("missing `keyphrase`")),
    };
    let session = app.store.update(&id, |s| s.retract(&app.system, &keyphrase))?;
    Ok(Json(Recommendations::build(&app.system, &session)?))
}

async fn filter(
    State(app): State<AppState>,
    SessionId(id): SessionId,
    ApiJson(body): ApiJson<FilterBody>,
) -> ApiResult<Filtered> {
    let session = app.store.get(&id)?;
    let destination = require_active(&session)?;
    let ids = filter_static(&app.system.space, destination, &body.keyphrases)?;
    let items = ids
        .iter()
        .filter_map(|id| app.system.catalog().get(id).cloned())
        .collect();
    Ok(Json(Filtered {
        session_id: session.session_id.clone(),
        destination: destination.to_string(),
        keyphrases: body.keyphrases,
        items,
    }))
}

async fn finish(State(app): State<AppState>, SessionId(id): SessionId) -> ApiResult<SessionSummary> {
    let session = app.store.update(&id, Session::finish)?;
    Ok(Json(SessionSummary::build(&app.system, &session)))
}

async fn keyphrases(State(app): State<AppState>, ApiQuery(q): ApiQuery<PrefixQuery>) -> ApiResult<Keyphrases> {
    let keyphrases = search_keyphrases(app.system.vocab(), &q.prefix)
        .into_iter()
        .map(String::from)
        .collect();
    Ok(Json(Keyphrases {
        prefix: q.prefix,
        keyphrases,
    }))
}

async fn catalog(State(app): State<AppState>, ApiQuery(q): ApiQuery<DestinationQuery>) -> ApiResult<CatalogPage> {
    let catalog = app.system.catalog();
    let items = match &q.destination {
        Some(d) if !catalog.has_destination(d) => {
            return Err(critique_core::engine::EngineError::UnknownDestination(d.clone()).into())
        }
        Some(d) => catalog.items_in(d).cloned().collect(),
        None => catalog.items().cloned().collect(),
    };
    Ok(Json(CatalogPage {
        destination: q.destination,
        destinations: catalog.destinations().to_vec(),
        items,
    }))
}

async fn categories(State(app): State<AppState>) -> Json<Categories> {
    Json(Categories {
        categories: app.categories.as_ref().clone(),
    })
}

async fn api_not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

async fn api_method_not_allowed() -> ApiError {
    ApiError::bad_request("method not allowed on this endpoint")
}

async fn no_ui() -> Html<&'static str> {
    Html(
        "<!doctype html><title>critique</title><p>No UI bundle configured. \
         Start with <code>--static DIR</code>; the JSON API lives under <code>/api</code>.</p>",
    )
}

/// The JSON API mounted under `/api`.
pub fn api(state: AppState) -> Router {
    let api = Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}", get(get_session))
        .route("/session/{id}/destination", post(choose_destination))
        .route("/session/{id}/recommendations", get(recommendations))
        .route("/session/{id}/critique", post(critique).delete(retract))
        .route("/session/{id}/filter", post(filter))
        .route("/session/{id}/finish", post(finish))
        .route("/keyphrases", get(keyphrases))
        .route("/catalog", get(catalog))
        .route("/categories", get(categories))
        .fallback(api_not_found)
        .method_not_allowed_fallback(api_method_not_allowed);
    Router::new().nest("/api", api).with_state(state)
}

/// [`api`] plus static files from `static_dir` (or a placeholder page).
pub fn app(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let router = api(state);
    match static_dir {
        Some(dir) => router.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => router.fallback(no_ui),
    }
}
