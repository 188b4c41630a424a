//! Structured API errors. Every failure leaves the service as
//! `{"code": ..., "message": ...}`.

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use critique_core::engine::EngineError;
use critique_core::justify::JustifyError;
use critique_core::matching::MatchError;
use critique_core::SessionError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    NoSignal,
    UnknownDestination,
    UnknownKeyphrase,
    PositiveNotSupported,
    WrongStatus,
    NotFound,
    BadRequest,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 7] = [
        ErrorCode::NoSignal,
        ErrorCode::UnknownDestination,
        ErrorCode::UnknownKeyphrase,
        ErrorCode::PositiveNotSupported,
        ErrorCode::WrongStatus,
        ErrorCode::NotFound,
        ErrorCode::BadRequest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::NoSignal => "NO_SIGNAL",
            ErrorCode::UnknownDestination => "UNKNOWN_DESTINATION",
            ErrorCode::UnknownKeyphrase => "UNKNOWN_KEYPHRASE",
            ErrorCode::PositiveNotSupported => "POSITIVE_NOT_SUPPORTED",
            ErrorCode::WrongStatus => "WRONG_STATUS",
            ErrorCode::NotFound => "NOT_FOUND",
            ErrorCode::BadRequest => "BAD_REQUEST",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    /// Not serialized: 404 for `NOT_FOUND`, 400 for client errors, 500 for
    /// faults of the server's own data.
    #[serde(skip, default = "bad_request_status")]
    pub status: u16,
}

fn bad_request_status() -> u16 {
    400
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        let status = if code == ErrorCode::NotFound { 404 } else { 400 };
        Self {
            code,
            message: message.into(),
            status,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::NotFound, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            status: 500,
            ..Self::bad_request(message)
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e {
            EngineError::UnknownDestination(_) => Self::new(ErrorCode::UnknownDestination, message),
            EngineError::UnknownKeyphrase(_) => Self::new(ErrorCode::UnknownKeyphrase, message),
            EngineError::PositiveNotSupported(_) => Self::new(ErrorCode::PositiveNotSupported, message),
            EngineError::NotCritiqued(_) | EngineError::InvalidParameter(_) => Self::bad_request(message),
            EngineError::UnknownUser(_) | EngineError::VocabularyMismatch { .. } => Self::internal(message),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let message = e.to_string();
        match e {
            SessionError::Match(MatchError::NoSignal) => Self::new(ErrorCode::NoSignal, message),
            SessionError::Match(_) | SessionError::Snapshot(_) => Self::internal(message),
            SessionError::Engine(e) => e.into(),
            SessionError::WrongStatus { .. } => Self::new(ErrorCode::WrongStatus, message),
            SessionError::NotFound(_) => Self::not_found(message),
            SessionError::EmptyQuery
            | SessionError::CritiqueUnavailable(_)
            | SessionError::IncompatibleBackend { .. } => Self::bad_request(message),
        }
    }
}

impl From<JustifyError> for ApiError {
    fn from(e: JustifyError) -> Self {
        Self::internal(e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::BAD_REQUEST);
        (status, Json(self)).into_response()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use critique_core::{BackendKind, InterfaceMode, SessionStatus};

    #[test]
    fn codes_serialize_as_listed() {
        for code in ErrorCode::ALL {
            assert_eq!(serde_json::to_value(code).unwrap(), code.as_str());
        }
    }

    #[test]
    fn session_errors_map_to_one_code() {
        let cases: Vec<(SessionError, ErrorCode, u16)> = vec![
            (SessionError::EmptyQuery, ErrorCode::BadRequest, 400),
            (MatchError::NoSignal.into(), ErrorCode::NoSignal, 400),
            (
                EngineError::UnknownDestination("x".into()).into(),
                ErrorCode::UnknownDestination,
                400,
            ),
            (
                EngineError::UnknownKeyphrase("x".into()).into(),
                ErrorCode::UnknownKeyphrase,
                400,
            ),
            (
                EngineError::PositiveNotSupported(BackendKind::Shared).into(),
                ErrorCode::PositiveNotSupported,
                400,
            ),
            (EngineError::NotCritiqued("x".into()).into(), ErrorCode::BadRequest, 400),
            (
                SessionError::WrongStatus {
                    expected: SessionStatus::Active,
                    found: SessionStatus::Finished,
                },
                ErrorCode::WrongStatus,
                400,
            ),
            (SessionError::NotFound("s".into()), ErrorCode::NotFound, 404),
            (
                SessionError::CritiqueUnavailable(InterfaceMode::A),
                ErrorCode::BadRequest,
                400,
            ),
            (EngineError::UnknownUser("u".into()).into(), ErrorCode::BadRequest, 500),
        ];
        for (err, code, status) in cases {
            let api = ApiError::from(err);
            assert_eq!((api.code, api.status), (code, status), "{}", api.message);
        }
    }
}
