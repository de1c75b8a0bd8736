use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

/// An error body `{"error": {"code", "message"}}` with the HTTP status that
/// goes with its code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: status_for(code),
            code: code.to_owned(),
            message: message.into(),
        }
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new("UnknownSession", format!("unknown session `{id}`"))
    }

    pub fn stale_revision(expected: u64, actual: u64) -> Self {
        Self::new(
            "StaleRevision",
            format!("request carries revision {expected}, session is at {actual}"),
        )
    }
}

/// 404 for unknown ids, 409 for conflicts, 400 for malformed requests,
/// 422 for everything the core rejects on semantic grounds.
pub fn status_for(code: &str) -> StatusCode {
    match code {
        "UnknownSession" | "UnknownImage" | "UnknownInstance" | "UnknownEndpoint" | "UnknownModel"
        | "UnknownMethod" | "UnknownVocabulary" | "NotConnected" => StatusCode::NOT_FOUND,
        "StaleRevision" | "InputOccupied" => StatusCode::CONFLICT,
        "BadRequest" => StatusCode::BAD_REQUEST,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl From<vso_core::Error> for ApiError {
    fn from(e: vso_core::Error) -> Self {
        Self::new(e.code(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "BadRequest".into(),
            message: e.body_text(),
        }
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "BadRequest".into(),
            message: e.body_text(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}
