use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;
use serde_json::Value;
use vsat_core::review::ReviewError;

/// Error body shared by every endpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub details: Value,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("{message}")]
    Validation { message: String, details: Value },
    #[error("storage failure: {0}")]
    Storage(String),
}

impl ApiError {
    pub fn validation(message: impl Into<String>) -> Self {
        ApiError::Validation {
            message: message.into(),
            details: Value::Null,
        }
    }

    fn parts(&self) -> (StatusCode, &'static str) {
        match self {
            ApiError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            ApiError::Validation { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "validation"),
            ApiError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "storage"),
        }
    }
}

impl From<ReviewError> for ApiError {
    fn from(e: ReviewError) -> Self {
        match e {
            ReviewError::UnknownIssue(id) => ApiError::NotFound(format!("issue {id}")),
            ReviewError::UnknownCue(id) => ApiError::NotFound(format!("cue {id}")),
            other => ApiError::Validation {
                message: other.to_string(),
                details: serde_json::json!({ "kind": format!("{other:?}") }),
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = self.parts();
        if let ApiError::Storage(msg) = &self {
            log::error!("storage failure: {msg}");
        }
        let details = match &self {
            ApiError::Validation { details, .. } => details.clone(),
            _ => Value::Null,
        };
        let body = ErrorBody {
            code,
            message: self.to_string(),
            details,
        };
        (status, axum::Json(body)).into_response()
    }
}
