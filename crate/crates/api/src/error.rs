use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use lexibase::{StoreError, Violation};
use serde::{Deserialize, Serialize};

/// Machine codes carried by [`ApiError`] besides the entry violation codes
/// (`EMPTY_STEM`, `UNKNOWN_CLASS`, ...), which are passed through as is.
pub mod codes {
    pub const BAD_REQUEST: &str = "BAD_REQUEST";
    pub const NOT_FOUND: &str = "NOT_FOUND";
    pub const UNKNOWN_DOMAIN: &str = "UNKNOWN_DOMAIN";
    pub const DUPLICATE_DOMAIN: &str = "DUPLICATE_DOMAIN";
    pub const INVALID_DOMAIN_NAME: &str = "INVALID_DOMAIN_NAME";
    pub const LINKS_EXIST: &str = "LINKS_EXIST";
    pub const LANGUAGE_MISMATCH: &str = "LANGUAGE_MISMATCH";
    pub const LANGUAGE_CHANGE_WITH_LINKS: &str = "LANGUAGE_CHANGE_WITH_LINKS";
    pub const DUPLICATE_LINK: &str = "DUPLICATE_LINK";
    pub const BAD_PERMUTATION: &str = "BAD_PERMUTATION";
    pub const NOT_EMPTY: &str = "NOT_EMPTY";
    pub const FORMAT_ERROR: &str = "FORMAT_ERROR";
    pub const INTEGRITY_ERROR: &str = "INTEGRITY_ERROR";
    pub const GENERATION_FAILED: &str = "GENERATION_FAILED";
    pub const CORRUPTION: &str = "CORRUPTION";
    pub const UNSUPPORTED_VERSION: &str = "UNSUPPORTED_VERSION";
    pub const IO_ERROR: &str = "IO_ERROR";
    pub const INTERNAL: &str = "INTERNAL";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
            field: None,
            violations: Vec::new(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, codes::BAD_REQUEST, message)
    }

    pub fn with_field(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        use codes::*;
        let message = e.to_string();
        let (status, code) = match &e {
            StoreError::Validation(verdict) => {
                let first = &verdict.violations[0];
                return ApiError {
                    status: StatusCode::UNPROCESSABLE_ENTITY.as_u16(),
                    code: first.code.as_str().to_string(),
                    message,
                    field: Some(first.field.clone()),
                    violations: verdict.violations.clone(),
                };
            }
            StoreError::Generate(_) => (StatusCode::UNPROCESSABLE_ENTITY, GENERATION_FAILED),
            StoreError::NotFound(_) => (StatusCode::NOT_FOUND, NOT_FOUND),
            StoreError::UnknownDomain(_) => (StatusCode::UNPROCESSABLE_ENTITY, UNKNOWN_DOMAIN),
            StoreError::DuplicateDomain(_) => (StatusCode::CONFLICT, DUPLICATE_DOMAIN),
            StoreError::InvalidDomainName(_) => (StatusCode::UNPROCESSABLE_ENTITY, INVALID_DOMAIN_NAME),
            StoreError::LinksExist { .. } => (StatusCode::CONFLICT, LINKS_EXIST),
            StoreError::LanguageMismatch { .. } => (StatusCode::UNPROCESSABLE_ENTITY, LANGUAGE_MISMATCH),
            StoreError::LanguageChangeWithLinks(_) => (StatusCode::CONFLICT, LANGUAGE_CHANGE_WITH_LINKS),
            StoreError::DuplicateLink { .. } => (StatusCode::CONFLICT, DUPLICATE_LINK),
            StoreError::BadPermutation(_) => (StatusCode::UNPROCESSABLE_ENTITY, BAD_PERMUTATION),
            StoreError::NotEmpty => (StatusCode::CONFLICT, NOT_EMPTY),
            StoreError::Format { .. } => (StatusCode::BAD_REQUEST, FORMAT_ERROR),
            StoreError::Integrity { .. } => (StatusCode::UNPROCESSABLE_ENTITY, INTEGRITY_ERROR),
            StoreError::Corruption(_) => (StatusCode::INTERNAL_SERVER_ERROR, CORRUPTION),
            StoreError::UnsupportedVersion { .. } => (StatusCode::INTERNAL_SERVER_ERROR, UNSUPPORTED_VERSION),
            StoreError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, IO_ERROR),
        };
        ApiError::new(status, code, message)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(r: PathRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}
