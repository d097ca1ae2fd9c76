//! Engine error cases and their stable wire representation.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{EntityId, Timestamp};
use crate::validate::ValidationReport;

/// Every way a primitive can fail. Each variant maps to exactly one stable
/// [`ApiError`] code.
#[derive(Debug, Clone, thiserror::Error)]
pub enum EngineError {
    #[error("{kind} {id} not found")]
    NotFound { kind: String, id: EntityId },
    #[error("item {item} has no valid version at {timestamp}")]
    NoValidVersion { item: EntityId, timestamp: Timestamp },
    #[error("version {version} has no {language:?} text unit")]
    NoTextUnit { version: EntityId, language: String },
    #[error("item {item} has no versions")]
    NoVersions { item: EntityId },
    #[error("version {version} has no creating action")]
    MissingProvenance { version: EntityId },
    #[error("versions {a} and {b} belong to different items")]
    DifferentItems { a: EntityId, b: EntityId },
    #[error("cannot compare version {id} with itself")]
    IdenticalVersions { id: EntityId },
    #[error("versions {a} and {b} share no text language")]
    NoComparableText { a: EntityId, b: EntityId },
    #[error("item {id} is not a Work")]
    NotAWork { id: EntityId },
    #[error("invalid interval: start {start} is after end {end}")]
    InvalidInterval { start: String, end: String },
    #[error("version_ids is mutually exclusive with item_ids, theme_ids and timestamp")]
    ConflictingScope,
    #[error("unknown id {id} in scope list")]
    UnknownId { id: EntityId },
    #[error("{message}")]
    MissingCriterion { message: String },
    #[error("no text contains token {token:?}")]
    NoMatch { token: String },
    #[error("bad request: {message}")]
    BadRequest { message: String },
    #[error("unknown primitive {name:?}{}", hint_suffix(.hint))]
    UnknownPrimitive { name: String, hint: Option<String> },
}

fn hint_suffix(hint: &Option<String>) -> String {
    match hint {
        Some(h) => format!(" (did you mean {h:?}?)"),
        None => String::new(),
    }
}

impl EngineError {
    pub fn not_found(kind: impl Into<String>, id: &EntityId) -> Self {
        EngineError::NotFound { kind: kind.into(), id: id.clone() }
    }

    /// Stable error code, part of the wire contract.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::NotFound { .. } => "NotFound",
            EngineError::NoValidVersion { .. } => "NoValidVersion",
            EngineError::NoTextUnit { .. } => "NoTextUnit",
            EngineError::NoVersions { .. } => "NoVersions",
            EngineError::MissingProvenance { .. } => "MissingProvenance",
            EngineError::DifferentItems { .. } => "DifferentItems",
            EngineError::IdenticalVersions { .. } => "IdenticalVersions",
            EngineError::NoComparableText { .. } => "NoComparableText",
            EngineError::NotAWork { .. } => "NotAWork",
            EngineError::InvalidInterval { .. } => "InvalidInterval",
            EngineError::ConflictingScope => "ConflictingScope",
            EngineError::UnknownId { .. } => "UnknownId",
            EngineError::MissingCriterion { .. } => "MissingCriterion",
            EngineError::NoMatch { .. } => "NoMatch",
            EngineError::BadRequest { .. } => "BadRequest",
            EngineError::UnknownPrimitive { .. } => "UnknownPrimitive",
        }
    }
}

/// Wire-level error record: a stable code, a message, and optional
/// structured details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self { code: code.into(), message: message.into(), details: None }
    }

    pub fn validation_failed(report: &ValidationReport) -> Self {
        Self {
            code: "ValidationFailed".into(),
            message: format!("corpus failed validation with {} violation(s)", report.violations.len()),
            details: Some(serde_json::to_value(report).expect("report serializes")),
        }
    }
}

impl From<&EngineError> for ApiError {
    fn from(err: &EngineError) -> Self {
        ApiError::new(err.code(), err.to_string())
    }
}

impl From<EngineError> for ApiError {
    fn from(err: EngineError) -> Self {
        ApiError::from(&err)
    }
}

impl From<&crate::store::LoadError> for ApiError {
    fn from(err: &crate::store::LoadError) -> Self {
        match err {
            crate::store::LoadError::ValidationFailed(report) => ApiError::validation_failed(report),
            crate::store::LoadError::DuplicateId { .. } => {
                ApiError::new("DuplicateId", err.to_string())
            }
        }
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}
