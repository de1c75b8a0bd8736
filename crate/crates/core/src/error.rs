use thiserror::Error;

use crate::validate::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the core operations can report.
///
/// [`Error::code`] returns the stable machine-readable name used by the CLI
/// and the HTTP API.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dangling reference: {from}\u{2192}{to}")]
    DanglingReference { from: String, to: String },
    #[error("model `{model}` has no selected method")]
    NoMethodSelected { model: String },
    #[error("cyclic containment: {}", .cycle.join(" -> "))]
    CyclicContainment { cycle: Vec<String> },
    #[error("parameter `{param}` has no semantic binding")]
    MissingUri { param: String },
    #[error("unknown image `{0}`")]
    UnknownImage(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("unknown endpoint `{0}`")]
    UnknownEndpoint(String),
    #[error("unknown model `{model}` in instance `{instance}`")]
    UnknownModel { instance: String, model: String },
    #[error("method `{method}` does not implement model `{model}`")]
    UnknownMethod { model: String, method: String },
    #[error("`{source_port}` and `{target}` are not semantically equal")]
    SemanticMismatch { source_port: String, target: String },
    #[error("input `{0}` already has an incoming connection")]
    InputOccupied(String),
    #[error("no connection from `{source_port}` to `{target}`")]
    NotConnected { source_port: String, target: String },
    #[error("no candidate connection from `{source_instance}` to `{target_instance}`")]
    NoCandidate {
        source_instance: String,
        target_instance: String,
    },
    #[error("{count} candidate connections from `{source_instance}` to `{target_instance}`")]
    AmbiguousConnection {
        source_instance: String,
        target_instance: String,
        count: usize,
    },
    #[error("element `{0}` has no parent in the membership map")]
    UnmappedElement(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("unsupported criterion `{0}`")]
    UnsupportedCriterion(String),
    #[error("cycle detected: {}", .cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },
    #[error("input `{input}` has no value and no incoming connection")]
    DisconnectedRequiredInput { input: String },
    #[error("vocabulary has no template for package `{package}`")]
    MissingTemplate { package: String },
    #[error("template for `{package}` has unresolved placeholder `{placeholder}`")]
    UnresolvedPlaceholder { package: String, placeholder: String },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid document at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schema_version {0}")]
    SchemaVersionUnsupported(u64),
    #[error("validation failed:\n{0}")]
    ValidationFailed(ValidationReport),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DanglingReference { .. } => "DanglingReference",
            Error::NoMethodSelected { .. } => "NoMethodSelected",
            Error::CyclicContainment { .. } => "CyclicContainment",
            Error::MissingUri { .. } => "MissingUri",
            Error::UnknownImage(_) => "UnknownImage",
            Error::UnknownInstance(_) => "UnknownInstance",
            Error::UnknownEndpoint(_) => "UnknownEndpoint",
            Error::UnknownModel { .. } => "UnknownModel",
            Error::UnknownMethod { .. } => "UnknownMethod",
            Error::SemanticMismatch { .. } => "SemanticMismatch",
            Error::InputOccupied(_) => "InputOccupied",
            Error::NotConnected { .. } => "NotConnected",
            Error::NoCandidate { .. } => "NoCandidate",
            Error::AmbiguousConnection { .. } => "AmbiguousConnection",
            Error::UnmappedElement(_) => "UnmappedElement",
            Error::InvalidConfiguration(_) => "InvalidConfiguration",
            Error::UnsupportedCriterion(_) => "UnsupportedCriterion",
            Error::CycleDetected { .. } => "CycleDetected",
            Error::DisconnectedRequiredInput { .. } => "DisconnectedRequiredInput",
            Error::MissingTemplate { .. } => "MissingTemplate",
            Error::UnresolvedPlaceholder { .. } => "UnresolvedPlaceholder",
            Error::Parse { .. } => "ParseError",
            Error::Schema { .. } => "ParseError",
            Error::SchemaVersionUnsupported(_) => "SchemaVersionUnsupported",
            Error::ValidationFailed(_) => "ValidationFailed",
        }
    }
}
