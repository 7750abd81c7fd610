use thiserror::Error;

/// Errors raised by the geometry, causality and reporting layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A relation query whose shape the punctured-plane cover model does not answer.
    #[error("unsupported query shape: {0}")]
    UnsupportedShape(String),

    /// The metric is not Lorentzian (or not evaluable) at a sample point.
    #[error("metric error: {0}")]
    Metric(String),

    /// The first fundamental form of a parametrized surface is degenerate.
    #[error("rank error: {0}")]
    Rank(String),

    /// Scenario parsing or validation failure.
    #[error("scenario error: {0}")]
    Scenario(String),

    /// The scenario has no diagram layout.
    #[error("no diagram available for scenario `{0}`")]
    NoDiagram(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
