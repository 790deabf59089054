use thiserror::Error;

use crate::taxonomy::CaseLabel;

/// Errors produced by the localization library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Division or Apollonius construction requested for (numerically) equal ranges.
    #[error("degenerate range ratio: d_i = {d_i}, d_j = {d_j}")]
    DegenerateRatio { d_i: f64, d_j: f64 },

    #[error("sensors are collinear")]
    CollinearSensors,

    #[error("identical circles have no finite intersection set")]
    DegenerateIntersection,

    /// Scaled ranges would break the ascending order d1 <= d2 <= d3.
    #[error("invalid scale: {0}")]
    InvalidScale(String),

    #[error("scale factor {k} outside admissible interval [1, {k_max})")]
    OutOfDomain { k: f64, k_max: f64 },

    #[error("root finder precondition violated: gap(1) = {gap_at_one} is not positive")]
    RootPrecondition { gap_at_one: f64 },

    #[error("source coincides with sensor {sensor}")]
    DegenerateSource { sensor: usize },

    #[error("invalid noise vector: 1 + eps3 = {0} is not positive")]
    InvalidNoise(f64),

    /// Typed no-solution outcome (equal ranges with collinear sensors).
    #[error("no solution: {reason}")]
    NoSolution { reason: String },

    /// Geometric construction failed inside the solver flow.
    #[error("internal solver failure after {trace:?}: {reason}")]
    Internal {
        trace: Vec<CaseLabel>,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
