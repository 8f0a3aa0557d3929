use thiserror::Error;

use crate::model::ConfigViolation;

/// Errors surfaced by the simulation pipeline.
///
/// The variants map onto the CLI exit-code scheme: configuration problems
/// (exit 1), physical degeneracies such as gap closings (exit 2), and
/// numerical failures (exit 3).
#[derive(Debug, Error)]
pub enum TfcError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("configuration rejected:\n{}", format_violations(.0))]
    ConfigRejected(Vec<ConfigViolation>),

    #[error("degenerate cycle: {0} (KS product and band topology undefined)")]
    DegenerateCycle(String),

    #[error("gap closing near theta = ({theta1:.6}, {theta2:.6}): {detail}")]
    GapClosing {
        theta1: f64,
        theta2: f64,
        detail: String,
    },

    #[error("phase boundary: {0}")]
    PhaseBoundary(String),

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    #[error("averaging window unusable: {0}")]
    WindowTooShort(String),

    #[error("sideband line missing: {0}")]
    MissingLine(String),

    #[error("mismatched configurations: {0}")]
    MismatchedRuns(String),

    #[error("config file error: {0}")]
    ConfigParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[ConfigViolation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}
