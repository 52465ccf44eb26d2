//! Error kinds that select the process exit code.

use std::fmt;

use csx_core::CsxError;
use serde_json::json;

/// Invalid configuration or flags (exit 4).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// One or more invariant checks failed (exit 3).
#[derive(Debug)]
pub struct Violation(pub Vec<String>);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("; "))
    }
}

impl std::error::Error for Violation {}

pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Exit code and machine-readable description of a failed run.
pub fn classify(err: &anyhow::Error) -> (i32, serde_json::Value) {
    if let Some(c) = err.downcast_ref::<ConfigError>() {
        return (EXIT_CONFIG, json!({ "error": "config", "message": c.0 }));
    }
    if let Some(v) = err.downcast_ref::<Violation>() {
        return (EXIT_VIOLATION, json!({ "error": "invariant_violation", "violations": v.0 }));
    }
    if let Some(e) = err.chain().find_map(|c| c.downcast_ref::<CsxError>()) {
        let message = format!("{err:#}");
        return match e {
            CsxError::SolverFailure { report, .. } => (
                EXIT_SOLVER,
                json!({ "error": "solver_failure", "message": message, "report": report }),
            ),
            CsxError::Monotonicity(_) | CsxError::Hypothesis(_) => {
                (EXIT_VIOLATION, json!({ "error": "invariant_violation", "violations": [message] }))
            }
            CsxError::Domain(_) | CsxError::Format(_) => (EXIT_CONFIG, json!({ "error": "config", "message": message })),
            CsxError::Io(_) => (1, json!({ "error": "io", "message": message })),
        };
    }
    (1, json!({ "error": "other", "message": format!("{err:#}") }))
}
