//! CLI error type and exit-code policy.
//!
//! Every failure is reported as a machine-readable JSON document on
//! stderr and an exit code:
//!
//! * `2` — the problem is well-formed but the solve cannot proceed
//!   (degenerate or inconsistent order, missing oblique tangent, vanishing
//!   pivot data); solve failures attach a condition report under
//!   `diagnostics`.
//! * `3` — invalid input: malformed documents, unknown fields, bad
//!   coefficients, inconsistent geometry, misplaced overrides, I/O.
//! * `4` — a verification verdict: the solution or join fails its check.

use fchordal::{FChordalError, GCheckError, ImplicitError};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub location: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorDocument {
    pub error: ErrorBody,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<serde_json::Value>,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub exit: u8,
    pub code: String,
    pub message: String,
    pub location: String,
    pub diagnostics: Option<serde_json::Value>,
}

impl CliError {
    pub fn new(exit: u8, code: &str, message: impl Into<String>, location: impl Into<String>) -> Self {
        CliError {
            exit,
            code: code.to_string(),
            message: message.into(),
            location: location.into(),
            diagnostics: None,
        }
    }

    /// An exit-3 invalid-input error.
    pub fn invalid(code: &str, message: impl Into<String>, location: impl Into<String>) -> Self {
        CliError::new(3, code, message, location)
    }

    pub fn io(err: std::io::Error, path: impl Into<String>) -> Self {
        CliError::invalid("io", err.to_string(), path)
    }

    pub fn from_fchordal(err: &FChordalError, location: impl Into<String>) -> Self {
        let (exit, code, at) = classify_fchordal(err);
        let mut out = CliError::new(exit, code, err.to_string(), location);
        if let Some(at) = at {
            out.location = at;
        }
        out
    }

    pub fn from_gcheck(err: &GCheckError, location: impl Into<String>) -> Self {
        let (exit, code) = match err {
            GCheckError::NonRegularLeft => (2, "non-regular-left"),
            GCheckError::VertexMismatch { .. } => (4, "vertex-mismatch"),
            GCheckError::ZeroU1 => (2, "zero-u1"),
            GCheckError::Series(_) => (3, "series"),
        };
        CliError::new(exit, code, err.to_string(), location)
    }

    pub fn with_diagnostics(mut self, diagnostics: Option<serde_json::Value>) -> Self {
        self.diagnostics = diagnostics;
        self
    }

    pub fn to_json(&self) -> String {
        let doc = ErrorDocument {
            error: ErrorBody {
                code: self.code.clone(),
                message: self.message.clone(),
                location: self.location.clone(),
            },
            diagnostics: self.diagnostics.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("error documents always serialize")
    }
}

/// Maps a solver/normalization error to (exit, code, better location).
fn classify_fchordal(err: &FChordalError) -> (u8, &'static str, Option<String>) {
    match err {
        FChordalError::DegenerateOrder { order, .. } => {
            (2, "degenerate-order", Some(format!("order {order}")))
        }
        FChordalError::Inconsistent { order, .. } => {
            (2, "inconsistent-order", Some(format!("order {order}")))
        }
        FChordalError::NoObliqueTangent { .. } => (2, "no-oblique-tangent", None),
        FChordalError::ZeroU1 { .. } => (2, "zero-u1", None),
        FChordalError::ZeroPhi1 => (2, "zero-phi1", None),
        FChordalError::NonCollinear => (3, "non-collinear", None),
        FChordalError::BadOrdering(_) => (3, "bad-ordering", None),
        FChordalError::Order0Inconsistent { .. } => (3, "order0-inconsistent", None),
        FChordalError::AnchorMismatch { .. } => (3, "anchor-mismatch", None),
        FChordalError::IrrationalScale => (3, "irrational-scale", None),
        FChordalError::InvalidGauge(_) => (3, "invalid-gauge", None),
        FChordalError::OverrideAtRegularOrder { order } => {
            (3, "override-at-regular-order", Some(format!("order {order}")))
        }
        FChordalError::InvalidOrder { .. } => (3, "invalid-order", None),
        FChordalError::Implicit(ImplicitError::ZeroPhi1) => (2, "zero-phi1", None),
        FChordalError::Implicit(_) => (3, "chord-function", None),
        FChordalError::Series(_) => (3, "series", None),
        FChordalError::Riordan(_) => (3, "riordan", None),
    }
}
