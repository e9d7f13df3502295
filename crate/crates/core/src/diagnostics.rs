use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// Pulse centers not strictly increasing.
    Ordering,
    /// Pulse fields malformed (negative width, width on an ideal kick, ...).
    InvalidPulse,
    /// Neighbouring pulse supports overlap.
    Overlap,
    /// `β = τΔE/2` large enough that the sudden approximation degrades.
    KickValidity,
    /// Integrator step too coarse for the narrowest pulse.
    StepResolution,
    /// Inter-pulse spacing is not a multiple of the revival time.
    RevivalSpacing,
    /// Run length comparable to the decay lifetime.
    Lifetime,
    /// Detuning too large for the rotating-wave approximation.
    RwaValidity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, kind, message: message.into() }
    }

    pub fn error(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, kind, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: {}", self.message)
    }
}

/// `true` when any diagnostic is an error.
pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}
