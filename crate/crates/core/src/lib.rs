//! Two-state quantum systems driven by sequences of ultrafast pulses.
//!
//! The crate provides closed-form propagators for ideal kicks, a fixed-step
//! RK4 integrator for finite-width pulses, a three-state model of the
//! hydrogen n = 2 manifold, and drivers that reproduce the reference
//! experiments as CSV/JSON output.

pub mod algebra;
pub mod analytic;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod hydrogen;
pub mod integrator;
pub mod pulse;

#[cfg(test)]
mod testing;

pub use algebra::{
    compose, occupation_probabilities, su2_exponential, unitarity_defect, AmplitudePair,
    AmplitudeTriple, Amplitudes, Matrix, PauliAxis, Propagator2, Propagator3, C64,
};
pub use diagnostics::{Diagnostic, DiagnosticKind, Severity};
pub use error::{Error, Result};
pub use pulse::{KickAxis, KickSequence, PulseShape, PulseSpec};
