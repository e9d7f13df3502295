//! Three-state model of the hydrogen 2s–2p transition.
//!
//! Time is in picoseconds and energies in rad/ps. The energy origin is
//! `E(2p₁/₂) = 0`, so `E(2s₁/₂) = ΔE` (Lamb shift) and `E(2p₃/₂) = E_fs`.
//!
//! Pulse areas are the 2s–2p coupling area in the coupled basis
//! `{2s, 2p, 2p′}`, which is the kick angle of the effective two-state
//! system at revival spacings. In the j basis the same pulse couples 2s to
//! `2p₁/₂` and `2p₃/₂` with strengths `V/√3` and `√2·V/√3`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{cis, Matrix, Propagator3, C64, ZERO};
use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Hamiltonian, Trajectory};
use crate::pulse::{FieldSample, KickSequence};

/// Lamb shift, in MHz.
pub const LAMB_SHIFT_MHZ: f64 = 1057.0;
/// Fine-structure splitting of 2p, in MHz.
pub const FINE_STRUCTURE_MHZ: f64 = 10956.0;
/// 2p decay rate, in MHz.
pub const DECAY_RATE_MHZ: f64 = 626.0;

/// Largest allowed distance of a pulse spacing from a whole number of revival periods.
pub const REVIVAL_TOLERANCE: f64 = 1e-3;
/// Run length in units of the 2p lifetime above which decay is flagged.
pub const LIFETIME_FRACTION: f64 = 0.5;

/// How quoted "MHz" figures become internal angular units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// 1 MHz ↦ 10⁶ rad/s. Puts the revival time at 573.5 ps.
    #[default]
    Plain,
    /// 1 MHz ↦ 2π·10⁶ rad/s, i.e. the figures are cyclic frequencies.
    TwoPi,
}

impl Convention {
    /// Internal rad/ps per quoted MHz.
    pub fn rad_per_ps_per_mhz(self) -> f64 {
        match self {
            Convention::Plain => 1e-6,
            Convention::TwoPi => 2.0 * PI * 1e-6,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Plain => "plain",
            Convention::TwoPi => "two_pi",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Convention::Plain),
            "two_pi" => Ok(Convention::TwoPi),
            other => Err(Error::invalid(format!("unknown unit convention `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HydrogenParams {
    /// Lamb shift, rad/ps.
    pub delta_e: f64,
    /// Fine-structure splitting, rad/ps.
    pub e_fs: f64,
    /// 2p decay rate, 1/ps.
    pub gamma: f64,
    pub convention: Convention,
}

impl Default for HydrogenParams {
    fn default() -> Self {
        Self::from_mhz(LAMB_SHIFT_MHZ, FINE_STRUCTURE_MHZ, DECAY_RATE_MHZ, Convention::Plain)
            .expect("reference values are positive")
    }
}

impl HydrogenParams {
    pub fn from_mhz(delta_e: f64, e_fs: f64, gamma: f64, convention: Convention) -> Result<Self> {
        let scale = convention.rad_per_ps_per_mhz();
        let params = HydrogenParams {
            delta_e: delta_e * scale,
            e_fs: e_fs * scale,
            gamma: gamma * scale,
            convention,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_e > 0.0 && self.e_fs > 0.0) {
            return Err(Error::invalid("delta_e and e_fs must be positive"));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::invalid("gamma must be non-negative"));
        }
        Ok(())
    }

    /// Copy with decay switched off.
    pub fn without_decay(mut self) -> Self {
        self.gamma = 0.0;
        self
    }

    /// Period `2π/ΔE` of the 2s–2p oscillation.
    pub fn lamb_period(&self) -> f64 {
        2.0 * PI / self.delta_e
    }

    /// `1/Γ`; infinite without decay.
    pub fn lifetime(&self) -> f64 {
        1.0 / self.gamma
    }
}

/// `2π/E_fs`, after which the 2p/2p′ superposition re-forms.
pub fn revival_time(params: &HydrogenParams) -> f64 {
    2.0 * PI / params.e_fs
}

/// Which three-state basis a model is written in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `{2s₁/₂, 2p₁/₂, 2p₃/₂}`.
    #[default]
    Fine,
    /// `{2s, 2p, 2p′}`, where only 2p is field-coupled.
    Coupled,
}

/// 2s–2p matrix elements `⟨2s|V|2p⟩ = Vx − iVy` and its conjugate.
fn coupling(v: FieldSample) -> (C64, C64) {
    (C64::new(v.x, -v.y), C64::new(v.x, v.y))
}

/// Hamiltonian in the `{2s₁/₂, 2p₁/₂, 2p₃/₂}` basis for one field value.
pub fn hamiltonian_j_basis(params: &HydrogenParams, v: FieldSample) -> Propagator3 {
    let (up, down) = coupling(v);
    let (up, down) = (up / 3f64.sqrt(), down / 3f64.sqrt());
    let decay = C64::new(0.0, -0.5 * params.gamma);
    Matrix([
        [C64::new(params.delta_e, 0.0), -up, -up * SQRT_2],
        [-down, decay, ZERO],
        [-down * SQRT_2, ZERO, decay + params.e_fs],
    ])
}

/// Hamiltonian in the `{2s, 2p, 2p′}` basis for one field value.
pub fn hamiltonian_coupled_basis(params: &HydrogenParams, v: FieldSample) -> Propagator3 {
    let (up, down) = coupling(v);
    let decay = C64::new(0.0, -0.5 * params.gamma);
    let fs = params.e_fs;
    let mix = C64::new(SQRT_2 / 3.0 * fs, 0.0);
    Matrix([
        [C64::new(params.delta_e, 0.0), up, ZERO],
        [down, decay + 2.0 / 3.0 * fs, mix],
        [ZERO, mix, decay + fs / 3.0],
    ])
}

/// Orthogonal map from fine-structure to coupled amplitudes, `a_coupled = T a_fine`.
pub fn fine_to_coupled() -> Propagator3 {
    let r = 1.0 / 3f64.sqrt();
    let s = SQRT_2 * r;
    let re = |x: f64| C64::new(x, 0.0);
    Matrix([
        [re(1.0), ZERO, ZERO],
        [ZERO, re(-r), re(-s)],
        [ZERO, re(s), re(-r)],
    ])
}

/// Three-state model driven by a pulse sequence. The sequence's own `delta_e` is ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct HydrogenModel {
    pub params: HydrogenParams,
    pub sequence: KickSequence,
    pub basis: Basis,
    /// Spin polarization angle of the initial 2s state relative to the field.
    pub chi: f64,
}

impl HydrogenModel {
    pub fn new(params: HydrogenParams, sequence: KickSequence, basis: Basis) -> Self {
        HydrogenModel { params, sequence, basis, chi: 0.0 }
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    /// Weights of `|m=+1,↓⟩` and `|m=−1,↑⟩` in 2p′. They do not enter the dynamics.
    pub fn prime_state_composition(&self) -> [f64; 2] {
        [(0.5 * self.chi).cos(), (0.5 * self.chi).sin()]
    }
}

impl Hamiltonian<3> for HydrogenModel {
    fn evaluate(&self, t: f64) -> Propagator3 {
        let v = self.sequence.field_at(t);
        match self.basis {
            Basis::Fine => hamiltonian_j_basis(&self.params, v),
            Basis::Coupled => hamiltonian_coupled_basis(&self.params, v),
        }
    }

    fn narrowest_pulse(&self) -> Option<f64> {
        self.sequence.narrowest_width()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.sequence.edges()
    }
}

/// Exact field-free propagator over `dt`, in the coupled basis.
///
/// The 2p/2p′ block has eigenvalues 0 (`2p₁/₂`) and `E_fs` (`2p₃/₂`), so it
/// is the sum of the two spectral projectors weighted by their phases.
pub fn stroboscopic_free_propagator(params: &HydrogenParams, dt: f64) -> Propagator3 {
    let damping = (-0.5 * params.gamma * dt).exp();
    let fs_phase = cis(-params.e_fs * dt);
    let low = [[1.0 / 3.0, -SQRT_2 / 3.0], [-SQRT_2 / 3.0, 2.0 / 3.0]];
    let high = [[2.0 / 3.0, SQRT_2 / 3.0], [SQRT_2 / 3.0, 1.0 / 3.0]];
    let mut u = Matrix::<3>::zeros();
    u[(0, 0)] = cis(-params.delta_e * dt);
    for r in 0..2 {
        for c in 0..2 {
            u[(r + 1, c + 1)] = (fs_phase * high[r][c] + low[r][c]) * damping;
        }
    }
    u
}

/// Pulse sequence of the effective two-state model seen at revival spacings.
///
/// 2s is the upper level, which flips the sign of the level splitting.
pub fn effective_qubit_sequence(params: &HydrogenParams, seq: &KickSequence) -> KickSequence {
    KickSequence::new(seq.pulses.clone(), -params.delta_e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HydrogenRun {
    pub trajectory: Trajectory<3>,
    /// `|a₂|² + |a₃|²` at each sample, the total 2p probability.
    pub target: Vec<f64>,
    pub warnings: Vec<Diagnostic>,
}

impl HydrogenRun {
    pub fn final_target(&self) -> f64 {
        *self.target.last().expect("trajectories always hold their end points")
    }
}

/// Diagnostics specific to the hydrogen regime: revival spacing, kick
/// validity against both splittings, and run length against the lifetime.
pub fn hydrogen_diagnostics(params: &HydrogenParams, seq: &KickSequence, span: f64) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let period = revival_time(params);
    for pair in seq.pulses.windows(2) {
        let ratio = (pair[1].center - pair[0].center) / period;
        if (ratio - ratio.round()).abs() > REVIVAL_TOLERANCE || ratio.round() < 1.0 {
            out.push(Diagnostic::warning(
                DiagnosticKind::RevivalSpacing,
                format!(
                    "pulse spacing {} ps is {ratio:.5} revival periods; 2p′ will not decouple",
                    pair[1].center - pair[0].center
                ),
            ));
        }
    }
    let fastest = params.delta_e.max(params.e_fs);
    for p in &seq.pulses {
        let beta = 0.5 * p.width * fastest;
        if beta > crate::pulse::KICK_VALIDITY_BETA {
            out.push(Diagnostic::warning(
                DiagnosticKind::KickValidity,
                format!("pulse at {} ps is not sudden: width times splitting / 2 = {beta:.3}", p.center),
            ));
        }
    }
    if span * params.gamma > LIFETIME_FRACTION {
        out.push(Diagnostic::warning(
            DiagnosticKind::Lifetime,
            format!(
                "run length {span} ps is {:.2} lifetimes; 2p decay is significant",
                span * params.gamma
            ),
        ));
    }
    out
}

/// Integrates from 2s at `t = 0` to `t_end` and reports the total 2p probability.
pub fn run_pulse_sequence(
    params: &HydrogenParams,
    seq: &KickSequence,
    basis: Basis,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<HydrogenRun> {
    params.validate()?;
    let checked = KickSequence::new(seq.pulses.clone(), params.delta_e);
    let mut warnings = checked.validate();
    if let Some(bad) = warnings.iter().find(|d| d.is_error()) {
        return Err(Error::invalid(bad.message.clone()));
    }
    warnings.extend(hydrogen_diagnostics(params, seq, t_end));

    let model = HydrogenModel::new(*params, checked, basis);
    let trajectory = integrate(&model, crate::algebra::Amplitudes::basis(0), 0.0, t_end, dt, sample_every)?;
    warnings.extend(trajectory.warnings.iter().cloned());
    let target = trajectory.probabilities.iter().map(|p| p[1] + p[2]).collect();
    Ok(HydrogenRun { trajectory, target, warnings })
}
