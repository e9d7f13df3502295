//! Fixed-step fourth-order Runge-Kutta for `i d/dt a = H(t) a`.
//!
//! `H` may be non-Hermitian (decay enters as `−iΓ/2` on the diagonal), in
//! which case the norm leaks out of the model.

use crate::algebra::{Amplitudes, Matrix, C64, I};
use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::error::{Error, Result};
use crate::pulse::{KickSequence, PulseShape, GAUSSIAN_SUPPORT};

/// Steps per narrowest pulse width below which a resolution warning is raised.
pub const STEPS_PER_WIDTH: f64 = 20.0;

/// Time-dependent Hamiltonian of an `N`-state model.
pub trait Hamiltonian<const N: usize> {
    fn evaluate(&self, t: f64) -> Matrix<N>;

    /// Narrowest pulse width driving the model, if any.
    fn narrowest_pulse(&self) -> Option<f64> {
        None
    }

    /// Times where `H` jumps; the integrator puts a step boundary on each.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Wraps a closure as a [`Hamiltonian`].
pub struct FnHamiltonian<F>(pub F);

impl<const N: usize, F: Fn(f64) -> Matrix<N>> Hamiltonian<N> for FnHamiltonian<F> {
    fn evaluate(&self, t: f64) -> Matrix<N> {
        (self.0)(t)
    }
}

/// The driven two-state model `H(t) = −(ΔE/2)σz + Vx(t)σx + Vy(t)σy`.
#[derive(Clone, Debug)]
pub struct TwoLevelModel {
    pub sequence: KickSequence,
}

impl TwoLevelModel {
    pub fn new(sequence: KickSequence) -> Self {
        TwoLevelModel { sequence }
    }

    pub fn delta_e(&self) -> f64 {
        self.sequence.delta_e
    }
}

impl Hamiltonian<2> for TwoLevelModel {
    fn evaluate(&self, t: f64) -> Matrix<2> {
        let half = 0.5 * self.sequence.delta_e;
        let v = self.sequence.field_at(t);
        Matrix::new(
            C64::new(-half, 0.0),
            C64::new(v.x, -v.y),
            C64::new(v.x, v.y),
            C64::new(half, 0.0),
        )
    }

    fn narrowest_pulse(&self) -> Option<f64> {
        self.sequence.narrowest_width()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.sequence.edges()
    }
}

/// Sampled solution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<Amplitudes<N>>,
    pub probabilities: Vec<[f64; N]>,
    pub norms: Vec<f64>,
    pub warnings: Vec<Diagnostic>,
}

impl<const N: usize> Trajectory<N> {
    fn push(&mut self, t: f64, state: Amplitudes<N>) {
        self.times.push(t);
        self.probabilities.push(state.probabilities());
        self.norms.push(state.norm_sqr());
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Amplitudes<N> {
        *self.states.last().expect("trajectory has at least two samples")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least two samples")
    }

    pub fn final_probabilities(&self) -> [f64; N] {
        *self.probabilities.last().expect("trajectory has at least two samples")
    }
}

#[inline]
fn derivative<const N: usize>(h: &Matrix<N>, a: &Amplitudes<N>) -> Amplitudes<N> {
    h.apply(a).scale(-I)
}

/// One classical RK4 step of `a′ = −iH(t)a`.
pub fn rk4_step<const N: usize, H: Hamiltonian<N> + ?Sized>(
    model: &H,
    state: &Amplitudes<N>,
    t: f64,
    dt: f64,
) -> Amplitudes<N> {
    step_with_inset(model, state, t, dt, 0.0)
}

/// Fraction of a step by which endpoint stages move into the segment, so a
/// field discontinuity at a breakpoint is seen from the correct side.
const EDGE_INSET: f64 = 1e-9;

fn step_with_inset<const N: usize, H: Hamiltonian<N> + ?Sized>(
    model: &H,
    state: &Amplitudes<N>,
    t: f64,
    dt: f64,
    inset: f64,
) -> Amplitudes<N> {
    let half = 0.5 * dt;
    let h0 = model.evaluate(t + inset * dt);
    let hm = model.evaluate(t + half);
    let h1 = model.evaluate(t + dt - inset * dt);
    let k1 = derivative(&h0, state);
    let k2 = derivative(&hm, &(*state + k1 * half));
    let k3 = derivative(&hm, &(*state + k2 * half));
    let k4 = derivative(&h1, &(*state + k3 * dt));
    *state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Integrates from `t0` to `t1` with steps no longer than `dt`.
///
/// Each segment between breakpoints is split into `ceil(len / dt)` equal
/// steps. Samples are taken every `sample_every` steps, and at both ends.
pub fn integrate<const N: usize, H: Hamiltonian<N> + ?Sized>(
    model: &H,
    initial: Amplitudes<N>,
    t0: f64,
    t1: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory<N>> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::invalid(format!("need t0 < t1, got [{t0}, {t1}]")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("step must be positive, got {dt}")));
    }
    if sample_every == 0 {
        return Err(Error::invalid("sample_every must be at least 1"));
    }

    let mut traj = Trajectory::default();
    if let Some(width) = model.narrowest_pulse() {
        if dt > width / STEPS_PER_WIDTH * (1.0 + 1e-9) {
            traj.warnings.push(Diagnostic::warning(
                DiagnosticKind::StepResolution,
                format!("dt = {dt} exceeds tau/{STEPS_PER_WIDTH} = {}", width / STEPS_PER_WIDTH),
            ));
        }
    }

    let mut cuts: Vec<f64> = model
        .breakpoints()
        .into_iter()
        .filter(|&b| b > t0 && b < t1)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(t1);

    let mut state = initial;
    let mut t = t0;
    let mut step = 0usize;
    traj.push(t, state);
    let mut start = t0;
    for end in cuts {
        let len = end - start;
        let n = ((len / dt) - 1e-9).ceil().max(1.0) as usize;
        let h = len / n as f64;
        for k in 0..n {
            state = step_with_inset(model, &state, t, h, EDGE_INSET);
            t = if k + 1 == n { end } else { start + (k + 1) as f64 * h };
            step += 1;
            if !state.is_finite() {
                return Err(Error::Diverged { t });
            }
            let last = end == t1 && k + 1 == n;
            if step % sample_every == 0 && !last {
                traj.push(t, state);
            }
        }
        start = end;
    }
    traj.push(t1, state);
    Ok(traj)
}

/// Final state only.
pub fn propagate<const N: usize, H: Hamiltonian<N> + ?Sized>(
    model: &H,
    initial: Amplitudes<N>,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Amplitudes<N>> {
    Ok(integrate(model, initial, t0, t1, dt, usize::MAX)?.final_state())
}

/// Numerical evolution matrix, one basis column at a time.
pub fn propagator<const N: usize, H: Hamiltonian<N> + ?Sized>(
    model: &H,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Matrix<N>> {
    let mut u = Matrix::<N>::zeros();
    for c in 0..N {
        let col = propagate(model, Amplitudes::basis(c), t0, t1, dt)?;
        for r in 0..N {
            u.0[r][c] = col.0[r];
        }
    }
    Ok(u)
}

/// `max |Σ|aⱼ|² − Σ|aⱼ(t₀)|²|` over the samples.
pub fn norm_drift<const N: usize>(traj: &Trajectory<N>) -> f64 {
    let Some(&n0) = traj.norms.first() else { return 0.0 };
    traj.norms.iter().map(|n| (n - n0).abs()).fold(0.0, f64::max)
}

/// Two-state amplitudes in the interaction frame, `a_I = e^{iĤ₀t} a_S` with `Ĥ₀ = −(ΔE/2)σz`.
pub fn to_interaction_picture(state: &Amplitudes<2>, t: f64, delta_e: f64) -> Amplitudes<2> {
    let phase = crate::algebra::cis(-0.5 * delta_e * t);
    Amplitudes::<2>::new(state.a1() * phase, state.a2() * phase.conj())
}

/// Interaction-frame state after a pulse train, integrating only where the
/// field is non-zero. Overlapping supports are merged into one window.
pub fn propagate_through_pulses(
    seq: &KickSequence,
    initial: Amplitudes<2>,
    dt: f64,
) -> Result<Amplitudes<2>> {
    if seq.pulses.iter().any(|p| p.shape == PulseShape::IdealKick) {
        return Err(Error::invalid("ideal kicks have no field to integrate"));
    }
    let mut windows: Vec<(f64, f64)> = seq.pulses.iter().map(|p| p.support()).collect();
    windows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for w in windows {
        match merged.last_mut() {
            Some(last) if w.0 <= last.1 => last.1 = last.1.max(w.1),
            _ => merged.push(w),
        }
    }
    let model = TwoLevelModel::new(seq.clone());
    let free = |t: f64| {
        let p = crate::algebra::cis(0.5 * seq.delta_e * t);
        Matrix::<2>::diagonal([p, p.conj()])
    };
    let mut state = initial;
    for (a, b) in merged {
        let schrodinger = free(a) * state;
        let end = propagate(&model, schrodinger, a, b, dt)?;
        state = free(b).dagger() * end;
    }
    Ok(state)
}

/// Last pulse support end plus one free interval.
pub fn default_end_time(seq: &KickSequence, free_interval: f64) -> f64 {
    let last = seq
        .pulses
        .iter()
        .map(|p| p.center + GAUSSIAN_SUPPORT * p.width)
        .fold(f64::NEG_INFINITY, f64::max);
    last.max(0.0) + free_interval
}
