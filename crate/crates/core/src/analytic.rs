//! Closed-form evolution matrices for kicked two-state systems.
//!
//! Unless stated otherwise, propagators are in the interaction frame of
//! `Ĥ₀ = −(ΔE/2)σz`, where a kick of area `α` at `t_k` is
//! `exp(−iα n⃗(t_k)·σ⃗)` with `n⃗(t) = (cos ΔEt, sin ΔEt, 0)` for `σx` pulses.

use serde::{Deserialize, Serialize};

use crate::algebra::{cis, compose, sigma_z, Matrix, PauliAxis, Propagator2, C64, I, ZERO};
use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::error::{Error, Result};
use crate::pulse::{KickAxis, KickSequence, PulseShape};

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn require_ordered(t1: f64, t2: f64) -> Result<()> {
    if t1 < t2 {
        Ok(())
    } else {
        Err(Error::invalid(format!("kick times must increase, got t1 = {t1}, t2 = {t2}")))
    }
}

/// `sin x / x`, with a series branch near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Direction of a kick in the interaction frame at time `t_k`.
pub fn kick_direction(axis: KickAxis, t_k: f64, delta_e: f64) -> PauliAxis {
    let theta = delta_e * t_k;
    match axis {
        KickAxis::X => PauliAxis::in_plane(theta),
        KickAxis::Y => PauliAxis::in_plane(theta + std::f64::consts::FRAC_PI_2),
    }
}

/// Single ideal kick in the interaction picture. Independent of the measurement time.
pub fn kick_interaction(alpha: f64, t_k: f64, axis: KickAxis, delta_e: f64) -> Propagator2 {
    let (s, c) = alpha.sin_cos();
    let phase = cis(delta_e * t_k);
    match axis {
        KickAxis::X => Matrix::new(real(c), -I * s * phase.conj(), -I * s * phase, real(c)),
        KickAxis::Y => Matrix::new(real(c), -phase.conj() * s, phase * s, real(c)),
    }
}

/// Single ideal kick in the Schrödinger picture, measured at `t ≥ t_k`.
pub fn kick_schrodinger(alpha: f64, t_k: f64, t: f64, delta_e: f64) -> Result<Propagator2> {
    if t < t_k {
        return Err(Error::invalid(format!("measurement time {t} precedes the kick at {t_k}")));
    }
    let (s, c) = alpha.sin_cos();
    let free = cis(0.5 * delta_e * t);
    let cross = cis(delta_e * (0.5 * t - t_k));
    Ok(Matrix::new(free * c, -I * cross * s, -I * cross.conj() * s, free.conj() * c))
}

/// Free propagator `e^{−iĤ₀t}` of the two-state model.
pub fn free_propagator(t: f64, delta_e: f64) -> Propagator2 {
    let p = cis(0.5 * delta_e * t);
    Matrix::diagonal([p, p.conj()])
}

/// Exact interaction-picture propagator of a rectangular `σx` pulse of area
/// `alpha` and `beta = τΔE/2`, centered at `t_k`.
pub fn rectangular_exact(alpha: f64, beta: f64, t_k: f64, delta_e: f64) -> Propagator2 {
    let alpha_p = alpha.hypot(beta);
    let c = alpha_p.cos();
    let sc = sinc(alpha_p);
    let phase = cis(delta_e * t_k);
    let b = cis(beta);
    Matrix::new(
        b.conj() * C64::new(c, beta * sc),
        -I * phase.conj() * (alpha * sc),
        -I * phase * (alpha * sc),
        b * C64::new(c, -beta * sc),
    )
}

/// Leading-order finite-width correction `iβ(sin α/α − cos α)σz`.
pub fn kick_width_error(alpha: f64, beta: f64) -> Propagator2 {
    sigma_z().scale(C64::new(0.0, beta * (sinc(alpha) - alpha.cos())))
}

/// Ordered product of ideal kicks, earliest rightmost.
pub fn multi_kick(seq: &KickSequence) -> Result<Propagator2> {
    if seq.is_empty() {
        return Err(Error::invalid("multi_kick needs at least one kick"));
    }
    if let Some(p) = seq.pulses.iter().find(|p| p.shape != PulseShape::IdealKick) {
        return Err(Error::invalid(format!(
            "multi_kick takes ideal kicks only, found {:?} at t = {}",
            p.shape, p.center
        )));
    }
    if !seq.centers_increasing() {
        return Err(Error::invalid("kick times must increase"));
    }
    let factors: Vec<_> = seq
        .pulses
        .iter()
        .map(|p| kick_interaction(p.alpha, p.center, p.axis, seq.delta_e))
        .collect();
    compose(&factors)
}

/// Two `σx` kicks, `α₁` at `t₁` then `α₂` at `t₂`.
pub fn two_kick_closed(alpha1: f64, alpha2: f64, t1: f64, t2: f64, delta_e: f64) -> Result<Propagator2> {
    require_ordered(t1, t2)?;
    let (s1, c1) = alpha1.sin_cos();
    let (s2, c2) = alpha2.sin_cos();
    let t_minus = t2 - t1;
    let t_plus = t1 + t2;
    let half = cis(0.5 * delta_e * t_minus);
    let u11 = real(c1 * c2) - cis(-delta_e * t_minus) * (s1 * s2);
    let u21 = -I * cis(0.5 * delta_e * t_plus) * (half * (c1 * s2) + half.conj() * (s1 * c2));
    Ok(Matrix::special_unitary(u11, u21))
}

/// Order of a mixed `σx`/`σy` kick pair. The first kick has area `α₁` at `t₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XyOrder {
    /// `σy` kick at `t₁`, then `σx` at `t₂`.
    YThenX,
    /// `σx` kick at `t₁`, then `σy` at `t₂`.
    XThenY,
}

/// Mixed-axis kick pair and its transfer probability from `(1, 0)`.
pub fn two_kick_xy(
    alpha1: f64,
    alpha2: f64,
    t1: f64,
    t2: f64,
    delta_e: f64,
    order: XyOrder,
) -> Result<(Propagator2, f64)> {
    require_ordered(t1, t2)?;
    let (s1, c1) = alpha1.sin_cos();
    let (s2, c2) = alpha2.sin_cos();
    let t_minus = t2 - t1;
    let half = cis(0.5 * delta_e * t_minus);
    let outer = cis(0.5 * delta_e * (t1 + t2));
    let (u11, u21, sign) = match order {
        XyOrder::YThenX => (
            real(c1 * c2) - I * cis(-delta_e * t_minus) * (s1 * s2),
            outer * (half.conj() * (c2 * s1) - I * half * (s2 * c1)),
            1.0,
        ),
        XyOrder::XThenY => (
            real(c1 * c2) + I * cis(-delta_e * t_minus) * (s1 * s2),
            outer * (half * (c1 * s2) - I * half.conj() * (s1 * c2)),
            -1.0,
        ),
    };
    let p2 = c1 * c1 * s2 * s2
        + s1 * s1 * c2 * c2
        + sign * 0.5 * (2.0 * alpha1).sin() * (2.0 * alpha2).sin() * (delta_e * t_minus).sin();
    Ok((Matrix::special_unitary(u11, u21), p2))
}

fn opposite_pair_formula(alpha: f64, t_plus: f64, t_minus: f64, delta_e: f64) -> Propagator2 {
    let (s, c) = alpha.sin_cos();
    let u11 = real(c * c) + cis(-delta_e * t_minus) * (s * s);
    let u21 = -cis(0.5 * delta_e * t_plus) * ((2.0 * alpha).sin() * (0.5 * delta_e * t_minus).sin());
    Matrix::special_unitary(u11, u21)
}

/// Equal-and-opposite `σx` kicks: `+α` at `t₁`, `−α` at `t₂`.
pub fn opposite_kick_pair(alpha: f64, t1: f64, t2: f64, delta_e: f64) -> Result<Propagator2> {
    require_ordered(t1, t2)?;
    Ok(opposite_pair_formula(alpha, t1 + t2, t2 - t1, delta_e))
}

/// The same pair written through half-angle factors, `e^{∓iθ}(cos θ ± i cos 2α sin θ)`
/// on the diagonal with `θ = ΔE t₋/2`.
pub fn opposite_kick_pair_half_angle(alpha: f64, t1: f64, t2: f64, delta_e: f64) -> Result<Propagator2> {
    require_ordered(t1, t2)?;
    let theta = 0.5 * delta_e * (t2 - t1);
    let (st, ct) = theta.sin_cos();
    let c2a = (2.0 * alpha).cos();
    let off = (2.0 * alpha).sin() * st;
    let outer = cis(0.5 * delta_e * (t1 + t2));
    Ok(Matrix::new(
        cis(-theta) * C64::new(ct, c2a * st),
        outer.conj() * off,
        -outer * off,
        cis(theta) * C64::new(ct, -c2a * st),
    ))
}

/// Three `σx` kicks. Evaluated as the explicit ordered product.
pub fn three_kick_closed(alphas: [f64; 3], times: [f64; 3], delta_e: f64) -> Result<Propagator2> {
    require_ordered(times[0], times[1])?;
    require_ordered(times[1], times[2])?;
    let factors = [0, 1, 2].map(|k| kick_interaction(alphas[k], times[k], KickAxis::X, delta_e));
    compose(&factors)
}

/// Three-kick result in its cotangent/tangent form.
///
/// The expression has removable singularities at `αᵢ ∈ {0, ±π/2}`; returns
/// `None` when any `|cos αᵢ|` or `|sin αᵢ|` is below `1e−3`.
pub fn three_kick_trig_form(alphas: [f64; 3], times: [f64; 3], delta_e: f64) -> Option<Propagator2> {
    if alphas.iter().any(|a| a.sin().abs() < 1e-3 || a.cos().abs() < 1e-3) {
        return None;
    }
    let [a1, a2, a3] = alphas;
    let [t1, t2, t3] = times;
    let e = |t: f64| cis(delta_e * t);
    let ccc = a1.cos() * a2.cos() * a3.cos();
    let sss = a1.sin() * a2.sin() * a3.sin();
    let cot = |a: f64| a.cos() / a.sin();
    let u11 = real(ccc)
        - (e(t2 - t3) * cot(a1) + e(t1 - t3) * cot(a2) + e(t1 - t2) * cot(a3)) * sss;
    let u21 = I
        * (e(t3 - t2 + t1) * sss - (e(t1) * a1.tan() + e(t2) * a2.tan() + e(t3) * a3.tan()) * ccc);
    Some(Matrix::special_unitary(u11, u21))
}

fn untimeordered_formula(alpha: f64, t_plus: f64, t_minus: f64, delta_e: f64) -> Propagator2 {
    let angle = 2.0 * alpha * (0.5 * delta_e * t_minus).sin();
    let (s, c) = angle.sin_cos();
    let outer = cis(0.5 * delta_e * t_plus);
    Matrix::new(real(c), outer.conj() * s, -outer * s, real(c))
}

/// The equal-and-opposite pair with time ordering removed: `e^{−i∫V_I dt}`.
pub fn untimeordered_opposite_pair(alpha: f64, t1: f64, t2: f64, delta_e: f64) -> Result<Propagator2> {
    require_ordered(t1, t2)?;
    Ok(untimeordered_formula(alpha, t1 + t2, t2 - t1, delta_e))
}

/// Transfer probabilities of the opposite pair with and without time ordering.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingObservable {
    /// `sin(ΔE t₋/2)`.
    pub epsilon: f64,
    /// `2α`.
    pub phi: f64,
    /// `(ε sin φ)²`.
    pub p2: f64,
    /// `sin²(εφ)`.
    pub p2_no_ordering: f64,
}

impl OrderingObservable {
    pub fn from_epsilon_phi(epsilon: f64, phi: f64) -> Self {
        OrderingObservable {
            epsilon,
            phi,
            p2: (epsilon * phi.sin()).powi(2),
            p2_no_ordering: (epsilon * phi).sin().powi(2),
        }
    }

    /// `P₂ − P₂⁽⁰⁾`, the time-ordering effect.
    pub fn difference(&self) -> f64 {
        self.p2 - self.p2_no_ordering
    }
}

pub fn ordering_observable(alpha: f64, t_minus: f64, delta_e: f64) -> OrderingObservable {
    OrderingObservable::from_epsilon_phi((0.5 * delta_e * t_minus).sin(), 2.0 * alpha)
}

/// Which opposite-pair propagator a symmetry check applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairBuilder {
    Ordered,
    Untimeordered,
}

impl PairBuilder {
    pub fn build(self, alpha: f64, t1: f64, t2: f64, delta_e: f64) -> Result<Propagator2> {
        match self {
            PairBuilder::Ordered => opposite_kick_pair(alpha, t1, t2, delta_e),
            PairBuilder::Untimeordered => untimeordered_opposite_pair(alpha, t1, t2, delta_e),
        }
    }

    fn formula(self, alpha: f64, t_plus: f64, t_minus: f64, delta_e: f64) -> Propagator2 {
        match self {
            PairBuilder::Ordered => opposite_pair_formula(alpha, t_plus, t_minus, delta_e),
            PairBuilder::Untimeordered => untimeordered_formula(alpha, t_plus, t_minus, delta_e),
        }
    }
}

/// Outcome of [`time_reversal_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeReversalReport {
    /// Max entry change under reversed time ordering (`t₋ → −t₋`, `α → −α`).
    pub ordering_reversal_deviation: f64,
    /// Max change of entry moduli under reversed time ordering.
    pub ordering_reversal_modulus_deviation: f64,
    /// Max entry deviation of the time-reversed protocol from `(U†)*`.
    pub time_reversal_deviation: f64,
    /// Matrix unchanged by reversing the time ordering.
    pub ordering_reversal_invariant: bool,
    /// Entry moduli unchanged by reversing the time ordering.
    pub ordering_reversal_moduli_preserved: bool,
    /// Time-reversed protocol reproduces the original amplitudes.
    pub time_reversal_invariant: bool,
}

/// Compares reversal of time ordering with time reversal for the opposite pair.
///
/// Reversing the time ordering keeps the kicks where they are but multiplies
/// them in anti-chronological order; algebraically `t₋ → −t₋`, `α → −α`.
///
/// Time reversal runs the protocol backwards: the kick at `t₂` now comes first
/// at `−t₂`, so `t± → −t±` with the areas following their kicks. Initial and
/// final states swap, and for this real Hamiltonian the antiunitary
/// conjugation turns `U†` into `(U†)* = Uᵀ`.
pub fn time_reversal_check(
    builder: PairBuilder,
    alpha: f64,
    t1: f64,
    t2: f64,
    delta_e: f64,
    tolerance: f64,
) -> Result<TimeReversalReport> {
    let u = builder.build(alpha, t1, t2, delta_e)?;

    let anti = builder.formula(-alpha, t1 + t2, -(t2 - t1), delta_e);
    let ordering_reversal_deviation = u.max_abs_diff(&anti);
    let ordering_reversal_modulus_deviation = (0..2)
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .map(|idx| (u[idx].norm() - anti[idx].norm()).abs())
        .fold(0.0, f64::max);

    let reversed = builder.build(-alpha, -t2, -t1, delta_e)?;
    let time_reversal_deviation = reversed.max_abs_diff(&u.dagger().conj());

    Ok(TimeReversalReport {
        ordering_reversal_deviation,
        ordering_reversal_modulus_deviation,
        time_reversal_deviation,
        ordering_reversal_invariant: ordering_reversal_deviation < tolerance,
        ordering_reversal_moduli_preserved: ordering_reversal_modulus_deviation < tolerance,
        time_reversal_invariant: time_reversal_deviation < tolerance,
    })
}

/// `n` identical `σx` kicks spaced by `period`, the first at `t = 0`.
///
/// Built as the `n`-th power of the Schrödinger-picture period map
/// (kick, then free evolution over one period) by repeated squaring, then
/// moved to the interaction frame at `t = n·period`.
pub fn periodic_kick_power(alpha: f64, period: f64, n: u64, delta_e: f64) -> Result<Propagator2> {
    if n == 0 {
        return Err(Error::invalid("periodic_kick_power needs n >= 1"));
    }
    let kick = kick_interaction(alpha, 0.0, KickAxis::X, delta_e);
    let period_map = free_propagator(period, delta_e) * kick;
    let total = n as f64 * period;
    Ok(free_propagator(total, delta_e).dagger() * period_map.pow(n))
}

/// `Some(±1)` when `u` is within `tol` of `±I`.
pub fn identity_sign(u: &Propagator2, tol: f64) -> Option<f64> {
    let id = Propagator2::identity();
    if u.max_abs_diff(&id) < tol {
        Some(1.0)
    } else if u.max_abs_diff(&(-id)) < tol {
        Some(-1.0)
    } else {
        None
    }
}

/// Composite-Simpson nodes used inside [`limit_catalog`] when the caller does not choose.
pub const DEFAULT_QUADRATURE_POINTS: usize = 10_000;

/// Field samples on a uniform grid starting at `t0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn from_fn(f: impl Fn(f64) -> f64, t0: f64, t1: f64, points: usize) -> Result<Self> {
        if points < 2 || !(t1 > t0) {
            return Err(Error::invalid("a sampled field needs >= 2 points on a non-empty interval"));
        }
        let dt = (t1 - t0) / (points - 1) as f64;
        let values = (0..points).map(|k| f(t0 + k as f64 * dt)).collect();
        Ok(SampledField { t0, dt, values })
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.dt * (self.values.len() - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    fn validate(&self) -> Result<()> {
        if self.values.len() < 2 || !(self.dt > 0.0) {
            return Err(Error::invalid("a sampled field needs >= 2 points and dt > 0"));
        }
        Ok(())
    }
}

/// Composite Simpson weights for `n` uniformly spaced nodes. An odd number of
/// intervals closes with a 3/8 panel; two nodes fall back to the trapezoid.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    if n == 2 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let intervals = n - 1;
    let simpson_intervals = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    for k in (0..simpson_intervals).step_by(2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if simpson_intervals < intervals {
        let s = simpson_intervals;
        for (j, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[s + j] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// Input for one of the limiting analytic solutions.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitInput {
    /// Weak field; first-order Schrödinger-picture propagator at the grid end.
    Perturbative { field: SampledField, delta_e: f64 },
    /// `ΔE t ≪ 1`; only the total action `∫V dt` matters.
    Degenerate { area: f64 },
    /// Slowly varying field; `Θ(t) = ∫Ω/2`, `Ω = √(ΔE² + 4V²)`.
    Adiabatic { field: SampledField, delta_e: f64 },
    /// Constant `V` over `[0, t]`.
    ConstantField { v: f64, t: f64, delta_e: f64 },
    /// Near-resonant drive of coupling `v` and detuning `Δω = ω − ω₀`.
    Rwa { v: f64, detuning: f64, t: f64, resonance: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitOutcome {
    pub propagator: Propagator2,
    pub warnings: Vec<Diagnostic>,
}

/// Relative detuning above which the rotating-wave form is flagged.
pub const RWA_DETUNING_LIMIT: f64 = 0.1;

fn adiabatic_form(theta: f64, delta_e: f64, two_v: f64) -> Propagator2 {
    let omega = delta_e.hypot(two_v);
    if omega == 0.0 {
        return Propagator2::identity();
    }
    let (s, c) = theta.sin_cos();
    let off = C64::new(0.0, -two_v / omega * s);
    Matrix::new(C64::new(c, delta_e / omega * s), off, off, C64::new(c, -delta_e / omega * s))
}

/// The catalog of limiting solutions of the two-state equations.
pub fn limit_catalog(input: &LimitInput) -> Result<LimitOutcome> {
    let mut warnings = Vec::new();
    let propagator = match input {
        LimitInput::Perturbative { field, delta_e } => {
            field.validate()?;
            let t = field.end();
            let w = simpson_weights(field.values.len(), field.dt);
            let (mut upper, mut lower) = (ZERO, ZERO);
            for (k, (&v, &wk)) in field.values.iter().zip(&w).enumerate() {
                let phase = cis(delta_e * (0.5 * t - field.time(k)));
                upper += phase * (v * wk);
                lower += phase.conj() * (v * wk);
            }
            let free = cis(0.5 * delta_e * t);
            Matrix::new(free, -I * upper, -I * lower, free.conj())
        }
        LimitInput::Degenerate { area } => {
            let (s, c) = area.sin_cos();
            Matrix::new(real(c), C64::new(0.0, -s), C64::new(0.0, -s), real(c))
        }
        LimitInput::Adiabatic { field, delta_e } => {
            field.validate()?;
            let w = simpson_weights(field.values.len(), field.dt);
            let theta: f64 = field
                .values
                .iter()
                .zip(&w)
                .map(|(&v, &wk)| 0.5 * delta_e.hypot(2.0 * v) * wk)
                .sum();
            let v_end = *field.values.last().expect("validated non-empty");
            adiabatic_form(theta, *delta_e, 2.0 * v_end)
        }
        LimitInput::ConstantField { v, t, delta_e } => {
            let omega = delta_e.hypot(2.0 * v);
            adiabatic_form(0.5 * omega * t, *delta_e, 2.0 * v)
        }
        LimitInput::Rwa { v, detuning, t, resonance } => {
            if detuning.abs() > RWA_DETUNING_LIMIT * resonance.abs() {
                warnings.push(Diagnostic::warning(
                    DiagnosticKind::RwaValidity,
                    format!("detuning {detuning} is not small against the resonance {resonance}"),
                ));
            }
            let rabi = v.hypot(*detuning);
            adiabatic_form(rabi * t, 2.0 * detuning, 2.0 * v)
        }
    };
    Ok(LimitOutcome { propagator, warnings })
}

/// `|U₂₁|²`, the transfer probability out of `(1, 0)`.
pub fn transfer_probability(u: &Propagator2) -> f64 {
    u.u21().norm_sqr()
}
