//! Oracles written directly from the Pauli algebra, independent of the library's closed forms.

use kicked_qubit::{KickAxis, Matrix, Propagator2, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sigma_x() -> Propagator2 {
    Matrix::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn sigma_y() -> Propagator2 {
    Matrix::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn sigma_z() -> Propagator2 {
    Matrix::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// `cos θ·1 − i sin θ·h` for a Hermitian `h` with `h² = 1`.
fn unit_exponential(theta: f64, h: Propagator2) -> Propagator2 {
    Matrix::<2>::identity().scale(c(theta.cos(), 0.0)) - h.scale(c(0.0, theta.sin()))
}

/// `e^{−iα σ_I(t)}`, the kick seen in the frame rotating with `−(ΔE/2)σz`.
pub fn kick(alpha: f64, t: f64, axis: KickAxis, delta_e: f64) -> Propagator2 {
    let (s, co) = (delta_e * t).sin_cos();
    // e^{iH₀t} σx e^{−iH₀t} = cos σx + sin σy, and σy maps to cos σy − sin σx
    let n = match axis {
        KickAxis::X => sigma_x().scale(c(co, 0.0)) + sigma_y().scale(c(s, 0.0)),
        KickAxis::Y => sigma_y().scale(c(co, 0.0)) - sigma_x().scale(c(s, 0.0)),
    };
    unit_exponential(alpha, n)
}

/// Time-ordered product of ideal kicks, earliest applied first.
pub fn kick_product(kicks: &[(f64, f64, KickAxis)], delta_e: f64) -> Propagator2 {
    kicks
        .iter()
        .fold(Matrix::identity(), |acc, &(alpha, t, axis)| kick(alpha, t, axis, delta_e) * acc)
}

/// Schrödinger-picture free evolution `e^{−iH₀t}`.
pub fn free(t: f64, delta_e: f64) -> Propagator2 {
    let p = c(0.0, 0.5 * delta_e * t).exp();
    Matrix::new(p, c(0.0, 0.0), c(0.0, 0.0), p.conj())
}

/// Schrödinger-picture propagator across a constant `σx` pulse of area `alpha` and length `tau`.
pub fn rectangular_window(alpha: f64, tau: f64, delta_e: f64) -> Propagator2 {
    let v = alpha / tau;
    let half = 0.5 * delta_e;
    let omega = (v * v + half * half).sqrt();
    let h = sigma_x().scale(c(v / omega, 0.0)) - sigma_z().scale(c(half / omega, 0.0));
    unit_exponential(omega * tau, h)
}

/// Ordinary least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy, sxx, sxy) = points.iter().fold((0.0, 0.0, 0.0, 0.0), |(sx, sy, sxx, sxy), &(x, y)| {
        let (lx, ly) = (x.ln(), y.ln());
        (sx + lx, sy + ly, sxx + lx * lx, sxy + lx * ly)
    });
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub fn max_entry_diff(a: &Propagator2, b: &Propagator2) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..2 {
        for col in 0..2 {
            worst = worst.max((a[(r, col)] - b[(r, col)]).norm());
        }
    }
    worst
}
