//! Independent reference computations for unit tests.

use crate::algebra::{Matrix, C64};

/// Truncated `Σ Mᵏ/k!`.
pub(crate) fn power_series_exp<const N: usize>(m: &Matrix<N>, terms: usize) -> Matrix<N> {
    let mut term = Matrix::<N>::identity();
    let mut acc = term;
    for k in 1..terms {
        term = (term * *m).scale(C64::new(1.0 / k as f64, 0.0));
        acc = acc + term;
    }
    acc
}

/// `e^M` by scaling and squaring around a Taylor core.
pub(crate) fn expm<const N: usize>(m: &Matrix<N>) -> Matrix<N> {
    let norm = m.frobenius();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
    let mut e = power_series_exp(&scaled, 20);
    for _ in 0..squarings {
        e = e * e;
    }
    e
}
