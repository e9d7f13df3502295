//! Dense complex algebra for 2- and 3-dimensional state spaces.
//!
//! Everything here is `Copy` and allocation-free. Units are natural (ħ = 1):
//! energies are angular frequencies and times are in the reciprocal unit.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

/// 2×2 evolution matrix.
pub type Propagator2 = Matrix<2>;
/// 3×3 evolution matrix.
pub type Propagator3 = Matrix<3>;

impl<const N: usize> Matrix<N> {
    pub const fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = ONE;
        }
        m
    }

    pub fn diagonal(entries: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = entries[k];
        }
        m
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = self.0[c][r].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = self.0[c][r];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|k| self.0[k][k]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise max-norm distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|row| row.iter()).all(|z| z.is_finite())
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Max-norm of `U†U − I`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self - Self::identity()).max_abs()
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &Amplitudes<N>) -> Amplitudes<N> {
        let mut out = [ZERO; N];
        for (r, slot) in out.iter_mut().enumerate() {
            *slot = (0..N).map(|c| self.0[r][c] * v.0[c]).sum();
        }
        Amplitudes(out)
    }
}

impl Matrix<2> {
    pub fn new(u11: C64, u12: C64, u21: C64, u22: C64) -> Self {
        Matrix([[u11, u12], [u21, u22]])
    }

    pub fn u11(&self) -> C64 {
        self.0[0][0]
    }
    pub fn u12(&self) -> C64 {
        self.0[0][1]
    }
    pub fn u21(&self) -> C64 {
        self.0[1][0]
    }
    pub fn u22(&self) -> C64 {
        self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Builds `((u11, −u21*), (u21, u11*))`.
    pub fn special_unitary(u11: C64, u21: C64) -> Self {
        Matrix([[u11, -u21.conj()], [u21, u11.conj()]])
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[r][c]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[r][c]
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = (0..N).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        m
    }
}

impl<const N: usize> Mul<Amplitudes<N>> for Matrix<N> {
    type Output = Amplitudes<N>;
    fn mul(self, rhs: Amplitudes<N>) -> Amplitudes<N> {
        self.apply(&rhs)
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] += rhs.0[r][c];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] -= rhs.0[r][c];
            }
        }
        m
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

/// State vector of complex probability amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitudes<const N: usize>(pub [C64; N]);

/// `(a₁, a₂)` of the two-state model.
pub type AmplitudePair = Amplitudes<2>;
/// `(a₁, a₂, a₃)` of the three-state hydrogen model.
pub type AmplitudeTriple = Amplitudes<3>;

impl<const N: usize> Amplitudes<N> {
    /// The `k`-th basis state (zero-based).
    pub fn basis(k: usize) -> Self {
        let mut a = [ZERO; N];
        a[k] = ONE;
        Amplitudes(a)
    }

    pub fn probabilities(&self) -> [f64; N] {
        self.0.map(|z| z.norm_sqr())
    }

    /// `Σ |aⱼ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Euclidean distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        Amplitudes(self.0.map(|z| z * s))
    }
}

impl Amplitudes<2> {
    pub fn new(a1: C64, a2: C64) -> Self {
        Amplitudes([a1, a2])
    }
    pub fn a1(&self) -> C64 {
        self.0[0]
    }
    pub fn a2(&self) -> C64 {
        self.0[1]
    }
}

impl Amplitudes<3> {
    pub fn new(a1: C64, a2: C64, a3: C64) -> Self {
        Amplitudes([a1, a2, a3])
    }
    pub fn a1(&self) -> C64 {
        self.0[0]
    }
    pub fn a2(&self) -> C64 {
        self.0[1]
    }
    pub fn a3(&self) -> C64 {
        self.0[2]
    }
}

impl<const N: usize> Add for Amplitudes<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut a = self;
        a += rhs;
        a
    }
}

impl<const N: usize> AddAssign for Amplitudes<N> {
    fn add_assign(&mut self, rhs: Self) {
        for (x, y) in self.0.iter_mut().zip(rhs.0) {
            *x += y;
        }
    }
}

impl<const N: usize> Sub for Amplitudes<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut a = self;
        for (x, y) in a.0.iter_mut().zip(rhs.0) {
            *x -= y;
        }
        a
    }
}

impl<const N: usize> Mul<f64> for Amplitudes<N> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Amplitudes(self.0.map(|z| z * s))
    }
}

/// `(P₁, P₂) = (|a₁|², |a₂|²)`.
pub fn occupation_probabilities(state: &AmplitudePair) -> (f64, f64) {
    (state.a1().norm_sqr(), state.a2().norm_sqr())
}

/// Max-norm of `U†U − I`; 0 for exactly unitary input.
pub fn unitarity_defect(u: &Propagator2) -> f64 {
    u.unitarity_defect()
}

const AXIS_TOLERANCE: f64 = 1e-12;

/// Direction `u⃗` in `σ⃗·u⃗`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    /// Arbitrary real direction; must be a unit vector.
    Direction([f64; 3]),
}

impl PauliAxis {
    /// Checked constructor for an arbitrary direction.
    pub fn direction(n: [f64; 3]) -> Result<Self> {
        let axis = PauliAxis::Direction(n);
        axis.validate()?;
        Ok(axis)
    }

    /// In-plane unit vector `(cos θ, sin θ, 0)`.
    pub fn in_plane(theta: f64) -> Self {
        PauliAxis::Direction([theta.cos(), theta.sin(), 0.0])
    }

    pub fn components(&self) -> [f64; 3] {
        match *self {
            PauliAxis::X => [1.0, 0.0, 0.0],
            PauliAxis::Y => [0.0, 1.0, 0.0],
            PauliAxis::Z => [0.0, 0.0, 1.0],
            PauliAxis::Direction(n) => n,
        }
    }

    fn validate(&self) -> Result<()> {
        let [x, y, z] = self.components();
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOLERANCE {
            return Err(Error::invalid(format!("Pauli axis must be a unit vector, |n| = {norm}")));
        }
        Ok(())
    }

    /// `σ⃗·n⃗`.
    pub fn sigma(&self) -> Propagator2 {
        let [x, y, z] = self.components();
        Matrix::new(
            C64::new(z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(-z, 0.0),
        )
    }
}

pub fn sigma_x() -> Propagator2 {
    PauliAxis::X.sigma()
}

pub fn sigma_y() -> Propagator2 {
    PauliAxis::Y.sigma()
}

pub fn sigma_z() -> Propagator2 {
    PauliAxis::Z.sigma()
}

/// `e^{iφ σ⃗·u⃗} = cos φ · I + i sin φ · σ⃗·u⃗`.
pub fn su2_exponential(phi: f64, axis: PauliAxis) -> Result<Propagator2> {
    axis.validate()?;
    let (s, c) = phi.sin_cos();
    Ok(Propagator2::identity().scale(C64::new(c, 0.0)) + axis.sigma().scale(C64::new(0.0, s)))
}

/// Product of propagators listed in the order they act: `[U₁, U₂, …, Uₙ] ↦ Uₙ ⋯ U₂ U₁`.
pub fn compose<const N: usize>(factors: &[Matrix<N>]) -> Result<Matrix<N>> {
    if factors.is_empty() {
        return Err(Error::invalid("compose needs at least one factor"));
    }
    Ok(factors.iter().skip(1).fold(factors[0], |acc, u| *u * acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::power_series_exp;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_1_SQRT_2};

    fn random_axis(theta: f64, phi: f64) -> PauliAxis {
        PauliAxis::Direction([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    #[test]
    fn su2_zero_angle_is_identity() {
        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z, random_axis(0.3, 1.1)] {
            let u = su2_exponential(0.0, axis).unwrap();
            assert!(u.max_abs_diff(&Propagator2::identity()) < 1e-15);
        }
    }

    #[test]
    fn su2_quarter_turn_about_x() {
        let u = su2_exponential(FRAC_PI_2, PauliAxis::X).unwrap();
        let expected = Matrix::new(ZERO, I, I, ZERO);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn su2_rejects_non_unit_axis() {
        assert!(matches!(
            su2_exponential(0.1, PauliAxis::Direction([1.0, 1.0, 0.0])),
            Err(Error::InvalidArgument(_))
        ));
        assert!(PauliAxis::direction([0.0, 0.0, 0.5]).is_err());
        assert!(PauliAxis::direction([0.0, 0.6, 0.8]).is_ok());
    }

    #[test]
    fn su2_matches_power_series() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let phi = rng.gen_range(-4.0..4.0);
            let axis = random_axis(rng.gen_range(0.0..3.1), rng.gen_range(0.0..6.2));
            let generator = axis.sigma().scale(C64::new(0.0, phi));
            let oracle = power_series_exp(&generator, 30);
            let u = su2_exponential(phi, axis).unwrap();
            assert!(u.max_abs_diff(&oracle) < 1e-10, "phi={phi}");
        }
    }

    #[test]
    fn compose_identity_and_same_axis() {
        let id = Propagator2::identity();
        assert_eq!(compose(&[id, id, id]).unwrap(), id);

        let a = su2_exponential(0.4, PauliAxis::X).unwrap();
        let b = su2_exponential(-1.3, PauliAxis::X).unwrap();
        let ab = su2_exponential(0.4 - 1.3, PauliAxis::X).unwrap();
        assert!(compose(&[a, b]).unwrap().max_abs_diff(&ab) < 1e-15);
    }

    #[test]
    fn compose_respects_order() {
        let qx = su2_exponential(FRAC_PI_2 / 2.0, PauliAxis::X).unwrap();
        let qy = su2_exponential(FRAC_PI_2 / 2.0, PauliAxis::Y).unwrap();
        let xy = compose(&[qx, qy]).unwrap();
        // direct multiplication, earliest on the right
        let mut direct = Propagator2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                direct.0[r][c] = qy.0[r][0] * qx.0[0][c] + qy.0[r][1] * qx.0[1][c];
            }
        }
        assert!(xy.max_abs_diff(&direct) < 1e-15);
        let yx = compose(&[qy, qx]).unwrap();
        assert!(xy.max_abs_diff(&yx) > 0.1);
    }

    #[test]
    fn compose_rejects_empty() {
        assert!(compose::<2>(&[]).is_err());
    }

    #[test]
    fn occupation_examples() {
        assert_eq!(occupation_probabilities(&AmplitudePair::basis(0)), (1.0, 0.0));
        let s = AmplitudePair::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2));
        let (p1, p2) = occupation_probabilities(&s);
        assert!((p1 - 0.5).abs() < 1e-15 && (p2 - 0.5).abs() < 1e-15);

        let u = su2_exponential(0.3, PauliAxis::X).unwrap();
        let (p1, p2) = occupation_probabilities(&u.apply(&AmplitudePair::basis(0)));
        assert!((p1 - 0.3f64.cos().powi(2)).abs() < 1e-15);
        assert!((p2 - 0.3f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn unitarity_defect_examples() {
        assert_eq!(unitarity_defect(&Propagator2::identity()), 0.0);
        assert!(unitarity_defect(&su2_exponential(1.234, PauliAxis::Y).unwrap()) < 1e-12);
        let m = Matrix::new(ONE, ZERO, ZERO, C64::new(2.0, 0.0));
        assert_eq!(unitarity_defect(&m), 3.0);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let u = su2_exponential(0.37, random_axis(0.8, 2.0)).unwrap();
        let mut direct = Propagator2::identity();
        for _ in 0..13 {
            direct = u * direct;
        }
        assert!(u.pow(13).max_abs_diff(&direct) < 1e-13);
        assert_eq!(u.pow(0), Propagator2::identity());
    }

    proptest! {
        #[test]
        fn same_axis_exponents_add(phi in -6.0f64..6.0, psi in -6.0f64..6.0,
                                   theta in 0.0f64..3.14, az in 0.0f64..6.28) {
            let axis = random_axis(theta, az);
            let lhs = su2_exponential(phi, axis).unwrap() * su2_exponential(psi, axis).unwrap();
            let rhs = su2_exponential(phi + psi, axis).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn dagger_negates_angle(phi in -6.0f64..6.0, theta in 0.0f64..3.14, az in 0.0f64..6.28) {
            let axis = random_axis(theta, az);
            let u = su2_exponential(phi, axis).unwrap();
            prop_assert!(u.dagger().max_abs_diff(&su2_exponential(-phi, axis).unwrap()) < 1e-12);
            prop_assert!((u.det() - ONE).norm() < 1e-12);
        }

        #[test]
        fn compose_is_associative_and_unitary(
            params in proptest::collection::vec((-6.0f64..6.0, 0.0f64..3.14, 0.0f64..6.28), 1..100)
        ) {
            let factors: Vec<_> = params
                .iter()
                .map(|&(phi, t, a)| su2_exponential(phi, random_axis(t, a)).unwrap())
                .collect();
            let whole = compose(&factors).unwrap();
            prop_assert!(whole.unitarity_defect() < 1e-10);
            let mid = factors.len() / 2;
            if mid > 0 {
                let left = compose(&factors[..mid]).unwrap();
                let right = compose(&factors[mid..]).unwrap();
                prop_assert!((right * left).max_abs_diff(&whole) < 1e-12);
            }
        }
    }
}
