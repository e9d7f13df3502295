//! Pulses, pulse sequences, and the field they produce.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::error::{Error, Result};

/// Gaussian tails are treated as exactly zero beyond this many widths.
pub const GAUSSIAN_SUPPORT: f64 = 8.0;
/// Half-extent, in widths, used when checking Gaussian pulses for overlap.
pub const OVERLAP_WIDTHS: f64 = 4.0;
/// `β` above which the kick picture is flagged as degrading.
pub const KICK_VALIDITY_BETA: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    IdealKick,
    Gaussian,
    Rectangular,
}

/// Pauli operator a pulse couples through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KickAxis {
    X,
    Y,
}

/// One pulse of area `alpha` centered at `center`.
///
/// `width` is `τ`: the Gaussian `1/e` half-width, or the full duration of a
/// rectangular pulse. Ideal kicks have zero width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub shape: PulseShape,
    pub axis: KickAxis,
    pub alpha: f64,
    pub center: f64,
    #[serde(default)]
    pub width: f64,
}

impl PulseSpec {
    pub fn kick(alpha: f64, center: f64, axis: KickAxis) -> Self {
        PulseSpec { shape: PulseShape::IdealKick, axis, alpha, center, width: 0.0 }
    }

    pub fn gaussian(alpha: f64, center: f64, width: f64, axis: KickAxis) -> Self {
        PulseSpec { shape: PulseShape::Gaussian, axis, alpha, center, width }
    }

    pub fn rectangular(alpha: f64, center: f64, width: f64, axis: KickAxis) -> Self {
        PulseSpec { shape: PulseShape::Rectangular, axis, alpha, center, width }
    }

    /// Same pulse with its shape and width replaced.
    pub fn with_shape(mut self, shape: PulseShape, width: f64) -> Self {
        self.shape = shape;
        self.width = width;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.center.is_finite() && self.width.is_finite()) {
            return Err(Error::invalid("pulse parameters must be finite"));
        }
        match self.shape {
            PulseShape::IdealKick if self.width != 0.0 => {
                Err(Error::invalid("an ideal kick has zero width"))
            }
            PulseShape::Gaussian | PulseShape::Rectangular if self.width <= 0.0 => {
                Err(Error::invalid("finite pulses need a positive width"))
            }
            _ => Ok(()),
        }
    }

    /// Interval outside which the field is exactly zero.
    pub fn support(&self) -> (f64, f64) {
        let half = match self.shape {
            PulseShape::IdealKick => 0.0,
            PulseShape::Gaussian => GAUSSIAN_SUPPORT * self.width,
            PulseShape::Rectangular => 0.5 * self.width,
        };
        (self.center - half, self.center + half)
    }

    /// Field amplitude `V(t)` of this pulse alone. Ideal kicks sample as 0.
    pub fn value_at(&self, t: f64) -> f64 {
        let s = t - self.center;
        match self.shape {
            PulseShape::IdealKick => 0.0,
            PulseShape::Gaussian => {
                let x = s / self.width;
                if x.abs() > GAUSSIAN_SUPPORT {
                    0.0
                } else {
                    self.alpha / (PI.sqrt() * self.width) * (-x * x).exp()
                }
            }
            PulseShape::Rectangular => {
                if s.abs() <= 0.5 * self.width {
                    self.alpha / self.width
                } else {
                    0.0
                }
            }
        }
    }

    /// Field discontinuities, for step alignment.
    pub fn edges(&self) -> Vec<f64> {
        match self.shape {
            PulseShape::Rectangular => {
                let (a, b) = self.support();
                vec![a, b]
            }
            _ => Vec::new(),
        }
    }

    fn overlap_half_width(&self) -> f64 {
        match self.shape {
            PulseShape::IdealKick => 0.0,
            PulseShape::Gaussian => OVERLAP_WIDTHS * self.width,
            PulseShape::Rectangular => 0.5 * self.width,
        }
    }
}

/// `α = ∫V(t) dt`, which every shape carries by construction.
pub fn pulse_area(p: &PulseSpec) -> f64 {
    p.alpha
}

/// `∫V(t) dt` by composite trapezoid over the pulse support with `intervals` panels.
pub fn quadrature_area(p: &PulseSpec, intervals: usize) -> f64 {
    if p.shape == PulseShape::IdealKick {
        return p.alpha;
    }
    let (a, b) = p.support();
    let h = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals).map(|k| p.value_at(a + k as f64 * h)).sum();
    // rectangular edges sit exactly on the endpoints and carry half weight
    let ends = match p.shape {
        PulseShape::Rectangular => p.alpha / p.width,
        _ => 0.5 * (p.value_at(a) + p.value_at(b)),
    };
    h * (ends + inner)
}

/// `β = τΔE/2`.
pub fn beta_angle(p: &PulseSpec, delta_e: f64) -> f64 {
    p.width * delta_e / 2.0
}

/// Field sampled at one instant, split by coupling axis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
}

/// Pulses in time order together with the level splitting `ΔE`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KickSequence {
    pub pulses: Vec<PulseSpec>,
    pub delta_e: f64,
}

impl KickSequence {
    pub fn new(pulses: Vec<PulseSpec>, delta_e: f64) -> Self {
        KickSequence { pulses, delta_e }
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn centers_increasing(&self) -> bool {
        self.pulses.windows(2).all(|w| w[0].center < w[1].center)
    }

    /// Narrowest nonzero width in the sequence.
    pub fn narrowest_width(&self) -> Option<f64> {
        self.pulses
            .iter()
            .map(|p| p.width)
            .filter(|&w| w > 0.0)
            .min_by(f64::total_cmp)
    }

    pub fn edges(&self) -> Vec<f64> {
        self.pulses.iter().flat_map(PulseSpec::edges).collect()
    }

    /// Same sequence with every pulse given a new shape and width.
    pub fn reshaped(&self, shape: PulseShape, width: f64) -> Self {
        KickSequence {
            pulses: self.pulses.iter().map(|p| p.with_shape(shape, width)).collect(),
            delta_e: self.delta_e,
        }
    }

    pub fn field_at(&self, t: f64) -> FieldSample {
        field_at(self, t)
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_sequence(self)
    }
}

/// `V(t)` summed over all pulses, reported per axis.
pub fn field_at(seq: &KickSequence, t: f64) -> FieldSample {
    let mut field = FieldSample::default();
    for p in &seq.pulses {
        let v = p.value_at(t);
        match p.axis {
            KickAxis::X => field.x += v,
            KickAxis::Y => field.y += v,
        }
    }
    field
}

/// Ordering errors, malformed pulses, overlap and kick-validity warnings.
pub fn validate_sequence(seq: &KickSequence) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (k, p) in seq.pulses.iter().enumerate() {
        if let Err(e) = p.validate() {
            out.push(Diagnostic::error(DiagnosticKind::InvalidPulse, format!("pulse {k}: {e}")));
        }
    }
    for (k, w) in seq.pulses.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        if a.center >= b.center {
            out.push(Diagnostic::error(
                DiagnosticKind::Ordering,
                format!(
                    "pulse centers must increase: pulse {k} at {} is not before pulse {} at {}",
                    a.center,
                    k + 1,
                    b.center
                ),
            ));
        } else if a.center + a.overlap_half_width() > b.center - b.overlap_half_width() {
            out.push(Diagnostic::warning(
                DiagnosticKind::Overlap,
                format!("pulses {k} and {} overlap", k + 1),
            ));
        }
    }
    for (k, p) in seq.pulses.iter().enumerate() {
        let beta = beta_angle(p, seq.delta_e).abs();
        if beta > KICK_VALIDITY_BETA {
            out.push(Diagnostic::warning(
                DiagnosticKind::KickValidity,
                format!("pulse {k}: beta = {beta:.3} > {KICK_VALIDITY_BETA}; kick approximation degrading"),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::has_errors;
    use proptest::prelude::*;

    #[test]
    fn areas() {
        assert_eq!(pulse_area(&PulseSpec::kick(0.1 * PI, 1.0, KickAxis::X)), 0.1 * PI);
        let g = PulseSpec::gaussian(0.15 * PI, 3.0, 1.0, KickAxis::X);
        assert_eq!(pulse_area(&g), 0.15 * PI);
        assert!((quadrature_area(&g, 100_000) - 0.15 * PI).abs() < 1e-8);
    }

    #[test]
    fn beta_examples() {
        let k = PulseSpec::kick(0.3, 1.0, KickAxis::X);
        assert_eq!(beta_angle(&k, 17.0), 0.0);
        let delta_e = 2.5;
        let t_delta = 2.0 * PI / delta_e;
        let g = PulseSpec::gaussian(0.3, 1.0, 0.001 * t_delta, KickAxis::X);
        assert!((beta_angle(&g, delta_e) - 0.001 * PI).abs() < 1e-15);
    }

    #[test]
    fn field_examples() {
        let empty = KickSequence::new(vec![], 1.0);
        assert_eq!(field_at(&empty, 0.3), FieldSample::default());

        let g = PulseSpec::gaussian(0.4, 2.0, 0.5, KickAxis::X);
        let seq = KickSequence::new(vec![g], 1.0);
        assert!((field_at(&seq, 2.0).x - 0.4 / (PI.sqrt() * 0.5)).abs() < 1e-15);

        let g1 = PulseSpec::gaussian(0.4, 2.0, 0.5, KickAxis::X);
        let g2 = PulseSpec::gaussian(-0.7, 2.3, 0.2, KickAxis::X);
        let gy = PulseSpec::gaussian(0.2, 2.1, 0.3, KickAxis::Y);
        let seq = KickSequence::new(vec![g1, gy, g2], 1.0);
        for t in [1.5, 2.0, 2.15, 2.3, 2.9] {
            let manual = |a: f64, c: f64, w: f64| a / (PI.sqrt() * w) * (-((t - c) / w).powi(2)).exp();
            let f = field_at(&seq, t);
            assert!((f.x - (manual(0.4, 2.0, 0.5) + manual(-0.7, 2.3, 0.2))).abs() < 1e-14);
            assert!((f.y - manual(0.2, 2.1, 0.3)).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_is_truncated() {
        let g = PulseSpec::gaussian(1.0, 0.0, 1.0, KickAxis::X);
        assert_eq!(g.value_at(8.01), 0.0);
        assert!(g.value_at(7.99) > 0.0);
    }

    #[test]
    fn ideal_kicks_have_no_sampled_field() {
        let seq = KickSequence::new(
            vec![PulseSpec::kick(0.3, 1.0, KickAxis::X), PulseSpec::kick(0.3, 2.0, KickAxis::Y)],
            1.0,
        );
        for t in [0.0, 0.5, 1.5, 3.0] {
            assert_eq!(field_at(&seq, t), FieldSample::default());
        }
    }

    #[test]
    fn validation_diagnostics() {
        let ok = KickSequence::new(
            (1..=3).map(|k| PulseSpec::kick(0.1, k as f64, KickAxis::X)).collect(),
            1.0,
        );
        assert!(validate_sequence(&ok).is_empty());

        let reversed = KickSequence::new(
            vec![PulseSpec::kick(0.1, 2.0, KickAxis::X), PulseSpec::kick(0.1, 1.0, KickAxis::X)],
            1.0,
        );
        let d = validate_sequence(&reversed);
        assert!(has_errors(&d));
        assert!(d.iter().any(|d| d.kind == DiagnosticKind::Ordering));

        // beta = tau * dE / 2 = 0.2
        let wide = KickSequence::new(vec![PulseSpec::gaussian(0.1, 10.0, 0.4, KickAxis::X)], 1.0);
        let d = validate_sequence(&wide);
        assert!(!has_errors(&d));
        assert!(d.iter().any(|d| d.kind == DiagnosticKind::KickValidity));

        let overlapping = KickSequence::new(
            vec![
                PulseSpec::gaussian(0.1, 1.0, 0.01, KickAxis::X),
                PulseSpec::gaussian(0.1, 1.05, 0.01, KickAxis::X),
            ],
            1.0,
        );
        assert!(validate_sequence(&overlapping).iter().any(|d| d.kind == DiagnosticKind::Overlap));

        let bad = KickSequence::new(vec![PulseSpec::gaussian(0.1, 1.0, -1.0, KickAxis::X)], 1.0);
        assert!(validate_sequence(&bad).iter().any(|d| d.kind == DiagnosticKind::InvalidPulse));
    }

    proptest! {
        #[test]
        fn area_is_width_independent(alpha in -3.0f64..3.0, tau in 0.01f64..5.0, rect in any::<bool>()) {
            let p = if rect {
                PulseSpec::rectangular(alpha, 1.0, tau, KickAxis::X)
            } else {
                PulseSpec::gaussian(alpha, 1.0, tau, KickAxis::Y)
            };
            prop_assert_eq!(pulse_area(&p), alpha);
            prop_assert!((quadrature_area(&p, 20_000) - alpha).abs() < 1e-8);
        }
    }
}
