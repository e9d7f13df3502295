use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydrogen::{Basis, Convention, HydrogenParams, DECAY_RATE_MHZ, FINE_STRUCTURE_MHZ, LAMB_SHIFT_MHZ};
use crate::pulse::{KickAxis, PulseShape, PulseSpec};

/// Rows requested from a trajectory when the config does not say.
pub const DEFAULT_SAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Figure1,
    Figure2,
    Figure3,
    Figure4,
    Figure5,
    Figure6,
    Figure7,
    Convergence,
    Custom,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::Figure1,
        ExperimentId::Figure2,
        ExperimentId::Figure3,
        ExperimentId::Figure4,
        ExperimentId::Figure5,
        ExperimentId::Figure6,
        ExperimentId::Figure7,
        ExperimentId::Convergence,
        ExperimentId::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Figure1 => "figure1",
            ExperimentId::Figure2 => "figure2",
            ExperimentId::Figure3 => "figure3",
            ExperimentId::Figure4 => "figure4",
            ExperimentId::Figure5 => "figure5",
            ExperimentId::Figure6 => "figure6",
            ExperimentId::Figure7 => "figure7",
            ExperimentId::Convergence => "convergence",
            ExperimentId::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::config("experiment", format!("unknown experiment `{s}`")))
    }
}

/// The physical system being driven.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// Dimensionless two-state model with level splitting `delta_e`.
    ModelQubit { delta_e: f64 },
    /// Hydrogen 2s–2p, energies quoted in MHz and times in ps.
    Hydrogen {
        #[serde(default = "lamb_shift")]
        delta_e_mhz: f64,
        #[serde(default = "fine_structure")]
        e_fs_mhz: f64,
        #[serde(default = "decay_rate")]
        gamma_mhz: f64,
        #[serde(default)]
        convention: Convention,
    },
}

fn lamb_shift() -> f64 {
    LAMB_SHIFT_MHZ
}
fn fine_structure() -> f64 {
    FINE_STRUCTURE_MHZ
}
fn decay_rate() -> f64 {
    DECAY_RATE_MHZ
}

impl SystemConfig {
    pub fn hydrogen_default() -> Self {
        SystemConfig::Hydrogen {
            delta_e_mhz: LAMB_SHIFT_MHZ,
            e_fs_mhz: FINE_STRUCTURE_MHZ,
            gamma_mhz: DECAY_RATE_MHZ,
            convention: Convention::Plain,
        }
    }

    pub fn hydrogen_params(&self) -> Option<Result<HydrogenParams>> {
        match *self {
            SystemConfig::Hydrogen { delta_e_mhz, e_fs_mhz, gamma_mhz, convention } => {
                Some(HydrogenParams::from_mhz(delta_e_mhz, e_fs_mhz, gamma_mhz, convention))
            }
            SystemConfig::ModelQubit { .. } => None,
        }
    }

    /// Unit convention label for provenance.
    pub fn convention_label(&self) -> &'static str {
        match self {
            SystemConfig::Hydrogen { convention, .. } => convention.as_str(),
            SystemConfig::ModelQubit { .. } => "dimensionless",
        }
    }
}

/// One pulse ordering, written out as its own series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub label: String,
    pub pulses: Vec<PulseSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub epsilon_points: usize,
    pub phi_points: usize,
    /// Upper end of the φ range; the lower end is 0.
    #[serde(default = "two_pi")]
    pub phi_max: f64,
}

fn two_pi() -> f64 {
    2.0 * PI
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig { epsilon_points: 200, phi_points: 200, phi_max: 2.0 * PI }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// Pulse widths, decreasing. A zero width uses the ideal-kick propagator.
    pub taus: Vec<f64>,
    #[serde(default = "gaussian")]
    pub shape: PulseShape,
}

fn gaussian() -> PulseShape {
    PulseShape::Gaussian
}

/// A complete, resolved experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub system: SystemConfig,
    #[serde(default)]
    pub series: Vec<SeriesConfig>,
    /// Integrator step; narrowest width / 20 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// End of the run; last pulse support plus a free interval when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn x(alpha: f64, center: f64, width: f64) -> PulseSpec {
    PulseSpec::gaussian(alpha, center, width, KickAxis::X)
}

fn y(alpha: f64, center: f64, width: f64) -> PulseSpec {
    PulseSpec::gaussian(alpha, center, width, KickAxis::Y)
}

fn series(label: &str, pulses: Vec<PulseSpec>) -> SeriesConfig {
    SeriesConfig { label: label.to_string(), pulses }
}

/// Kick areas shared by the figure experiments.
pub const FIGURE_ALPHAS: [f64; 3] = [0.1 * PI, 0.15 * PI, 0.25 * PI];

fn swap_pair(t1: f64, t2: f64, tau: f64) -> Vec<SeriesConfig> {
    let [a1, a2, _] = FIGURE_ALPHAS;
    vec![
        series("alpha1_first", vec![x(a1, t1, tau), x(a2, t2, tau)]),
        series("alpha2_first", vec![x(a2, t1, tau), x(a1, t2, tau)]),
    ]
}

fn xy_pair(t1: f64, t2: f64, tau: f64) -> Vec<SeriesConfig> {
    let [a1, a2, _] = FIGURE_ALPHAS;
    vec![
        series("x_then_y", vec![x(a1, t1, tau), y(a2, t2, tau)]),
        series("y_then_x", vec![y(a2, t1, tau), x(a1, t2, tau)]),
    ]
}

impl ExperimentConfig {
    fn model(experiment: ExperimentId, series: Vec<SeriesConfig>, t_end: f64) -> Self {
        ExperimentConfig {
            experiment,
            system: SystemConfig::ModelQubit { delta_e: 1.0 },
            series,
            dt: None,
            t_end: Some(t_end),
            samples: DEFAULT_SAMPLES,
            basis: Basis::Fine,
            surface: None,
            convergence: None,
        }
    }

    /// Built-in parameters of each experiment; `None` for `custom`.
    ///
    /// The model-qubit figures use `ΔE = 1`, so `T_Δ = 2π`, and place the
    /// kicks inside one Rabi period. The hydrogen figures use `τ = 1 ps`
    /// with kicks at 20 ps and 593.5 ps.
    pub fn default_for(id: ExperimentId) -> Option<Self> {
        let period = 2.0 * PI;
        let (t1, t2) = (0.25 * period, 0.5 * period);
        let [a1, a2, a3] = FIGURE_ALPHAS;
        let cfg = match id {
            ExperimentId::Figure1 => Self::model(id, swap_pair(t1, t2, 1e-3 * period), period),
            ExperimentId::Figure2 => Self::model(id, swap_pair(t1, t2, 5e-3 * period), period),
            ExperimentId::Figure3 => Self::model(id, xy_pair(t1, t2, 1e-3 * period), period),
            ExperimentId::Figure4 => {
                let tau = 1e-3 * period;
                let times = [0.2 * period, 0.45 * period, 0.8 * period];
                Self::model(
                    id,
                    vec![
                        series("forward", vec![x(a1, times[0], tau), x(a2, times[1], tau), x(a3, times[2], tau)]),
                        series("reversed", vec![x(a3, times[0], tau), x(a2, times[1], tau), x(a1, times[2], tau)]),
                    ],
                    period,
                )
            }
            ExperimentId::Figure5 | ExperimentId::Figure6 => {
                let pulses = match id {
                    ExperimentId::Figure5 => swap_pair(20.0, 593.5, 1.0),
                    _ => xy_pair(20.0, 593.5, 1.0),
                };
                ExperimentConfig {
                    system: SystemConfig::hydrogen_default(),
                    ..Self::model(id, pulses, 650.0)
                }
            }
            ExperimentId::Figure7 => ExperimentConfig {
                surface: Some(SurfaceConfig::default()),
                t_end: None,
                ..Self::model(id, Vec::new(), period)
            },
            ExperimentId::Convergence => ExperimentConfig {
                convergence: Some(ConvergenceConfig {
                    taus: vec![1e-2 * period, 1e-3 * period, 1e-4 * period],
                    shape: PulseShape::Gaussian,
                }),
                t_end: None,
                ..Self::model(
                    id,
                    vec![series("single_kick", vec![PulseSpec::kick(0.25 * PI, 0.5 * period, KickAxis::X)])],
                    period,
                )
            },
            ExperimentId::Custom => return None,
        };
        Some(cfg)
    }

    /// Parses JSON, reporting the offending field path on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), format!("cannot read config: {e}")))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn hydrogen_params(&self) -> Option<Result<HydrogenParams>> {
        self.system.hydrogen_params()
    }

    pub fn delta_e(&self) -> Result<f64> {
        match &self.system {
            SystemConfig::ModelQubit { delta_e } => Ok(*delta_e),
            system => Ok(system.hydrogen_params().expect("hydrogen system")?.delta_e),
        }
    }

    /// Narrowest finite pulse width across all series.
    pub fn narrowest_width(&self) -> Option<f64> {
        self.series
            .iter()
            .flat_map(|s| &s.pulses)
            .filter(|p| p.shape != PulseShape::IdealKick)
            .map(|p| p.width)
            .reduce(f64::min)
    }

    /// Checks everything serde cannot, with the offending field path.
    pub fn validate(&self) -> Result<()> {
        match &self.system {
            SystemConfig::ModelQubit { delta_e } => {
                if !delta_e.is_finite() {
                    return Err(Error::config("system.delta_e", "must be finite"));
                }
            }
            SystemConfig::Hydrogen { delta_e_mhz, e_fs_mhz, gamma_mhz, .. } => {
                for (name, v) in [("delta_e_mhz", delta_e_mhz), ("e_fs_mhz", e_fs_mhz)] {
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(Error::config(format!("system.{name}"), "must be positive"));
                    }
                }
                if !(gamma_mhz.is_finite() && *gamma_mhz >= 0.0) {
                    return Err(Error::config("system.gamma_mhz", "must be non-negative"));
                }
            }
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config("dt", "must be positive"));
            }
        }
        if self.samples < 2 {
            return Err(Error::config("samples", "must be at least 2"));
        }
        let is_hydrogen = matches!(self.system, SystemConfig::Hydrogen { .. });
        for (i, s) in self.series.iter().enumerate() {
            if s.label.is_empty() || !s.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(Error::config(
                    format!("series[{i}].label"),
                    "labels must be non-empty and use only letters, digits, `_` or `-`",
                ));
            }
            if s.pulses.is_empty() {
                return Err(Error::config(format!("series[{i}].pulses"), "needs at least one pulse"));
            }
            for (j, p) in s.pulses.iter().enumerate() {
                p.validate().map_err(|e| Error::config(format!("series[{i}].pulses[{j}]"), e.to_string()))?;
                if j > 0 && p.center <= s.pulses[j - 1].center {
                    return Err(Error::config(
                        format!("series[{i}].pulses[{j}].center"),
                        "pulse centers must increase",
                    ));
                }
                if is_hydrogen && p.shape == PulseShape::IdealKick && self.experiment != ExperimentId::Convergence {
                    return Err(Error::config(
                        format!("series[{i}].pulses[{j}].shape"),
                        "hydrogen runs need finite-width pulses",
                    ));
                }
            }
        }
        if let Some(t_end) = self.t_end {
            if !(t_end.is_finite() && t_end > 0.0) {
                return Err(Error::config("t_end", "must be positive"));
            }
            for (i, s) in self.series.iter().enumerate() {
                if let Some(last) = s.pulses.last() {
                    if last.support().1 > t_end {
                        return Err(Error::config(
                            format!("series[{i}].pulses[{}]", s.pulses.len() - 1),
                            format!("pulse extends past t_end = {t_end}"),
                        ));
                    }
                }
            }
        }

        match self.experiment {
            ExperimentId::Figure7 => {
                let surface = self.surface.ok_or_else(|| Error::config("surface", "figure7 needs a surface grid"))?;
                if surface.epsilon_points < 2 {
                    return Err(Error::config("surface.epsilon_points", "must be at least 2"));
                }
                if surface.phi_points < 2 {
                    return Err(Error::config("surface.phi_points", "must be at least 2"));
                }
                if !(surface.phi_max.is_finite() && surface.phi_max > 0.0) {
                    return Err(Error::config("surface.phi_max", "must be positive"));
                }
            }
            ExperimentId::Convergence => {
                let conv = self
                    .convergence
                    .as_ref()
                    .ok_or_else(|| Error::config("convergence", "convergence needs a tau list"))?;
                if conv.taus.len() < 2 {
                    return Err(Error::config("convergence.taus", "needs at least two widths"));
                }
                for (k, tau) in conv.taus.iter().enumerate() {
                    if !(tau.is_finite() && *tau >= 0.0) {
                        return Err(Error::config(format!("convergence.taus[{k}]"), "must be non-negative"));
                    }
                    if k > 0 && *tau >= conv.taus[k - 1] {
                        return Err(Error::config(format!("convergence.taus[{k}]"), "widths must decrease"));
                    }
                }
                if self.dt.is_some() {
                    return Err(Error::config("dt", "convergence scans step at tau/20 for every width"));
                }
                if conv.shape == PulseShape::IdealKick {
                    return Err(Error::config("convergence.shape", "must be a finite pulse shape"));
                }
                if self.series.is_empty() {
                    return Err(Error::config("series", "convergence needs a kick sequence"));
                }
            }
            _ => {
                if self.series.is_empty() {
                    return Err(Error::config("series", "needs at least one series"));
                }
                let mut labels: Vec<_> = self.series.iter().map(|s| s.label.as_str()).collect();
                labels.sort_unstable();
                if labels.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::config("series", "series labels must be unique"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_is_valid_and_round_trips() {
        for id in ExperimentId::ALL {
            let Some(cfg) = ExperimentConfig::default_for(id) else {
                assert_eq!(id, ExperimentId::Custom);
                continue;
            };
            cfg.validate().unwrap();
            let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("figure9".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn errors_carry_field_paths() {
        let mut cfg = ExperimentConfig::default_for(ExperimentId::Figure1).unwrap();
        cfg.series[1].pulses[0].width = -1.0;
        match ExperimentConfig::from_json(&cfg.to_json()) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "series[1].pulses[0]"),
            other => panic!("unexpected {other:?}"),
        }

        let text = r#"{"experiment":"figure1","system":{"kind":"model_qubit","delta_e":1.0},
            "series":[{"label":"a","pulses":[{"shape":"gaussian","axis":"z","alpha":0.1,"center":1.0,"width":0.1}]}]}"#;
        match ExperimentConfig::from_json(text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "series[0].pulses[0].axis"),
            other => panic!("unexpected {other:?}"),
        }

        let text = r#"{"experiment":"figure1","system":{"kind":"model_qubit","delta_e":1.0},"tend":3}"#;
        assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config { .. })));

        let mut cfg = ExperimentConfig::default_for(ExperimentId::Convergence).unwrap();
        cfg.convergence.as_mut().unwrap().taus = vec![1e-3, 1e-2];
        match cfg.validate() {
            Err(Error::Config { path, .. }) => assert_eq!(path, "convergence.taus[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hydrogen_defaults_fill_in() {
        let text = r#"{"experiment":"custom","system":{"kind":"hydrogen"},
            "series":[{"label":"one","pulses":[{"shape":"gaussian","axis":"x","alpha":0.3,"center":20.0,"width":1.0}]}]}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.system, SystemConfig::hydrogen_default());
        assert_eq!(cfg.samples, DEFAULT_SAMPLES);
        assert_eq!(cfg.system.convention_label(), "plain");
    }
}
