//! Drivers that turn an [`ExperimentConfig`] into datasets on disk.
//!
//! Trajectory experiments write one CSV per series (`<id>_<label>.csv`), the
//! ordering surface writes `figure7_surface.csv`, and convergence scans write
//! `convergence.csv`. Every run also writes `<id>.json` with the full report.

pub mod config;
pub mod output;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{
    ConvergenceConfig, ExperimentConfig, ExperimentId, SeriesConfig, SurfaceConfig, SystemConfig,
};

use crate::algebra::{Amplitudes, AmplitudePair};
use crate::analytic::{kick_interaction, multi_kick, OrderingObservable};
use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::hydrogen::{effective_qubit_sequence, run_pulse_sequence, HydrogenParams};
use crate::integrator::{
    default_end_time, integrate, propagate_through_pulses, TwoLevelModel,
    STEPS_PER_WIDTH,
};
use crate::pulse::{KickSequence, PulseShape};
use output::{write_csv, write_json, Provenance};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const QUBIT_COLUMNS: [&str; 4] = ["t", "P1", "P2", "norm"];
pub const HYDROGEN_COLUMNS: [&str; 6] = ["t", "P1", "P2", "P3", "P_target", "norm"];
pub const SURFACE_COLUMNS: [&str; 5] = ["epsilon", "phi", "p2", "p2_no_ordering", "diff"];
pub const CONVERGENCE_COLUMNS: [&str; 3] = ["tau", "beta", "distance"];

/// Sampled observables of one pulse ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRun {
    pub label: String,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<f64>>,
    /// Final occupation of each basis state.
    pub final_probabilities: Vec<f64>,
    /// Final probability of leaving the initial state: `P2`, or `P_target` for hydrogen.
    pub final_transfer: f64,
    /// Ideal-kick prediction of `final_transfer`, ignoring decay.
    pub analytic_transfer: f64,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub label: String,
    #[serde(serialize_with = "file_name")]
    pub file: PathBuf,
    pub final_probabilities: Vec<f64>,
    pub final_transfer: f64,
    pub analytic_transfer: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub beta: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log distance` against `log τ`, over `τ > 0`.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentId,
    pub version: &'static str,
    pub convention: &'static str,
    pub config: ExperimentConfig,
    /// Written paths; the JSON report lists them relative to the output directory.
    #[serde(serialize_with = "file_names")]
    pub files: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface_points: Option<usize>,
}

fn file_name<S: serde::Serializer>(path: &Path, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&path.file_name().unwrap_or(path.as_os_str()).to_string_lossy())
}

fn file_names<S: serde::Serializer>(paths: &[PathBuf], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(paths.iter().map(|p| p.file_name().unwrap_or(p.as_os_str()).to_string_lossy()))
}

fn sequence_of(cfg: &ExperimentConfig, s: &SeriesConfig) -> Result<KickSequence> {
    Ok(KickSequence::new(s.pulses.clone(), cfg.delta_e()?))
}

/// Step used for a series: configured, or narrowest width / 20.
fn step_for(cfg: &ExperimentConfig, seq: &KickSequence) -> Option<f64> {
    cfg.dt.or_else(|| seq.narrowest_width().map(|w| w / STEPS_PER_WIDTH))
}

fn end_time(cfg: &ExperimentConfig, seq: &KickSequence) -> f64 {
    cfg.t_end.unwrap_or_else(|| {
        let free = if seq.delta_e != 0.0 { 0.25 * 2.0 * PI / seq.delta_e.abs() } else { 1.0 };
        default_end_time(seq, free)
    })
}

fn sample_stride(span: f64, dt: f64, samples: usize) -> usize {
    let steps = (span / dt).ceil().max(1.0);
    ((steps / samples as f64).floor() as usize).max(1)
}

/// Ideal-kick transfer probability of a sequence in the two-state model.
fn ideal_transfer(seq: &KickSequence) -> Result<f64> {
    let ideal = seq.reshaped(PulseShape::IdealKick, 0.0);
    Ok(multi_kick(&ideal)?.u21().norm_sqr())
}

fn ensure_valid(seq: &KickSequence) -> Result<Vec<Diagnostic>> {
    let diags = seq.validate();
    if let Some(bad) = diags.iter().find(|d| d.is_error()) {
        return Err(Error::invalid(bad.message.clone()));
    }
    Ok(diags)
}

/// Piecewise-constant populations for ideal kicks, evaluated on a uniform grid.
fn kicked_rows(seq: &KickSequence, t_end: f64, samples: usize) -> Vec<Vec<f64>> {
    (0..samples)
        .map(|k| {
            let t = t_end * k as f64 / (samples - 1) as f64;
            let mut state = AmplitudePair::basis(0);
            for p in seq.pulses.iter().filter(|p| p.center <= t) {
                state = kick_interaction(p.alpha, p.center, p.axis, seq.delta_e) * state;
            }
            let [p1, p2] = state.probabilities();
            vec![t, p1, p2, p1 + p2]
        })
        .collect()
}

/// Integrates one series of a trajectory experiment without writing anything.
pub fn simulate_series(cfg: &ExperimentConfig, s: &SeriesConfig) -> Result<SeriesRun> {
    let seq = sequence_of(cfg, s)?;
    let t_end = end_time(cfg, &seq);
    match cfg.hydrogen_params() {
        None => simulate_qubit(cfg, s, seq, t_end),
        Some(params) => simulate_hydrogen(cfg, s, &params?, seq, t_end),
    }
}

fn simulate_qubit(cfg: &ExperimentConfig, s: &SeriesConfig, seq: KickSequence, t_end: f64) -> Result<SeriesRun> {
    let mut warnings = ensure_valid(&seq)?;
    let analytic_transfer = ideal_transfer(&seq)?;
    let all_kicks = seq.pulses.iter().all(|p| p.shape == PulseShape::IdealKick);
    let rows = if all_kicks {
        kicked_rows(&seq, t_end, cfg.samples)
    } else {
        let dt = step_for(cfg, &seq).expect("finite pulses have a width");
        let stride = sample_stride(t_end, dt, cfg.samples);
        let model = TwoLevelModel::new(seq);
        let traj = integrate(&model, Amplitudes::basis(0), 0.0, t_end, dt, stride)?;
        warnings.extend(traj.warnings.iter().cloned());
        traj.times
            .iter()
            .zip(&traj.probabilities)
            .zip(&traj.norms)
            .map(|((t, p), n)| vec![*t, p[0], p[1], *n])
            .collect()
    };
    let last = rows.last().expect("at least two samples");
    Ok(SeriesRun {
        label: s.label.clone(),
        columns: &QUBIT_COLUMNS,
        final_probabilities: vec![last[1], last[2]],
        final_transfer: last[2],
        analytic_transfer,
        rows,
        warnings,
    })
}

fn simulate_hydrogen(
    cfg: &ExperimentConfig,
    s: &SeriesConfig,
    params: &HydrogenParams,
    seq: KickSequence,
    t_end: f64,
) -> Result<SeriesRun> {
    let analytic_transfer = ideal_transfer(&effective_qubit_sequence(params, &seq))?;
    let dt = step_for(cfg, &seq).expect("hydrogen pulses have a width");
    let stride = sample_stride(t_end, dt, cfg.samples);
    let run = run_pulse_sequence(params, &seq, cfg.basis, t_end, dt, stride)?;
    let rows: Vec<Vec<f64>> = run
        .trajectory
        .times
        .iter()
        .zip(&run.trajectory.probabilities)
        .zip(&run.trajectory.norms)
        .zip(&run.target)
        .map(|(((t, p), n), target)| vec![*t, p[0], p[1], p[2], *target, *n])
        .collect();
    let last = rows.last().expect("at least two samples");
    Ok(SeriesRun {
        label: s.label.clone(),
        columns: &HYDROGEN_COLUMNS,
        final_probabilities: last[1..4].to_vec(),
        final_transfer: last[4],
        analytic_transfer,
        rows,
        warnings: run.warnings,
    })
}

/// `(ε, φ)` grid on `[0, 1] × [0, φ_max]`, ε-major.
pub fn ordering_surface(grid: &SurfaceConfig) -> Vec<OrderingObservable> {
    let mut out = Vec::with_capacity(grid.epsilon_points * grid.phi_points);
    for i in 0..grid.epsilon_points {
        let eps = i as f64 / (grid.epsilon_points - 1) as f64;
        for j in 0..grid.phi_points {
            let phi = grid.phi_max * j as f64 / (grid.phi_points - 1) as f64;
            out.push(OrderingObservable::from_epsilon_phi(eps, phi));
        }
    }
    out
}

/// Writes the ordering surface of `cfg` to `<out>/figure7_surface.csv`.
pub fn run_ordering_surface(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(PathBuf, usize)> {
    let grid = cfg.surface.unwrap_or_default();
    let rows: Vec<[f64; 5]> = ordering_surface(&grid)
        .iter()
        .map(|o| [o.epsilon, o.phi, o.p2, o.p2_no_ordering, o.difference()])
        .collect();
    let path = out_dir.join(format!("{}_surface.csv", cfg.experiment));
    let prov = Provenance { config: cfg, series: None, extra: Vec::new() };
    write_csv(&path, &prov, &SURFACE_COLUMNS, rows.iter().map(|r| &r[..]))?;
    Ok((path, rows.len()))
}

/// Least-squares slope of `log y` against `log x` over positive pairs.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Final interaction-frame distance from the ideal-kick state for each width.
///
/// Each width replaces every pulse of the first series with `shape` at that
/// width and steps at `τ/20` through the pulse supports only.
pub fn convergence_table(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    let conv = cfg
        .convergence
        .as_ref()
        .ok_or_else(|| Error::config("convergence", "missing convergence block"))?;
    let base = cfg.series.first().ok_or_else(|| Error::config("series", "missing kick sequence"))?;
    let delta_e = match cfg.system {
        SystemConfig::ModelQubit { delta_e } => delta_e,
        SystemConfig::Hydrogen { .. } => {
            return Err(Error::config("system", "convergence scans run on the model qubit"))
        }
    };
    let seq = KickSequence::new(base.pulses.clone(), delta_e);
    let initial = AmplitudePair::basis(0);
    let ideal = multi_kick(&seq.reshaped(PulseShape::IdealKick, 0.0))? * initial;

    let mut rows = Vec::with_capacity(conv.taus.len());
    for &tau in &conv.taus {
        let reached = if tau == 0.0 {
            multi_kick(&seq.reshaped(PulseShape::IdealKick, 0.0))? * initial
        } else {
            let shaped = seq.reshaped(conv.shape, tau);
            ensure_valid(&shaped)?;
            propagate_through_pulses(&shaped, initial, tau / STEPS_PER_WIDTH)?
        };
        rows.push(ConvergenceRow { tau, beta: 0.5 * tau * delta_e, distance: reached.distance(&ideal) });
    }
    let points: Vec<_> = rows.iter().map(|r| (r.tau, r.distance)).collect();
    Ok(ConvergenceTable { slope: log_log_slope(&points), rows })
}

/// Writes the convergence table of `cfg` to `<out>/convergence.csv`.
pub fn run_convergence(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(PathBuf, ConvergenceTable)> {
    let table = convergence_table(cfg)?;
    let rows: Vec<[f64; 3]> = table.rows.iter().map(|r| [r.tau, r.beta, r.distance]).collect();
    let path = out_dir.join(format!("{}.csv", cfg.experiment));
    let slope = table.slope.map_or_else(|| "undefined".to_string(), |s| s.to_string());
    let prov = Provenance { config: cfg, series: None, extra: vec![("slope".into(), slope)] };
    write_csv(&path, &prov, &CONVERGENCE_COLUMNS, rows.iter().map(|r| &r[..]))?;
    Ok((path, table))
}

/// Runs `cfg`, writing its datasets and JSON report under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut report = ExperimentReport {
        experiment: cfg.experiment,
        version: VERSION,
        convention: cfg.system.convention_label(),
        config: cfg.clone(),
        files: Vec::new(),
        series: Vec::new(),
        convergence: None,
        surface_points: None,
    };
    match cfg.experiment {
        ExperimentId::Figure7 => {
            let (path, n) = run_ordering_surface(cfg, out_dir)?;
            report.files.push(path);
            report.surface_points = Some(n);
        }
        ExperimentId::Convergence => {
            let (path, table) = run_convergence(cfg, out_dir)?;
            report.files.push(path);
            report.convergence = Some(table);
        }
        _ => {
            for s in &cfg.series {
                let run = simulate_series(cfg, s)?;
                let path = out_dir.join(format!("{}_{}.csv", cfg.experiment, s.label));
                let prov = Provenance { config: cfg, series: Some(&s.label), extra: Vec::new() };
                write_csv(&path, &prov, run.columns, run.rows.iter().map(Vec::as_slice))?;
                report.files.push(path.clone());
                report.series.push(SeriesSummary {
                    label: run.label,
                    file: path,
                    final_probabilities: run.final_probabilities,
                    final_transfer: run.final_transfer,
                    analytic_transfer: run.analytic_transfer,
                    warnings: run.warnings.iter().map(ToString::to_string).collect(),
                });
            }
        }
    }
    let sidecar = out_dir.join(format!("{}.json", cfg.experiment));
    report.files.push(sidecar.clone());
    write_json(&sidecar, &report)?;
    Ok(report)
}
