use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kicked_qubit::experiments::config::{ExperimentConfig, ExperimentId, SystemConfig};
use kicked_qubit::experiments::{run_experiment, ExperimentReport};
use kicked_qubit::hydrogen::Convention;
use kicked_qubit::Error;

/// Regenerates the kicked two-level and hydrogen 2s-2p datasets.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// figure1 … figure7, convergence, or custom.
    experiment: String,

    /// JSON experiment config; the built-in default for the experiment when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,

    /// Integrator step, overriding the config.
    #[arg(long)]
    dt: Option<f64>,

    /// Hydrogen energy convention: plain or two_pi.
    #[arg(long)]
    convention: Option<String>,
}

fn resolve(args: &Args) -> Result<ExperimentConfig, Error> {
    let id: ExperimentId = args.experiment.parse()?;
    let mut cfg = match &args.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.experiment != id {
                return Err(Error::Config {
                    path: "experiment".into(),
                    message: format!("config describes `{}` but `{id}` was requested", cfg.experiment),
                });
            }
            cfg
        }
        None => ExperimentConfig::default_for(id).ok_or_else(|| Error::Config {
            path: "experiment".into(),
            message: format!("`{id}` has no built-in default; pass --config"),
        })?,
    };
    if let Some(dt) = args.dt {
        cfg.dt = Some(dt);
    }
    if let Some(text) = &args.convention {
        let parsed: Convention = text.parse().map_err(|e: Error| Error::Config {
            path: "system.convention".into(),
            message: e.to_string(),
        })?;
        match &mut cfg.system {
            SystemConfig::Hydrogen { convention, .. } => *convention = parsed,
            SystemConfig::ModelQubit { .. } => {
                return Err(Error::Config {
                    path: "system.convention".into(),
                    message: "--convention only applies to hydrogen systems".into(),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_report(report: &ExperimentReport) {
    for s in &report.series {
        let probs: Vec<String> = s.final_probabilities.iter().map(|p| format!("{p:.10}")).collect();
        println!(
            "{} {}: final [{}] transfer {:.10} (ideal kicks {:.10})",
            report.experiment,
            s.label,
            probs.join(", "),
            s.final_transfer,
            s.analytic_transfer
        );
        for w in &s.warnings {
            eprintln!("warning [{}]: {w}", s.label);
        }
    }
    if let Some(table) = &report.convergence {
        for row in &table.rows {
            println!("tau {:e} beta {:e} distance {:e}", row.tau, row.beta, row.distance);
        }
        match table.slope {
            Some(slope) => println!("slope {slope:.4}"),
            None => println!("slope undefined"),
        }
    }
    if let Some(n) = report.surface_points {
        println!("{}: {n} surface points", report.experiment);
    }
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::Diverged { .. } => 3,
        Error::InvalidArgument(_) | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = resolve(&args).and_then(|cfg| run_experiment(&cfg, &args.out));
    match result {
        Ok(report) => {
            print_report(&report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
