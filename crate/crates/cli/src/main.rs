//! `enantio-tfc` — command-line driver for the enantioselective topological
//! frequency conversion toolkit.
//!
//! Subcommands: `chern`, `phase-diagram`, `dynamics`, `spectrum`, `ensemble`.
//! Every run writes its CSV artifacts plus a `manifest.toml` sufficient to
//! reproduce it into the output directory. Exit codes: 0 success, 1 config
//! error, 2 physical degeneracy (gap closing), 3 numerical failure.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use enantio_tfc::model::{Enantiomer, EnantiomerSelection, SimConfig};
use enantio_tfc::TfcError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "enantio-tfc", version, about = "Enantioselective topological frequency conversion simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Config file (key = value under [molecule]/[drive]/[simulation]);
    /// defaults to the bundled propanediol dataset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSVs and the run manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Which enantiomer(s) to simulate.
    #[arg(long, value_parser = parse_enantiomer)]
    enantiomer: Option<EnantiomerSelection>,

    /// Torus grid size N for topology evaluations.
    #[arg(long)]
    grid: Option<usize>,

    /// Horizon after t = 0 in omega_2 periods.
    #[arg(long)]
    tstar_periods: Option<f64>,

    /// Integrator step (a.u.).
    #[arg(long)]
    dt: Option<f64>,

    /// Also emit SVG plots next to the CSVs.
    #[arg(long, default_value_t = false)]
    plot: bool,
}

fn parse_enantiomer(s: &str) -> Result<EnantiomerSelection, String> {
    match s {
        "R" | "r" => Ok(EnantiomerSelection::Single(Enantiomer::R)),
        "S" | "s" => Ok(EnantiomerSelection::Single(Enantiomer::S)),
        "both" | "Both" | "BOTH" => Ok(EnantiomerSelection::Both),
        other => Err(format!("expected R, S, or both, got '{other}'")),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Chern numbers of the three adiabatic bands.
    Chern {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the envelope offset m.
        #[arg(long)]
        m: Option<f64>,
        /// Override the detuning delta (a.u.).
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Chern numbers over an (m, delta) sweep.
    PhaseDiagram {
        #[command(flatten)]
        common: CommonArgs,
        /// m sweep as MIN:MAX:COUNT (default -3:3:61).
        #[arg(long)]
        m_range: Option<String>,
        /// delta sweep as MIN:MAX:COUNT (default spans the weakest coupling).
        #[arg(long)]
        delta_range: Option<String>,
    },
    /// Ramped time evolution, band populations, and the pumping rate.
    Dynamics {
        #[command(flatten)]
        common: CommonArgs,
        /// "on" (default) prepares through the adiabatic ramp; "off" starts
        /// in the lower band eigenstate at t = 0.
        #[arg(long, default_value = "on")]
        ramp: String,
        /// Trajectory CSV downsampling stride over stored samples.
        #[arg(long, default_value_t = 16)]
        csv_stride: usize,
    },
    /// Sideband power spectrum and the Chern numbers extracted from it.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Demodulation window in omega_2 periods (defaults to the largest
        /// Fibonacci window that fits the horizon).
        #[arg(long)]
        window: Option<f64>,
    },
    /// Ensemble enantiomeric-excess signal and shot-noise estimate.
    Ensemble {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of R molecules.
        #[arg(long)]
        nr: f64,
        /// Number of S molecules.
        #[arg(long)]
        ns: f64,
        /// Beam cross-section in cm^2.
        #[arg(long, default_value_t = 1.0)]
        beam_area_cm2: f64,
    },
}

fn load_config(common: &CommonArgs) -> Result<SimConfig<f64>, TfcError> {
    let mut cfg = match &common.config {
        Some(path) => enantio_tfc::config::load_config(path)?,
        None => SimConfig::<f64>::propanediol(),
    };
    if let Some(e) = common.enantiomer {
        cfg.sim.enantiomer = e;
    }
    if let Some(n) = common.grid {
        cfg.sim.grid_n = n;
    }
    if let Some(t) = common.tstar_periods {
        cfg.sim.tstar_periods = t;
    }
    if let Some(dt) = common.dt {
        cfg.sim.dt = dt;
    }
    Ok(cfg)
}

fn exit_code_for(err: &TfcError) -> u8 {
    match err {
        TfcError::InvalidParameters(_)
        | TfcError::ConfigRejected(_)
        | TfcError::ConfigParse(_) => 1,
        TfcError::GapClosing { .. }
        | TfcError::PhaseBoundary(_)
        | TfcError::DegenerateCycle(_) => 2,
        TfcError::IntegratorFailure(_)
        | TfcError::WindowTooShort(_)
        | TfcError::MissingLine(_)
        | TfcError::MismatchedRuns(_)
        | TfcError::Io(_) => 3,
    }
}

fn main() -> ExitCode {
    // ENANTIO_TFC_THREADS caps worker parallelism for sweeps and paired runs.
    if let Ok(threads) = std::env::var("ENANTIO_TFC_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Chern { common, m, delta } => commands::cmd_chern(&common, m, delta),
        Command::PhaseDiagram {
            common,
            m_range,
            delta_range,
        } => commands::cmd_phase_diagram(&common, m_range.as_deref(), delta_range.as_deref()),
        Command::Dynamics {
            common,
            ramp,
            csv_stride,
        } => commands::cmd_dynamics(&common, &ramp, csv_stride),
        Command::Spectrum { common, window } => commands::cmd_spectrum(&common, window),
        Command::Ensemble {
            common,
            nr,
            ns,
            beam_area_cm2,
        } => commands::cmd_ensemble(&common, nr, ns, beam_area_cm2),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
