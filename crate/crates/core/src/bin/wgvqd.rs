//! Command-line front end: mode table, convergence sweep, layer study, and
//! the validation suite.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wgvqd::experiments::{self, RunConfig};
use wgvqd::fdm::ModeFamily;
use wgvqd::vqd::GradientMode;

#[derive(Parser)]
#[command(name = "wgvqd", about = "Rectangular waveguide cut-off modes: finite differences + variational quantum deflation", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// JSON config file; command-line flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV/SVG artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Qubits along x.
    #[arg(long)]
    nx: Option<usize>,
    /// Qubits along y.
    #[arg(long)]
    ny: Option<usize>,
    /// Ansatz layer count (default: nx + ny).
    #[arg(long)]
    layers: Option<usize>,
    /// VQD trials per mode.
    #[arg(long)]
    trials: Option<usize>,
    /// Restrict to one mode family.
    #[arg(long, value_parser = parse_family)]
    family: Option<ModeFamily>,
    /// Physical modes to extract per family.
    #[arg(long)]
    modes: Option<usize>,
    /// Gradient evaluation: analytic | fd.
    #[arg(long, value_parser = parse_gradient)]
    gradient: Option<GradientMode>,
}

fn parse_family(s: &str) -> Result<ModeFamily, String> {
    match s.to_ascii_lowercase().as_str() {
        "te" => Ok(ModeFamily::Te),
        "tm" => Ok(ModeFamily::Tm),
        other => Err(format!("unknown family '{other}', expected te|tm")),
    }
}

fn parse_gradient(s: &str) -> Result<GradientMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "analytic" => Ok(GradientMode::Analytic),
        "fd" => Ok(GradientMode::FiniteDifference),
        other => Err(format!("unknown gradient '{other}', expected analytic|fd")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the mode table (VQD vs classical vs analytic) with field heatmaps.
    Modes {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Qubit-convergence sweep of TE10/TM11 discretization error.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 2)]
        nx_min: usize,
        #[arg(long, default_value_t = 5)]
        nx_max: usize,
        #[arg(long, default_value_t = 2)]
        ny_min: usize,
        #[arg(long, default_value_t = 3)]
        ny_max: usize,
        /// Also run VQD per sweep cell (slow).
        #[arg(long)]
        with_vqd: bool,
    },
    /// Layer/success-rate study for the TM11 target.
    Layers {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1)]
        layers_min: usize,
        #[arg(long, default_value_t = 11)]
        layers_max: usize,
    },
    /// Run the cross-module oracle suite; nonzero exit on any failure.
    Validate {
        #[command(flatten)]
        common: CommonOpts,
        /// Perturb one decomposition coefficient so the equivalence check fails.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn build_config(common: &CommonOpts) -> Result<RunConfig, wgvqd::Error> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.out.clone() {
        cfg.out_dir = Some(v);
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.nx {
        cfg.n_x = v;
    }
    if let Some(v) = common.ny {
        cfg.n_y = v;
    }
    if let Some(v) = common.layers {
        cfg.layers = Some(v);
    }
    if let Some(v) = common.trials {
        cfg.trials = v;
    }
    if let Some(v) = common.family {
        cfg.family = Some(v);
    }
    if let Some(v) = common.modes {
        cfg.modes = v;
    }
    if let Some(v) = common.gradient {
        cfg.gradient = v;
    }
    Ok(cfg)
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("WGVQD_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
}

fn run() -> Result<ExitCode, wgvqd::Error> {
    let cli = Cli::parse();
    init_thread_pool();
    match cli.command {
        Command::Modes { common } => {
            let cfg = build_config(&common)?;
            let rows = experiments::cmd_modes(&cfg)?;
            println!("mode      vqa(GHz)    classical(GHz)  analytic(GHz)");
            for r in &rows {
                println!(
                    "{:<9} {:<11} {:<15} {}",
                    r.label,
                    experiments::sig6(r.vqa_cutoff_ghz),
                    experiments::sig6(r.classical_cutoff_ghz),
                    experiments::sig6(r.analytic_cutoff_ghz)
                );
            }
            println!("wrote {}", cfg.out_dir().join("modes.csv").display());
        }
        Command::Sweep { common, nx_min, nx_max, ny_min, ny_max, with_vqd } => {
            let cfg = build_config(&common)?;
            let rows = experiments::cmd_sweep(&cfg, (nx_min, nx_max), (ny_min, ny_max), with_vqd)?;
            println!("{} sweep cells; wrote {}", rows.len(), cfg.out_dir().join("sweep.csv").display());
        }
        Command::Layers { common, layers_min, layers_max } => {
            let cfg = build_config(&common)?;
            let rows = experiments::cmd_layers(&cfg, (layers_min, layers_max))?;
            for r in &rows {
                println!(
                    "nx={} ny={} L={:<2} success {}/{} [{}]",
                    r.n_x, r.n_y, r.layers, r.n_correct, r.trials, r.color
                );
            }
            println!("wrote {}", cfg.out_dir().join("layers.csv").display());
        }
        Command::Validate { common, inject_fault } => {
            let cfg = build_config(&common)?;
            let report = experiments::cmd_validate(&cfg, inject_fault)?;
            print!("{}", report.render());
            if !report.all_pass() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
