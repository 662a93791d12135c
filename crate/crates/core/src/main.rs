use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use riscap::analytics::ScalingRegime;
use riscap::experiments::{
    csv_comment, run_fig1, run_fig2, run_fig3, run_snr_scaling, run_validate, ExperimentKind,
    ExperimentSpec, Table, DEFAULT_SEED, DEFAULT_TRIALS,
};
use riscap::scenario::{default_scenario, load_scenario};

#[derive(Parser)]
#[command(
    name = "riscap",
    version,
    about = "Sum-rate capacity of RIS-assisted opportunistic downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (TOML); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Clone)]
struct Sweep {
    #[command(flatten)]
    common: Common,
    /// Comma-separated, strictly increasing grid (K for fig1, Q for fig2/fig3).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    /// Comma-separated ϱ values in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    rho: Option<Vec<f64>>,
    /// Also write plot-ready (x, y, series) rows here.
    #[arg(long)]
    plot_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    /// Q = ceil(chi K)
    Linear,
    /// Q = ceil(chi sqrt(ln K))
    SqrtLog,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity gain over the RIS-unaided downlink versus K (Q = 30).
    Fig1(Sweep),
    /// Capacity versus Q at K = 10 against the hardening analysis.
    Fig2(Sweep),
    /// Capacity versus Q at K = 10 against the moment-matched analysis.
    Fig3(Sweep),
    /// Run the numerical checks and report pass/fail.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Multiplies every tolerance (1 for a normal run).
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// Average receive SNR growth as Q scales with K.
    SnrScaling {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Regime::Linear)]
        regime: Regime,
        #[arg(long, default_value_t = 1.0)]
        chi: f64,
        /// Comma-separated, strictly increasing K grid.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<usize>>,
    },
}

fn spec_for(kind: ExperimentKind, common: &Common) -> ExperimentSpec {
    ExperimentSpec {
        n_trials: common.trials,
        master_seed: common.seed,
        workers: common.workers,
        ..ExperimentSpec::new(kind)
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let common = match &cli.command {
        Command::Fig1(s) | Command::Fig2(s) | Command::Fig3(s) => &s.common,
        Command::Validate { common, .. } | Command::SnrScaling { common, .. } => common,
    };
    let cfg = match &common.config {
        Some(p) => load_scenario(p, common.seed),
        None => Ok(default_scenario(common.seed)),
    }
    .map_err(|e| e.to_string())?;

    let (spec, table, plot_out, x_col, y_cols): (
        ExperimentSpec,
        Table,
        Option<&PathBuf>,
        &str,
        &[&str],
    ) = match &cli.command {
        Command::Fig1(s) | Command::Fig2(s) | Command::Fig3(s) => {
            let kind = match &cli.command {
                Command::Fig1(_) => ExperimentKind::Fig1,
                Command::Fig2(_) => ExperimentKind::Fig2,
                _ => ExperimentKind::Fig3,
            };
            let mut spec = spec_for(kind, &s.common);
            if let Some(g) = &s.grid {
                spec.grid = g.clone();
            }
            if let Some(r) = &s.rho {
                spec.rho_db = r.clone();
            }
            let (table, x, ys): (_, _, &[&str]) = match kind {
                ExperimentKind::Fig1 => {
                    (run_fig1(&cfg, &spec), "k", &["mc_delta", "analytic_delta"])
                }
                ExperimentKind::Fig2 => (
                    run_fig2(&cfg, &spec),
                    "q",
                    &["mc_capacity", "analytic_capacity"],
                ),
                _ => (
                    run_fig3(&cfg, &spec),
                    "q",
                    &["mc_capacity", "analytic_capacity"],
                ),
            };
            (
                spec,
                table.map_err(|e| e.to_string())?,
                s.plot_out.as_ref(),
                x,
                ys,
            )
        }
        Command::SnrScaling {
            common,
            regime,
            chi,
            grid,
        } => {
            let mut spec = spec_for(ExperimentKind::SnrScaling, common);
            spec.regime = match regime {
                Regime::Linear => ScalingRegime::QLinearInK,
                Regime::SqrtLog => ScalingRegime::QSqrtLogK,
            };
            spec.chi = *chi;
            if let Some(g) = grid {
                spec.grid = g.clone();
            }
            let table = run_snr_scaling(&cfg, &spec).map_err(|e| e.to_string())?;
            (spec, table, None, "k", &["normalized_snr", "limit"])
        }
        Command::Validate {
            common,
            tolerance_scale,
        } => {
            let spec = spec_for(ExperimentKind::Validate, common);
            let report = run_validate(&cfg, &spec, *tolerance_scale).map_err(|e| e.to_string())?;
            emit(common.out.as_ref(), &report.render())?;
            return Ok(report.passed());
        }
    };

    emit(
        common.out.as_ref(),
        &table.to_csv(&csv_comment(&spec, &cfg)),
    )?;
    if let Some(p) = plot_out {
        let group = Some("rho_db");
        let triples = table
            .plot_triples(x_col, y_cols, group)
            .map_err(|e| e.to_string())?;
        emit(Some(p), &triples)?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
