use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use localdiss_experiments::{run_experiment, Error, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "localdiss", version, about = "Dissipation spectra and Gaussian dynamics of lattices with a local drain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and approximate dissipation spectrum for a list of couplings.
    DissipationSpectrum(RunArgs),
    /// Rates over a log-spaced coupling grid.
    GammaSweep(RunArgs),
    /// Flux-pi/2 ring: exact rates against the analytic momentum formula.
    RingAnalytics(RunArgs),
    /// Eigenmode correlators, exact and intermediate-time formula.
    EigenmodeCorrelations(RunArgs),
    /// Site correlators, light-cone profile and steady state.
    Lightcone(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config, or a manifest.json from a previous run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; a `<experiment>-<hash>` directory is created inside.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// `dotted.key=value`, value parsed as a TOML literal. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<PathBuf, Error> {
    let cfg = ExperimentConfig::resolve(kind, args.config.as_deref(), &args.overrides)?;
    let out = args.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("runs"));
    Ok(run_experiment(&cfg, &out, args.workers)?.dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::DissipationSpectrum(a) => (ExperimentKind::DissipationSpectrum, a),
        Command::GammaSweep(a) => (ExperimentKind::GammaSweep, a),
        Command::RingAnalytics(a) => (ExperimentKind::RingAnalytics, a),
        Command::EigenmodeCorrelations(a) => (ExperimentKind::EigenmodeCorrelations, a),
        Command::Lightcone(a) => (ExperimentKind::Lightcone, a),
    };
    match run(kind, args) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
