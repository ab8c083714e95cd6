use clap::{Args, Parser, Subcommand};
use powerbound::cli_reports::{emit_plot_data, run, ExperimentConfig, Kind, RunOptions, RunReport, TRIALS_SERIES};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "powerbound", version, about = "Run circle-set, measure and operator-bound experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Empirical thinness exponent of a circle set.
    Alpha(RunArgs),
    /// Covering numbers at given arc lengths.
    Cover(RunArgs),
    /// Recurrence exponent with a K-dependent target.
    Recur(RunArgs),
    /// Simultaneous Dirichlet certificates.
    Dirichlet(RunArgs),
    /// Fourier coefficients of a measure on a window.
    Fourier(RunArgs),
    /// Windowed limsup of |coefficients| and the K estimate.
    Limsup(RunArgs),
    /// Minimal analytic-norm interpolation.
    Interp(RunArgs),
    /// Randomized operator bound suites.
    BoundCheck(RunArgs),
    /// Extract a CSV series from a saved report.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = TRIALS_SERIES)]
        series: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides `output_path` in the config. Without either
    /// the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall time in the report (makes reports differ across runs).
    #[arg(long)]
    timing: bool,
}

fn execute(kind: Kind, a: &RunArgs) -> powerbound::Result<ExitCode> {
    let mut config = ExperimentConfig::load(&a.config)?;
    config.resolve(Some(kind))?;
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(t) = a.trials {
        config.trials = t;
    }
    let report = run(&config, &RunOptions { threads: a.threads, timing: a.timing })?;
    let out = a.out.clone().or_else(|| config.output_path.as_ref().map(|p| config.base_dir.join(p)));
    write_or_print(out.as_deref(), &report.to_json()?)?;
    if let Some(p) = &config.csv_path {
        std::fs::write(config.base_dir.join(p), emit_plot_data(&report, TRIALS_SERIES)?)?;
    }
    let agg = &report.aggregate;
    eprintln!(
        "{}: {} trials, {} passed, {} failed, {} errors",
        kind.name(),
        agg.trials,
        agg.passed,
        agg.failed,
        agg.errors
    );
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn write_or_print(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Alpha(a) => execute(Kind::Alpha, a),
        Command::Cover(a) => execute(Kind::Cover, a),
        Command::Recur(a) => execute(Kind::Recur, a),
        Command::Dirichlet(a) => execute(Kind::Dirichlet, a),
        Command::Fourier(a) => execute(Kind::Fourier, a),
        Command::Limsup(a) => execute(Kind::Limsup, a),
        Command::Interp(a) => execute(Kind::Interp, a),
        Command::BoundCheck(a) => execute(Kind::BoundCheck, a),
        Command::Plot { report, series, out } => std::fs::read_to_string(report)
            .map_err(Into::into)
            .and_then(|t| RunReport::from_json(&t))
            .and_then(|r| emit_plot_data(&r, series))
            .and_then(|csv| Ok(write_or_print(out.as_deref(), &csv)?))
            .map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
