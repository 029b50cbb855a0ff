use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spotcov::{commands, CliResult, Config, Parallel};

/// Kernel spot covariance estimation, simulation, Monte Carlo studies and
/// VHAR forecasting.
#[derive(Parser, Debug)]
#[command(name = "spotcov", version)]
struct Cli {
    /// TOML configuration; defaults are used for anything missing.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "SPOTCOV_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a Heston or Bates path with its true covariance.
    Simulate,
    /// Estimate the spot covariance path of a log-price CSV.
    Estimate,
    /// Cross-validate the bandwidth for a log-price CSV.
    SelectBandwidth,
    /// Monte Carlo study of estimator accuracy.
    McStudy,
    /// Compare VHAR forecasts from realized and kernel covariances.
    Forecast,
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let threads = match cli.threads {
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let exec = Parallel::new(threads)?;
    let mut stdout = std::io::stdout().lock();
    let outputs = match cli.command {
        Command::Simulate => commands::simulate(&cfg, &cli.out, &mut stdout)?,
        Command::Estimate => commands::estimate(&cfg, &cli.out, &exec, &mut stdout)?,
        Command::SelectBandwidth => {
            let (o, h) = commands::select_bandwidth(&cfg, &cli.out, &exec, &mut stdout)?;
            eprintln!("selected bandwidth: {h:?}");
            o
        }
        Command::McStudy => commands::mc_study(&cfg, &cli.out, &exec, &mut stdout)?,
        Command::Forecast => commands::forecast(&cfg, &cli.out, &mut stdout)?,
    };
    for f in &outputs.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are user errors; help and version are not errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
