use clap::{Parser, Subcommand};
use qmoire_cli::config::parse_pair;
use qmoire_cli::scenario::analysis_lines;
use qmoire_cli::{analyze, compare_profiles, csvio, run_scenario, CliError, RunOptions, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit status when a comparison or scenario misses its tolerance.
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "qmoire", version, about = "Biphoton moire scenarios: numeric engine vs closed form")]
struct Cli {
    /// Worker threads for the numeric engine (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Use direct quadrature and the literal double sum (slow reference path).
    #[arg(long, global = true)]
    oracle: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write numeric.csv, closed_form.csv, spectrum.csv and report.txt.
    Simulate { config: PathBuf },
    /// Compare two profile CSVs after peak normalisation.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// Beat frequency and visibility of a profile CSV.
    Analyze {
        profile: PathBuf,
        /// Beat search band in cycles per mm, `lo,hi`.
        #[arg(long)]
        band: Option<String>,
        /// Moving-average window in micrometres.
        #[arg(long)]
        window_um: Option<f64>,
    },
}

fn configure_threads(threads: Option<usize>) -> Result<qmoire::Execution, CliError> {
    match threads {
        Some(0) => Err(CliError::Invalid("--threads must be at least 1".into())),
        Some(1) => Ok(qmoire::Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Internal(format!("cannot size thread pool: {e}")))?;
            Ok(qmoire::Execution::Parallel)
        }
        _ => Ok(qmoire::Execution::Parallel),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let execution = configure_threads(cli.threads)?;
    let opts = RunOptions { oracle: cli.oracle, execution };
    match cli.command {
        Command::Simulate { config } => {
            let scenario = Scenario::from_path(&config)?;
            let report = run_scenario(&scenario, opts)?;
            print!("{}", report.text);
            Ok(report.pass)
        }
        Command::Compare { a, b, tol } => {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(CliError::Invalid(format!("--tol must be non-negative, got {tol}")));
            }
            let (text, pass) = compare_profiles(&csvio::read(&a)?, &csvio::read(&b)?, tol)?;
            print!("{text}");
            Ok(pass)
        }
        Command::Analyze { profile, band, window_um } => {
            let band = match band {
                Some(s) => Some(
                    parse_pair(&s)
                        .map(|(lo, hi)| (lo * 1e3, hi * 1e3))
                        .ok_or_else(|| CliError::Invalid(format!("--band must be `lo,hi` in cycles/mm, got `{s}`")))?,
                ),
                None => None,
            };
            let a = analyze(&csvio::read(&profile)?, band, window_um.map(|w| w * 1e-6))?;
            print!("{}", analysis_lines(&a));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_MISMATCH),
        Err(e) => {
            eprintln!("qmoire: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
