//! Command-line front end for `choiforge`.
//!
//! Every command writes one JSON document, either to standard output or to
//! `--output` (in which case standard output gets a short status object).
//! Failures write a JSON diagnostic to the error stream and exit with:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | parse or usage error |
//! | 3 | Choi matrix is not completely positive |
//! | 4 | `check` found an invalid operation |
//! | 5 | invalid configuration |

pub mod error;
pub mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use choiforge::{
    check_cp_tp_choi, choi_distance, process_fidelity, resource_report, run_tomography,
    zoo_channel, CpTpVerdict,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use error::{CliError, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_CP_VIOLATION, EXIT_OK, EXIT_PARSE};
pub use files::{
    load_channel, load_experiment, Channel, ChannelFile, Representation, TomographyReport,
};

pub const DEFAULT_COMPARE_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "choiforge",
    version,
    about = "Quantum channel conversions and simulated process tomography"
)]
pub struct Cli {
    /// Overrides the seed in an experiment file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Choi-distance tolerance for `compare`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the result here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Kraus,
    Choi,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a channel file to Kraus or Choi form.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Report complete positivity and trace behaviour.
    Check { input: PathBuf },
    /// Run simulated ancilla-assisted tomography from an experiment file.
    Tomograph { experiment: PathBuf },
    /// Compare two channels (channel files or tomograph results).
    Compare { a: PathBuf, b: PathBuf },
    /// Emit a Kraus file for a named channel.
    Zoo {
        #[arg(long)]
        name: String,
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
        params: Vec<f64>,
        /// One value for a square channel, or n₁ n₂.
        #[arg(long, num_args = 1..=2, default_values_t = [2])]
        dims: Vec<usize>,
    },
    /// Measurement cost of ancilla-assisted tomography.
    Resources {
        #[arg(long, num_args = 2, required = true)]
        dims: Vec<usize>,
    },
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub choi_distance: f64,
    /// `None` when either input is not positive semidefinite or has zero trace.
    pub process_fidelity: Option<f64>,
    pub equivalent: bool,
    pub tol: f64,
}

/// A command's JSON payload plus its exit code.
struct Success {
    body: String,
    code: i32,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable payload");
    s.push('\n');
    s
}

fn ok<T: Serialize>(value: &T) -> Result<Success, CliError> {
    Ok(Success {
        body: to_json(value),
        code: EXIT_OK,
    })
}

fn cmd_convert(input: &Path, to: Target) -> Result<Success, CliError> {
    let ch = load_channel(input)?;
    match to {
        Target::Choi => ok(&ChannelFile::from_choi(&ch.to_choi())),
        Target::Kraus => ok(&ChannelFile::from_kraus(&ch.to_kraus()?)),
    }
}

fn cmd_check(input: &Path) -> Result<Success, CliError> {
    let ch = load_channel(input)?;
    let verdict: CpTpVerdict = match &ch {
        Channel::Kraus(k) => choiforge::check_cp_tp(k),
        other => check_cp_tp_choi(&other.to_choi()),
    };
    let code = if verdict.is_cp && verdict.is_trace_nonincreasing {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(Success {
        body: to_json(&verdict),
        code,
    })
}

fn cmd_tomograph(experiment: &Path, seed: Option<u64>) -> Result<Success, CliError> {
    let mut exp = load_experiment(experiment)?;
    if let Some(seed) = seed {
        exp.config.seed = seed;
    }
    let result = run_tomography(&exp.channel.to_opaque(), &exp.config).map_err(CliError::config)?;
    ok(&TomographyReport::new(&result, &exp.config)?)
}

fn cmd_compare(a: &Path, b: &Path, tol: f64) -> Result<Success, CliError> {
    let (ja, jb) = (load_channel(a)?.to_choi(), load_channel(b)?.to_choi());
    let distance = choi_distance(&ja, &jb).map_err(|e| CliError::Usage(e.to_string()))?;
    ok(&Comparison {
        choi_distance: distance,
        process_fidelity: process_fidelity(&ja, &jb).ok(),
        equivalent: distance < tol,
        tol,
    })
}

fn cmd_zoo(name: &str, params: &[f64], dims: &[usize]) -> Result<Success, CliError> {
    let (n1, n2) = match *dims {
        [n] => (n, n),
        [n1, n2] => (n1, n2),
        _ => return Err(CliError::Usage("--dims takes one or two values".into())),
    };
    let k = zoo_channel(name, params, n1, n2)?;
    ok(&ChannelFile::from_kraus(&k))
}

fn cmd_resources(dims: &[usize]) -> Result<Success, CliError> {
    if dims.len() != 2 || dims.iter().any(|&d| d < 2) {
        return Err(CliError::Usage(format!(
            "--dims needs two values of at least 2, got {dims:?}"
        )));
    }
    ok(&resource_report(dims[0], dims[1]))
}

fn dispatch(cli: &Cli) -> Result<Success, CliError> {
    match &cli.command {
        Command::Convert { input, to } => cmd_convert(input, *to),
        Command::Check { input } => cmd_check(input),
        Command::Tomograph { experiment } => cmd_tomograph(experiment, cli.seed),
        Command::Compare { a, b } => {
            let tol = cli.tol.unwrap_or(DEFAULT_COMPARE_TOL);
            if tol.is_nan() || tol < 0.0 {
                return Err(CliError::Usage(format!(
                    "--tol must be nonnegative, got {tol}"
                )));
            }
            cmd_compare(a, b, tol)
        }
        Command::Zoo { name, params, dims } => cmd_zoo(name, params, dims),
        Command::Resources { dims } => cmd_resources(dims),
    }
}

fn report(err: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = stderr.write_all(to_json(&err.diagnostic()).as_bytes());
    err.exit_code()
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = stdout.write_all(e.render().to_string().as_bytes());
                return EXIT_OK;
            }
            return report(
                &CliError::Usage(e.render().to_string().trim_end().to_string()),
                stderr,
            );
        }
    };
    let success = match dispatch(&cli) {
        Ok(s) => s,
        Err(e) => return report(&e, stderr),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &success.body)
            .map(|_| to_json(&json!({"status": "ok", "output": path.display().to_string()})))
            .map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
        None => Ok(success.body),
    };
    match written {
        Ok(body) => {
            let _ = stdout.write_all(body.as_bytes());
            if success.code == EXIT_CHECK_FAILED {
                return report(&CliError::CheckFailed, stderr);
            }
            success.code
        }
        Err(e) => report(&e, stderr),
    }
}
