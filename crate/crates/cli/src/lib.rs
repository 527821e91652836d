//! Deterministic experiment runner for the tplab toolkit.
//!
//! Every subcommand produces a report `{config, subject, results, verdict}`
//! (or CSV for sampled data) and an exit code: 0 when every decided check
//! holds, 1 on a certified violation, 2 when undecided results remain and
//! 3 on usage or configuration errors.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand};
use serde::Serialize;
use tplab::transforms::Scheme;
use tplab::tp_tester::GridStrategy;
use tplab::Verdict;

use config::{read_config_file, OutputFormat, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] tplab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 3,
            // numerical failures mean the configured precision did not suffice
            CliError::Numeric(tplab::Error::InvalidParameter(_) | tplab::Error::UnknownSubject(_)) => 3,
            CliError::Numeric(tplab::Error::StripViolation { .. } | tplab::Error::Domain(_)) => 3,
            CliError::Numeric(_) => 2,
        }
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    match s {
        "de" | "double-exponential" | "tanh-sinh" => Ok(Scheme::DoubleExponential),
        "gl" | "gauss-legendre" | "gauss-legendre-panels" => Ok(Scheme::GaussLegendrePanels),
        _ => Err(format!("unknown scheme {s:?} (double-exponential | gauss-legendre)")),
    }
}

fn parse_strategy(s: &str) -> Result<GridStrategy, String> {
    s.parse().map_err(|e: tplab::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "tplab", version, about = "Total positivity, Polya frequency functions and the Laguerre-Polya class")]
pub struct Cli {
    /// File of `key = value` lines mirroring the flags; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Decimal working precision (default: $TPLAB_DIGITS, else 50).
    #[arg(long, global = true)]
    pub digits: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Quadrature scheme: double-exponential or gauss-legendre.
    #[arg(long, global = true, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    /// Maximal quadrature refinement level.
    #[arg(long, global = true)]
    pub level: Option<u32>,
    /// Fixed truncation radius for infinite ranges (default: automatic).
    #[arg(long, global = true)]
    pub trunc_radius: Option<f64>,
    /// Absolute quadrature error target.
    #[arg(long, global = true)]
    pub target_err: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// List the catalog of Polya frequency functions with closed forms.
    Catalog,
    /// Bilateral Laplace transform of a subject at a real point.
    Laplace {
        #[arg(long)]
        subject: String,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
    },
    /// Sample Λ(x) = (1/π)∫₀^∞ cos(xτ)/ξ(½+τ) dτ on a grid.
    Lambda {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        xmin: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
        xmax: f64,
        #[arg(long, default_value_t = 0.25)]
        step: f64,
    },
    /// Random minors det(Λ(x_j − y_k)) over increasing grids.
    Tp {
        #[arg(long)]
        subject: String,
        #[arg(long, default_value_t = 5)]
        max_order: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_parser = parse_strategy, default_value = "uniform-window")]
        strategy: GridStrategy,
    },
    /// Gram matrices of 1/ξ(½ + τ_j − τ_k) on random τ-sets.
    Bochner {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 5.0)]
        range: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Laguerre-Polya necessary conditions on a series.
    Lp {
        /// `xi1` or `catalog:NAME`.
        #[arg(long)]
        series: String,
        #[arg(long, value_delimiter = ',', default_value = "turan,hankel,jensen")]
        checks: Vec<String>,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Zero-decreasing battery N(Λ ∗ p) ≤ N(p) on random polynomials.
    Vd {
        #[arg(long)]
        subject: String,
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Moments → Laplace series → Ψ = 1/F → Jensen polynomials.
    Pipeline {
        #[arg(long)]
        subject: String,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        /// Number of moments (default 2·nmax + 4).
        #[arg(long)]
        moments: Option<usize>,
    },
    /// ∫Λ(x)e^{-sx}dx · Ξ(s) − 1 at s = −smax, …, smax.
    Roundtrip {
        #[arg(long, default_value_t = 2)]
        smax: u32,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Catalog => "catalog",
            Command::Laplace { .. } => "laplace",
            Command::Lambda { .. } => "lambda",
            Command::Tp { .. } => "tp",
            Command::Bochner { .. } => "bochner",
            Command::Lp { .. } => "lp",
            Command::Vd { .. } => "vd",
            Command::Pipeline { .. } => "pipeline",
            Command::Roundtrip { .. } => "roundtrip",
        }
    }
}

/// Overall outcome of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Violated,
    Undecided,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Holds => 0,
            Outcome::Violated => 1,
            Outcome::Undecided => 2,
        }
    }
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Holds => Outcome::Holds,
            Verdict::Violated => Outcome::Violated,
            Verdict::Undecided => Outcome::Undecided,
        }
    }
}

/// Text written to stdout and the process exit code.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Appends `--key value` for every config-file key the chosen subcommand
/// understands and the command line does not already set. The file and the
/// subcommand are located before clap sees the arguments, so required flags
/// may come from the file.
fn merge_config(argv: &[OsString]) -> Result<Vec<OsString>, CliError> {
    let args: Vec<&str> = argv.iter().skip(1).filter_map(|a| a.to_str()).collect();
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if *a == "--config" {
            path = args.get(i + 1).copied();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p);
        }
    }
    let Some(path) = path else { return Ok(argv.to_vec()) };
    let file = read_config_file(Path::new(path))?;
    let cmd = Cli::command();
    let Some(sub) = args.iter().find_map(|a| cmd.find_subcommand(a)) else {
        // let clap report the missing subcommand
        return Ok(argv.to_vec());
    };
    let known: Vec<String> = cmd
        .get_arguments()
        .chain(sub.get_arguments())
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();
    let given: Vec<&str> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut out = argv.to_vec();
    for (k, v) in file {
        if k == "config" {
            continue;
        }
        if !known.contains(&k) {
            return Err(CliError::Usage(format!("config key {k:?} is not an option of `{}`", sub.get_name())));
        }
        if !given.contains(&k.as_str()) {
            out.push(format!("--{k}").into());
            out.push(v.into());
        }
    }
    Ok(out)
}

fn parse(argv: &[OsString]) -> Result<Cli, RunOutput> {
    let merged = merge_config(argv).map_err(|e| RunOutput {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: e.exit_code(),
    })?;
    Cli::try_parse_from(&merged).map_err(|e| {
        let help = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
        let text = e.render().to_string();
        if help {
            RunOutput { stdout: text, stderr: String::new(), code: 0 }
        } else {
            RunOutput { stdout: String::new(), stderr: text, code: 3 }
        }
    })
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(&argv) {
        Ok(c) => c,
        Err(out) => return out,
    };
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))
            .and_then(|pool| pool.install(|| commands::dispatch(&cli))),
        None => commands::dispatch(&cli),
    };
    match result {
        Ok((stdout, outcome)) => RunOutput { stdout, stderr: String::new(), code: outcome.exit_code() },
        Err(e) => RunOutput { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() },
    }
}

fn run_config(cli: &Cli, default_output: OutputFormat) -> Result<RunConfig, CliError> {
    RunConfig::build(
        cli.digits,
        cli.seed,
        cli.scheme,
        cli.level,
        cli.trunc_radius,
        cli.target_err,
        cli.output.unwrap_or(default_output),
    )
}
