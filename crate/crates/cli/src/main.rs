//! `selfrep`: command-line front end to the selfrep-core workbench.
//!
//! Exit codes: 0 success, 1 a verification came out negative, 2 usage or
//! domain error, 3 internal error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain {
        kind: String,
        message: String,
    },
    Internal(String),
    /// The reader went away; not an error.
    BrokenPipe,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Domain { .. } => 2,
            CliError::Internal(_) => 3,
            CliError::BrokenPipe => 0,
        }
    }

    pub fn domain(e: impl std::fmt::Debug + std::fmt::Display) -> Self {
        CliError::Domain {
            kind: error_kind(&format!("{e:?}")),
            message: e.to_string(),
        }
    }

    pub fn io(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::BrokenPipe
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Domain { kind, message } => write!(f, "error[{kind}]: {message}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
            CliError::BrokenPipe => Ok(()),
        }
    }
}

/// Innermost variant name of a nested error's `Debug` form.
fn error_kind(debug: &str) -> String {
    let mut kind = String::from("Error");
    for seg in debug.split(['(', '{']) {
        let ident = seg.trim();
        if !ident.is_empty()
            && ident.chars().all(|c| c.is_ascii_alphanumeric())
            && ident.starts_with(|c: char| c.is_ascii_uppercase())
        {
            kind = ident.to_string();
        } else {
            break;
        }
    }
    kind
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Parser, Debug)]
#[command(
    name = "selfrep",
    version,
    about = "Self-replicating functional equations: sequences, congruences, q-series and AGM iterations"
)]
pub struct Cli {
    /// Worker threads for parallel subcommands (default: all cores).
    #[arg(long, short = 'j', global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    /// TOML or JSON file whose keys mirror the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, short = 'f', global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; relative paths resolve against $SELFREP_OUTPUT_DIR.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate sequence terms.
    Gen(GenArgs),
    /// Verify a functional equation against a series.
    VerifyFeq(VerifyArgs),
    /// Lucas and p^(l r) congruence report for one family.
    Congruence(CongruenceArgs),
    /// Sweep (λ, μ) pairs through congruence filters, as JSON lines.
    Search(SearchArgs),
    /// Guess a linear recurrence with polynomial coefficients.
    Guess(GuessArgs),
    /// q-expansions of z_l and P_l and the parametrization check.
    Modular(ModularArgs),
    /// Legendre generating-function identities as truncated polynomials.
    Legendre(LegendreArgs),
    /// Quadratic or quintic AGM-type iteration, one record per step.
    Agm(AgmArgs),
    /// Evaluate a series for 1/π to a digit budget.
    Series(SeriesArgs),
    /// Table of identities and the commands that check them.
    PaperMap,
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(clap::ArgGroup::new("source").required(true).multiple(false)))]
pub struct GenArgs {
    /// Family id: u7, f2..f5, fhat2..fhat5, gb, gc, g5, c:λ,μ or cvar:λ,μ.
    #[arg(long, group = "source")]
    pub family: Option<String>,
    /// c_n(λ, μ) given as `λ,μ`.
    #[arg(long, group = "source", allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Variant-shape c_n(λ, μ) given as `λ,μ`.
    #[arg(long, group = "source", allow_hyphen_values = true)]
    pub cvar: Option<String>,
    /// Largest index n.
    #[arg(long, default_value_t = 10)]
    pub terms: usize,
    /// Computation route (binomial-sum, binomial-sum-alt, recurrence, selfrep, closed-form).
    #[arg(long)]
    pub route: Option<String>,
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(clap::ArgGroup::new("equation_source").required(true).multiple(false)))]
pub struct VerifyArgs {
    /// Registry id, or alg0:λ,μ / variant:λ,μ.
    #[arg(long, group = "equation_source", allow_hyphen_values = true)]
    pub id: Option<String>,
    /// Equation as JSON.
    #[arg(long, group = "equation_source")]
    pub equation: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub order: usize,
    /// Series coefficients, one integer per line; defaults to the
    /// equation's expected family or to its own solution.
    #[arg(long)]
    pub series: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CongruenceArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub family: String,
    /// Require a p^(l r) supercongruence at this level (1..3).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    pub ell: Option<u32>,
    /// Require Lucas congruences at every prime.
    #[arg(long)]
    pub lucas: bool,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    pub prime_bound: u64,
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub r_max: u32,
    #[arg(long, default_value_t = 5)]
    pub super_min_prime: u64,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Sweep spec file (JSON or TOML); flags override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// alg0 or variant.
    #[arg(long)]
    pub shape: Option<String>,
    /// Shorthand for |λ|, |μ| ≤ R.
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
    pub range: Option<i64>,
    /// Inclusive λ range `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Inclusive μ range `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// none, lambda2-eq-mu or lambda-eq-minus2mu.
    #[arg(long)]
    pub constraint: Option<String>,
    #[arg(long)]
    pub lucas: bool,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    pub ell: Option<u32>,
    #[arg(long)]
    pub holonomic_probe: bool,
    /// Term budget N of the sweep.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Term budget of the confirmation pass; 0 disables it.
    #[arg(long)]
    pub confirm: Option<usize>,
    #[arg(long)]
    pub prime_bound: Option<u64>,
    #[arg(long)]
    pub r_max: Option<u32>,
    #[arg(long)]
    pub super_min_prime: Option<u64>,
    /// Comma-separated primes tried first.
    #[arg(long)]
    pub probe_primes: Option<String>,
    /// Comma-separated filters: lucas, ell, holonomic.
    #[arg(long)]
    pub filter_order: Option<String>,
    /// Skip pairs already present in the output file and append.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(clap::ArgGroup::new("guess_source").required(true).multiple(false)))]
pub struct GuessArgs {
    #[arg(long, group = "guess_source", allow_hyphen_values = true)]
    pub family: Option<String>,
    /// Terms file, one integer per line.
    #[arg(long, group = "guess_source")]
    pub input: Option<PathBuf>,
    /// Number of terms used.
    #[arg(long, default_value_t = 60)]
    pub terms: usize,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub r_max: u64,
    #[arg(long, default_value_t = 4)]
    pub d_max: usize,
}

#[derive(Args, Debug)]
pub struct ModularArgs {
    /// One of 2, 3, 4, 5, 7; all five when omitted.
    #[arg(long)]
    pub level: Option<u32>,
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..))]
    pub order: u64,
}

#[derive(Args, Debug)]
pub struct LegendreArgs {
    /// Total degree of truncation.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub degree: u64,
    /// bailey-brafman, leg or both.
    #[arg(long, default_value = "both")]
    pub identity: String,
}

#[derive(Args, Debug)]
pub struct AgmArgs {
    /// quadratic or quintic; must match the initial data.
    #[arg(long)]
    pub scheme: Option<String>,
    /// ic, n21a, n21, bauer, n3 or n7.
    #[arg(long, default_value = "ic")]
    pub init: String,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
    /// Fixed number of steps; by default the run stops once the digit
    /// budget is met.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Reference constant: 1/(8pi), 1/(2pi), 2/(3pi), 8/(21pi) or series.
    #[arg(long)]
    pub limit: Option<String>,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    /// eq-n, bauer, n3, n7, n21a or n21.
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
}

fn run() -> Result<Status, CliError> {
    let args = config::expand_args(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j as usize)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    commands::dispatch(&cli)
}

fn main() -> ExitCode {
    match run() {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_is_innermost_variant() {
        assert_eq!(
            error_kind(r#"Sequence(UnknownFamily("x"))"#),
            "UnknownFamily"
        );
        assert_eq!(
            error_kind(r#"DivergentTarget { x: "1" }"#),
            "DivergentTarget"
        );
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_pair_parses() {
        let cli = Cli::try_parse_from(["selfrep", "gen", "--c", "-4,2", "--terms", "3"]).unwrap();
        match cli.command {
            Command::Gen(g) => assert_eq!(g.c.as_deref(), Some("-4,2")),
            _ => panic!(),
        }
    }
}
