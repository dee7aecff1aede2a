//! The `dini` command line: evaluate implicit functions and local inverses on
//! query points or grids, and run the lemma checks.
//!
//! Exit status is 0 on success, 1 for errors in the spec or flags, and 2 when
//! any query point fails or a check does not pass.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;
pub mod spec;

pub use spec::{ProblemSpec, SpecError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dini", version, about = "Local implicit and inverse functions by nested bisection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve F(x, y) = 0 for y near the seed at each query x.
    Implicit(ImplicitArgs),
    /// Invert a square map F near the seed at each query y.
    Invert(EvalArgs),
    /// Run one of the lemma checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// JSON problem spec.
    #[arg(long)]
    pub spec: PathBuf,
    /// Query point "v1,v2,..." (repeatable).
    #[arg(long = "query", allow_hyphen_values = true)]
    pub queries: Vec<String>,
    /// Grid axis "lo:hi:steps", one per independent coordinate.
    #[arg(long = "grid", allow_hyphen_values = true)]
    pub grids: Vec<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub out: Format,
    #[arg(long)]
    pub tol_root: Option<f64>,
    #[arg(long)]
    pub tol_sys: Option<f64>,
    /// Seed for random sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub box_halfwidth: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ImplicitArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Also run a uniqueness scan with this many samples per query.
    #[arg(long)]
    pub uniqueness: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    /// Operator bound |Mv| <= ||M|| |v|.
    Lemma1,
    /// Chain rule for F(y + Mx).
    Lemma2,
    /// Mean value witness on a segment.
    Lemma3,
    /// Injectivity radius around the seed.
    Lemma4,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum)]
    pub lemma: Lemma,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random trials (lemma1, lemma2).
    #[arg(long)]
    pub trials: Option<usize>,
}

/// Runs a parsed command, writing the document to `out` and diagnostics to
/// `err`. Returns the exit status.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Implicit(args) => commands::implicit(&args, out),
        Command::Invert(args) => commands::invert(&args, out),
        Command::Verify(args) => commands::verify(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_SPEC
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// capturing standard output and error.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, &mut out, &mut err),
        Err(e) => {
            err.extend_from_slice(e.to_string().as_bytes());
            if e.use_stderr() {
                EXIT_SPEC
            } else {
                EXIT_OK
            }
        }
    };
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}
