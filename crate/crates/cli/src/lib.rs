//! Command-line front end for `fkglab`.
//!
//! Every command produces a [`RunReport`] with exit code 0 (holds),
//! 1 (violated) or 2 (invalid input or capacity error). Output is plain
//! text unless `--json` is given.

pub mod commands;
pub mod report;
pub mod suite;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

pub use report::{Outcome, RunReport, RunVerdict};

#[derive(Debug, Parser)]
#[command(
    name = "fkglab",
    version,
    about = "Exact checks of correlation inequalities on the hypercube"
)]
pub struct Cli {
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Add per-trial lines to suite output.
    #[arg(long, global = true)]
    pub verbose: bool,

    /// Worker threads for enumeration and sampling.
    #[arg(long, global = true, env = "FKGLAB_WORKERS", default_value_t = 1)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the FKG lattice condition of a measure file.
    CheckFkg { measure: PathBuf },
    /// Check positive association over all pairs of up-sets.
    CheckPa { measure: PathBuf },
    /// Evaluate mu(A) mu(B) >= e2(mu(C1), .., mu(Ck)) for a partition.
    Strong {
        measure: PathBuf,
        partition: PathBuf,
    },
    /// Fiber decomposition of a product measure along the last coordinate.
    Trace {
        measure: PathBuf,
        partition: PathBuf,
    },
    /// Law of the fixed-point set of a uniform random permutation.
    MuFixed {
        n: usize,
        /// Also write the measure file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile an FKG measure into monotone functions of independent bits.
    Realize { measure: PathBuf, out: PathBuf },
    /// Check a realization file against a measure file.
    VerifyRealization {
        realization: PathBuf,
        measure: PathBuf,
    },
    /// Connection probabilities of three terminals under bond percolation.
    Percolation {
        graph: PathBuf,
        v1: usize,
        v2: usize,
        v3: usize,
        /// Monte Carlo cross-check: SAMPLES SEED.
        #[arg(long, num_args = 2, value_names = ["SAMPLES", "SEED"])]
        mc: Option<Vec<u64>>,
    },
    /// Distribution of the number of degree->=n vertices in G(2n, 1/2).
    Degree {
        n: usize,
        /// Monte Carlo cross-check: SAMPLES SEED.
        #[arg(long, num_args = 2, value_names = ["SAMPLES", "SEED"])]
        mc: Option<Vec<u64>>,
        /// Allow n = 4 (2^28 graphs, several minutes).
        #[arg(long)]
        force: bool,
    },
    /// Seeded property battery over all modules.
    Suite { seed: u64, trials: u64 },
}

fn mc_pair(v: &Option<Vec<u64>>) -> Option<(u64, u64)> {
    v.as_ref().map(|v| (v[0], v[1]))
}

/// Runs a parsed command; errors become an `invalid-input` outcome.
pub fn execute(cli: &Cli) -> Outcome {
    let workers = cli.workers.max(1);
    let result = match &cli.command {
        Command::CheckFkg { measure } => commands::check_fkg(measure),
        Command::CheckPa { measure } => commands::check_pa(measure),
        Command::Strong { measure, partition } => commands::strong(measure, partition),
        Command::Trace { measure, partition } => commands::trace(measure, partition),
        Command::MuFixed { n, out } => commands::mu_fixed(*n, out.as_deref()),
        Command::Realize { measure, out } => commands::realize(measure, out),
        Command::VerifyRealization {
            realization,
            measure,
        } => commands::verify_realization(realization, measure),
        Command::Percolation {
            graph,
            v1,
            v2,
            v3,
            mc,
        } => commands::percolation(graph, (*v1, *v2, *v3), mc_pair(mc), workers),
        Command::Degree { n, mc, force } => commands::degree(*n, mc_pair(mc), *force, workers),
        Command::Suite { seed, trials } => suite::suite(*seed, *trials, workers, cli.verbose),
    };
    result.unwrap_or_else(|e| {
        Outcome::new(
            command_name(&cli.command),
            RunVerdict::InvalidInput,
            json!({ "error": e.to_string() }),
            vec![format!("error: {e}")],
        )
    })
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::CheckFkg { .. } => "check-fkg",
        Command::CheckPa { .. } => "check-pa",
        Command::Strong { .. } => "strong",
        Command::Trace { .. } => "trace",
        Command::MuFixed { .. } => "mu-fixed",
        Command::Realize { .. } => "realize",
        Command::VerifyRealization { .. } => "verify-realization",
        Command::Percolation { .. } => "percolation",
        Command::Degree { .. } => "degree",
        Command::Suite { .. } => "suite",
    }
}

/// Text or JSON rendering of an outcome, newline-terminated.
pub fn render(outcome: &Outcome, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
        s.push('\n');
        return s;
    }
    let mut s = String::new();
    for line in &outcome.lines {
        s.push_str(line);
        s.push('\n');
    }
    s.push_str("verdict: ");
    s.push_str(outcome.report.verdict.as_str());
    s.push('\n');
    s
}

/// Result of a full invocation: exit code and the text for each stream.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Invocation {
                exit_code: code,
                stdout,
                stderr,
            };
        }
    };
    let outcome = execute(&cli);
    let text = render(&outcome, cli.json);
    let (stdout, stderr) = if outcome.report.verdict == RunVerdict::InvalidInput && !cli.json {
        (String::new(), text)
    } else {
        (text, String::new())
    };
    Invocation {
        exit_code: outcome.exit_code(),
        stdout,
        stderr,
    }
}
