//! `paramcsp`: solve, reduce, verify, decompose and generate instances.
//!
//! Exit codes: 0 for SAT / found / pass, 1 for UNSAT / nonexistence /
//! mismatch, 2 for errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod decompose;
mod files;
mod gen;
mod reduce;
mod solve;
mod verify;

/// Result of a command: `Ok(true)` exits 0, `Ok(false)` exits 1.
pub type Verdict = Result<bool, String>;

#[derive(Parser)]
#[command(name = "paramcsp", version, about = "Binary CSP under structural parameters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Brute,
    Dp,
    Vc,
    Modulator,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Parameter {
    Td,
    Vc,
    Fvs,
    ModTd,
    Dfold,
    FatTree,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Bcsp,
    Lcol,
    Pcol,
    Graph,
    Wsat,
    Arosm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a `.bcsp` (or `.lcol`) instance.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
        /// Elimination forest (`dp`) or forest of G - W (`modulator`).
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Vertex cover (`vc`) or modulator (`modulator`).
        #[arg(long)]
        cover: Option<PathBuf>,
        /// Depth bound when a modulator has to be computed.
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Print the lexicographically least satisfying assignment.
        #[arg(long)]
        witness: bool,
    },
    /// Apply a reduction; writes the output and a `.report.json` sidecar.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        cover: Option<PathBuf>,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Output path; defaults to the input with the output extension.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        machine: reduce::MachineArgs,
    },
    /// Run a seeded campaign of generate, reduce and compare trials.
    Verify {
        #[arg(long)]
        rule: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        max_dom: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Directory for the JSON report and summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a decomposition witness or report that none exists.
    Decompose {
        /// A `.graph` file, or a `.bcsp` whose primal graph is used.
        file: PathBuf,
        #[arg(long, value_enum)]
        parameter: Parameter,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write seeded random instances.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of instances; more than one needs `--out`.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_dom: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Output file, or directory when `--trials` exceeds one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Solve { file, method, tree, cover, d, witness } => {
            solve::run(&file, method, tree.as_deref(), cover.as_deref(), d, witness)
        }
        Cmd::Reduce { file, rule, cover, tree, d, k, out, machine } => {
            let opts = reduce::Options { cover, tree, d, k, out, machine };
            reduce::run(&file, &rule, &opts)
        }
        Cmd::Verify { rule, trials, seed, max_n, max_dom, d, k, out } => {
            verify::run(&rule, trials, seed, [max_n, max_dom, d, k], out.as_deref())
        }
        Cmd::Decompose { file, parameter, d, k, out } => decompose::run(&file, parameter, d, k, out.as_deref()),
        Cmd::Gen { kind, seed, trials, max_n, max_dom, d, k, out } => {
            gen::run(kind, seed, trials, gen::Sizes { n: max_n, dom: max_dom, d, k }, out.as_deref())
        }
    };
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
