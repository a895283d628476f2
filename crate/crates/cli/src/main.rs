//! `itsnet`: key pre-distribution, rate formulas, security checks and
//! experiments from the command line.
//!
//! Exit codes:
//! - 0: success (for `check`, the profile is achievable)
//! - 1: `check` proved the profile not achievable, or `multipath` found too
//!   few disjoint paths, or `paper-tables` found a mismatch
//! - 2: `check` could not decide (sufficient test failed)
//! - 3: a file could not be read, written or parsed
//! - 4: invalid arguments or parameters

mod commands;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use itsnet::seed::Seed;

pub const SEED_ENV: &str = "ITSNET_SEED";

#[derive(Parser, Debug)]
#[command(name = "itsnet", version, about = "Information-theoretically secure channels from pre-distributed secret bits")]
pub struct Cli {
    /// Root seed: a decimal u64 or 32 hex digits. Always echoed to stderr.
    #[arg(long, global = true, env = SEED_ENV, default_value = "0")]
    pub seed: Seed,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckMethod {
    /// Exact enumeration for small networks, relaxed otherwise.
    Auto,
    Exact,
    Relaxed,
    Feasibility,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    /// Full-rank probability of sparse random matrices.
    Lemma,
    /// Bernoulli rank experiment over k/r ratios and density constants.
    LemmaSweep,
    /// Cross-independence of per-channel key blocks over several budgets.
    Cross,
    /// Certified secrecy of simulated transcripts over many seeds.
    Secrecy,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    Bernoulli,
    FixedWeight,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Network and channel capacity for n nodes with at most t hacked.
    Capacity {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Maximum network and channel rates of a scheme.
    Rates {
        /// Scheme, e.g. `comb:a=3`, `random:p=1/2`, `hybrid:lambda=1/2:pairwise|comb:a=25`.
        #[arg(long, alias = "spec")]
        scheme: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        /// Tabulate every combinational group size a = 2..=n.
        #[arg(long)]
        sweep: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate a keystore, or one node's view of it.
    Keygen {
        #[arg(long, alias = "spec")]
        scheme: String,
        #[arg(long)]
        n: u32,
        /// Per-node secret-bit budget.
        #[arg(long)]
        l: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write only this node's view.
        #[arg(long)]
        node: Option<u32>,
        /// Fail when a group quota does not divide the budget.
        #[arg(long)]
        strict: bool,
    },
    /// Decide whether a rate profile is achievable. Prints a JSON verdict.
    Check {
        /// Keystore file to check against.
        #[arg(long, conflicts_with = "spec")]
        store: Option<PathBuf>,
        /// Scheme to generate a store from (with --n and --l).
        #[arg(long, alias = "scheme")]
        spec: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        /// Budget for a generated store; defaults to the smallest exact one.
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        t: u32,
        /// JSON profile file or `uniform:R`.
        #[arg(long)]
        profile: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: CheckMethod,
        /// Slack for the feasibility construction (default 2^-20).
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Send one message per positive-rate channel and certify secrecy.
    Simulate {
        #[arg(long, conflicts_with = "spec")]
        store: Option<PathBuf>,
        #[arg(long, alias = "scheme")]
        spec: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        profile: String,
        /// Sampling weight.
        #[arg(long, default_value_t = 128)]
        d: usize,
    },
    /// Monte Carlo experiments; CSV output.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Columns (lemma experiments).
        #[arg(long, default_value_t = 2000)]
        r: usize,
        /// Row/column ratios (lemma experiments).
        #[arg(long, value_delimiter = ',', default_value = "0.9")]
        ratio: Vec<f64>,
        #[arg(long, value_enum, default_value = "bernoulli")]
        sampler: SamplerKind,
        /// Density constants for the Bernoulli sampler.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        c: Vec<f64>,
        /// Sampling weight.
        #[arg(long, default_value_t = 128)]
        d: usize,
        #[arg(long, alias = "spec", default_value = "comb:a=3")]
        scheme: String,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        t: u32,
        /// Budgets to sweep (cross, secrecy).
        #[arg(long, value_delimiter = ',', default_value = "4000")]
        l: Vec<u64>,
        /// Profile for cross/secrecy: JSON file or `uniform:R`.
        #[arg(long, default_value = "uniform:1/18")]
        profile: String,
        /// Hacked nodes for the cross experiment, e.g. `4` or `3,4`.
        #[arg(long, value_delimiter = ',')]
        hacked: Vec<u32>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-time-pad encrypt a file for a peer.
    Encrypt {
        /// Node view (or full keystore with --node).
        #[arg(long)]
        keystore: PathBuf,
        #[arg(long)]
        node: Option<u32>,
        #[arg(long)]
        peer: u32,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Channel state file, created when missing.
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 128)]
        d: usize,
    },
    /// Decrypt a ciphertext file.
    Decrypt {
        #[arg(long)]
        keystore: PathBuf,
        #[arg(long)]
        node: Option<u32>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 128)]
        d: usize,
    },
    /// Plan delivery over t+1 node-disjoint paths.
    Multipath {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        dst: u32,
        #[arg(long)]
        t: usize,
        /// Message length in bits.
        #[arg(long, default_value_t = 1024)]
        m: u64,
        /// Channels not to use, e.g. `1-2,3-4`.
        #[arg(long, value_delimiter = ',')]
        blocked: Vec<String>,
    },
    /// Recompute the reference numbers and compare with stored values.
    PaperTables,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<itsnet::Error>() {
            return match e {
                itsnet::Error::Io(_) | itsnet::Error::Json(_) | itsnet::Error::Format(_) => 3,
                _ => 4,
            };
        }
    }
    4
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    eprintln!("seed: {} ({})", cli.seed, itsnet::seed::RNG_ALGORITHM);
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
