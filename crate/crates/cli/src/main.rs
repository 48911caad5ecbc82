//! `ncc`: command-line front end for the normalized clustering coefficient.
//!
//! Exit codes: 0 on success, 2 when the requested statistic is undefined
//! (no wedges, no triangles, fewer than three nodes), 1 on any other error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{Format, Sink};

/// Seed used by every randomized command when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1729;

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Parser)]
#[command(name = "ncc", version, about = "Normalized clustering coefficient toolkit")]
struct Cli {
    /// Worker threads for counting and replicated experiments (output never depends on it).
    #[arg(long, global = true, default_value_t = default_workers(), value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    workers: usize,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Subgraph counts, Ê, V̂, T̂, ρ̂ and the clustering coefficient of an edge list.
    Stats(StatsArgs),
    /// Statistics of one-step ego networks.
    Ego(EgoArgs),
    /// Generate a random graph as an edge list.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Closed-form model curves.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Confidence intervals, the two-sample test and power simulations.
    #[command(subcommand)]
    Test(TestCommand),
    /// Evaluate network samplers by how well they preserve ρ̂.
    Sample(SampleArgs),
    /// Per-snapshot statistics of a series listed in a manifest.
    Series(SeriesArgs),
    /// Build a co-sponsorship network from sponsorship records.
    Wpc(WpcArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    /// Edge-list file.
    pub input: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EgoArgs {
    pub input: PathBuf,
    /// Node token of a single ego center.
    #[arg(long, required_unless_present = "min_degree", conflicts_with = "min_degree")]
    pub center: Option<String>,
    /// One row per node with at least this degree.
    #[arg(long)]
    pub min_degree: Option<usize>,
    /// Half-width of the Erdős–Rényi band used for the model column.
    #[arg(long, default_value_t = ncc_core::theory::DEFAULT_ER_HALFWIDTH)]
    pub er_halfwidth: f64,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum GenCommand {
    /// Erdős–Rényi G(n, p).
    Er(GenErArgs),
    /// Degree-corrected stochastic block model.
    Dcbm(GenDcbmArgs),
    /// Linearized chord diagram (preferential attachment).
    Lcd(GenLcdArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenCommon {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sidecar JSON path; defaults to `<output>.meta.json` when `--output` is set.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenErArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: GenCommon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaKind {
    Constant,
    TwoPoint,
    PowerLaw,
}

#[derive(Debug, Args, Serialize)]
pub struct GenDcbmArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Within-block probability (with --q).
    #[arg(long, requires = "q", conflicts_with_all = ["r", "lambda"])]
    pub p: Option<f64>,
    /// Between-block probability (with --p).
    #[arg(long, requires = "p")]
    pub q: Option<f64>,
    /// In-out-ratio p/q (with --lambda).
    #[arg(long, requires = "lambda")]
    pub r: Option<f64>,
    /// Target average degree (with --r).
    #[arg(long, requires = "r")]
    pub lambda: Option<f64>,
    /// Block proportions, comma separated (default uniform; only with --p/--q).
    #[arg(long, value_delimiter = ',', conflicts_with = "r")]
    pub pi: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ThetaKind::Constant)]
    pub theta: ThetaKind,
    /// Support of a two-point θ law.
    #[arg(long, value_delimiter = ',')]
    pub theta_values: Vec<f64>,
    /// Probabilities of a two-point θ law.
    #[arg(long, value_delimiter = ',')]
    pub theta_probs: Vec<f64>,
    /// Pareto shape of a power-law θ.
    #[arg(long, default_value_t = 3.0)]
    pub theta_shape: f64,
    /// Pareto lower bound of a power-law θ.
    #[arg(long, default_value_t = 1.0)]
    pub theta_lower: f64,
    /// Rescale θ draws to unit second moment (default: on for power-law only).
    #[arg(long)]
    pub theta_normalize: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: GenCommon,
}

#[derive(Debug, Args, Serialize)]
pub struct GenLcdArgs {
    #[arg(long)]
    pub n: usize,
    /// Edges added per step.
    #[arg(long)]
    pub m: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: GenCommon,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum TheoryCommand {
    /// ρ as a function of the in-out-ratio r for K balanced blocks.
    RhoOfR {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        k: usize,
    },
    /// Invert ρ(r) for K balanced blocks.
    ROfRho {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        k: usize,
    },
    /// Nearest preferential-attachment parameter m for a ρ value.
    LcdM {
        #[arg(long)]
        rho: f64,
    },
    /// Large-n ρ of the preferential-attachment model with m edges per step.
    LcdRho {
        #[arg(long)]
        m: u32,
    },
    /// Population Ê, V̂, T̂, ρ and cc of a balanced DCBM.
    Dcbm {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        mean_theta: f64,
    },
    /// Rough generative-model guess from a ρ value.
    Classify {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = ncc_core::theory::DEFAULT_ER_HALFWIDTH)]
        er_halfwidth: f64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum TestCommand {
    /// Test H0: equal in-out-ratio, from two edge lists.
    TwoSample {
        first: PathBuf,
        second: PathBuf,
        /// Number of communities (default 2, with a warning).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Normal confidence interval for ρ.
    Ci {
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Monte Carlo rejection rate of the two-sample test.
    Power {
        /// JSON file with `first`, `second` and optional `k`, `alpha`, `reps`, `seed`.
        config: PathBuf,
        /// Override the config's replicate count.
        #[arg(long)]
        reps: Option<usize>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    pub input: PathBuf,
    /// Methods (NS, ES, RWS, RWFS, RWJS, FF, SS), comma separated, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub method: Vec<String>,
    /// Fraction of nodes to keep.
    #[arg(long)]
    pub fraction: f64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write every sampled sub-network here as `<METHOD>_<rep>.edges`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// CSV: one row per replicate instead of one per method.
    #[arg(long)]
    pub per_replicate: bool,
    #[arg(long, default_value_t = 0.15)]
    pub flyback_p: f64,
    #[arg(long, default_value_t = 0.15)]
    pub jump_p: f64,
    #[arg(long, default_value_t = 0.7)]
    pub forward_p: f64,
    /// Walk steps without a new node before a restart (default 100·s).
    #[arg(long)]
    pub max_stall_steps: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    /// Manifest with `tag, edges[, labels]` lines.
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Or,
    And,
}

#[derive(Debug, Args, Serialize)]
pub struct WpcArgs {
    /// CSV with columns sponsor, bill, cosponsor.
    pub records: PathBuf,
    #[arg(long, default_value_t = ncc_core::dynamics::DEFAULT_WPC_THRESHOLD)]
    pub threshold: f64,
    /// Keep an edge when either (or) or both (and) directions pass.
    #[arg(long, value_enum, default_value_t = RuleArg::Or)]
    pub rule: RuleArg,
    /// Also write the network as an edge list of names.
    #[arg(long)]
    pub edges_out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Output was written but the headline statistic is undefined.
    Degenerate,
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    let degenerate = err.chain().any(|e| {
        matches!(
            e.downcast_ref::<ncc_core::Error>(),
            Some(ncc_core::Error::DegenerateGraph { .. } | ncc_core::Error::DegenerateStatistic(_))
        )
    });
    if degenerate {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let sink = Sink {
        format: cli.format,
        output: cli.output,
    };
    let command = cli.command;
    let result = ncc_core::exec::with_workers(cli.workers, move || commands::run(command, &sink));
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Degenerate) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
