//! `matchwidth`: instance generation, verification sweeps, censuses and
//! calibration tables.
//!
//! Exit codes: 0 pass, 1 assertion or internal failure, 2 usage or bad
//! input, 3 cap exceeded. Failures print one `error: <kind>: <message>` line
//! on stderr.

mod commands;
mod sample;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use matchwidth_core::cnf::DEFAULT_MODEL_CAP;
use matchwidth_core::nrobp::DEFAULT_PATH_CAP;
use matchwidth_core::width::DEFAULT_PERM_CAP;
use matchwidth_core::Error;

#[derive(Parser)]
#[command(name = "matchwidth", version, about = "Partial matching width and read-once branching program experiments")]
struct Cli {
    #[command(flatten)]
    caps: Caps,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy, Debug)]
pub struct Caps {
    /// Largest vertex set handled by exact width computations.
    #[arg(long, global = true, env = "MATCHWIDTH_CAP_PERMS", default_value_t = DEFAULT_PERM_CAP, value_parser = positive::<usize>)]
    pub cap_perms: usize,
    /// Largest number of variables for model enumeration.
    #[arg(long, global = true, env = "MATCHWIDTH_CAP_MODELS", default_value_t = DEFAULT_MODEL_CAP, value_parser = positive::<usize>)]
    pub cap_models: usize,
    /// Largest number of source-sink paths enumerated in a program.
    #[arg(long, global = true, env = "MATCHWIDTH_CAP_PATHS", default_value_t = DEFAULT_PATH_CAP, value_parser = positive::<u128>)]
    pub cap_paths: u128,
}

fn positive<T: std::str::FromStr + PartialOrd + From<u8>>(s: &str) -> Result<T, String> {
    let v: T = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v < T::from(1) {
        return Err("must be at least 1".into());
    }
    Ok(v)
}

#[derive(Subcommand)]
enum Command {
    /// Write the graph, CNF, tree decomposition and optionally an order-built program for Φ_k.
    Generate(GenerateArgs),
    /// Run an invariant suite and report one CSV row per check.
    Verify(VerifyArgs),
    /// Bottleneck census of φ and of approximants F ⊆ φ.
    Census(CensusArgs),
    /// Exact width computations on a graph file.
    Pmw {
        #[command(subcommand)]
        cmd: PmwCmd,
    },
    /// Per-trial tables of empirical constants.
    Calibrate {
        #[command(subcommand)]
        cmd: CalibrateCmd,
    },
    /// Print the solution-counting decision tree of a DIMACS file.
    Scdt(ScdtArgs),
}

#[derive(Args)]
pub struct Instance {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub height: u32,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub instance: Instance,
    /// Also write an order-built program for φ.
    #[arg(long)]
    pub nrobp: bool,
    /// Build the program for an approximant keeping this fraction of models.
    #[arg(long, requires = "nrobp")]
    pub ratio: Option<f64>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Pmw,
    Scdt,
    Nrobp,
    All,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DeletionMode {
    Uniform,
    /// Delete models through the largest tuple of φ's census first.
    Concentrated,
}

#[derive(Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub instance: Instance,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.25, 0.125])]
    pub ratio: Vec<f64>,
    #[arg(long, value_enum, default_value_t = DeletionMode::Uniform)]
    pub deletion: DeletionMode,
    /// Number of variable blocks; about √n when omitted.
    #[arg(long, value_parser = positive::<usize>)]
    pub q: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum PmwCmd {
    /// Partial matching width of V and an order attaining it.
    Exact {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated vertices; all vertices when omitted.
        #[arg(long, value_delimiter = ',')]
        vertices: Option<Vec<usize>>,
    },
    /// Largest witnessing matching for an order of V.
    Witness {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated order; V is the set of listed vertices.
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<usize>,
    },
}

#[derive(Subcommand)]
pub enum CalibrateCmd {
    /// Constructive witnesses on G_k against the width lower bound.
    Mainptv {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Slack of the many-variables bound on random bounded-degree graphs.
    Manyvars1 {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 20, value_parser = positive::<usize>)]
        max_vertices: usize,
        #[arg(long, default_value_t = 7, value_parser = positive::<usize>)]
        max_degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct ScdtArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    /// Comma-separated 0-based branching order; identity when omitted.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A check that ran and did not hold.
#[derive(Debug)]
pub struct Failed(pub String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn classify(e: &anyhow::Error) -> (&'static str, u8) {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::InvalidInput(_) => ("invalid-input", 2),
                Error::Parse { .. } => ("parse", 2),
                Error::Precondition { .. } => ("precondition", 2),
                Error::CapExceeded { .. } => ("cap-exceeded", 3),
                Error::Internal { .. } => ("internal", 1),
            };
        }
        if cause.downcast_ref::<Failed>().is_some() {
            return ("assertion", 1);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return ("io", 2);
        }
    }
    ("internal", 1)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let caps = cli.caps;
    match cli.command {
        Command::Generate(a) => commands::generate(&a, caps, cli.seed),
        Command::Verify(a) => suites::verify(&a, caps, cli.seed),
        Command::Census(a) => commands::census(&a, caps, cli.seed),
        Command::Pmw { cmd } => commands::pmw(&cmd, caps),
        Command::Calibrate { cmd } => commands::calibrate(&cmd, caps, cli.seed),
        Command::Scdt(a) => commands::scdt(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let _ = writeln!(std::io::stderr(), "error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify(&e);
            let msg = format!("{e:#}").replace('\n', " ");
            let _ = writeln!(std::io::stderr(), "error: {kind}: {msg}");
            ExitCode::from(code)
        }
    }
}
