//! `cdt`: a condensed detachment prover with proof tools.

mod commands;
mod input;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use settings::Settings;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "cdt", version, about = "Condensed detachment prover and proof tools")]
struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for proofs of the problem's goals.
    Prove(Box<ProveArgs>),
    /// Check proofs against a problem.
    Verify(VerifyArgs),
    /// List the proofs of one or more levels.
    Enumerate(EnumerateArgs),
    /// Compress a proof into a tree grammar or a combinator term.
    Compress(CompressArgs),
    /// Decide whether a TPTP problem is a condensed detachment problem.
    Detect(DetectArgs),
    /// Show dimensions, known names and the n-simplified form of proofs.
    Inspect(InspectArgs),
}

#[derive(Args, Debug, Default)]
pub struct ProblemArgs {
    /// TPTP CNF problem file.
    pub problem: Option<PathBuf>,
    /// Axiom in Polish notation (repeatable).
    #[arg(long = "axioms", short = 'a', value_delimiter = ',')]
    pub axioms: Vec<String>,
    /// Goal in Polish notation; letters are read as constants (repeatable).
    #[arg(long = "goal", short = 'g')]
    pub goals: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProofFormat {
    Dterm,
    Meredith,
    Grammar,
    Comb,
    Stats,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Named configuration (sgcd-1, sgcd-height, sgcd-3000, psp, goal-tree, goal-height).
    #[arg(long)]
    pub preset: Option<String>,
    /// File of `key = value` lines using the long flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// tree, height or psp.
    #[arg(long)]
    pub generator: Option<String>,
    /// goal, axiom or blended.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub lookahead: Option<String>,
    /// Cache capacity per level, or `none`.
    #[arg(long)]
    pub capacity: Option<String>,
    /// Dimension limit factor, or `none`.
    #[arg(long)]
    pub dim_limit: Option<String>,
    /// on or off.
    #[arg(long)]
    pub subsumption: Option<String>,
    /// on or off.
    #[arg(long)]
    pub residual: Option<String>,
    /// height-size or size-height.
    #[arg(long)]
    pub ordering: Option<String>,
    #[arg(long)]
    pub max_level: Option<String>,
    /// Seconds.
    #[arg(long)]
    pub timeout: Option<String>,
    /// Keep searching for further proofs of the level that found the first.
    #[arg(long)]
    pub alternates: bool,
}

impl SearchArgs {
    pub fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs = [
            ("preset", &self.preset),
            ("generator", &self.generator),
            ("mode", &self.mode),
            ("lookahead", &self.lookahead),
            ("capacity", &self.capacity),
            ("dim-limit", &self.dim_limit),
            ("subsumption", &self.subsumption),
            ("residual", &self.residual),
            ("ordering", &self.ordering),
            ("max-level", &self.max_level),
            ("timeout", &self.timeout),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                flags.set(k, v).map_err(|e| CliError::Input(format!("--{k}: {e}")))?;
            }
        }
        if self.alternates {
            flags.alternates = Some(true);
        }
        Ok(file.overlay(&flags))
    }
}

#[derive(Args, Debug)]
pub struct ProveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Run these presets in parallel; the first to prove every goal wins.
    #[arg(long, value_delimiter = ',')]
    pub portfolio: Vec<String>,
    #[arg(long, short = 'f', value_enum, default_value = "dterm")]
    pub format: ProofFormat,
    /// Write proofs here instead of standard output.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Write statistics here instead of standard error.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Meredith step list, tree grammar, or one D-term per line.
    pub proof: PathBuf,
    /// TPTP problem; without it the proof file's own axioms and goals are checked.
    pub problem: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value = "tree")]
    pub generator: String,
    /// Only this level.
    #[arg(long, conflicts_with = "max_level")]
    pub level: Option<usize>,
    /// All levels up to this one.
    #[arg(long)]
    pub max_level: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompressTarget {
    Grammar,
    Comb,
    Dag,
}

#[derive(Args, Debug)]
pub struct CompressArgs {
    /// Meredith step list, tree grammar, or one D-term per line.
    pub proof: PathBuf,
    #[arg(long, short = 't', value_enum, default_value = "grammar")]
    pub target: CompressTarget,
    /// Upper bound on digram replacements.
    #[arg(long, default_value_t = 10_000)]
    pub rounds: usize,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    pub problem: PathBuf,
    /// Also print the canonical form of an accepted problem.
    #[arg(long)]
    pub canonical: bool,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    /// Meredith step list, tree grammar, or one D-term per line.
    pub proof: PathBuf,
    /// TPTP problem supplying the axioms when the proof file has none.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Extra `name<TAB>formula` registry file.
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Prove(a) => commands::prove(a),
        Command::Verify(a) => commands::verify(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Compress(a) => commands::compress(a),
        Command::Detect(a) => commands::detect(a),
        Command::Inspect(a) => commands::inspect(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cdt: {e}");
            ExitCode::from(e.code())
        }
    }
}
