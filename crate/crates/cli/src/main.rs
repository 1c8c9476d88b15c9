mod commands;
mod config;
mod error;
mod input;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Md,
}

#[derive(Debug, Parser)]
#[command(name = "sli", version, about = "Sound-law induction toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Serve model calls from fixtures and the cache only.
    #[arg(long, global = true)]
    pub cache_only: bool,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Phone feature table (CSV) replacing the bundled one.
    #[arg(long, global = true)]
    pub inventory: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment words into phones.
    Tokenize(commands::WordsArgs),
    /// Apply one law to words.
    Apply(commands::ApplyArgs),
    /// Run a cascade over words.
    Derive(commands::DeriveArgs),
    /// Parse a law and print it in every notation.
    ParseLaw(commands::ParseLawArgs),
    /// Generate a synthetic task corpus.
    Datagen(commands::DatagenArgs),
    /// Build the single-law dataset from a cascade.
    Bench(commands::BenchArgs),
    /// Score candidate programs against tasks.
    Eval(commands::EvalArgs),
    /// Significance tests.
    Stats(commands::StatsArgs),
    /// Combine evaluation reports into one table.
    Report(commands::ReportArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
