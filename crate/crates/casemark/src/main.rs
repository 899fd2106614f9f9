use std::path::PathBuf;
use std::process::ExitCode;

use casemark::{commands, synthetic};
use casemark::config::{Overrides, RunConfig};
use clap::{Parser, Subcommand};

/// Extract nominal case markers from a verse-parallel corpus.
#[derive(Debug, Parser)]
#[command(name = "casemark", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "casemark.toml")]
    config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated target languages to process.
    #[arg(long, global = true, value_delimiter = ',')]
    languages: Option<Vec<String>>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    theta: Option<u64>,
    #[arg(long, global = true)]
    phi: Option<f64>,
    #[arg(long, global = true)]
    chi: Option<f64>,
    /// Keep only word-final grams (the default).
    #[arg(long, global = true, overrides_with = "no_suffix_only")]
    suffix_only: bool,
    /// Keep grams from any position.
    #[arg(long, global = true)]
    no_suffix_only: bool,
    /// Ablate one stage: no_theta, no_phi, no_chi, middle or beginning.
    #[arg(long, global = true)]
    ablate: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract marker sets for every target language.
    Extract,
    /// Build silver-standard suffix sets from paradigm tables.
    Silver,
    /// Score marker sets against the silver standards.
    Eval,
    /// Run and score every ablation variant.
    Ablate,
    /// Group NPs by marker combination and export the cooccurrence matrix.
    Analyze,
    /// Dump the parallel NP set.
    Project,
    /// Write the synthetic planted-suffix fixture and its config.
    Fixture {
        dir: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        verses: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let suffix_only = match (cli.suffix_only, cli.no_suffix_only) {
        (_, true) => Some(false),
        (true, false) => Some(true),
        _ => None,
    };
    let overrides = Overrides {
        out: cli.out,
        languages: cli.languages,
        jobs: cli.jobs,
        theta: cli.theta,
        phi: cli.phi,
        chi: cli.chi,
        suffix_only,
        ablate: cli.ablate,
    };
    if let Command::Fixture { dir, seed, verses } = &cli.command {
        let params = synthetic::FixtureParams { seed: *seed, verses: *verses, ..Default::default() };
        return match synthetic::generate(dir, &params) {
            Ok(f) => {
                println!("{}", f.config.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        };
    }
    let result = RunConfig::load(&cli.config, &overrides).and_then(|cfg| match cli.command {
        Command::Extract => commands::cmd_extract(&cfg),
        Command::Silver => commands::cmd_silver(&cfg),
        Command::Eval => commands::cmd_eval(&cfg),
        Command::Ablate => commands::cmd_ablate(&cfg),
        Command::Analyze => commands::cmd_analyze(&cfg),
        Command::Project => commands::cmd_project(&cfg),
        Command::Fixture { .. } => unreachable!(),
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
