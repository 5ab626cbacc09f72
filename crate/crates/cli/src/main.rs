use std::path::PathBuf;
use std::process::ExitCode;

use attackability_cli::config::PipelineConfig;
use attackability_cli::error::CliError;
use attackability_cli::pipeline::{Pipeline, Stage};
use attackability_cli::synth::write_synthetic;
use clap::{Parser, Subcommand};

/// Sentence attackability pipeline: labels, features, effects, ranking.
#[derive(Parser)]
#[command(name = "attackability", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct StageArgs {
    /// Pipeline configuration (TOML).
    #[arg(long, short, default_value = "config.toml")]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Rerun even if the stage manifest is current.
    #[arg(long)]
    force: bool,
    /// Only print errors.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Read posts and comments, segment sentences, split by time.
    Ingest(StageArgs),
    /// Label attacked and successfully attacked sentences.
    Label(StageArgs),
    /// Fit domain and sentence topic models.
    Topics(StageArgs),
    /// Match sentences against argument trees.
    Knowledge(StageArgs),
    /// Extract sentence features.
    Features(StageArgs),
    /// Estimate per-feature effects on attack and success.
    Effects(StageArgs),
    /// Grid-search the regularized logistic ranker.
    Train(StageArgs),
    /// Evaluate LR against the length and random baselines.
    Evaluate(StageArgs),
    /// Render HTML reports.
    Report(StageArgs),
    /// Run every stage in order.
    All(StageArgs),
    /// Write a synthetic corpus and config.toml to a directory.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        posts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run_stage(args: StageArgs, stage: Option<Stage>) -> Result<(), CliError> {
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let mut config = PipelineConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let mut pipeline = Pipeline::new(config, args.force);
    pipeline.verbose = !args.quiet;
    match stage {
        Some(s) => pipeline.run(s).map(|_| ()),
        None => pipeline.run_all(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => run_stage(a, Some(Stage::Ingest)),
        Command::Label(a) => run_stage(a, Some(Stage::Label)),
        Command::Topics(a) => run_stage(a, Some(Stage::Topics)),
        Command::Knowledge(a) => run_stage(a, Some(Stage::Knowledge)),
        Command::Features(a) => run_stage(a, Some(Stage::Features)),
        Command::Effects(a) => run_stage(a, Some(Stage::Effects)),
        Command::Train(a) => run_stage(a, Some(Stage::Train)),
        Command::Evaluate(a) => run_stage(a, Some(Stage::Evaluate)),
        Command::Report(a) => run_stage(a, Some(Stage::Report)),
        Command::All(a) => run_stage(a, None),
        Command::Synth { out, posts, seed } => write_synthetic(&out, posts, seed).map(|p| {
            eprintln!("wrote {} posts and {}", posts, p.display());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
