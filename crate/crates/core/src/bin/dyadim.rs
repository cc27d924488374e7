use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dyadim::runner::{self, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "dyadim", version, about = "Entropy and dimension experiments for dyadic Markov measures")]
struct Cli {
    /// entropy | dimension | sample | window-gap | lemma-scan | continuity | counterexample
    command: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-check the entropy recursion against enumeration.
    #[arg(long)]
    oracle: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dyadim: error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> dyadim::Result<()> {
    runner::init_thread_pool()?;
    let command: Command = cli.command.parse()?;
    let mut config = ExperimentConfig::load(&cli.config)?;
    if let Some(dir) = cli.output_dir {
        config.output_dir = Some(dir);
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.oracle |= cli.oracle;
    let report = runner::run(command, &config)?;
    for line in &report.summary {
        println!("{line}");
    }
    println!("wrote {} files to {}", report.files.len(), report.output_dir.display());
    Ok(())
}
