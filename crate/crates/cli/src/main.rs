use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zeno_lab::{Experiment, RunError};

#[derive(Parser)]
#[command(
    name = "zeno-lab",
    version,
    about = "Zeno dynamics experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its result files.
    Run {
        config: PathBuf,
        /// Output directory; overrides ZENO_LAB_OUT and the config.
        #[arg(long, env = "ZENO_LAB_OUT")]
        out: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Print the config keys and file layouts of an experiment.
    Schema { experiment: Experiment },
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("zeno-lab: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => {
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                if n == 0 {
                    eprintln!("zeno-lab: --threads must be positive");
                    return ExitCode::from(2);
                }
                pool = pool.num_threads(n);
            }
            let pool = match pool.build() {
                Ok(p) => p,
                Err(e) => return fail(&RunError::Io(e.to_string())),
            };
            match pool.install(|| zeno_lab::run(&config, out)) {
                Ok(s) => {
                    for w in &s.manifest.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!(
                        "{} -> {} ({} files)",
                        s.manifest.experiment,
                        s.out_dir.display(),
                        s.files.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config } => match zeno_lab::validate(&config) {
            Ok(plan) => {
                for w in &plan.warnings {
                    eprintln!("warning: {w}");
                }
                println!("{}: ok ({})", config.display(), plan.resolved.experiment);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Schema { experiment } => {
            let text = serde_json::to_string_pretty(&zeno_lab::schema::schema(experiment))
                .expect("schema serializes");
            println!("{text}");
            ExitCode::SUCCESS
        }
    }
}
