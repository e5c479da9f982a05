use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stropsat_cli::{
    generate_corpus, render_batch_text, render_json, render_text, run_batch, run_file, OutputFormat, RunConfig,
};

/// Subtropical satisfiability for conjunctions of strict polynomial
/// inequalities.
#[derive(Parser)]
#[command(name = "stropsat", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
    /// SMT-LIB2 input files.
    files: Vec<PathBuf>,
}

#[derive(Args, Clone)]
struct Flags {
    /// Emit JSON reports instead of text.
    #[arg(long)]
    json: bool,
    /// Wall-clock limit per file, in milliseconds.
    #[arg(long, value_name = "N")]
    timeout_ms: Option<u64>,
    /// Squarings of the base tried after a = 2.
    #[arg(long, value_name = "K", default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    max_squarings: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Run every .smt2 file of a directory and print a summary table.
    Batch {
        #[command(flatten)]
        flags: Flags,
        dir: PathBuf,
    },
    /// Write a deterministic random corpus.
    Generate {
        /// Number of files.
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Generator seed; STROPSAT_SEED overrides it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        dir: PathBuf,
    },
}

fn config(flags: &Flags, seed: u64) -> RunConfig {
    RunConfig {
        max_squarings: flags.max_squarings,
        timeout_ms: flags.timeout_ms,
        output_format: if flags.json {
            OutputFormat::Json
        } else {
            OutputFormat::Text
        },
        seed,
    }
    .with_env()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Some(Command::Batch { flags, dir }) => {
            let cfg = config(&flags, 0);
            match run_batch(&dir, &cfg) {
                Ok(summary) => {
                    match cfg.output_format {
                        OutputFormat::Text => print!("{}", render_batch_text(&summary)),
                        OutputFormat::Json => {
                            println!("{}", serde_json::to_string(&summary).expect("summaries serialize"))
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", dir.display());
                    ExitCode::from(2)
                }
            }
        }
        Some(Command::Generate { count, seed, dir }) => {
            let cfg = config(&cli.flags, seed);
            match generate_corpus(&dir, count, cfg.seed) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", dir.display());
                    ExitCode::from(2)
                }
            }
        }
        None => {
            if cli.files.is_empty() {
                eprintln!("error: no input files");
                return ExitCode::from(2);
            }
            let cfg = config(&cli.flags, 0);
            let mut code = 0;
            for path in &cli.files {
                match run_file(path, &cfg) {
                    Ok(report) => {
                        match cfg.output_format {
                            OutputFormat::Text => print!("{}", render_text(&report)),
                            OutputFormat::Json => println!("{}", render_json(&report)),
                        }
                        code = code.max(report.verdict.exit_code());
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        code = code.max(e.exit_code());
                    }
                }
            }
            ExitCode::from(code as u8)
        }
    }
}
