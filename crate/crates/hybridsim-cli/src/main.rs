use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hybridsim_cli::{run_to_directory, verify_goldens, CliError, Scenario, VerifyStatus, OUT_ENV};

#[derive(Parser)]
#[command(
    name = "hybridsim",
    about = "Hybrid qubit-mechanics-optics simulation scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write CSV artifacts plus a run manifest.
    Run {
        /// Path to the scenario TOML config.
        config: PathBuf,
        /// Output directory (default: $HYBRIDSIM_OUT or the config's stem).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for grid sweeps (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Re-run every golden scenario in a directory and compare within its
    /// tolerance profile.
    Verify {
        /// Directory holding one subdirectory per golden scenario.
        golden_dir: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the available scenarios.
    ListScenarios,
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => {
            init_threads(threads);
            let out_dir = out
                .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
                .unwrap_or_else(|| {
                    config
                        .file_stem()
                        .map(PathBuf::from)
                        .unwrap_or_else(|| PathBuf::from("out"))
                });
            match run_to_directory(&config, &out_dir) {
                Ok(output) => {
                    for w in &output.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!(
                        "wrote {} artifact(s) to {}",
                        output.artifacts.len(),
                        out_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Verify {
            golden_dir,
            threads,
        } => {
            init_threads(threads);
            match verify_goldens(&golden_dir) {
                Ok(report) => {
                    for entry in &report.entries {
                        let (tag, detail) = match &entry.status {
                            VerifyStatus::Passed => ("PASS", String::new()),
                            VerifyStatus::Failed(msg) => ("FAIL", format!("  {msg}")),
                            VerifyStatus::Skipped(msg) => ("SKIP", format!("  {msg}")),
                        };
                        println!(
                            "{tag}  {:<24} {:<12} {:>8} ms{detail}",
                            entry.name, entry.scenario, entry.wall_ms
                        );
                    }
                    let passed = report
                        .entries
                        .iter()
                        .filter(|e| e.status == VerifyStatus::Passed)
                        .count();
                    println!("{passed}/{} passed", report.entries.len());
                    if report.all_passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<12} {}", s.name(), s.describe());
            }
            ExitCode::SUCCESS
        }
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(e.exit_code() as u8)
}
