//! Command-line front end for the hybrid-system simulator: scenario runs
//! with deterministic CSV artifacts, a run manifest, and golden-file
//! regression.

use std::fmt;
use std::fs;
use std::path::Path;

pub mod config;
pub mod golden;
pub mod scenario;

pub use config::{Scenario, ScenarioConfig};
pub use golden::{verify_goldens, GoldenRecord, VerifyReport, VerifyStatus};
pub use scenario::{run_scenario, RunOutput};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable/invalid configuration or filesystem problem: exit code 2.
    Config(String),
    /// A numerical guard fired during the run: exit code 3.
    Guard(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Guard(msg) => write!(f, "numerical guard: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Guard(_) => 3,
        }
    }
}

/// Run the scenario described by the config file and write the artifacts,
/// a `manifest.toml`, a `golden.toml` tolerance record, and a canonical
/// copy of the config into `out_dir`.
pub fn run_to_directory(config_path: &Path, out_dir: &Path) -> Result<RunOutput, CliError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = ScenarioConfig::parse(&text)?;

    let started = std::time::Instant::now();
    let output = run_scenario(&cfg)?;
    let wall_ms = started.elapsed().as_millis();

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let write = |name: &str, content: &str| -> Result<(), CliError> {
        fs::write(out_dir.join(name), content)
            .map_err(|e| CliError::Config(format!("cannot write {name}: {e}")))
    };
    for artifact in &output.artifacts {
        write(&artifact.name, &artifact.content)?;
    }

    let manifest = format!(
        "scenario = \"{}\"\nfingerprint = \"{}\"\nwall_ms = {}\nwarnings = [{}]\n",
        cfg.scenario.name(),
        cfg.fingerprint(),
        wall_ms,
        output
            .warnings
            .iter()
            .map(|w| format!("\"{}\"", w.replace('"', "'")))
            .collect::<Vec<_>>()
            .join(", ")
    );
    write("manifest.toml", &manifest)?;

    let record = GoldenRecord::from_artifacts(&cfg, &output.artifacts);
    write(
        "golden.toml",
        &toml::to_string(&record).expect("golden record serializes"),
    )?;
    write("config.toml", &cfg.canonical())?;
    Ok(output)
}

/// Environment variable naming the default output directory for `run`.
pub const OUT_ENV: &str = "HYBRIDSIM_OUT";
