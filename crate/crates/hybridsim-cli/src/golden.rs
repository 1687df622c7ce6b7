//! Golden-file records: writing them next to run outputs and verifying a
//! directory of them against fresh runs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::scenario::{run_scenario, Artifact, ArtifactKind};
use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenFile {
    pub name: String,
    /// "table" or "spectrum"
    pub kind: String,
    #[serde(default)]
    pub atol: Option<f64>,
    #[serde(default)]
    pub x_col: Option<usize>,
    #[serde(default)]
    pub y_col: Option<usize>,
    #[serde(default)]
    pub rel_spacing: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenRecord {
    pub scenario: String,
    pub fingerprint: String,
    pub files: Vec<GoldenFile>,
}

impl GoldenRecord {
    pub fn from_artifacts(cfg: &ScenarioConfig, artifacts: &[Artifact]) -> Self {
        let files = artifacts
            .iter()
            .map(|a| match a.kind {
                ArtifactKind::Table { atol } => GoldenFile {
                    name: a.name.clone(),
                    kind: "table".into(),
                    atol: Some(atol),
                    x_col: None,
                    y_col: None,
                    rel_spacing: None,
                },
                ArtifactKind::Spectrum {
                    x_col,
                    y_col,
                    rel_spacing,
                } => GoldenFile {
                    name: a.name.clone(),
                    kind: "spectrum".into(),
                    atol: None,
                    x_col: Some(x_col),
                    y_col: Some(y_col),
                    rel_spacing: Some(rel_spacing),
                },
            })
            .collect();
        Self {
            scenario: cfg.scenario.name().into(),
            fingerprint: cfg.fingerprint(),
            files,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyStatus {
    Passed,
    Failed(String),
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct VerifyEntry {
    pub name: String,
    pub scenario: String,
    pub status: VerifyStatus,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| !matches!(e.status, VerifyStatus::Failed(_)))
    }
}

fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty csv")?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| format!("row {}: {e}", k + 2))?);
    }
    Ok((header, rows))
}

fn peak_locations(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let floor = ys.iter().cloned().fold(f64::MIN, f64::max) * 0.2;
    let mut peaks = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        if ys[i] > floor && ys[i] >= ys[i - 1] && ys[i] > ys[i + 1] {
            // quadratic refinement
            let denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
            let shift = if denom.abs() > 1e-300 {
                0.5 * (ys[i - 1] - ys[i + 1]) / denom
            } else {
                0.0
            };
            peaks.push(xs[i] + shift * (xs[1] - xs[0]));
        }
    }
    peaks
}

fn compare_artifact(golden_text: &str, fresh_text: &str, spec: &GoldenFile) -> Result<(), String> {
    let (gh, gr) = parse_csv(golden_text)?;
    let (fh, fr) = parse_csv(fresh_text)?;
    if gh != fh {
        return Err(format!("header changed: {:?} vs {:?}", gh, fh));
    }
    if gr.len() != fr.len() {
        return Err(format!("row count changed: {} vs {}", gr.len(), fr.len()));
    }
    match spec.kind.as_str() {
        "table" => {
            let atol = spec.atol.unwrap_or(1e-9);
            for (i, (a, b)) in gr.iter().zip(&fr).enumerate() {
                for (j, (x, y)) in a.iter().zip(b).enumerate() {
                    if (x - y).abs() > atol {
                        return Err(format!(
                            "cell ({},{}) differs by {:.3e} (atol {atol:.1e})",
                            i + 2,
                            j,
                            (x - y).abs()
                        ));
                    }
                }
            }
            Ok(())
        }
        "spectrum" => {
            let x_col = spec.x_col.unwrap_or(0);
            let y_col = spec.y_col.unwrap_or(1);
            let gx: Vec<f64> = gr.iter().map(|r| r[x_col]).collect();
            let gy: Vec<f64> = gr.iter().map(|r| r[y_col]).collect();
            let fx: Vec<f64> = fr.iter().map(|r| r[x_col]).collect();
            let fy: Vec<f64> = fr.iter().map(|r| r[y_col]).collect();
            let gp = peak_locations(&gx, &gy);
            let fp = peak_locations(&fx, &fy);
            if gp.len() != fp.len() {
                return Err(format!("peak count changed: {} vs {}", gp.len(), fp.len()));
            }
            if gp.is_empty() {
                return Err("no peaks found in golden spectrum".into());
            }
            let spacing = if gp.len() > 1 {
                gp.windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(0.0f64, |a, b| a.max(b.abs()))
            } else {
                (gx.last().unwrap() - gx[0]).abs()
            };
            let tol = spec.rel_spacing.unwrap_or(0.01) * spacing;
            for (a, b) in gp.iter().zip(&fp) {
                if (a - b).abs() > tol {
                    return Err(format!(
                        "peak moved from {a:.6e} to {b:.6e} (tol {tol:.1e})"
                    ));
                }
            }
            Ok(())
        }
        other => Err(format!("unknown golden kind {other}")),
    }
}

/// Verify every subdirectory of `dir` containing a `golden.toml`.
pub fn verify_goldens(dir: &Path) -> Result<VerifyReport, CliError> {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("cannot read golden dir {}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    entries.sort();

    let mut report = VerifyReport::default();
    for sub in entries {
        let name = sub
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .to_string();
        let started = std::time::Instant::now();
        let status = verify_one(&sub);
        let (scenario, status) = match status {
            Ok((scenario, status)) => (scenario, status),
            Err(msg) => ("?".to_string(), VerifyStatus::Failed(msg)),
        };
        report.entries.push(VerifyEntry {
            name,
            scenario,
            status,
            wall_ms: started.elapsed().as_millis(),
        });
    }
    Ok(report)
}

fn verify_one(sub: &Path) -> Result<(String, VerifyStatus), String> {
    let golden_path = sub.join("golden.toml");
    if !golden_path.exists() {
        return Ok(("?".into(), VerifyStatus::Skipped("no golden.toml".into())));
    }
    let golden: GoldenRecord = toml::from_str(
        &fs::read_to_string(&golden_path).map_err(|e| format!("read golden.toml: {e}"))?,
    )
    .map_err(|e| format!("parse golden.toml: {e}"))?;

    let config_path = sub.join("config.toml");
    if !config_path.exists() {
        return Ok((
            golden.scenario,
            VerifyStatus::Skipped("no config.toml".into()),
        ));
    }
    let cfg = ScenarioConfig::parse(
        &fs::read_to_string(&config_path).map_err(|e| format!("read config.toml: {e}"))?,
    )
    .map_err(|e| format!("{e}"))?;

    if cfg.fingerprint() != golden.fingerprint {
        return Ok((
            golden.scenario,
            VerifyStatus::Failed(format!(
                "config fingerprint {} does not match golden {}; regenerate with `run --out`",
                cfg.fingerprint(),
                golden.fingerprint
            )),
        ));
    }

    let output = run_scenario(&cfg).map_err(|e| format!("{e}"))?;
    for file in &golden.files {
        let Some(fresh) = output.artifacts.iter().find(|a| a.name == file.name) else {
            return Ok((
                golden.scenario,
                VerifyStatus::Failed(format!("run produced no artifact {}", file.name)),
            ));
        };
        let golden_text = fs::read_to_string(sub.join(&file.name))
            .map_err(|e| format!("read {}: {e}", file.name))?;
        if let Err(msg) = compare_artifact(&golden_text, &fresh.content, file) {
            return Ok((
                golden.scenario,
                VerifyStatus::Failed(format!("{}: {msg}", file.name)),
            ));
        }
    }
    Ok((golden.scenario, VerifyStatus::Passed))
}
