//! Library behind the `zeno-lab` command: config parsing, validation,
//! experiment execution and deterministic output files.
//!
//! ```no_run
//! let summary = zeno_lab::run(std::path::Path::new("configs/convergence.json"), None)?;
//! println!("wrote {} files to {}", summary.files.len(), summary.out_dir.display());
//! # Ok::<(), zeno_lab::RunError>(())
//! ```

use std::path::{Path, PathBuf};

use serde::Serialize;

pub mod config;
pub mod experiments;
pub mod output;
pub mod schema;

pub use config::{Diagnostic, Experiment, ExperimentConfig, Plan};
pub use experiments::GuardStatus;

/// Where results go when neither the flag, the environment nor the config
/// names a directory.
pub const DEFAULT_OUT_DIR: &str = "zeno-lab-out";

pub const TOOL: &str = "zeno-lab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid config:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<Diagnostic>),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(
        "guard `{name}` tripped: observed {observed:e} > limit {limit:e} (results were written)"
    )]
    Guard {
        name: String,
        observed: f64,
        limit: f64,
    },
}

impl RunError {
    /// 2 for anything caught before computing, 3 for everything after.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Validation(_) => 2,
            RunError::Numerical(_) | RunError::Io(_) | RunError::Guard { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub experiment: Experiment,
    /// SHA-256 of the resolved config, output directory excluded.
    pub config_hash: String,
    pub timestamp_unix: u64,
    pub config: ExperimentConfig,
    pub files: Vec<output::FileEntry>,
    pub guards: Vec<GuardStatus>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
    pub files: Vec<String>,
}

/// Parses and validates a config file without computing anything.
pub fn validate(path: &Path) -> Result<Plan, RunError> {
    ExperimentConfig::load(path)?.plan()
}

pub fn config_hash(resolved: &ExperimentConfig) -> String {
    let bytes = serde_json::to_vec(resolved).expect("config serializes");
    output::sha256_hex(&bytes)
}

/// Picks the output directory: an explicit override (the `--out` flag or
/// `ZENO_LAB_OUT`), then the config, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(explicit: Option<PathBuf>, plan: &Plan) -> PathBuf {
    explicit
        .or_else(|| plan.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs a config file and writes its results. A tripped guard under the
/// `fail` policy is reported as an error after the files are on disk.
pub fn run(path: &Path, out: Option<PathBuf>) -> Result<RunSummary, RunError> {
    let plan = validate(path)?;
    run_plan(&plan, resolve_out_dir(out, &plan))
}

pub fn run_plan(plan: &Plan, out_dir: PathBuf) -> Result<RunSummary, RunError> {
    let mut outcome = experiments::execute(plan)?;
    let timestamp_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = RunManifest {
        tool: TOOL,
        tool_version: TOOL_VERSION,
        experiment: plan.resolved.experiment,
        config_hash: config_hash(&plan.resolved),
        timestamp_unix,
        config: plan.resolved.clone(),
        files: outcome.files.entries(),
        guards: outcome.guards.clone(),
        warnings: plan.warnings.clone(),
    };
    outcome.files.push_json("manifest.json", &manifest)?;
    outcome.files.write_all(&out_dir)?;
    let files = outcome.files.names().map(String::from).collect();
    if plan.edge_guard == config::GuardPolicy::Fail {
        if let Some(g) = outcome.guards.iter().find(|g| g.tripped) {
            return Err(RunError::Guard {
                name: g.name.to_string(),
                observed: g.observed,
                limit: g.limit,
            });
        }
    }
    Ok(RunSummary {
        out_dir,
        manifest,
        files,
    })
}
