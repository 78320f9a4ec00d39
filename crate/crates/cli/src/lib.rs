//! Configuration-driven driver for the `voros-core` solvers.
//!
//! A run reads a [`RunConfig`], resolves it into a [`Task`], writes the
//! task's CSV/JSON artifacts into the output directory and finishes with
//! `manifest.json`, which echoes the resolved config, its SHA-256 and the
//! hash of every artifact.

pub mod config;
pub mod output;
pub mod reference;
pub mod tasks;

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use config::{RunConfig, Task, TaskKind, OUTPUT_ENV};
pub use output::{emit_curve, format_number, ArtifactRecord, ArtifactWriter};
pub use tasks::Check;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(#[from] voros_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} checks failed (see checks.json)")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    config: &'a Task,
    config_sha256: String,
    artifacts: &'a [ArtifactRecord],
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub artifacts: Vec<ArtifactRecord>,
    pub checks: Option<Vec<Check>>,
}

/// SHA-256 of the compact JSON form of the resolved task.
pub fn config_hash(task: &Task) -> Result<String, CliError> {
    let text = serde_json::to_string(task).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(output::sha256_hex(text.as_bytes()))
}

/// Runs `config`, writing into `explicit_dir` when given.
///
/// A `reproduce-all` run whose checks do not all pass still writes every
/// artifact and the manifest, then returns [`CliError::ChecksFailed`].
pub fn run(config: &RunConfig, explicit_dir: Option<&Path>) -> Result<RunOutcome, CliError> {
    let task = config.resolve()?;
    let dir = config.output_dir(explicit_dir);
    let mut writer = ArtifactWriter::new(dir.clone());
    let checks = tasks::run_task(&task, &mut writer)?;
    if let Some(checks) = &checks {
        writer.json("checks.json", checks)?;
    }
    let manifest = Manifest {
        tool: "voros",
        version: VERSION,
        config: &task,
        config_sha256: config_hash(&task)?,
        artifacts: writer.records(),
    };
    let text = output::to_json(&manifest)?;
    output::write_atomic(&dir.join("manifest.json"), text.as_bytes())?;
    if let Some(checks) = &checks {
        let failed = checks.iter().filter(|c| !c.passed).count();
        if failed > 0 {
            return Err(CliError::ChecksFailed {
                failed,
                total: checks.len(),
            });
        }
    }
    Ok(RunOutcome {
        output_dir: dir,
        artifacts: writer.records().to_vec(),
        checks,
    })
}

/// Parameter schemas for `--help`.
pub const TASK_SCHEMAS: &str = r#"CONFIG FILE
  {"task": <name>, "params": {...}, "output_dir": "<dir>"}
  Unknown fields are rejected. "params" and "output_dir" are optional.
  The output directory is taken from --output-dir, then $VOROS_OUTPUT_DIR,
  then "output_dir", then ./voros-out. Every run writes manifest.json.

TASKS AND PARAMS (defaults in brackets)
  bethe           {"problem": "qho" | "hydrogen", "N": roots, "l": [0], "scale": [1]}
                  -> bethe.json
  wkb-period      {"potential": POTENTIAL, "energy": E, "order": n}
                  -> wkb_periods.csv (cycle, order, re, im, error)
  airy-zeros      {"kind": "ai" | "ai_prime", "count": k}
                  -> airy_zeros.csv (k, zero)
  tba-solve       {"potential": {"E": [1], "u2": [1e-8], "l": [1e-5]},
                   "grid": {"half_width": [12], "len": [4096]},
                   "options": {"tol": [1e-10], "max_iter": [500],
                               "warmup_iterations": [5], "warmup_relaxation": [0.5]}}
                  -> pseudo_energies.csv, median_period.csv, tba_report.json
  voros           tba-solve params plus {"n_max": [7],
                   "eqc": {"neglect_gamma_hat": [false], "experimental": [false]},
                   "angular_momentum": [0], "theta_min": [auto], "theta_max": [auto]}
                  -> voros_spectrum.csv (n, theta_computed, theta_true, abs_error)
  naive-spectrum  {"n_max": [9]}
                  -> naive_spectrum.csv (n, naive, true)
  schrodinger     {"potential": POTENTIAL, "levels": count,
                   "bc": {"origin": ["full_line"] | "dirichlet" | "neumann",
                          "outer_radius": [auto]}}
                  -> schrodinger.csv (n, energy, bracket_width, nodes)
  reproduce-all   {"grid": GRID, "options": TBA OPTIONS}
                  -> bethe_qho.csv, bethe_hydrogen.csv, naive_spectrum.csv,
                     voros_spectrum.csv, pseudo_energies.csv, median_period.csv,
                     checks.json

POTENTIAL
  {"variant": "Monic", "params": {"M": m}}
  {"variant": "Polynomial", "params": {"coeffs": [a1, a2, ...]}}
  {"variant": "AbsLinear"}
  {"variant": "SinglePlusDoublePole", "params": {"E": e, "u2": u, "l": l}}
  {"variant": "Coulomb", "params": {"charge": [1], "l": [0]}}
  with optional "hbar": [1] and "two_m": [1].

EXIT CODES
  0 success, 1 compute error or failed checks, 2 config error
"#;
