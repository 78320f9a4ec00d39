//! Run configurations: a task name, its parameter object and an output directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use voros_core::airy::AiryKind;
use voros_core::eqc::{EqcOptions, VorosOptions};
use voros_core::oracle::{BoundaryCondition, Origin};
use voros_core::potentials::PotentialSpec;
use voros_core::tba::{SpdpParams, TbaOptions, ThetaGrid};

use crate::CliError;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_ENV: &str = "VOROS_OUTPUT_DIR";

pub const DEFAULT_OUTPUT: &str = "voros-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Bethe,
    WkbPeriod,
    AiryZeros,
    TbaSolve,
    Voros,
    NaiveSpectrum,
    Schrodinger,
    ReproduceAll,
}

/// The on-disk configuration, parsed strictly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: TaskKind,
    #[serde(default)]
    pub params: Option<Value>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(task: TaskKind, params: Value) -> Self {
        Self {
            task,
            params: Some(params),
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parses the parameter object for the task and fills in defaults.
    pub fn resolve(&self) -> Result<Task, CliError> {
        let value = self
            .params
            .clone()
            .unwrap_or_else(|| Value::Object(Default::default()));
        let task = match self.task {
            TaskKind::Bethe => Task::Bethe(parse(value)?),
            TaskKind::WkbPeriod => Task::WkbPeriod(parse(value)?),
            TaskKind::AiryZeros => Task::AiryZeros(parse(value)?),
            TaskKind::TbaSolve => Task::TbaSolve(parse(value)?),
            TaskKind::Voros => Task::Voros(parse(value)?),
            TaskKind::NaiveSpectrum => Task::NaiveSpectrum(parse(value)?),
            TaskKind::Schrodinger => Task::Schrodinger(parse(value)?),
            TaskKind::ReproduceAll => Task::ReproduceAll(parse(value)?),
        };
        task.validate()?;
        Ok(task)
    }

    /// Explicit override, then the environment, then the config, then the default.
    pub fn output_dir(&self, explicit: Option<&Path>) -> PathBuf {
        if let Some(p) = explicit {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUTPUT_ENV).filter(|p| !p.is_empty()) {
            return PathBuf::from(p);
        }
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
    }
}

fn parse<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

/// A task with fully resolved parameters; this is what the manifest echoes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", content = "params", rename_all = "kebab-case")]
pub enum Task {
    Bethe(BetheParams),
    WkbPeriod(WkbParams),
    AiryZeros(AiryParams),
    TbaSolve(TbaParams),
    Voros(VorosParams),
    NaiveSpectrum(NaiveParams),
    Schrodinger(SchrodingerParams),
    ReproduceAll(ReproduceParams),
}

impl Task {
    fn validate(&self) -> Result<(), CliError> {
        let config = |e: voros_core::Error| CliError::Config(e.to_string());
        match self {
            Task::Bethe(p) if !(p.scale > 0.0 && p.scale.is_finite()) => Err(CliError::Config(
                format!("scale must be positive, got {}", p.scale),
            )),
            Task::TbaSolve(p) => {
                p.potential.validate().map_err(config)?;
                p.grid.theta_grid().map_err(config).map(|_| ())
            }
            Task::Voros(p) => {
                p.potential.validate().map_err(config)?;
                p.grid.theta_grid().map_err(config).map(|_| ())
            }
            Task::ReproduceAll(p) => p.grid.theta_grid().map_err(config).map(|_| ()),
            Task::Schrodinger(p) if p.levels == 0 => {
                Err(CliError::Config("levels must be at least 1".into()))
            }
            Task::AiryZeros(p) if p.count == 0 => {
                Err(CliError::Config("count must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetheKind {
    #[serde(alias = "QHO")]
    Qho,
    #[serde(alias = "Hydrogen")]
    Hydrogen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetheParams {
    pub problem: BetheKind,
    /// Number of roots (nodes of the wavefunction).
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub l: usize,
    /// `hbar/(m omega)` for the oscillator, the Bohr radius for hydrogen.
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WkbParams {
    pub potential: PotentialSpec,
    pub energy: f64,
    /// Highest order of `hbar` kept.
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiryParams {
    pub kind: AiryKind,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_len")]
    pub len: usize,
}

fn default_half_width() -> f64 {
    12.0
}
fn default_len() -> usize {
    4096
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            half_width: default_half_width(),
            len: default_len(),
        }
    }
}

impl GridParams {
    pub fn theta_grid(&self) -> voros_core::Result<ThetaGrid> {
        ThetaGrid::new(self.half_width, self.len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TbaParams {
    #[serde(default)]
    pub potential: SpdpParams,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub options: TbaOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VorosParams {
    #[serde(default)]
    pub potential: SpdpParams,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub options: TbaOptions,
    #[serde(default = "default_voros_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub eqc: EqcOptions,
    /// Integer angular momentum in the origin correction `2 pi (l + 1)`.
    #[serde(default)]
    pub angular_momentum: u32,
    #[serde(default)]
    pub theta_min: Option<f64>,
    #[serde(default)]
    pub theta_max: Option<f64>,
}

fn default_voros_n_max() -> usize {
    7
}

impl VorosParams {
    pub fn voros_options(&self) -> VorosOptions {
        VorosOptions {
            tba: self.options,
            eqc: self.eqc,
            l: self.angular_momentum,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NaiveParams {
    #[serde(default = "default_naive_n_max")]
    pub n_max: usize,
}

fn default_naive_n_max() -> usize {
    9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerParams {
    pub potential: PotentialSpec,
    #[serde(default = "full_line")]
    pub bc: BoundaryCondition,
    pub levels: usize,
}

fn full_line() -> BoundaryCondition {
    BoundaryCondition::new(Origin::FullLine)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceParams {
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub options: TbaOptions,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn unknown_fields_rejected() {
        assert!(RunConfig::from_json(r#"{"task": "bethe", "extra": 1}"#).is_err());
        let cfg = RunConfig::new(
            TaskKind::Bethe,
            json!({"problem": "QHO", "N": 3, "typo": 1}),
        );
        assert!(matches!(cfg.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn defaults_are_filled() {
        let cfg = RunConfig::from_json(r#"{"task": "voros"}"#).unwrap();
        let Task::Voros(p) = cfg.resolve().unwrap() else {
            panic!("wrong task");
        };
        assert_eq!(p.n_max, 7);
        assert_eq!(p.grid.len, 4096);
        assert_eq!(p.potential, SpdpParams::default());
    }

    #[test]
    fn bad_grid_is_a_config_error() {
        let cfg = RunConfig::new(TaskKind::TbaSolve, json!({"grid": {"len": 1000}}));
        assert!(matches!(cfg.resolve(), Err(CliError::Config(_))));
    }

    #[test]
    fn explicit_output_wins() {
        let cfg = RunConfig::from_json(r#"{"task": "airy-zeros", "output_dir": "a"}"#).unwrap();
        assert_eq!(cfg.output_dir(Some(Path::new("b"))), PathBuf::from("b"));
    }

    #[test]
    fn resolved_task_round_trips() {
        let cfg = RunConfig::new(TaskKind::NaiveSpectrum, json!({}));
        let task = cfg.resolve().unwrap();
        let text = serde_json::to_string(&task).unwrap();
        assert_eq!(text, r#"{"task":"naive-spectrum","params":{"n_max":9}}"#);
        assert_eq!(serde_json::from_str::<Task>(&text).unwrap(), task);
    }
}
