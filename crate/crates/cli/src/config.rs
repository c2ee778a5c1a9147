//! Run configuration: one JSON document, mirrored by the CLI flags.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use hyperbat_core::params::{BatteryParams, PulseShape, PulseSpec};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "hyperbat-v1";

fn default_schema() -> String {
    SCHEMA_VERSION.to_string()
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Mode {
    #[serde(rename = "trace")]
    Trace,
    #[serde(rename = "sweep_tE")]
    SweepTE,
    #[serde(rename = "sweep_Emax")]
    SweepEmax,
    #[serde(rename = "verify")]
    Verify,
    #[serde(rename = "fig2a")]
    Fig2a,
    #[serde(rename = "fig2b")]
    Fig2b,
    #[serde(rename = "fig2c")]
    Fig2c,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Trace => "trace",
            Mode::SweepTE => "sweep_tE",
            Mode::SweepEmax => "sweep_Emax",
            Mode::Verify => "verify",
            Mode::Fig2a => "fig2a",
            Mode::Fig2b => "fig2b",
            Mode::Fig2c => "fig2c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsConfig {
    pub omega_b: f64,
    pub g: f64,
    pub gamma: f64,
    pub omega_drive: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        // The showcase point: g = 2 gamma, unit drive.
        Self { omega_b: 1.0, g: 2.0, gamma: 1.0, omega_drive: 1.0 }
    }
}

impl ParamsConfig {
    pub fn battery(&self) -> Result<BatteryParams, CliError> {
        BatteryParams::new(self.omega_b, self.g, self.gamma, self.omega_drive)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    #[default]
    Delta,
    FiniteWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    #[default]
    Gaussian,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseConfig {
    pub kind: PulseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeKind>,
}

impl PulseConfig {
    pub fn spec(&self) -> Result<PulseSpec, CliError> {
        let spec = match self.kind {
            PulseKind::Delta => PulseSpec::Delta,
            PulseKind::FiniteWidth => {
                let tau = self
                    .tau
                    .ok_or_else(|| CliError::Usage("finite_width pulse requires tau".into()))?;
                let shape = match self.shape.unwrap_or_default() {
                    ShapeKind::Gaussian => PulseShape::Gaussian,
                    ShapeKind::Rectangular => PulseShape::Rectangular,
                };
                PulseSpec::FiniteWidth { tau, shape }
            }
        };
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    #[default]
    Linear,
    Log,
}

/// Evaluation grid: `start:stop:count[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: GridScale,
}

impl GridConfig {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count, scale: GridScale::Linear }
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count, scale: GridScale::Log }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::Usage(format!("grid count must be at least 2, got {}", self.count)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.stop > self.start) {
            return Err(CliError::Usage(format!(
                "grid endpoints must be finite with stop > start, got {}:{}",
                self.start, self.stop
            )));
        }
        if matches!(self.scale, GridScale::Log) && self.start <= 0.0 {
            return Err(CliError::Usage("log grids require positive endpoints".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        match self.scale {
            GridScale::Linear => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
            GridScale::Log => {
                let (l0, l1) = (self.start.ln(), self.stop.ln());
                (0..n)
                    .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        }
    }
}

impl FromStr for GridConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(format!("expected start:stop:count[:log], got '{s}'"));
        }
        let start: f64 = parts[0].parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
        let stop: f64 = parts[1].parse().map_err(|_| format!("bad grid stop '{}'", parts[1]))?;
        let count: usize = parts[2].parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
        let scale = match parts.get(3) {
            None => GridScale::Linear,
            Some(&"log") => GridScale::Log,
            Some(&"linear") => GridScale::Linear,
            Some(other) => return Err(format!("unknown grid scale '{other}'")),
        };
        Ok(GridConfig { start, stop, count, scale })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OracleSwitch {
    On,
    #[default]
    Off,
}

impl OracleSwitch {
    pub fn enabled(&self) -> bool {
        matches!(self, OracleSwitch::On)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// The single configuration document. CLI flags override the fields of
/// a `--config` file; unset fields take mode-specific defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub mode: Mode,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub pulse: PulseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub oracle: OracleSwitch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            schema: default_schema(),
            mode,
            params: ParamsConfig::default(),
            pulse: PulseConfig::default(),
            grid: None,
            oracle: OracleSwitch::default(),
            n_max: None,
            tol: default_tol(),
            out: None,
            format: OutputFormat::default(),
            jobs: None,
        }
    }

    /// Grid for this run: the explicit one or the mode preset.
    pub fn effective_grid(&self) -> GridConfig {
        self.grid.unwrap_or(match self.mode {
            Mode::Trace => GridConfig::linear(0.0, 8.0, 401),
            Mode::Fig2a => GridConfig::linear(0.0, 8.0, 801),
            Mode::SweepTE | Mode::SweepEmax | Mode::Fig2b | Mode::Fig2c => {
                GridConfig::log(1e-2, 1e2, 241)
            }
            Mode::Verify => GridConfig::linear(0.0, 5.0, 101),
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported schema '{}', expected '{SCHEMA_VERSION}'",
                self.schema
            )));
        }
        self.params.battery()?;
        self.pulse.spec()?;
        self.effective_grid().validate()?;
        if !(self.tol.is_finite() && self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Usage(format!("tol must be in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse config {}: {e}", path.display())))?;
        Ok(cfg)
    }
}
