//! Experiment configuration files.
//!
//! Configs are TOML documents. Every table rejects unknown keys, and a parsed
//! config serializes back to TOML that parses to the same value.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemConfig,
    pub algorithm: AlgorithmConfig,
    pub start: StartConfig,
    #[serde(default)]
    pub stop: StopConfig,
    #[serde(default, skip_serializing_if = "OutputConfig::is_default")]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub dim: usize,
    /// Sets for the projection methods, in iteration order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<SetSpec>,
    /// Pieces of the min-convex function `f`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub f: Vec<PieceSpec>,
    /// Pieces of the min-convex function `g`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<PieceSpec>,
    /// Smooth convex part for forward-backward splitting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smooth: Option<SmoothSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    Whole,
    Singleton { point: Vec<f64> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// Solution set of `A x = b`.
    Affine { a: Vec<Vec<f64>>, b: Vec<f64> },
    Coordinate { support: Vec<usize> },
    /// Vectors with at most `s` nonzero entries.
    Sparsity { s: usize },
    /// Union of convex members.
    Union { members: Vec<SetSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PieceSpec {
    /// `x'Qx/2 + b'x + c`.
    Quadratic {
        q: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default)]
        c: f64,
    },
    /// `weight |x - center|^2 / 2`.
    Centered { center: Vec<f64>, weight: f64 },
    L1 { weight: f64 },
    L2 { weight: f64 },
    Indicator { set: SetSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SmoothSpec {
    Zero,
    Quadratic {
        q: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default)]
        c: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmName {
    /// Relaxed iteration of the projector onto the first set.
    IterateProjection,
    /// Krasnoselskii-Mann iteration over projectors onto convex sets.
    KmProjections,
    CyclicProjections,
    CyclicDr,
    Cadr,
    Ppa,
    ForwardBackward,
    DouglasRachford,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyName {
    #[default]
    LowestIndex,
    SeededRandom,
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlName {
    #[default]
    Cyclic,
    SeededRandom,
}

fn default_lambda() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: AlgorithmName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Constant relaxation parameter.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub policy: PolicyName,
    #[serde(default)]
    pub control: ControlName,
    /// For `cadr`: anchor on the first set (otherwise the last).
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub anchor_first: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Draw `x0` uniformly from a ball using the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<BallSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSample {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopConfig {
    pub max_iters: usize,
    pub step_tol: f64,
    pub window: usize,
    pub diag_tol: f64,
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            max_iters: 1000,
            step_tol: 1e-10,
            window: 1,
            diag_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

impl OutputConfig {
    pub fn is_default(&self) -> bool {
        *self == OutputConfig::default()
    }
}

/// Grid of starting points for `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: Vec<usize>,
    /// Final points closer than this are counted in the same basin.
    #[serde(default = "default_basin_tol")]
    pub basin_tol: f64,
}

fn default_basin_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Half width of the sampling box around `x0`.
    pub half_width: f64,
    pub pairs: usize,
    pub tol: f64,
    /// Directions for the attraction radius estimate.
    pub directions: usize,
    pub delta_max: f64,
    /// Nodes per axis for the grid prox oracle (1D/2D `ppa` problems).
    pub grid_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            half_width: 2.0,
            pairs: 10_000,
            tol: 1e-9,
            directions: 200,
            delta_max: 10.0,
            grid_points: 201,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Loads a config file, or a built-in one given as `preset:NAME`.
    pub fn load(source: &str) -> Result<Self, CliError> {
        if let Some(name) = source.strip_prefix("preset:") {
            let text = presets::get(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset `{name}`; available: {}",
                    presets::names().join(", ")
                ))
            })?;
            return Self::from_toml(text).map_err(|e| e.context(source));
        }
        let path = Path::new(source);
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| e.context(source))
    }

    pub fn trace_path(&self) -> PathBuf {
        self.output.dir.join(format!("{}.trace.jsonl", self.name))
    }
}
