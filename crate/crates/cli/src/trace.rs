//! Line-delimited JSON trace files.
//!
//! A trace holds one header record, one record per step and a final summary
//! record. Floats are written with 17 significant digits (`{:.16e}`), which
//! parse back to the identical `f64`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unionavg::ops::{FixedClass, FixedPointReport};
use unionavg::solvers::{IterationTrace, TerminalStatus, TraceStep};
use unionavg::Vector;

use crate::config::ExperimentConfig;

pub const FORMAT: &str = "unionavg-trace/1";

/// JSON formatter writing every float in scientific notation with 17
/// significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactFloats;

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as a single JSON line (without the newline).
pub fn to_line<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value.serialize(&mut ser).expect("trace records serialize");
    String::from_utf8(buf).expect("serde_json writes utf-8")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub name: String,
    pub algorithm: String,
    pub dim: usize,
    pub seed: u64,
    pub x0: Vector,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub x: Vector,
    pub index: usize,
    pub lambda: f64,
    pub step_norm: f64,
    pub candidates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<Vector>,
}

impl From<&TraceStep> for StepRecord {
    fn from(s: &TraceStep) -> Self {
        StepRecord {
            n: s.n,
            x: s.x.clone(),
            index: s.index,
            lambda: s.lambda,
            step_norm: s.step_norm,
            candidates: s.candidates,
            residual: s.residual,
            aux: s.aux.clone(),
        }
    }
}

/// Classification recomputed by the oracle route on the final iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub class: FixedClass,
    pub set_class: FixedClass,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub status: TerminalStatus,
    pub exit_code: i32,
    pub iterations: usize,
    pub final_point: Vector,
    pub classification: FixedPointReport,
    pub oracle: OracleCheck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadow: Option<Vector>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shadow_residuals: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub set_residuals: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed_residuals: Vec<(usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_min: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Header(Box<Header>),
    Step(StepRecord),
    Summary(Box<Summary>),
}

pub fn write_trace(path: &Path, header: Header, trace: &IterationTrace, summary: &Summary) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", to_line(&Record::Header(Box::new(header))))?;
    for step in &trace.steps {
        writeln!(out, "{}", to_line(&Record::Step(step.into())))?;
    }
    writeln!(out, "{}", to_line(&Record::Summary(Box::new(summary.clone()))))?;
    out.flush()
}

pub fn read_trace(path: &Path) -> io::Result<Vec<Record>> {
    std::fs::read_to_string(path)?
        .lines()
        .map(|line| serde_json::from_str(line).map_err(io::Error::other))
        .collect()
}
