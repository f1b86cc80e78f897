use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::FixedPointReport;
use crate::vector::Vector;

/// Guard factor: iterations stop once `|x_n| > GUARD * (1 + |x_0|)`.
pub const DIVERGENCE_GUARD: f64 = 1e8;

type ResidualFn = dyn Fn(&Vector) -> f64 + Send + Sync;

/// When an iteration stops.
#[derive(Clone)]
pub struct StopRule {
    /// Converged once the last `window` steps are all at most this long.
    pub step_tol: f64,
    pub max_iters: usize,
    /// Minimum number of consecutive short steps. Drivers raise this to
    /// their natural period (e.g. the cycle length).
    pub window: usize,
    /// Tolerance for post-run diagnostics (fixed-point and membership tests).
    pub diag_tol: f64,
    residual: Option<(Arc<ResidualFn>, f64)>,
}

impl StopRule {
    pub fn new(max_iters: usize) -> Self {
        StopRule {
            step_tol: 1e-10,
            max_iters,
            window: 1,
            diag_tol: 1e-8,
            residual: None,
        }
    }

    pub fn with_step_tol(mut self, tol: f64) -> Self {
        self.step_tol = tol;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn with_diag_tol(mut self, tol: f64) -> Self {
        self.diag_tol = tol;
        self
    }

    /// Additionally require `residual(x_n) <= tol` to declare convergence.
    pub fn with_residual(mut self, tol: f64, residual: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.residual = Some((Arc::new(residual), tol));
        self
    }

    pub fn residual(&self, x: &Vector) -> Option<f64> {
        self.residual.as_ref().map(|(f, _)| f(x))
    }

    pub(crate) fn residual_ok(&self, r: Option<f64>) -> bool {
        match (&self.residual, r) {
            (Some((_, tol)), Some(r)) => r <= *tol,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be >= 1"));
        }
        if !(self.step_tol >= 0.0 && self.diag_tol >= 0.0) {
            return Err(Error::param("tolerances", "must be nonnegative"));
        }
        Ok(())
    }
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule::new(10_000)
    }
}

impl fmt::Debug for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StopRule")
            .field("step_tol", &self.step_tol)
            .field("max_iters", &self.max_iters)
            .field("window", &self.window)
            .field("diag_tol", &self.diag_tol)
            .field("residual_tol", &self.residual.as_ref().map(|(_, t)| *t))
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalStatus {
    Converged,
    MaxIters,
    DivergedGuard,
}

impl fmt::Display for TerminalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalStatus::Converged => "converged",
            TerminalStatus::MaxIters => "max-iters",
            TerminalStatus::DivergedGuard => "diverged-guard",
        })
    }
}

/// One step `x_n -> x_{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub n: usize,
    pub x: Vector,
    /// Piece (or map) index chosen at this step.
    pub index: usize,
    pub lambda: f64,
    pub step_norm: f64,
    /// Number of distinct candidate indices the evaluation offered.
    pub candidates: usize,
    pub residual: Option<f64>,
    /// Algorithm-specific intermediate points, e.g. `(y_n, z_n)` for
    /// Douglas-Rachford splitting.
    pub aux: Vec<Vector>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Classification of the final iterate for the driving operator.
    pub classification: Option<FixedPointReport>,
    /// `(map index, |x - T_i x|)` for maps recurring in the final control window.
    pub fixed_residuals: Vec<(usize, f64)>,
    /// Distance of the final iterate to each set.
    pub set_residuals: Vec<f64>,
    pub shadow: Option<Vector>,
    /// Distance of the shadow point to each set.
    pub shadow_residuals: Vec<f64>,
    pub local_min: Option<bool>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub algorithm: String,
    pub x0: Vector,
    pub steps: Vec<TraceStep>,
    pub final_point: Vector,
    pub status: TerminalStatus,
    /// Steps per sweep; 1 unless the method cycles through several maps.
    pub period: usize,
    pub diagnostics: Diagnostics,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    pub fn converged(&self) -> bool {
        self.status == TerminalStatus::Converged
    }

    /// `x_0, x_1, ..., x_N`.
    pub fn iterates(&self) -> impl Iterator<Item = &Vector> {
        self.steps.iter().map(|s| &s.x).chain(std::iter::once(&self.final_point))
    }

    /// `x_0, x_m, x_{2m}, ...` for the trace's period `m`.
    pub fn sweeps(&self) -> Vec<&Vector> {
        self.iterates().step_by(self.period.max(1)).collect()
    }
}

/// Result of a single step of a driver.
pub(crate) struct Stepped {
    pub next: Vector,
    pub index: usize,
    pub lambda: f64,
    pub candidates: usize,
    pub aux: Vec<Vector>,
}

/// Runs `step` from `x0` until the stop rule fires.
pub(crate) fn drive(
    algorithm: &str,
    x0: &Vector,
    stop: &StopRule,
    period: usize,
    mut step: impl FnMut(usize, &Vector) -> Result<Stepped>,
) -> Result<IterationTrace> {
    stop.validate()?;
    let window = stop.window.max(period).max(1);
    let guard = DIVERGENCE_GUARD * (1.0 + x0.norm());
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut x = x0.clone();
    let mut short_run = 0usize;
    let mut status = TerminalStatus::MaxIters;
    for n in 0..stop.max_iters {
        let s = step(n, &x)?;
        let step_norm = s.next.dist(&x);
        let residual = stop.residual(&s.next);
        steps.push(TraceStep {
            n,
            x: std::mem::replace(&mut x, s.next),
            index: s.index,
            lambda: s.lambda,
            step_norm,
            candidates: s.candidates,
            residual,
            aux: s.aux,
        });
        if x.norm().is_nan() || x.norm() > guard {
            status = TerminalStatus::DivergedGuard;
            break;
        }
        short_run = if step_norm <= stop.step_tol { short_run + 1 } else { 0 };
        // cyclic methods only stop after a complete sweep
        if short_run >= window && (n + 1) % period.max(1) == 0 && stop.residual_ok(residual) {
            status = TerminalStatus::Converged;
            break;
        }
    }
    Ok(IterationTrace {
        algorithm: algorithm.to_string(),
        x0: x0.clone(),
        steps,
        final_point: x,
        status,
        period,
        diagnostics: Diagnostics::default(),
    })
}
