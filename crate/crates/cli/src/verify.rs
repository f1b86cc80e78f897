//! The `verify` subcommand: oracle checks for a configured experiment.

use serde::{Deserialize, Serialize};
use unionavg::ops::{FixedClass, DEFAULT_TIE_TOL};
use unionavg::oracle::{brute_force_prox, estimate_radius, hausdorff, sample_inequality, GridSpec, Region};
use unionavg::Vector;

use crate::config::{AlgorithmName, VerifyConfig};
use crate::error::CliError;
use crate::experiment::Experiment;
use crate::trace::Summary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub alpha: f64,
    pub pairs: usize,
    pub max_violation: f64,
    /// Pieces whose largest violation exceeds the tolerance.
    pub violations: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationCheck {
    pub summary_class: FixedClass,
    pub oracle_class: FixedClass,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusCheck {
    pub center: Vector,
    pub radius: f64,
    pub directions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxCheck {
    pub point: Vector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    pub cell_diameter: f64,
    pub passed: bool,
    /// Set when the grid cannot resolve the problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub name: String,
    pub inequality: InequalityCheck,
    pub classification: ClassificationCheck,
    /// Sampled attraction radius around a strong fixed limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<RadiusCheck>,
    /// Grid prox comparisons (proximal point problems in one or two dimensions).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prox: Vec<ProxCheck>,
    pub passed: bool,
}

/// Cube grid around `x` and its prox points with a dyadic step, so that
/// points with dyadic coordinates (such as small integers) are grid nodes.
fn aligned_grid(x: &Vector, points: &[Vector], vc: &VerifyConfig) -> Result<GridSpec, CliError> {
    let dim = x.dim();
    let mut lo = x.as_slice().to_vec();
    let mut hi = lo.clone();
    for p in points {
        for k in 0..dim {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let extent = (0..dim).map(|k| hi[k] - lo[k]).fold(0.0, f64::max) + 2.0 * vc.half_width;
    let step = (extent / (vc.grid_points.max(3) - 1) as f64).log2().floor().exp2();
    let nodes = (extent / step).ceil() as usize + 2;
    let lo: Vec<f64> = lo.iter().map(|v| ((v - vc.half_width) / step).floor() * step).collect();
    let hi = lo.iter().map(|v| v + (nodes - 1) as f64 * step).collect();
    Ok(GridSpec::new(lo, hi, nodes)?)
}

fn prox_check(exp: &Experiment, x: &Vector, vc: &VerifyConfig) -> Result<ProxCheck, CliError> {
    let gamma = exp.config.algorithm.gamma.expect("validated gamma");
    let f = exp.prox_function().expect("ppa problem");
    let ours = f.prox_union(gamma, DEFAULT_TIE_TOL)?.evaluate(x)?.points();
    let grid = aligned_grid(x, &ours, vc)?;
    match brute_force_prox(f, gamma, x, &grid) {
        Ok(oracle) => {
            let distance = hausdorff(&ours, &oracle.points);
            Ok(ProxCheck {
                point: x.clone(),
                distance: Some(distance),
                cell_diameter: oracle.cell_diameter,
                passed: distance <= oracle.cell_diameter && !oracle.boundary,
                skipped: None,
            })
        }
        Err(e @ unionavg::Error::Oracle(_)) => Ok(ProxCheck {
            point: x.clone(),
            distance: None,
            cell_diameter: grid.cell_diameter(),
            passed: true,
            skipped: Some(e.to_string()),
        }),
        Err(e) => Err(e.into()),
    }
}

/// Runs the oracle suite against `exp`, using `summary` from a run of it.
pub fn verify(exp: &Experiment, summary: &Summary) -> Result<VerifyReport, CliError> {
    let vc = exp.config.verify.clone().unwrap_or_default();
    let t = exp.driving_operator()?;
    let x0 = exp.x0()?;
    let alpha = t.alpha().value();
    let ineq = sample_inequality(&t, alpha, &Region::around(&x0, vc.half_width), vc.pairs, exp.config.seed)?;
    let inequality = InequalityCheck {
        alpha,
        pairs: ineq.pairs,
        max_violation: ineq.max_violation,
        violations: ineq.per_piece.iter().filter(|v| **v > vc.tol).count(),
        passed: ineq.passes(vc.tol),
    };

    let classification = ClassificationCheck {
        summary_class: summary.classification.class,
        oracle_class: summary.oracle.class,
        passed: summary.oracle.consistent && summary.oracle.class == summary.classification.class,
    };

    let radius = if summary.classification.class == FixedClass::StrongFixed {
        let r = estimate_radius(&t, &summary.final_point, vc.delta_max, vc.directions, exp.config.seed)?;
        Some(RadiusCheck {
            center: summary.final_point.clone(),
            radius: r.radius,
            directions: r.directions,
        })
    } else {
        None
    };

    let prox = if exp.config.algorithm.name == AlgorithmName::Ppa && exp.dim() <= 2 {
        vec![prox_check(exp, &x0, &vc)?, prox_check(exp, &summary.final_point, &vc)?]
    } else {
        Vec::new()
    };

    let passed = inequality.passed && classification.passed && prox.iter().all(|p| p.passed);
    Ok(VerifyReport {
        name: exp.config.name.clone(),
        inequality,
        classification,
        radius,
        prox,
        passed,
    })
}
