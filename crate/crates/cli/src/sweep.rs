//! The `sweep` subcommand: runs over a grid of starting points and counts
//! basin membership.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unionavg::ops::FixedClass;
use unionavg::solvers::TerminalStatus;
use unionavg::Vector;

use crate::config::SweepConfig;
use crate::error::CliError;
use crate::experiment::Experiment;
use crate::trace::Summary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Basin {
    pub representative: Vector,
    pub class: FixedClass,
    pub count: usize,
    /// Indices of the starting points in grid order.
    pub starts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub name: String,
    pub runs: usize,
    pub converged: usize,
    pub max_iters: usize,
    pub diverged: usize,
    pub basins: Vec<Basin>,
}

/// Starting points of the sweep grid; the last axis varies fastest.
pub fn grid_points(sweep: &SweepConfig, dim: usize) -> Result<Vec<Vector>, CliError> {
    if sweep.lo.len() != dim || sweep.hi.len() != dim || sweep.points.len() != dim {
        return Err(CliError::field("sweep", format!("lo, hi and points need {dim} entries each")));
    }
    if sweep.points.contains(&0) {
        return Err(CliError::field("sweep.points", "must be positive"));
    }
    let total: usize = sweep.points.iter().product();
    let axis = |k: usize, j: usize| {
        let n = sweep.points[k];
        if n == 1 {
            sweep.lo[k]
        } else {
            sweep.lo[k] + (sweep.hi[k] - sweep.lo[k]) * j as f64 / (n - 1) as f64
        }
    };
    (0..total)
        .map(|mut flat| {
            let mut x = vec![0.0; dim];
            for k in (0..dim).rev() {
                x[k] = axis(k, flat % sweep.points[k]);
                flat /= sweep.points[k];
            }
            Vector::new(x).map_err(|e| CliError::field("sweep", e))
        })
        .collect()
}

/// Groups converged runs by final point, in start order.
pub fn basins(summaries: &[Summary], tol: f64) -> Vec<Basin> {
    let mut out: Vec<Basin> = Vec::new();
    for (k, s) in summaries.iter().enumerate() {
        if s.status != TerminalStatus::Converged {
            continue;
        }
        let class = s.classification.class;
        match out
            .iter_mut()
            .find(|b| b.class == class && b.representative.dist(&s.final_point) <= tol)
        {
            Some(b) => {
                b.count += 1;
                b.starts.push(k);
            }
            None => out.push(Basin {
                representative: s.final_point.clone(),
                class,
                count: 1,
                starts: vec![k],
            }),
        }
    }
    out
}

/// Runs every grid start in parallel, each writing its own trace under
/// `dir`, and reduces the summaries in grid order.
pub fn sweep(exp: &Experiment, dir: &Path) -> Result<SweepSummary, CliError> {
    let cfg = exp
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::field("sweep", "missing [sweep] table"))?;
    let starts = grid_points(cfg, exp.dim())?;
    let summaries = starts
        .par_iter()
        .enumerate()
        .map(|(k, x0)| exp.run_to(x0, &dir.join(format!("{k:05}.trace.jsonl"))))
        .collect::<Result<Vec<_>, CliError>>()?;
    let count = |st: TerminalStatus| summaries.iter().filter(|s| s.status == st).count();
    Ok(SweepSummary {
        name: exp.config.name.clone(),
        runs: summaries.len(),
        converged: count(TerminalStatus::Converged),
        max_iters: count(TerminalStatus::MaxIters),
        diverged: count(TerminalStatus::DivergedGuard),
        basins: basins(&summaries, cfg.basin_tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_row_major() {
        let cfg = SweepConfig {
            lo: vec![0.0, 10.0],
            hi: vec![1.0, 20.0],
            points: vec![2, 3],
            basin_tol: 1e-6,
        };
        let pts = grid_points(&cfg, 2).unwrap();
        let flat: Vec<Vec<f64>> = pts.into_iter().map(|v| v.into_vec()).collect();
        assert_eq!(
            flat,
            vec![
                vec![0.0, 10.0],
                vec![0.0, 15.0],
                vec![0.0, 20.0],
                vec![1.0, 10.0],
                vec![1.0, 15.0],
                vec![1.0, 20.0]
            ]
        );
        assert!(grid_points(&cfg, 3).is_err());
    }
}
