use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minconvex::{check_gamma, MinConvexFn};
use crate::vector::Vector;

/// Largest dimension the grid oracles accept.
pub const MAX_GRID_DIM: usize = 3;
/// Largest number of grid points per oracle call.
pub const MAX_GRID_EVALS: usize = 10_000_000;

/// Tensor grid with `points` equispaced nodes per axis, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: usize,
    /// Relative tolerance on the objective for a node to count as minimal.
    #[serde(default = "default_value_tol")]
    pub value_tol: f64,
}

fn default_value_tol() -> f64 {
    1e-9
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points: usize) -> Result<Self> {
        let g = GridSpec {
            lo,
            hi,
            points,
            value_tol: default_value_tol(),
        };
        g.validate()?;
        Ok(g)
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64, points: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], points)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.lo.len();
        if d == 0 || d > MAX_GRID_DIM {
            return Err(Error::Oracle(format!("grid dimension {d} not in 1..={MAX_GRID_DIM}")));
        }
        if self.hi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.hi.len(),
            });
        }
        if self.points < 3 {
            return Err(Error::Oracle(format!("{} points per axis; need at least 3", self.points)));
        }
        for (l, h) in self.lo.iter().zip(&self.hi) {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::Oracle(format!("bad axis bounds [{l}, {h}]")));
            }
        }
        match self.points.checked_pow(d as u32) {
            Some(n) if n <= MAX_GRID_EVALS => Ok(()),
            _ => Err(Error::Oracle(format!(
                "{}^{d} grid points exceed the cap of {MAX_GRID_EVALS}",
                self.points
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.points - 1) as f64
    }

    /// Diameter of one grid cell.
    pub fn cell_diameter(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn coord(&self, axis: usize, k: usize) -> f64 {
        if k == self.points - 1 {
            self.hi[axis]
        } else {
            self.lo[axis] + (self.hi[axis] - self.lo[axis]) * k as f64 / (self.points - 1) as f64
        }
    }

    /// Node with flat index `flat` (first axis varies slowest) and whether it
    /// lies on the boundary of the box.
    pub fn node(&self, flat: usize) -> (Vector, bool) {
        let d = self.dim();
        let mut ks = vec![0usize; d];
        let mut rest = flat;
        for a in (0..d).rev() {
            ks[a] = rest % self.points;
            rest /= self.points;
        }
        let boundary = ks.iter().any(|&k| k == 0 || k == self.points - 1);
        let v = ks.iter().enumerate().map(|(a, &k)| self.coord(a, k)).collect();
        (Vector::new(v).expect("grid nodes are finite"), boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridProx {
    /// Grid nodes whose objective is minimal within the value tolerance.
    pub points: Vec<Vector>,
    pub min_objective: f64,
    pub cell_diameter: f64,
    /// Some minimizing node lies on the grid boundary: the true minimizer may
    /// be outside the grid.
    pub boundary: bool,
    pub evaluations: usize,
}

/// Minimizes `y -> f(y) + |x - y|^2 / (2 gamma)` over the grid using only
/// values of `f`.
pub fn brute_force_prox(f: &MinConvexFn, gamma: f64, x: &Vector, grid: &GridSpec) -> Result<GridProx> {
    check_gamma(gamma)?;
    grid.validate()?;
    x.check_dim(f.dim())?;
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: grid.dim(),
        });
    }
    let n = grid.len();
    let mut objective = Vec::with_capacity(n);
    for k in 0..n {
        let (y, _) = grid.node(k);
        let v = f.value(&y)?.to_f64();
        objective.push(v + x.dist_sq(&y) / (2.0 * gamma));
    }
    let min = objective.iter().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::Oracle("f is +inf on every grid node".into()));
    }
    let cutoff = min + grid.value_tol * min.abs().max(1.0);
    let mut points = Vec::new();
    let mut boundary = false;
    for (k, &v) in objective.iter().enumerate() {
        if v <= cutoff {
            let (y, on_edge) = grid.node(k);
            boundary |= on_edge;
            points.push(y);
        }
    }
    Ok(GridProx {
        points,
        min_objective: min,
        cell_diameter: grid.cell_diameter(),
        boundary,
        evaluations: n,
    })
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Vector], b: &[Vector]) -> f64 {
    let one_way = |p: &[Vector], q: &[Vector]| {
        p.iter()
            .map(|u| q.iter().map(|v| u.dist(v)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minconvex::{ConvexPiece, Quadratic};
    use crate::sets::ConvexSet;
    use crate::vector;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::cube(4, -1.0, 1.0, 3).is_err());
        assert!(GridSpec::cube(1, -1.0, 1.0, 2).is_err());
        assert!(GridSpec::cube(1, 1.0, 1.0, 5).is_err());
        assert!(GridSpec::cube(3, -1.0, 1.0, 1000).is_err());
        let g = GridSpec::cube(2, -1.0, 1.0, 3).unwrap();
        assert_eq!(g.node(0), (vector![-1, -1], true));
        assert_eq!(g.node(4), (vector![0, 0], false));
        assert_eq!(g.node(5), (vector![0, 1], true));
    }

    #[test]
    fn two_points_tie() {
        let f = MinConvexFn::new(vec![
            ConvexPiece::indicator(ConvexSet::singleton(vector![0])),
            ConvexPiece::indicator(ConvexSet::singleton(vector![2])),
        ])
        .unwrap();
        let grid = GridSpec::cube(1, -1.0, 3.0, 201).unwrap();
        let r = brute_force_prox(&f, 1.0, &vector![1], &grid).unwrap();
        assert_eq!(r.points.len(), 2);
        assert!(hausdorff(&r.points, &[vector![0], vector![2]]) < 1e-12);
        assert!(!r.boundary);
    }

    #[test]
    fn half_square() {
        let f = MinConvexFn::single(ConvexPiece::quadratic(Quadratic::diagonal(&[1.0], &[0.0], 0.0).unwrap()));
        let grid = GridSpec::cube(1, -4.0, 4.0, 801).unwrap();
        let r = brute_force_prox(&f, 1.0, &vector![3], &grid).unwrap();
        assert!(hausdorff(&r.points, &[vector![1.5]]) <= r.cell_diameter);
    }

    #[test]
    fn far_point_flags_boundary_and_empty_domain_errors() {
        let f = MinConvexFn::single(ConvexPiece::l1(1, 0.1).unwrap());
        let grid = GridSpec::cube(1, -1.0, 1.0, 21).unwrap();
        let r = brute_force_prox(&f, 1.0, &vector![50], &grid).unwrap();
        assert!(r.boundary);
        let off = MinConvexFn::single(ConvexPiece::indicator(ConvexSet::singleton(vector![5])));
        assert!(matches!(brute_force_prox(&off, 1.0, &vector![0], &grid), Err(Error::Oracle(_))));
    }
}
