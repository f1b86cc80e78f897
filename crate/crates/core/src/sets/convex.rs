use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ops::{Alpha, AveragedMap};
use crate::vector::Vector;

/// Default membership tolerance for diagnostics.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Closed convex sets with closed-form projections.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Whole { dim: usize },
    Singleton(Vector),
    /// `lo <= x <= hi` componentwise; bounds may be infinite.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vector, radius: f64 },
    /// `{x : <normal, x> <= offset}`
    Halfspace { normal: Vector, offset: f64 },
    Affine(AffineSubspace),
    /// Vectors vanishing outside `support` (sorted, strictly increasing).
    Coordinate { dim: usize, support: Vec<usize> },
}

/// Solution set of `A x = b`, stored as a particular solution plus an
/// orthonormal basis of the row space of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    dim: usize,
    /// `n x r`, orthonormal columns spanning the row space of `A`.
    normals: DMatrix<f64>,
    /// The minimum-norm solution.
    base: Vector,
}

impl AffineSubspace {
    /// `rows` are the rows of `A`. Redundant rows are allowed as long as the
    /// system is consistent.
    pub fn new(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Empty("affine constraint without rows"));
        }
        if rhs.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: rhs.len(),
            });
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::param("rows", "zero-length row"));
        }
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
        }
        if rows.iter().flatten().chain(rhs).any(|v| !v.is_finite()) {
            return Err(Error::param("rows", "entries must be finite"));
        }
        let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        let b = DVector::from_column_slice(rhs);
        let qr = a.transpose().col_piv_qr();
        let r = qr.r();
        let scale = r.diagonal().iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::param("rows", "constraint matrix is zero"));
        }
        let rank = r
            .diagonal()
            .iter()
            .take_while(|v| v.abs() > 1e-12 * scale * (n.max(m) as f64))
            .count();
        let normals = qr.q().columns(0, rank).into_owned();
        // A x = b with x = Q y: (A Q) y = b, A Q has full column rank.
        let aq = &a * &normals;
        let qr2 = aq.clone().qr();
        let rhs2 = qr2.q().transpose() * &b;
        let y = qr2
            .r()
            .solve_upper_triangular(&rhs2)
            .ok_or_else(|| Error::param("rows", "singular reduced system"))?;
        let residual = (&aq * &y - &b).norm();
        if residual > 1e-9 * (1.0 + b.norm()) {
            return Err(Error::param(
                "rhs",
                format!("inconsistent system, least-squares residual {residual:.3e}"),
            ));
        }
        let base = Vector::new((&normals * y).iter().copied().collect())?;
        Ok(AffineSubspace {
            dim: n,
            normals,
            base,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn codim(&self) -> usize {
        self.normals.ncols()
    }

    pub fn base_point(&self) -> &Vector {
        &self.base
    }

    pub fn project(&self, x: &Vector) -> Vector {
        let d = x.sub(&self.base).to_dvector();
        let normal_part = &self.normals * (self.normals.transpose() * &d);
        x.sub(&Vector::from_dvector(&normal_part))
    }
}

impl ConvexSet {
    pub fn singleton(point: Vector) -> Self {
        ConvexSet::Singleton(point)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::Empty("box bounds"));
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (l, h) in lo.iter().zip(&hi) {
            if l.is_nan() || h.is_nan() || l > h || *l == f64::INFINITY || *h == f64::NEG_INFINITY {
                return Err(Error::param("box", format!("empty interval [{l}, {h}]")));
            }
        }
        Ok(ConvexSet::Box { lo, hi })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::param("radius", format!("{radius} is not a valid radius")));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        if normal.norm_sq() == 0.0 {
            return Err(Error::param("normal", "halfspace normal must be nonzero"));
        }
        if !offset.is_finite() {
            return Err(Error::param("offset", "must be finite"));
        }
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    /// Solution set of `A x = b` with `A` given by rows.
    pub fn affine(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Self> {
        Ok(ConvexSet::Affine(AffineSubspace::new(rows, rhs)?))
    }

    /// The line (or subspace) spanned by coordinate axes in `support`.
    pub fn coordinate(dim: usize, mut support: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be >= 1"));
        }
        support.sort_unstable();
        support.dedup();
        if let Some(&bad) = support.iter().find(|&&i| i >= dim) {
            return Err(Error::param("support", format!("index {bad} out of range for dim {dim}")));
        }
        Ok(ConvexSet::Coordinate { dim, support })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Whole { dim } | ConvexSet::Coordinate { dim, .. } => *dim,
            ConvexSet::Singleton(p) => p.dim(),
            ConvexSet::Box { lo, .. } => lo.len(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Halfspace { normal, .. } => normal.dim(),
            ConvexSet::Affine(a) => a.dim(),
        }
    }

    pub fn project(&self, x: &Vector) -> Vector {
        match self {
            ConvexSet::Whole { .. } => x.clone(),
            ConvexSet::Singleton(p) => p.clone(),
            ConvexSet::Box { lo, hi } => {
                let mut i = 0;
                x.map(|v| {
                    let c = v.clamp(lo[i], hi[i]);
                    i += 1;
                    c
                })
            }
            ConvexSet::Ball { center, radius } => {
                let d = x.dist(center);
                if d <= *radius {
                    x.clone()
                } else {
                    center.lincomb(1.0 - radius / d, x, radius / d)
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.axpy(-excess / normal.norm_sq(), normal)
                }
            }
            ConvexSet::Affine(a) => a.project(x),
            ConvexSet::Coordinate { support, .. } => {
                let mut out = vec![0.0; x.dim()];
                for &i in support {
                    out[i] = x[i];
                }
                Vector::from_finite(out)
            }
        }
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        match self {
            ConvexSet::Coordinate { support, .. } => {
                let mut inside = support.iter().peekable();
                let mut s = 0.0;
                for (i, v) in x.iter().enumerate() {
                    if inside.peek() == Some(&&i) {
                        inside.next();
                    } else {
                        s += v * v;
                    }
                }
                s.sqrt()
            }
            _ => x.dist(&self.project(x)),
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// A point of the set.
    pub fn witness(&self) -> Vector {
        match self {
            ConvexSet::Singleton(p) => p.clone(),
            ConvexSet::Ball { center, .. } => center.clone(),
            ConvexSet::Affine(a) => a.base_point().clone(),
            other => other.project(&Vector::zeros(other.dim())),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexSet::Whole { .. } => "whole",
            ConvexSet::Singleton(_) => "singleton",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::Affine(_) => "affine",
            ConvexSet::Coordinate { .. } => "coordinate",
        }
    }
}

/// One closed convex piece of a union-convex set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSetPiece {
    pub set: ConvexSet,
    pub label: String,
    witness: Vector,
}

impl ConvexSetPiece {
    pub fn new(set: ConvexSet, label: impl Into<String>) -> Self {
        let witness = set.witness();
        ConvexSetPiece {
            set,
            label: label.into(),
            witness,
        }
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn project(&self, x: &Vector) -> Vector {
        self.set.project(x)
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        self.set.distance(x)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.set.contains(x, tol)
    }

    pub fn witness(&self) -> &Vector {
        &self.witness
    }

    /// The projector as a firmly nonexpansive map.
    pub fn projector(&self) -> AveragedMap {
        let set = self.set.clone();
        AveragedMap::new(self.dim(), Alpha::FIRM, format!("P[{}]", self.label), move |x| {
            set.project(x)
        })
        .expect("sets have dim >= 1")
    }
}

impl From<ConvexSet> for ConvexSetPiece {
    fn from(set: ConvexSet) -> Self {
        let label = set.kind().to_string();
        ConvexSetPiece::new(set, label)
    }
}
