use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::minconvex::{ExtReal, Quadratic};
use crate::ops::{Alpha, AveragedMap};
use crate::sets::{ConvexSet, MEMBERSHIP_TOL};
use crate::vector::Vector;

pub type ValueFn = dyn Fn(&Vector) -> ExtReal + Send + Sync;
pub type ProxFn = dyn Fn(f64, &Vector) -> Vector + Send + Sync;

/// The analytic families of convex pieces.
#[derive(Clone)]
pub enum PieceKind {
    /// `0` on the set (within the membership tolerance), `+inf` off it.
    Indicator(ConvexSet),
    Quadratic(Quadratic),
    /// `weight * |x|_1`
    L1 { weight: f64 },
    /// `weight * |x|_2`
    L2 { weight: f64 },
    /// User-supplied value and prox oracles. The prox must be the exact
    /// proximity operator of a proper lsc convex function with that value.
    Custom { value: Arc<ValueFn>, prox: Arc<ProxFn> },
}

/// A proper, lower semicontinuous convex function with a closed-form prox.
#[derive(Clone)]
pub struct ConvexPiece {
    kind: PieceKind,
    dim: usize,
    label: String,
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::param("gamma", format!("{gamma} is not a positive step size")))
    }
}

impl ConvexPiece {
    pub fn indicator(set: ConvexSet) -> Self {
        let label = format!("i[{}]", set.kind());
        Self::indicator_labeled(set, label)
    }

    pub fn indicator_labeled(set: ConvexSet, label: impl Into<String>) -> Self {
        ConvexPiece {
            dim: set.dim(),
            kind: PieceKind::Indicator(set),
            label: label.into(),
        }
    }

    pub fn quadratic(q: Quadratic) -> Self {
        ConvexPiece {
            dim: q.dim(),
            kind: PieceKind::Quadratic(q),
            label: "quadratic".into(),
        }
    }

    pub fn l1(dim: usize, weight: f64) -> Result<Self> {
        Self::norm_piece(dim, weight, true)
    }

    pub fn l2(dim: usize, weight: f64) -> Result<Self> {
        Self::norm_piece(dim, weight, false)
    }

    fn norm_piece(dim: usize, weight: f64, l1: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be >= 1"));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::param("weight", format!("{weight} must be finite and >= 0")));
        }
        let (kind, label) = if l1 {
            (PieceKind::L1 { weight }, "l1")
        } else {
            (PieceKind::L2 { weight }, "l2")
        };
        Ok(ConvexPiece {
            kind,
            dim,
            label: label.into(),
        })
    }

    pub fn custom(
        dim: usize,
        label: impl Into<String>,
        value: impl Fn(&Vector) -> ExtReal + Send + Sync + 'static,
        prox: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be >= 1"));
        }
        Ok(ConvexPiece {
            kind: PieceKind::Custom {
                value: Arc::new(value),
                prox: Arc::new(prox),
            },
            dim,
            label: label.into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> &PieceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: &Vector) -> ExtReal {
        match &self.kind {
            PieceKind::Indicator(set) => {
                if set.contains(x, MEMBERSHIP_TOL) {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PosInf
                }
            }
            PieceKind::Quadratic(q) => ExtReal::Finite(q.value(x)),
            PieceKind::L1 { weight } => ExtReal::Finite(weight * x.iter().map(|v| v.abs()).sum::<f64>()),
            PieceKind::L2 { weight } => ExtReal::Finite(weight * x.norm()),
            PieceKind::Custom { value, .. } => value(x),
        }
    }

    /// `prox_{gamma f_i}(x)`. `gamma` is assumed positive.
    pub fn prox(&self, gamma: f64, x: &Vector) -> Vector {
        match &self.kind {
            PieceKind::Indicator(set) => set.project(x),
            PieceKind::Quadratic(q) => q.prox(gamma, x),
            PieceKind::L1 { weight } => {
                let t = gamma * weight;
                x.map(|v| v.signum() * (v.abs() - t).max(0.0))
            }
            PieceKind::L2 { weight } => {
                let n = x.norm();
                let t = gamma * weight;
                if n <= t {
                    Vector::zeros(x.dim())
                } else {
                    x.scale(1.0 - t / n)
                }
            }
            PieceKind::Custom { prox, .. } => prox(gamma, x),
        }
    }

    /// The piece value at its own prox point. Indicators report `0` here
    /// since the projection lies in the set by construction.
    fn value_at_prox(&self, p: &Vector) -> f64 {
        match &self.kind {
            PieceKind::Indicator(_) => 0.0,
            _ => self.value(p).to_f64(),
        }
    }

    /// Moreau envelope `f_i(p) + |x - p|^2 / (2 gamma)` with `p` the prox point.
    pub fn envelope(&self, gamma: f64, x: &Vector) -> f64 {
        let p = self.prox(gamma, x);
        self.value_at_prox(&p) + x.dist_sq(&p) / (2.0 * gamma)
    }

    /// `(prox point, envelope value)` computed from a single prox call.
    pub fn prox_and_envelope(&self, gamma: f64, x: &Vector) -> (Vector, f64) {
        let p = self.prox(gamma, x);
        let e = self.value_at_prox(&p) + x.dist_sq(&p) / (2.0 * gamma);
        (p, e)
    }

    /// The prox as a firmly nonexpansive map for a fixed step.
    pub fn prox_map(&self, gamma: f64) -> Result<AveragedMap> {
        check_gamma(gamma)?;
        let piece = self.clone();
        AveragedMap::new(self.dim, Alpha::FIRM, format!("prox[{}]", self.label), move |x| {
            piece.prox(gamma, x)
        })
    }
}

impl fmt::Debug for ConvexPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            PieceKind::Indicator(s) => format!("indicator({})", s.kind()),
            PieceKind::Quadratic(_) => "quadratic".into(),
            PieceKind::L1 { weight } => format!("l1({weight})"),
            PieceKind::L2 { weight } => format!("l2({weight})"),
            PieceKind::Custom { .. } => "custom".into(),
        };
        f.debug_struct("ConvexPiece")
            .field("label", &self.label)
            .field("kind", &kind)
            .field("dim", &self.dim)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn soft_and_block_thresholds() {
        let l1 = ConvexPiece::l1(3, 1.0).unwrap();
        assert_eq!(l1.prox(0.5, &vector![2, -0.25, -1]), vector![1.5, 0, -0.5]);
        assert_eq!(l1.value(&vector![1, -2, 0]), ExtReal::Finite(3.0));
        let l2 = ConvexPiece::l2(2, 2.0).unwrap();
        assert!(l2.prox(1.0, &vector![3, 4]).dist(&vector![1.8, 2.4]) < 1e-15);
        assert_eq!(l2.prox(1.0, &vector![1, 1]), vector![0, 0]);
        assert!(ConvexPiece::l1(2, -1.0).is_err());
    }

    #[test]
    fn singleton_envelope_is_scaled_distance() {
        let c = vector![1, -1];
        let p = ConvexPiece::indicator(ConvexSet::singleton(c.clone()));
        let x = vector![4, 3];
        for gamma in [0.1, 1.0, 10.0] {
            let e = p.envelope(gamma, &x);
            assert!((e - x.dist_sq(&c) / (2.0 * gamma)).abs() < 1e-12);
        }
        assert_eq!(p.value(&vector![0, 0]), ExtReal::PosInf);
    }

    #[test]
    fn envelope_is_below_sampled_objective() {
        let pieces = vec![
            ConvexPiece::l1(2, 0.7).unwrap(),
            ConvexPiece::l2(2, 1.3).unwrap(),
            ConvexPiece::quadratic(Quadratic::new(&[vec![2.0, 0.5], vec![0.5, 1.0]], &[0.1, 0.0], 0.0).unwrap()),
        ];
        let x = vector![0.8, -1.7];
        for p in &pieces {
            for gamma in [0.1, 1.0, 10.0] {
                let e = p.envelope(gamma, &x);
                for k in 0..200 {
                    let t = k as f64 * 0.0314;
                    let y = vector![2.0 * t.cos(), 2.0 * (1.7 * t).sin()];
                    let obj = p.value(&y).to_f64() + x.dist_sq(&y) / (2.0 * gamma);
                    assert!(e <= obj + 1e-12, "{p:?} gamma={gamma}");
                }
            }
        }
    }
}
