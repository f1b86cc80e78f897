use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::UnionMap;
use crate::vector::Vector;

/// Axis-aligned sampling box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Region {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn around(center: &Vector, half_width: f64) -> Self {
        Region {
            lo: center.iter().map(|c| c - half_width).collect(),
            hi: center.iter().map(|c| c + half_width).collect(),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| l + (h - l) * rng.random::<f64>())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub alpha: f64,
    pub pairs: usize,
    /// Largest signed violation for each piece, in piece order.
    pub per_piece: Vec<f64>,
    pub max_violation: f64,
}

impl InequalityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Samples `pairs` point pairs from `region` and evaluates, for every piece
/// `T_i` of `t`,
/// `|T_i x - T_i y|^2 + (1-alpha)/alpha |(x - T_i x) - (y - T_i y)|^2 - |x - y|^2`
/// (or `|T_i x - T_i y| - |x - y|` when `alpha = 1`).
pub fn sample_inequality(t: &UnionMap, alpha: f64, region: &Region, pairs: usize, seed: u64) -> Result<InequalityReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")));
    }
    let d = t.dim();
    if region.lo.len() != d || region.hi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: region.lo.len(),
        });
    }
    if region.lo.iter().zip(&region.hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
        return Err(Error::param("region", "bounds must be finite with lo <= hi"));
    }
    let k = t.num_pieces();
    let mut per_piece = vec![f64::NEG_INFINITY; k];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let xs = region.sample(&mut rng);
        let ys = region.sample(&mut rng);
        let x = Vector::new(xs.clone())?;
        let y = Vector::new(ys.clone())?;
        let dxy = sq_dist(&xs, &ys);
        for (i, worst) in per_piece.iter_mut().enumerate() {
            let tx = t.apply_piece(i, &x)?;
            let ty = t.apply_piece(i, &y)?;
            let (tx, ty) = (tx.as_slice(), ty.as_slice());
            let v = if alpha < 1.0 {
                let rx: Vec<f64> = xs.iter().zip(tx).map(|(a, b)| a - b).collect();
                let ry: Vec<f64> = ys.iter().zip(ty).map(|(a, b)| a - b).collect();
                sq_dist(tx, ty) + (1.0 - alpha) / alpha * sq_dist(&rx, &ry) - dxy
            } else {
                sq_dist(tx, ty).sqrt() - dxy.sqrt()
            };
            *worst = worst.max(v);
        }
    }
    let max_violation = per_piece.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(InequalityReport {
        alpha,
        pairs,
        per_piece,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{compose, Alpha, AveragedMap, DEFAULT_TIE_TOL};
    use crate::sets::{project_union, sparsity_set, ConvexSet, UnionConvexSet};

    #[test]
    fn projectors_and_their_composition() {
        let a = project_union(&sparsity_set(3, 1).unwrap(), DEFAULT_TIE_TOL).unwrap();
        let b = project_union(
            &UnionConvexSet::convex(ConvexSet::affine(&[vec![1.0, 2.0, -1.0]], &[0.5]).unwrap()),
            DEFAULT_TIE_TOL,
        )
        .unwrap();
        let region = Region::cube(3, -2.0, 2.0);
        assert!(sample_inequality(&a, 0.5, &region, 500, 1).unwrap().passes(1e-10));
        assert!(sample_inequality(&b, 0.5, &region, 500, 1).unwrap().passes(1e-10));
        let ab = compose(&[a, b]).unwrap();
        assert!((ab.alpha().value() - 2.0 / 3.0).abs() < 1e-15);
        assert!(sample_inequality(&ab, 2.0 / 3.0, &region, 500, 1).unwrap().passes(1e-10));
    }

    #[test]
    fn doubling_is_flagged() {
        let double = UnionMap::single(AveragedMap::new(2, Alpha::FIRM, "2x", |x| x.scale(2.0)).unwrap());
        let r = sample_inequality(&double, 0.5, &Region::cube(2, -1.0, 1.0), 100, 4).unwrap();
        assert!(r.max_violation > 0.0);
        let again = sample_inequality(&double, 0.5, &Region::cube(2, -1.0, 1.0), 100, 4).unwrap();
        assert_eq!(r, again);
    }
}
