use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::{Alpha, UnionMap};
use crate::vector::Vector;

/// Box `[center - half_width, center + half_width]` sampled uniformly in
/// pairs, with a fixed seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub center: Vector,
    pub half_width: f64,
    pub pairs: usize,
    pub seed: u64,
    pub tol: f64,
}

impl SampleSpec {
    pub fn new(center: Vector, half_width: f64, pairs: usize, seed: u64) -> Self {
        SampleSpec {
            center,
            half_width,
            pairs,
            seed,
            tol: 1e-9,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub(crate) fn sample_pairs(&self) -> Vec<(Vector, Vector)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let point = |rng: &mut ChaCha8Rng| {
            self.center
                .map(|c| c + self.half_width * (2.0 * rng.random::<f64>() - 1.0))
        };
        (0..self.pairs)
            .map(|_| {
                let x = point(&mut rng);
                let y = point(&mut rng);
                (x, y)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceCheck {
    pub index: usize,
    pub samples: usize,
    pub max_violation: f64,
    pub worst_pair: Option<(Vector, Vector)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedReport {
    pub alpha: f64,
    pub tol: f64,
    pub pieces: Vec<PieceCheck>,
    /// Largest violation over all pieces; `-inf` when nothing was sampled.
    pub max_violation: f64,
    pub passed: bool,
}

impl AveragedReport {
    pub fn failures(&self) -> impl Iterator<Item = &PieceCheck> {
        self.pieces.iter().filter(move |p| p.max_violation > self.tol)
    }
}

/// Signed violation of the averagedness inequality for one pair.
///
/// For `alpha < 1` this is
/// `|Tx-Ty|^2 + (1-alpha)/alpha |(x-Tx)-(y-Ty)|^2 - |x-y|^2`; for the
/// nonexpansive sentinel it is `|Tx-Ty| - |x-y|`.
pub fn averaged_violation(alpha: Alpha, x: &Vector, tx: &Vector, y: &Vector, ty: &Vector) -> f64 {
    if alpha.is_averaged() {
        let rx = x.sub(tx);
        let ry = y.sub(ty);
        tx.dist_sq(ty) + alpha.residual_weight() * rx.dist_sq(&ry) - x.dist_sq(y)
    } else {
        tx.dist(ty) - x.dist(y)
    }
}

/// Samples the averagedness inequality piece by piece.
///
/// For each pair `(x, y)`, every piece active at `x` or at `y` is applied at
/// both points with the same index. Pieces never active on the sample are
/// absent from the report.
pub fn check_averaged(t: &UnionMap, alpha: f64, spec: &SampleSpec) -> Result<AveragedReport> {
    let alpha = Alpha::new(alpha)?;
    spec.center.check_dim(t.dim())?;
    if !(spec.half_width.is_finite() && spec.half_width > 0.0) {
        return Err(Error::param("half_width", "must be positive and finite"));
    }
    let mut per_piece: Vec<Option<PieceCheck>> = vec![None; t.num_pieces()];
    for (x, y) in spec.sample_pairs() {
        let mut active = t.selector(&x)?;
        active.extend(t.selector(&y)?);
        active.sort_unstable();
        active.dedup();
        for i in active {
            let v = averaged_violation(alpha, &x, &t.apply_piece(i, &x)?, &y, &t.apply_piece(i, &y)?);
            let slot = per_piece[i].get_or_insert(PieceCheck {
                index: i,
                samples: 0,
                max_violation: f64::NEG_INFINITY,
                worst_pair: None,
            });
            slot.samples += 1;
            if v > slot.max_violation {
                slot.max_violation = v;
                slot.worst_pair = Some((x.clone(), y.clone()));
            }
        }
    }
    let pieces: Vec<PieceCheck> = per_piece.into_iter().flatten().collect();
    let max_violation = pieces
        .iter()
        .map(|p| p.max_violation)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(AveragedReport {
        alpha: alpha.value(),
        tol: spec.tol,
        passed: max_violation <= spec.tol,
        pieces,
        max_violation,
    })
}
