use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minconvex::piece::check_gamma;
use crate::minconvex::{ConvexPiece, ExtReal};
use crate::ops::{FixedClass, FixedPointReport, UnionMap, DEFAULT_TIE_TOL};
use crate::vector::Vector;

/// `f(x) = min_i f_i(x)` over finitely many convex pieces.
#[derive(Debug, Clone)]
pub struct MinConvexFn {
    pieces: Vec<ConvexPiece>,
    dim: usize,
}

/// Fixed-point classification of a point for `prox_{gamma f}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxClassification {
    pub report: FixedPointReport,
    /// `f(x) - envelope(x)`, or `None` when `f(x) = +inf`.
    pub envelope_gap: Option<f64>,
    /// Whether the envelope criterion (`gap <= tol`, false when `f(x) = +inf`)
    /// agrees with the piecewise classification on "fixed or strong-fixed".
    pub consistent: bool,
}

impl ProxClassification {
    pub fn class(&self) -> FixedClass {
        self.report.class
    }
}

/// Which selector [`MinConvexFn::osc_probe`] samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OscSelector {
    /// `{i : f_i(x) <= f(x) + tie_tol}`, only defined where `f` is finite.
    Value { tie_tol: f64 },
    /// [`MinConvexFn::active_selector`] for the given step.
    Envelope { gamma: f64, tie_tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscReport {
    pub center_active: Vec<usize>,
    /// Samples where the selector was evaluated.
    pub checked: usize,
    /// Samples skipped because `f` was infinite there.
    pub skipped: usize,
    pub passed: bool,
    pub counterexample: Option<(Vector, Vec<usize>)>,
}

impl MinConvexFn {
    pub fn new(pieces: Vec<ConvexPiece>) -> Result<Self> {
        let first = pieces.first().ok_or(Error::Empty("min-convex function with no pieces"))?;
        let dim = first.dim();
        if let Some(p) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let origin = Vector::zeros(dim);
        let proper = pieces.iter().any(|p| {
            p.value(&p.prox(1.0, &origin)).is_finite()
                || matches!(p.kind(), crate::minconvex::PieceKind::Indicator(_))
        });
        if !proper {
            return Err(Error::InfiniteValue(
                "no piece takes a finite value at its own prox point".into(),
            ));
        }
        Ok(MinConvexFn { pieces, dim })
    }

    pub fn single(piece: ConvexPiece) -> Self {
        Self::new(vec![piece]).expect("a single analytic piece is proper")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[ConvexPiece] {
        &self.pieces
    }

    pub fn piece_values(&self, x: &Vector) -> Result<Vec<ExtReal>> {
        x.check_dim(self.dim)?;
        Ok(self.pieces.iter().map(|p| p.value(x)).collect())
    }

    pub fn value(&self, x: &Vector) -> Result<ExtReal> {
        Ok(self
            .piece_values(x)?
            .into_iter()
            .fold(ExtReal::PosInf, ExtReal::min))
    }

    /// Indices `i` with `f_i(x) <= f(x) + tol`; empty when `f(x) = +inf`.
    pub fn value_active(&self, x: &Vector, tol: f64) -> Result<Vec<usize>> {
        let vals = self.piece_values(x)?;
        let Some(m) = vals.iter().fold(ExtReal::PosInf, |a, &b| a.min(b)).finite() else {
            return Ok(Vec::new());
        };
        Ok(vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.finite().is_some_and(|v| v <= m + tol))
            .map(|(i, _)| i)
            .collect())
    }

    pub fn piece_envelopes(&self, gamma: f64, x: &Vector) -> Result<Vec<f64>> {
        check_gamma(gamma)?;
        x.check_dim(self.dim)?;
        Ok(self.pieces.iter().map(|p| p.envelope(gamma, x)).collect())
    }

    /// Moreau envelope `min_i env_{gamma f_i}(x)`.
    pub fn envelope(&self, gamma: f64, x: &Vector) -> Result<f64> {
        Ok(self
            .piece_envelopes(gamma, x)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// Pieces whose envelope is within `tie_tol` of the smallest one.
    pub fn active_selector(&self, gamma: f64, x: &Vector, tie_tol: f64) -> Result<Vec<usize>> {
        let env = self.piece_envelopes(gamma, x)?;
        Ok(envelope_active(&env, tie_tol))
    }

    /// `prox_{gamma f}` as a union 1/2-averaged map: piece `i` is
    /// `prox_{gamma f_i}`, selected where its envelope is minimal.
    pub fn prox_union(&self, gamma: f64, tie_tol: f64) -> Result<UnionMap> {
        check_gamma(gamma)?;
        if tie_tol.is_nan() || tie_tol < 0.0 {
            return Err(Error::param("tie_tol", "must be nonnegative"));
        }
        let maps = self
            .pieces
            .iter()
            .map(|p| p.prox_map(gamma))
            .collect::<Result<Vec<_>>>()?;
        let pieces = self.pieces.clone();
        UnionMap::new(maps, move |x| {
            let env: Vec<f64> = pieces.iter().map(|p| p.envelope(gamma, x)).collect();
            envelope_active(&env, tie_tol)
        })
    }

    /// Classifies `x` as a fixed point of `prox_{gamma f}` from the active
    /// pieces, and cross-checks against `envelope(x) = f(x)`.
    pub fn classify_point(&self, gamma: f64, x: &Vector, tol: f64) -> Result<ProxClassification> {
        let report = self.prox_union(gamma, DEFAULT_TIE_TOL)?.classify(x, tol)?;
        let envelope_gap = self
            .value(x)?
            .finite()
            .map(|fx| fx - self.envelope(gamma, x).expect("gamma checked"));
        let env_fixed = envelope_gap.is_some_and(|g| g.abs() <= tol);
        let consistent = env_fixed == (report.class != FixedClass::NotFixed);
        Ok(ProxClassification {
            report,
            envelope_gap,
            consistent,
        })
    }

    /// Whether `x` is a local minimum: every piece attaining `f(x)` (within
    /// `tol`) is minimized at `x`, tested as `prox_{f_i}(x) = x`.
    pub fn is_local_min(&self, x: &Vector, tol: f64) -> Result<bool> {
        let active = self.value_active(x, tol)?;
        if active.is_empty() {
            return Err(Error::InfiniteValue(format!("f(x) = +inf at {x:?}")));
        }
        Ok(active
            .into_iter()
            .all(|i| self.pieces[i].prox(1.0, x).dist(x) <= tol))
    }

    /// Samples the chosen selector uniformly in the ball of `radius` around
    /// `x` and reports whether it only ever shrinks relative to `x`.
    pub fn osc_probe(
        &self,
        x: &Vector,
        radius: f64,
        samples: usize,
        selector: OscSelector,
        seed: u64,
    ) -> Result<OscReport> {
        x.check_dim(self.dim)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param("radius", "must be positive"));
        }
        let select = |y: &Vector| -> Result<Vec<usize>> {
            match selector {
                OscSelector::Value { tie_tol } => self.value_active(y, tie_tol),
                OscSelector::Envelope { gamma, tie_tol } => self.active_selector(gamma, y, tie_tol),
            }
        };
        let center_active = select(x)?;
        if center_active.is_empty() {
            return Err(Error::InfiniteValue(format!(
                "value selector undefined at {x:?} where f = +inf"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = OscReport {
            center_active,
            checked: 0,
            skipped: 0,
            passed: true,
            counterexample: None,
        };
        for _ in 0..samples {
            let y = crate::oracle::sample_ball(&mut rng, x, radius);
            let act = select(&y)?;
            if act.is_empty() {
                report.skipped += 1;
                continue;
            }
            report.checked += 1;
            if report.passed && !act.iter().all(|i| report.center_active.contains(i)) {
                report.passed = false;
                report.counterexample = Some((y, act));
            }
        }
        Ok(report)
    }
}

fn envelope_active(env: &[f64], tie_tol: f64) -> Vec<usize> {
    let m = env.iter().copied().fold(f64::INFINITY, f64::min);
    (0..env.len()).filter(|&i| env[i] <= m + tie_tol).collect()
}
