//! Averagedness constants and the closure formulas for unions, convex
//! combinations, compositions and relaxations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Averagedness constant `alpha` in `(0, 1]`.
///
/// `alpha < 1` means alpha-averaged nonexpansive. The value `1` is a sentinel
/// for "nonexpansive only".
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub const NONEXPANSIVE: Alpha = Alpha(1.0);
    pub const FIRM: Alpha = Alpha(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::param("alpha", format!("{value} is not in (0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_averaged(self) -> bool {
        self.0 < 1.0
    }

    /// Upper end of the admissible relaxation window `(0, 1/alpha]`.
    pub fn max_relaxation(self) -> f64 {
        1.0 / self.0
    }

    /// `(1 - alpha) / alpha`, the weight on the residual term of the
    /// averagedness inequality. Zero for the nonexpansive sentinel.
    pub fn residual_weight(self) -> f64 {
        if self.is_averaged() {
            (1.0 - self.0) / self.0
        } else {
            0.0
        }
    }

    /// Constant of a union: the largest constant of its members.
    pub fn union(alphas: &[Alpha]) -> Result<Alpha> {
        alphas
            .iter()
            .copied()
            .reduce(|a, b| if b.0 > a.0 { b } else { a })
            .ok_or(Error::Empty("union of zero operators"))
    }

    /// Constant of `sum_j w_j T_j` (weights positive, summing to one):
    /// `sum_j w_j alpha_j`, or nonexpansive if any member is.
    pub fn convex_combination(alphas: &[Alpha], weights: &[f64]) -> Result<Alpha> {
        if alphas.is_empty() {
            return Err(Error::Empty("convex combination of zero operators"));
        }
        if alphas.len() != weights.len() {
            return Err(Error::param(
                "weights",
                format!("{} weights for {} operators", weights.len(), alphas.len()),
            ));
        }
        validate_weights(weights)?;
        if alphas.iter().any(|a| !a.is_averaged()) {
            return Ok(Alpha::NONEXPANSIVE);
        }
        let a: f64 = alphas.iter().zip(weights).map(|(a, w)| w * a.0).sum();
        Ok(Alpha(a.min(1.0)))
    }

    /// Constant of `T_m o ... o T_1`:
    /// `(1 + (sum_j alpha_j / (1 - alpha_j))^-1)^-1`, or nonexpansive if any
    /// member is.
    pub fn composition(alphas: &[Alpha]) -> Result<Alpha> {
        if alphas.is_empty() {
            return Err(Error::Empty("composition of zero operators"));
        }
        if alphas.iter().any(|a| !a.is_averaged()) {
            return Ok(Alpha::NONEXPANSIVE);
        }
        let s: f64 = alphas.iter().map(|a| a.0 / (1.0 - a.0)).sum();
        Ok(Alpha(1.0 / (1.0 + 1.0 / s)))
    }

    /// Constant of `(1 - lambda) Id + lambda T` for `lambda` in `(0, 1/alpha]`.
    ///
    /// Writing `T = (1 - alpha) Id + alpha R` gives `lambda * alpha`; reaching
    /// `1` means only nonexpansiveness of `R` survives.
    pub fn relaxed(self, lambda: f64) -> Result<Alpha> {
        if !(lambda.is_finite() && lambda > 0.0 && lambda <= self.max_relaxation() * (1.0 + 1e-15)) {
            return Err(Error::param(
                "lambda",
                format!("{lambda} is not in (0, {}]", self.max_relaxation()),
            ));
        }
        Ok(Alpha((lambda * self.0).min(1.0)))
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

pub(crate) const WEIGHT_SUM_TOL: f64 = 1e-12;

pub(crate) fn validate_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::param("weights", format!("weight {w} is not positive")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::param("weights", format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}
