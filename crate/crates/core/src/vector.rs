use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the ambient space `R^n`. Entries are always finite.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("vector must have dimension >= 1"));
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(entries))
    }

    /// Builds a vector from entries known to be finite. Arithmetic on finite
    /// vectors can overflow, so debug builds still check.
    pub(crate) fn from_finite(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Vector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        Vector(vec![0.0; dim])
    }

    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Vector {
        self.map(|a| s * a)
    }

    /// `a * self + b * other`
    pub fn lincomb(&self, a: f64, other: &Vector, b: f64) -> Vector {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    /// `self + t * dir`
    pub fn axpy(&self, t: f64, dir: &Vector) -> Vector {
        self.zip_map(dir, |x, d| x + t * d)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Vector {
        Vector::from_finite(self.0.iter().map(|&a| f(a)).collect())
    }

    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector::from_finite(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Number of entries with `|x_i| > tol`.
    pub fn support_size(&self, tol: f64) -> usize {
        self.0.iter().filter(|v| v.abs() > tol).count()
    }

    pub(crate) fn to_dvector(&self) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_column_slice(&self.0)
    }

    pub(crate) fn from_dvector(v: &nalgebra::DVector<f64>) -> Vector {
        Vector::from_finite(v.iter().copied().collect())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Shorthand for building a vector in tests and examples.
///
/// Panics on non-finite or empty input.
#[macro_export]
macro_rules! vector {
    ($($x:expr),+ $(,)?) => {
        $crate::Vector::new(vec![$(($x) as f64),+]).expect("finite entries")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert_eq!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn arithmetic() {
        let x = vector![1, 2];
        let y = vector![3, -1];
        assert_eq!(x.dot(&y), 1.0);
        assert_eq!(x.add(&y), vector![4, 1]);
        assert_eq!(x.lincomb(0.5, &y, 0.5), vector![2, 0.5]);
        assert_eq!(x.dist_sq(&y), 13.0);
        assert_eq!(vector![3, 0, 4].norm(), 5.0);
    }
}
