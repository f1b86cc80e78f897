use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// `q(x) = x^T Q x / 2 + b^T x + c` with `Q` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
    lipschitz: f64,
}

impl Quadratic {
    /// `q_rows` is `Q` by rows.
    pub fn new(q_rows: &[Vec<f64>], b: &[f64], c: f64) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::Empty("quadratic with zero dimension"));
        }
        if q_rows.len() != n || q_rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("q", format!("Q must be {n} x {n} to match b")));
        }
        if q_rows.iter().flatten().chain(b).any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(Error::param("q", "entries must be finite"));
        }
        let q = DMatrix::from_fn(n, n, |i, j| q_rows[i][j]);
        let scale = q.amax().max(1.0);
        if (&q - q.transpose()).amax() > 1e-12 * scale {
            return Err(Error::param("q", "Q is not symmetric"));
        }
        let eig = q.clone().symmetric_eigen();
        let lo = eig.eigenvalues.min();
        if lo < -1e-12 * scale {
            return Err(Error::param("q", format!("Q has negative eigenvalue {lo:.3e}")));
        }
        Ok(Quadratic {
            lipschitz: eig.eigenvalues.max().max(0.0),
            q,
            b: DVector::from_column_slice(b),
            c,
        })
    }

    /// `sum_i d_i x_i^2 / 2 + b^T x + c`.
    pub fn diagonal(d: &[f64], b: &[f64], c: f64) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..d.len())
            .map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0.0 }).collect())
            .collect();
        Self::new(&rows, b, c)
    }

    /// `w |x - center|^2 / 2`.
    pub fn centered(center: &Vector, w: f64) -> Result<Self> {
        let d = vec![w; center.dim()];
        let b: Vec<f64> = center.iter().map(|v| -w * v).collect();
        Self::diagonal(&d, &b, 0.5 * w * center.norm_sq())
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `Q[i][j]`.
    pub fn q_entry(&self, i: usize, j: usize) -> f64 {
        self.q[(i, j)]
    }

    pub fn linear(&self) -> &[f64] {
        self.b.as_slice()
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    /// Largest eigenvalue of `Q`, the Lipschitz constant of the gradient.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn value(&self, x: &Vector) -> f64 {
        let xv = x.to_dvector();
        0.5 * xv.dot(&(&self.q * &xv)) + self.b.dot(&xv) + self.c
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        let xv = x.to_dvector();
        Vector::from_dvector(&(&self.q * &xv + &self.b))
    }

    /// Solves `(I + gamma Q) y = x - gamma b`.
    pub fn prox(&self, gamma: f64, x: &Vector) -> Vector {
        let n = self.dim();
        let m = DMatrix::identity(n, n) + &self.q * gamma;
        let rhs = x.to_dvector() - &self.b * gamma;
        let chol = m.cholesky().expect("I + gamma Q is positive definite");
        Vector::from_dvector(&chol.solve(&rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    #[test]
    fn square_and_shifted_square() {
        let sq = Quadratic::diagonal(&[2.0], &[0.0], 0.0).unwrap();
        assert_eq!(sq.value(&vector![3]), 9.0);
        assert!((sq.prox(1.0, &vector![1])[0] - 1.0 / 3.0).abs() < 1e-15);
        let shifted = Quadratic::centered(&vector![2], 2.0).unwrap();
        assert_eq!(shifted.value(&vector![1]), 1.0);
        assert!((shifted.prox(1.0, &vector![1])[0] - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(shifted.gradient(&vector![3]), vector![2]);
        assert_eq!(shifted.lipschitz(), 2.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(Quadratic::new(&[vec![1.0, 2.0], vec![0.0, 1.0]], &[0.0, 0.0], 0.0).is_err());
        assert!(Quadratic::new(&[vec![-1.0]], &[0.0], 0.0).is_err());
        assert!(Quadratic::new(&[vec![1.0]], &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn prox_satisfies_optimality() {
        let q = Quadratic::new(&[vec![2.0, 1.0], vec![1.0, 3.0]], &[1.0, -1.0], 0.5).unwrap();
        let x = vector![0.3, -2.0];
        let gamma = 0.7;
        let p = q.prox(gamma, &x);
        // gamma * grad q(p) + p - x = 0
        let r = q.gradient(&p).scale(gamma).add(&p).sub(&x);
        assert!(r.norm() < 1e-12);
    }
}
