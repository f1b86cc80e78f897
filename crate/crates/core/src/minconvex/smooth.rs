use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::minconvex::Quadratic;
use crate::vector::Vector;

type ScalarFn = dyn Fn(&Vector) -> f64 + Send + Sync;
type GradFn = dyn Fn(&Vector) -> Vector + Send + Sync;

/// A differentiable convex function with `L`-Lipschitz gradient.
#[derive(Clone)]
pub struct SmoothConvex {
    value: Arc<ScalarFn>,
    gradient: Arc<GradFn>,
    lipschitz: f64,
    dim: usize,
    label: String,
}

impl SmoothConvex {
    pub fn new(
        dim: usize,
        lipschitz: f64,
        label: impl Into<String>,
        value: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be >= 1"));
        }
        if !(lipschitz.is_finite() && lipschitz >= 0.0) {
            return Err(Error::param("lipschitz", format!("{lipschitz} must be finite and >= 0")));
        }
        Ok(SmoothConvex {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            lipschitz,
            dim,
            label: label.into(),
        })
    }

    pub fn quadratic(q: Quadratic) -> Self {
        let (qv, qg) = (q.clone(), q.clone());
        Self::new(
            q.dim(),
            q.lipschitz(),
            "quadratic",
            move |x| qv.value(x),
            move |x| qg.gradient(x),
        )
        .expect("quadratic is well-formed")
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, 0.0, "zero", |_| 0.0, move |_| Vector::zeros(dim)).expect("dim >= 1")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }
}

impl fmt::Debug for SmoothConvex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothConvex")
            .field("label", &self.label)
            .field("lipschitz", &self.lipschitz)
            .field("dim", &self.dim)
            .finish()
    }
}
