use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ops::Alpha;
use crate::vector::Vector;

pub type MapFn = dyn Fn(&Vector) -> Vector + Send + Sync;

/// A single-valued operator carrying a declared averagedness constant.
///
/// The constant is a claim made by whoever builds the map; use
/// [`check_averaged`](crate::ops::check_averaged) to test it on samples.
#[derive(Clone)]
pub struct AveragedMap {
    f: Arc<MapFn>,
    alpha: Alpha,
    dim: usize,
    label: String,
}

impl AveragedMap {
    pub fn new(
        dim: usize,
        alpha: Alpha,
        label: impl Into<String>,
        f: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be >= 1"));
        }
        Ok(AveragedMap {
            f: Arc::new(f),
            alpha,
            dim,
            label: label.into(),
        })
    }

    /// The identity is firmly nonexpansive; it is tagged with `alpha = 1/2`.
    pub fn identity(dim: usize) -> Self {
        Self::new(dim, Alpha::FIRM, "id", |x| x.clone()).expect("dim >= 1")
    }

    /// `x -> 0`, firmly nonexpansive.
    pub fn zero(dim: usize) -> Self {
        Self::new(dim, Alpha::FIRM, "zero", move |_| Vector::zeros(dim)).expect("dim >= 1")
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        let y = (self.f)(x);
        debug_assert_eq!(y.dim(), self.dim, "map `{}` changed dimension", self.label);
        y
    }

    pub fn try_apply(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim)?;
        Ok(self.apply(x))
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for AveragedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AveragedMap")
            .field("label", &self.label)
            .field("alpha", &self.alpha.value())
            .field("dim", &self.dim)
            .finish()
    }
}
