use std::fmt;

use serde::{Deserialize, Serialize};

/// A real number or `+inf`.
///
/// Ordered with every finite value below `+inf`. Finite values are never NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Maps `+inf` to [`ExtReal::PosInf`]; panics on NaN or `-inf`.
    pub fn from_f64(v: f64) -> Self {
        assert!(!v.is_nan() && v != f64::NEG_INFINITY, "{v} is not an extended real in (-inf, +inf]");
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// `+inf` becomes `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }

}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_min() {
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.min(ExtReal::Finite(2.0)), ExtReal::Finite(2.0));
        assert_eq!(ExtReal::PosInf.min(ExtReal::PosInf), ExtReal::PosInf);
        assert_eq!(ExtReal::Finite(1.0) + ExtReal::PosInf, ExtReal::PosInf);
        assert_eq!(ExtReal::from(f64::INFINITY), ExtReal::PosInf);
    }
}
