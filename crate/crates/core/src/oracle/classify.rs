use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ops::{FixedClass, UnionMap};
use crate::vector::Vector;

/// Fixed-point classification computed two ways from one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifiedClassification {
    /// From the active pieces: strong iff every active piece fixes `x`.
    pub class: FixedClass,
    pub witnesses: Vec<usize>,
    /// From the evaluation as a set: strong iff `x` is in it and it is a
    /// single point.
    pub set_class: FixedClass,
    pub singleton: bool,
    pub consistent: bool,
}

pub fn verify_fixed_classification(t: &UnionMap, x: &Vector, tol: f64) -> Result<VerifiedClassification> {
    let eval = t.evaluate(x)?;
    let witnesses: Vec<usize> = eval
        .entries
        .iter()
        .filter(|(_, v)| v.dist(x) <= tol)
        .map(|(i, _)| *i)
        .collect();
    let class = match witnesses.len() {
        0 => FixedClass::NotFixed,
        n if n == eval.entries.len() => FixedClass::StrongFixed,
        _ => FixedClass::Fixed,
    };

    let mut distinct: Vec<&Vector> = Vec::new();
    for (_, v) in &eval.entries {
        if distinct.iter().all(|p| p.dist(v) > tol) {
            distinct.push(v);
        }
    }
    let singleton = distinct.len() == 1;
    let fixed = distinct.iter().any(|p| p.dist(x) <= tol);
    let set_class = match (fixed, singleton) {
        (false, _) => FixedClass::NotFixed,
        (true, true) => FixedClass::StrongFixed,
        (true, false) => FixedClass::Fixed,
    };
    Ok(VerifiedClassification {
        consistent: class == set_class,
        class,
        witnesses,
        set_class,
        singleton,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::DEFAULT_TIE_TOL;
    use crate::sets::{project_union, sparsity_set};
    use crate::vector;

    #[test]
    fn sparsity_projector_points() {
        let p = project_union(&sparsity_set(2, 1).unwrap(), DEFAULT_TIE_TOL).unwrap();
        let a = verify_fixed_classification(&p, &vector![1, 0], 1e-12).unwrap();
        assert_eq!(a.class, FixedClass::StrongFixed);
        assert!(a.consistent);
        let b = verify_fixed_classification(&p, &vector![1, 1], 1e-12).unwrap();
        assert_eq!(b.class, FixedClass::NotFixed);
        assert!(b.consistent && !b.singleton);
        let c = verify_fixed_classification(&p, &vector![0, 0], 1e-12).unwrap();
        assert_eq!(c.class, FixedClass::StrongFixed);
        assert_eq!(c.witnesses, vec![0, 1]);
        assert!(c.consistent);
    }
}
