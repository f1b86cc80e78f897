//! Set-valued operators `T(x) = { T_i(x) : i in phi(x) }` and their closure
//! combinators.
//!
//! Every union map has a fixed, finite list of pieces addressed by a flat
//! index `0..num_pieces()`. Combinators index their pieces in mixed radix
//! over the member maps (first member most significant), so a composite
//! piece is always a single-valued averaged map even though the composite
//! selector is only realized by chaining evaluations.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::alpha::validate_weights;
use crate::ops::{Alpha, AveragedMap};
use crate::vector::Vector;

pub type SelectorFn = dyn Fn(&Vector) -> Vec<usize> + Send + Sync;

/// Tolerance for merging coincident points in an evaluation set.
pub const DEDUP_TOL: f64 = 1e-12;

/// Default tie tolerance for selectors that compare floating-point scores.
pub const DEFAULT_TIE_TOL: f64 = 1e-10;

#[derive(Clone)]
pub struct UnionMap {
    dim: usize,
    alpha: Alpha,
    count: usize,
    node: Arc<Node>,
}

enum Node {
    Basic {
        pieces: Vec<AveragedMap>,
        selector: Arc<SelectorFn>,
    },
    Union {
        maps: Vec<UnionMap>,
        offsets: Vec<usize>,
    },
    Combination {
        maps: Vec<UnionMap>,
        weights: Vec<f64>,
    },
    /// Applied first to last.
    Composition(Vec<UnionMap>),
    Relaxed {
        inner: UnionMap,
        lambda: f64,
    },
}

/// Full result of evaluating a union map at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// `(piece index, value)` for every active piece, sorted by index.
    /// Coincident values are kept here.
    pub entries: Vec<(usize, Vector)>,
}

impl Evaluation {
    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|(i, _)| *i).collect()
    }

    /// The evaluation as a set: values merged when within `tol`, in index order.
    pub fn points_within(&self, tol: f64) -> Vec<Vector> {
        let mut out: Vec<Vector> = Vec::new();
        for (_, v) in &self.entries {
            if !out.iter().any(|p| p.dist(v) <= tol) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn points(&self) -> Vec<Vector> {
        self.points_within(DEDUP_TOL)
    }

    pub fn is_singleton_within(&self, tol: f64) -> bool {
        self.points_within(tol).len() == 1
    }

    pub fn value_of(&self, index: usize) -> Option<&Vector> {
        self.entries.iter().find(|(i, _)| *i == index).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedClass {
    NotFixed,
    Fixed,
    StrongFixed,
}

impl fmt::Display for FixedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixedClass::NotFixed => "not-fixed",
            FixedClass::Fixed => "fixed",
            FixedClass::StrongFixed => "strong-fixed",
        })
    }
}

/// Fixed-point classification from the active pieces at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub class: FixedClass,
    pub active: Vec<usize>,
    /// Active pieces with `|T_i(x) - x| <= tol`.
    pub witnesses: Vec<usize>,
    pub singleton: bool,
}

impl UnionMap {
    /// A union map from explicit pieces and an active selector.
    ///
    /// The map's constant is the largest constant among the pieces.
    pub fn new(
        pieces: Vec<AveragedMap>,
        selector: impl Fn(&Vector) -> Vec<usize> + Send + Sync + 'static,
    ) -> Result<Self> {
        let first = pieces.first().ok_or(Error::Empty("union map with no pieces"))?;
        let dim = first.dim();
        for p in &pieces {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        let alpha = Alpha::union(&pieces.iter().map(|p| p.alpha()).collect::<Vec<_>>())?;
        Ok(UnionMap {
            dim,
            alpha,
            count: pieces.len(),
            node: Arc::new(Node::Basic {
                pieces,
                selector: Arc::new(selector),
            }),
        })
    }

    /// A single-valued map viewed as a union map with constant selector `{0}`.
    pub fn single(map: AveragedMap) -> Self {
        Self::new(vec![map], |_| vec![0]).expect("one piece")
    }

    pub fn identity(dim: usize) -> Self {
        Self::single(AveragedMap::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn num_pieces(&self) -> usize {
        self.count
    }

    /// Evaluates `T(x)`, returning every active `(index, T_i(x))`.
    pub fn evaluate(&self, x: &Vector) -> Result<Evaluation> {
        x.check_dim(self.dim)?;
        let mut entries = self.enumerate(x)?;
        entries.sort_by_key(|(i, _)| *i);
        Ok(Evaluation { entries })
    }

    /// The active index set at `x`. For composites this chains through the
    /// intermediate evaluations.
    pub fn selector(&self, x: &Vector) -> Result<Vec<usize>> {
        Ok(self.evaluate(x)?.indices())
    }

    /// Evaluates piece `index` at `x`, regardless of whether it is active.
    pub fn apply_piece(&self, index: usize, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim)?;
        if index >= self.count {
            return Err(Error::param(
                "index",
                format!("piece {index} out of range (map has {})", self.count),
            ));
        }
        Ok(self.piece_unchecked(index, x))
    }

    /// Classifies `x` as not fixed, fixed (`x in T(x)`) or strongly fixed
    /// (`T(x) = {x}`) by testing each active piece.
    pub fn classify(&self, x: &Vector, tol: f64) -> Result<FixedPointReport> {
        let eval = self.evaluate(x)?;
        let active = eval.indices();
        let witnesses: Vec<usize> = eval
            .entries
            .iter()
            .filter(|(_, v)| v.dist(x) <= tol)
            .map(|(i, _)| *i)
            .collect();
        let class = if witnesses.is_empty() {
            FixedClass::NotFixed
        } else if witnesses.len() == active.len() {
            FixedClass::StrongFixed
        } else {
            FixedClass::Fixed
        };
        Ok(FixedPointReport {
            class,
            active,
            witnesses,
            singleton: eval.is_singleton_within(tol),
        })
    }

    /// Decodes a flat piece index into its member-wise components, outermost
    /// first. Basic maps yield a one-element path.
    pub fn index_path(&self, index: usize) -> Vec<usize> {
        match &*self.node {
            Node::Basic { .. } => vec![index],
            Node::Union { maps, offsets } => {
                let j = member_of(offsets, index);
                let mut path = vec![j];
                path.extend(maps[j].index_path(index - offsets[j]));
                path
            }
            Node::Combination { maps, .. } | Node::Composition(maps) => {
                let digits = mixed_radix_digits(maps, index);
                let mut path = Vec::new();
                for (m, d) in maps.iter().zip(digits) {
                    path.extend(m.index_path(d));
                }
                path
            }
            Node::Relaxed { inner, .. } => inner.index_path(index),
        }
    }

    fn piece_unchecked(&self, index: usize, x: &Vector) -> Vector {
        match &*self.node {
            Node::Basic { pieces, .. } => pieces[index].apply(x),
            Node::Union { maps, offsets } => {
                let j = member_of(offsets, index);
                maps[j].piece_unchecked(index - offsets[j], x)
            }
            Node::Combination { maps, weights } => {
                let digits = mixed_radix_digits(maps, index);
                let mut acc = Vector::zeros(self.dim);
                for ((m, w), d) in maps.iter().zip(weights).zip(digits) {
                    acc = acc.axpy(*w, &m.piece_unchecked(d, x));
                }
                acc
            }
            Node::Composition(maps) => {
                let digits = mixed_radix_digits(maps, index);
                let mut y = x.clone();
                for (m, d) in maps.iter().zip(digits) {
                    y = m.piece_unchecked(d, &y);
                }
                y
            }
            Node::Relaxed { inner, lambda } => {
                x.lincomb(1.0 - lambda, &inner.piece_unchecked(index, x), *lambda)
            }
        }
    }

    fn enumerate(&self, x: &Vector) -> Result<Vec<(usize, Vector)>> {
        match &*self.node {
            Node::Basic { pieces, selector } => {
                let mut active = selector(x);
                if active.is_empty() {
                    return Err(Error::ContractViolation(format!(
                        "selector returned an empty index set at {x:?}"
                    )));
                }
                if let Some(bad) = active.iter().find(|&&i| i >= pieces.len()) {
                    return Err(Error::ContractViolation(format!(
                        "selector returned index {bad} but the map has {} pieces",
                        pieces.len()
                    )));
                }
                active.sort_unstable();
                active.dedup();
                Ok(active.into_iter().map(|i| (i, pieces[i].apply(x))).collect())
            }
            Node::Union { maps, offsets } => {
                let mut out = Vec::new();
                for (m, off) in maps.iter().zip(offsets) {
                    out.extend(m.enumerate(x)?.into_iter().map(|(i, v)| (off + i, v)));
                }
                Ok(out)
            }
            Node::Combination { maps, weights } => {
                let mut acc: Vec<(usize, Vector)> = vec![(0, Vector::zeros(self.dim))];
                for (m, w) in maps.iter().zip(weights) {
                    let vals = m.enumerate(x)?;
                    let mut next = Vec::with_capacity(acc.len() * vals.len());
                    for (k, partial) in &acc {
                        for (i, v) in &vals {
                            next.push((k * m.count + i, partial.axpy(*w, v)));
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            Node::Composition(maps) => {
                let mut acc: Vec<(usize, Vector)> = vec![(0, x.clone())];
                for m in maps {
                    let mut next = Vec::new();
                    for (k, y) in &acc {
                        for (i, z) in m.enumerate(y)? {
                            next.push((k * m.count + i, z));
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            Node::Relaxed { inner, lambda } => Ok(inner
                .enumerate(x)?
                .into_iter()
                .map(|(i, v)| (i, x.lincomb(1.0 - lambda, &v, *lambda)))
                .collect()),
        }
    }
}

fn member_of(offsets: &[usize], index: usize) -> usize {
    // offsets is increasing and starts at 0
    offsets.partition_point(|&o| o <= index) - 1
}

fn mixed_radix_digits(maps: &[UnionMap], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; maps.len()];
    for (slot, m) in digits.iter_mut().zip(maps).rev() {
        *slot = index % m.count;
        index /= m.count;
    }
    digits
}

fn common_dim(maps: &[UnionMap]) -> Result<usize> {
    let first = maps.first().ok_or(Error::Empty("no operators given"))?;
    for m in maps {
        if m.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                found: m.dim,
            });
        }
    }
    Ok(first.dim)
}

fn product_count(maps: &[UnionMap]) -> Result<usize> {
    maps.iter().try_fold(1usize, |acc, m| {
        acc.checked_mul(m.count)
            .ok_or_else(|| Error::param("maps", "too many composite pieces"))
    })
}

/// `x -> union_j T_j(x)`, with constant `max_j alpha_j`.
pub fn union_of(maps: &[UnionMap]) -> Result<UnionMap> {
    let dim = common_dim(maps)?;
    let alpha = Alpha::union(&maps.iter().map(|m| m.alpha).collect::<Vec<_>>())?;
    let mut offsets = Vec::with_capacity(maps.len());
    let mut count = 0usize;
    for m in maps {
        offsets.push(count);
        count = count
            .checked_add(m.count)
            .ok_or_else(|| Error::param("maps", "too many pieces"))?;
    }
    Ok(UnionMap {
        dim,
        alpha,
        count,
        node: Arc::new(Node::Union {
            maps: maps.to_vec(),
            offsets,
        }),
    })
}

/// Minkowski-sum combination `sum_j w_j T_j`.
pub fn convex_combination(maps: &[UnionMap], weights: &[f64]) -> Result<UnionMap> {
    let dim = common_dim(maps)?;
    validate_weights(weights)?;
    let alpha = Alpha::convex_combination(
        &maps.iter().map(|m| m.alpha).collect::<Vec<_>>(),
        weights,
    )?;
    Ok(UnionMap {
        dim,
        alpha,
        count: product_count(maps)?,
        node: Arc::new(Node::Combination {
            maps: maps.to_vec(),
            weights: weights.to_vec(),
        }),
    })
}

/// `T_m o ... o T_1` where `maps = [T_1, ..., T_m]` (first applied first).
pub fn compose(maps: &[UnionMap]) -> Result<UnionMap> {
    let dim = common_dim(maps)?;
    let alpha = Alpha::composition(&maps.iter().map(|m| m.alpha).collect::<Vec<_>>())?;
    Ok(UnionMap {
        dim,
        alpha,
        count: product_count(maps)?,
        node: Arc::new(Node::Composition(maps.to_vec())),
    })
}

/// `(1 - lambda) Id + lambda T` for `lambda` in `(0, 1/alpha(T)]`.
pub fn relax(map: &UnionMap, lambda: f64) -> Result<UnionMap> {
    let alpha = map.alpha.relaxed(lambda)?;
    if lambda == 1.0 {
        return Ok(map.clone());
    }
    Ok(UnionMap {
        dim: map.dim,
        alpha,
        count: map.count,
        node: Arc::new(Node::Relaxed {
            inner: map.clone(),
            lambda,
        }),
    })
}

/// `2T - Id`, the reflector of a firmly nonexpansive union map.
pub fn reflect(map: &UnionMap) -> Result<UnionMap> {
    relax(map, 2.0)
}

impl fmt::Debug for UnionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.node {
            Node::Basic { .. } => "basic",
            Node::Union { .. } => "union",
            Node::Combination { .. } => "combination",
            Node::Composition(_) => "composition",
            Node::Relaxed { .. } => "relaxed",
        };
        f.debug_struct("UnionMap")
            .field("kind", &kind)
            .field("dim", &self.dim)
            .field("alpha", &self.alpha.value())
            .field("pieces", &self.count)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn scale_map(s: f64, alpha: f64) -> AveragedMap {
        AveragedMap::new(1, Alpha::new(alpha).unwrap(), format!("x*{s}"), move |x| x.scale(s)).unwrap()
    }

    fn axis_projector(axis: usize) -> UnionMap {
        UnionMap::single(
            AveragedMap::new(2, Alpha::FIRM, format!("P_axis{axis}"), move |x| {
                let mut v = vec![0.0; 2];
                v[axis] = x[axis];
                Vector::new(v).unwrap()
            })
            .unwrap(),
        )
    }

    fn points(m: &UnionMap, x: &Vector) -> Vec<Vector> {
        m.evaluate(x).unwrap().points()
    }

    #[test]
    fn identity_evaluates_to_input() {
        let id = UnionMap::identity(2);
        let e = id.evaluate(&vector![1, 2]).unwrap();
        assert_eq!(e.entries, vec![(0, vector![1, 2])]);
    }

    #[test]
    fn two_piece_sign_selector() {
        let t = UnionMap::new(vec![scale_map(0.5, 0.5), scale_map(-0.5, 0.75)], |x| {
            if x[0] >= 0.0 {
                vec![0]
            } else {
                vec![1]
            }
        })
        .unwrap();
        let e = t.evaluate(&vector![-2]).unwrap();
        assert_eq!(e.entries, vec![(1, vector![1])]);
        assert_eq!(t.alpha().value(), 0.75);
    }

    #[test]
    fn selector_contract_violations() {
        let empty = UnionMap::new(vec![scale_map(0.5, 0.5)], |_| vec![]).unwrap();
        assert!(matches!(empty.evaluate(&vector![1]), Err(Error::ContractViolation(_))));
        let oob = UnionMap::new(vec![scale_map(0.5, 0.5)], |_| vec![3]).unwrap();
        assert!(matches!(oob.evaluate(&vector![1]), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn dimension_checks() {
        let id = UnionMap::identity(2);
        assert!(matches!(
            id.evaluate(&vector![1]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(union_of(&[UnionMap::identity(1), UnionMap::identity(2)]).is_err());
        assert!(compose(&[UnionMap::identity(1), UnionMap::identity(2)]).is_err());
    }

    #[test]
    fn union_of_axis_projectors() {
        let u = union_of(&[axis_projector(0), axis_projector(1)]).unwrap();
        assert_eq!(points(&u, &vector![1, 2]), vec![vector![1, 0], vector![0, 2]]);
        let a = UnionMap::single(scale_map(0.5, 0.5));
        let b = UnionMap::single(scale_map(0.25, 1.0 / 3.0));
        assert_eq!(union_of(&[a.clone(), b]).unwrap().alpha().value(), 0.5);
        let aa = union_of(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(points(&aa, &vector![3]), points(&a, &vector![3]));
        assert_eq!(aa.evaluate(&vector![3]).unwrap().entries.len(), 2);
    }

    #[test]
    fn combination_is_minkowski() {
        let c = convex_combination(
            &[UnionMap::identity(2), UnionMap::single(AveragedMap::zero(2))],
            &[0.5, 0.5],
        )
        .unwrap();
        assert_eq!(points(&c, &vector![2, 4]), vec![vector![1, 2]]);

        let u = union_of(&[axis_projector(0), axis_projector(1)]).unwrap();
        let c2 = convex_combination(&[u.clone(), u], &[0.5, 0.5]).unwrap();
        // {P0,P1} + {P0,P1} halves: (1,0), (.5,1), (.5,1), (0,2)
        let e = c2.evaluate(&vector![1, 2]).unwrap();
        assert_eq!(e.entries.len(), 4);
        assert_eq!(e.points().len(), 3);
    }

    #[test]
    fn composition_chains_selectors() {
        let c = compose(&[axis_projector(0), axis_projector(1)]).unwrap();
        assert_eq!(points(&c, &vector![3, 5]), vec![vector![0, 0]]);
        assert!((c.alpha().value() - 2.0 / 3.0).abs() <= 1e-15);

        let t = UnionMap::new(vec![scale_map(0.5, 0.5), scale_map(-0.5, 0.5)], |x| {
            if x[0] >= 0.0 {
                vec![0]
            } else {
                vec![1]
            }
        })
        .unwrap();
        let id_t = compose(&[UnionMap::identity(1), t.clone()]).unwrap();
        for x in [-3.0, 0.0, 2.5] {
            let x = Vector::new(vec![x]).unwrap();
            assert_eq!(points(&id_t, &x), points(&t, &x));
        }
        // second selector sees the intermediate value: x=-2 -> 1 -> 0.5
        let tt = compose(&[t.clone(), t]).unwrap();
        let e = tt.evaluate(&vector![-2]).unwrap();
        assert_eq!(e.entries, vec![(2, vector![0.5])]);
        assert_eq!(tt.index_path(2), vec![1, 0]);
    }

    #[test]
    fn relax_behaviour() {
        let t = UnionMap::single(scale_map(0.5, 0.5));
        let same = relax(&t, 1.0).unwrap();
        assert_eq!(points(&same, &vector![4]), points(&t, &vector![4]));
        let r = reflect(&t).unwrap();
        assert_eq!(r.alpha(), Alpha::NONEXPANSIVE);
        assert_eq!(points(&r, &vector![4]), vec![vector![0]]);
        let z = relax(&UnionMap::single(AveragedMap::zero(1)), 0.5).unwrap();
        assert_eq!(points(&z, &vector![4]), vec![vector![2]]);
        assert!(relax(&t, 2.5).is_err());
    }

    #[test]
    fn apply_piece_matches_active_entries() {
        let u = union_of(&[axis_projector(0), axis_projector(1)]).unwrap();
        let c = compose(&[u.clone(), u]).unwrap();
        let x = vector![2, -1];
        for (i, v) in c.evaluate(&x).unwrap().entries {
            assert_eq!(c.apply_piece(i, &x).unwrap(), v);
        }
        assert!(c.apply_piece(c.num_pieces(), &x).is_err());
    }

    #[test]
    fn classification() {
        let u = union_of(&[axis_projector(0), axis_projector(1)]).unwrap();
        let r = u.classify(&vector![1, 0], 1e-12).unwrap();
        assert_eq!(r.class, FixedClass::Fixed);
        assert_eq!(r.witnesses, vec![0]);
        let r0 = u.classify(&vector![0, 0], 1e-12).unwrap();
        assert_eq!(r0.class, FixedClass::StrongFixed);
        assert!(r0.singleton);
        let r1 = u.classify(&vector![1, 1], 1e-12).unwrap();
        assert_eq!(r1.class, FixedClass::NotFixed);
    }
}
