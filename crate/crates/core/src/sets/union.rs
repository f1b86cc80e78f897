use itertools::Itertools;

use crate::error::{Error, Result};
use crate::ops::{compose, reflect, relax, Alpha, UnionMap, DEFAULT_TIE_TOL};
use crate::sets::{ConvexSet, ConvexSetPiece};
use crate::vector::Vector;

/// How the projector of a union picks its active pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionRule {
    /// Pieces at minimal distance (within the tie tolerance).
    Distance,
    /// Supports `I` of size `s` with `min_{i in I} |x_i| >= max_{i not in I} |x_i|`.
    /// Only valid when the pieces are exactly the coordinate subspaces of
    /// size `s` in lexicographic order, as built by [`sparsity_set`].
    SparsityMagnitude { s: usize },
}

/// A finite union of nonempty closed convex sets.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionConvexSet {
    pieces: Vec<ConvexSetPiece>,
    rule: ProjectionRule,
}

impl UnionConvexSet {
    pub fn new(pieces: Vec<ConvexSetPiece>) -> Result<Self> {
        let first = pieces.first().ok_or(Error::Empty("union of zero sets"))?;
        let dim = first.dim();
        if let Some(p) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(UnionConvexSet {
            pieces,
            rule: ProjectionRule::Distance,
        })
    }

    pub fn convex(set: ConvexSet) -> Self {
        UnionConvexSet {
            pieces: vec![set.into()],
            rule: ProjectionRule::Distance,
        }
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn pieces(&self) -> &[ConvexSetPiece] {
        &self.pieces
    }

    pub fn rule(&self) -> ProjectionRule {
        self.rule
    }

    pub fn is_convex(&self) -> bool {
        self.pieces.len() == 1
    }

    /// Same pieces, but selected by distance even if a specialized rule is set.
    pub fn with_distance_rule(&self) -> Self {
        UnionConvexSet {
            pieces: self.pieces.clone(),
            rule: ProjectionRule::Distance,
        }
    }

    pub fn distances(&self, x: &Vector) -> Vec<f64> {
        self.pieces.iter().map(|p| p.distance(x)).collect()
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        self.distances(x).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Indices of the pieces the projector selects at `x`.
    pub fn active(&self, x: &Vector, tie_tol: f64) -> Vec<usize> {
        match self.rule {
            ProjectionRule::Distance => {
                let d = self.distances(x);
                let m = d.iter().copied().fold(f64::INFINITY, f64::min);
                (0..d.len()).filter(|&i| d[i] <= m + tie_tol).collect()
            }
            ProjectionRule::SparsityMagnitude { s } => sparsity_active(x, s, tie_tol),
        }
    }
}

/// Active supports for the sparsity projector, as lexicographic ranks.
fn sparsity_active(x: &Vector, s: usize, tie_tol: f64) -> Vec<usize> {
    let n = x.dim();
    (0..n)
        .combinations(s)
        .enumerate()
        .filter(|(_, support)| {
            let inside = support.iter().map(|&i| x[i].abs()).fold(f64::INFINITY, f64::min);
            let outside = (0..n)
                .filter(|i| !support.contains(i))
                .map(|i| x[i].abs())
                .fold(0.0, f64::max);
            inside >= outside - tie_tol
        })
        .map(|(k, _)| k)
        .collect()
}

/// The projector onto a union: pieces `P_{A_i}` with the set's selection
/// rule. Union 1/2-averaged.
pub fn project_union(set: &UnionConvexSet, tie_tol: f64) -> Result<UnionMap> {
    if tie_tol.is_nan() || tie_tol < 0.0 {
        return Err(Error::param("tie_tol", "must be nonnegative"));
    }
    let maps = set.pieces.iter().map(|p| p.projector()).collect();
    let sel = set.clone();
    let t = UnionMap::new(maps, move |x| sel.active(x, tie_tol))?;
    debug_assert_eq!(t.alpha(), Alpha::FIRM);
    Ok(t)
}

/// `{x : |x|_0 <= s}` in `R^n` as the union of the `C(n, s)` coordinate
/// subspaces, in lexicographic order of their supports.
pub fn sparsity_set(n: usize, s: usize) -> Result<UnionConvexSet> {
    if n == 0 {
        return Err(Error::param("n", "dimension must be >= 1"));
    }
    if s >= n {
        return Err(Error::param("s", format!("sparsity {s} must be in [0, {}]", n - 1)));
    }
    let pieces = (0..n)
        .combinations(s)
        .map(|support| {
            let label = format!("C{{{}}}", support.iter().join(","));
            ConvexSet::coordinate(n, support).map(|c| ConvexSetPiece::new(c, label))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnionConvexSet {
        pieces,
        rule: ProjectionRule::SparsityMagnitude { s },
    })
}

/// `2 P_A - Id`, union nonexpansive.
pub fn reflect_union(set: &UnionConvexSet) -> Result<UnionMap> {
    reflect_union_with_tol(set, DEFAULT_TIE_TOL)
}

pub fn reflect_union_with_tol(set: &UnionConvexSet, tie_tol: f64) -> Result<UnionMap> {
    reflect(&project_union(set, tie_tol)?)
}

/// `T_{A,B} = (Id + R_B R_A) / 2`, i.e. `x -> {x + b - a : a in P_A(x), b in P_B(2a - x)}`.
///
/// Piece `(i, j)` has flat index `i * |B| + j`.
pub fn dr_operator(a: &UnionConvexSet, b: &UnionConvexSet) -> Result<UnionMap> {
    dr_operator_with_tol(a, b, DEFAULT_TIE_TOL)
}

pub fn dr_operator_with_tol(a: &UnionConvexSet, b: &UnionConvexSet, tie_tol: f64) -> Result<UnionMap> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let ra = reflect_union_with_tol(a, tie_tol)?;
    let rb = reflect_union_with_tol(b, tie_tol)?;
    relax(&compose(&[ra, rb])?, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn axes() -> UnionConvexSet {
        UnionConvexSet::new(vec![
            ConvexSetPiece::new(ConvexSet::coordinate(2, vec![0]).unwrap(), "x-axis"),
            ConvexSetPiece::new(ConvexSet::coordinate(2, vec![1]).unwrap(), "y-axis"),
        ])
        .unwrap()
    }

    fn line(dim_axis: usize) -> UnionConvexSet {
        UnionConvexSet::convex(ConvexSet::coordinate(2, vec![dim_axis]).unwrap())
    }

    fn points(t: &UnionMap, x: &Vector) -> Vec<Vector> {
        t.evaluate(x).unwrap().points()
    }

    #[test]
    fn projector_of_axes() {
        let p = project_union(&axes(), DEFAULT_TIE_TOL).unwrap();
        assert_eq!(points(&p, &vector![1, 2]), vec![vector![0, 2]]);
        assert_eq!(points(&p, &vector![1, 1]), vec![vector![1, 0], vector![0, 1]]);
        let single = UnionConvexSet::convex(ConvexSet::singleton(vector![3, 4]));
        let ps = project_union(&single, 0.0).unwrap();
        assert_eq!(points(&ps, &vector![3, 4]), vec![vector![3, 4]]);
        assert_eq!(p.alpha(), Alpha::FIRM);
    }

    #[test]
    fn sparsity_examples() {
        let c = sparsity_set(3, 1).unwrap();
        assert_eq!(c.pieces().len(), 3);
        let p = project_union(&c, DEFAULT_TIE_TOL).unwrap();
        assert_eq!(points(&p, &vector![3, 1, 2]), vec![vector![3, 0, 0]]);
        let p2 = project_union(&sparsity_set(2, 1).unwrap(), DEFAULT_TIE_TOL).unwrap();
        assert_eq!(points(&p2, &vector![1, 1]), vec![vector![1, 0], vector![0, 1]]);
        let e = p2.evaluate(&vector![0, 0]).unwrap();
        assert_eq!(e.indices(), vec![0, 1]);
        assert_eq!(e.points(), vec![vector![0, 0]]);
        assert!(sparsity_set(3, 3).is_err());
        assert_eq!(sparsity_set(3, 0).unwrap().pieces().len(), 1);
        let labels: Vec<_> = sparsity_set(4, 2).unwrap().pieces().iter().map(|p| p.label.clone()).collect();
        assert_eq!(labels[0], "C{0,1}");
        assert_eq!(labels[5], "C{2,3}");
    }

    #[test]
    fn reflections() {
        let r = reflect_union(&line(0)).unwrap();
        assert_eq!(points(&r, &vector![1, 2]), vec![vector![1, -2]]);
        assert_eq!(r.alpha(), Alpha::NONEXPANSIVE);
        let origin = UnionConvexSet::convex(ConvexSet::singleton(vector![0]));
        assert_eq!(points(&reflect_union(&origin).unwrap(), &vector![3]), vec![vector![-3]]);
        let ra = reflect_union(&axes()).unwrap();
        assert_eq!(points(&ra, &vector![1, 1]), vec![vector![1, -1], vector![-1, 1]]);
    }

    #[test]
    fn douglas_rachford_operator() {
        let t = dr_operator(&line(0), &line(1)).unwrap();
        assert_eq!(t.alpha(), Alpha::FIRM);
        for x in [vector![3, -2], vector![0.5, 7]] {
            assert_eq!(points(&t, &x), vec![vector![0, 0]]);
        }
        let whole = UnionConvexSet::convex(ConvexSet::Whole { dim: 1 });
        let id = dr_operator(&whole, &whole).unwrap();
        assert_eq!(points(&id, &vector![4]), vec![vector![4]]);

        let a = UnionConvexSet::new(vec![
            ConvexSet::singleton(vector![0]).into(),
            ConvexSet::singleton(vector![2]).into(),
        ])
        .unwrap();
        let b = UnionConvexSet::convex(ConvexSet::singleton(vector![1]));
        let t = dr_operator(&a, &b).unwrap();
        let e = t.evaluate(&vector![0.5]).unwrap();
        assert_eq!(e.entries, vec![(0, vector![1.5])]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(UnionConvexSet::new(vec![
            ConvexSet::Whole { dim: 1 }.into(),
            ConvexSet::Whole { dim: 2 }.into()
        ])
        .is_err());
        let one = UnionConvexSet::convex(ConvexSet::Whole { dim: 1 });
        assert!(dr_operator(&one, &line(0)).is_err());
    }
}
