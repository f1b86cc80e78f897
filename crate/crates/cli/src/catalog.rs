//! Turns catalog entries from a config into library objects.

use unionavg::minconvex::{ConvexPiece, MinConvexFn, Quadratic, SmoothConvex};
use unionavg::sets::{sparsity_set, ConvexSet, ConvexSetPiece, UnionConvexSet};
use unionavg::Vector;

use crate::config::{PieceSpec, SetSpec, SmoothSpec};
use crate::error::CliError;

fn check_dim(path: &str, found: usize, dim: usize) -> Result<(), CliError> {
    if found == dim {
        Ok(())
    } else {
        Err(CliError::field(path, format!("dimension {found} does not match problem.dim = {dim}")))
    }
}

pub fn vector(path: &str, values: &[f64], dim: usize) -> Result<Vector, CliError> {
    check_dim(path, values.len(), dim)?;
    Vector::new(values.to_vec()).map_err(|e| CliError::field(path, e))
}

/// A convex catalog set.
pub fn convex_set(spec: &SetSpec, dim: usize, path: &str) -> Result<ConvexSet, CliError> {
    let set = match spec {
        SetSpec::Whole => Ok(ConvexSet::Whole { dim }),
        SetSpec::Singleton { point } => Ok(ConvexSet::singleton(vector(&format!("{path}.point"), point, dim)?)),
        SetSpec::Box { lo, hi } => {
            check_dim(&format!("{path}.lo"), lo.len(), dim)?;
            ConvexSet::boxed(lo.clone(), hi.clone())
        }
        SetSpec::Ball { center, radius } => ConvexSet::ball(vector(&format!("{path}.center"), center, dim)?, *radius),
        SetSpec::Halfspace { normal, offset } => {
            ConvexSet::halfspace(vector(&format!("{path}.normal"), normal, dim)?, *offset)
        }
        SetSpec::Affine { a, b } => {
            for (k, row) in a.iter().enumerate() {
                check_dim(&format!("{path}.a[{k}]"), row.len(), dim)?;
            }
            ConvexSet::affine(a, b)
        }
        SetSpec::Coordinate { support } => ConvexSet::coordinate(dim, support.clone()),
        SetSpec::Sparsity { .. } | SetSpec::Union { .. } => {
            return Err(CliError::field(path, "a convex set is required here"));
        }
    };
    set.map_err(|e| CliError::field(path, e))
}

fn kind_name(spec: &SetSpec) -> &'static str {
    match spec {
        SetSpec::Whole => "whole",
        SetSpec::Singleton { .. } => "singleton",
        SetSpec::Box { .. } => "box",
        SetSpec::Ball { .. } => "ball",
        SetSpec::Halfspace { .. } => "halfspace",
        SetSpec::Affine { .. } => "affine",
        SetSpec::Coordinate { .. } => "coordinate",
        SetSpec::Sparsity { .. } => "sparsity",
        SetSpec::Union { .. } => "union",
    }
}

/// Any catalog set, as a finite union of convex sets.
pub fn union_set(spec: &SetSpec, dim: usize, path: &str) -> Result<UnionConvexSet, CliError> {
    match spec {
        SetSpec::Sparsity { s } => sparsity_set(dim, *s).map_err(|e| CliError::field(path, e)),
        SetSpec::Union { members } => {
            let pieces = members
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let set = convex_set(m, dim, &format!("{path}.members[{k}]"))?;
                    Ok(ConvexSetPiece::new(set, format!("{}#{k}", kind_name(m))))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            UnionConvexSet::new(pieces).map_err(|e| CliError::field(path, e))
        }
        _ => Ok(UnionConvexSet::convex(convex_set(spec, dim, path)?)),
    }
}

fn quadratic(q: &[Vec<f64>], b: &[f64], c: f64, dim: usize, path: &str) -> Result<Quadratic, CliError> {
    check_dim(&format!("{path}.b"), b.len(), dim)?;
    check_dim(&format!("{path}.q"), q.len(), dim)?;
    Quadratic::new(q, b, c).map_err(|e| CliError::field(path, e))
}

pub fn piece(spec: &PieceSpec, dim: usize, path: &str) -> Result<ConvexPiece, CliError> {
    let wrap = |e: unionavg::Error| CliError::field(path, e);
    Ok(match spec {
        PieceSpec::Quadratic { q, b, c } => ConvexPiece::quadratic(quadratic(q, b, *c, dim, path)?),
        PieceSpec::Centered { center, weight } => {
            let c = vector(&format!("{path}.center"), center, dim)?;
            ConvexPiece::quadratic(Quadratic::centered(&c, *weight).map_err(wrap)?)
        }
        PieceSpec::L1 { weight } => ConvexPiece::l1(dim, *weight).map_err(wrap)?,
        PieceSpec::L2 { weight } => ConvexPiece::l2(dim, *weight).map_err(wrap)?,
        PieceSpec::Indicator { set } => ConvexPiece::indicator(convex_set(set, dim, &format!("{path}.set"))?),
    })
}

pub fn min_convex(specs: &[PieceSpec], dim: usize, path: &str) -> Result<MinConvexFn, CliError> {
    if specs.is_empty() {
        return Err(CliError::field(path, "at least one piece is required"));
    }
    let pieces = specs
        .iter()
        .enumerate()
        .map(|(k, p)| piece(p, dim, &format!("{path}[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    MinConvexFn::new(pieces).map_err(|e| CliError::field(path, e))
}

pub fn smooth(spec: &SmoothSpec, dim: usize, path: &str) -> Result<SmoothConvex, CliError> {
    Ok(match spec {
        SmoothSpec::Zero => SmoothConvex::zero(dim),
        SmoothSpec::Quadratic { q, b, c } => SmoothConvex::quadratic(quadratic(q, b, *c, dim, path)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_errors_name_the_field() {
        let spec = SetSpec::Singleton { point: vec![1.0, 2.0] };
        let err = convex_set(&spec, 3, "problem.sets[0]").unwrap_err().to_string();
        assert!(err.contains("problem.sets[0].point"), "{err}");
    }

    #[test]
    fn nonconvex_sets_are_refused_where_convexity_is_needed() {
        let spec = PieceSpec::Indicator { set: SetSpec::Sparsity { s: 1 } };
        assert!(piece(&spec, 3, "problem.f[0]").is_err());
        assert!(union_set(&SetSpec::Sparsity { s: 1 }, 3, "x").is_ok());
    }

    #[test]
    fn union_members_become_pieces() {
        let spec = SetSpec::Union {
            members: vec![SetSpec::Coordinate { support: vec![0] }, SetSpec::Coordinate { support: vec![1] }],
        };
        let u = union_set(&spec, 2, "s").unwrap();
        assert_eq!(u.pieces().len(), 2);
        assert!(!u.is_convex());
    }

    #[test]
    fn non_psd_quadratic_is_rejected() {
        let spec = PieceSpec::Quadratic {
            q: vec![vec![1.0, 0.0], vec![0.0, -1.0]],
            b: vec![0.0, 0.0],
            c: 0.0,
        };
        assert!(piece(&spec, 2, "f[0]").is_err());
    }
}
