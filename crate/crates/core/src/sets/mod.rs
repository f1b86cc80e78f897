//! Union-convex sets and their projectors, reflectors and Douglas-Rachford
//! operators.

mod convex;
mod union;

pub use convex::{AffineSubspace, ConvexSet, ConvexSetPiece, MEMBERSHIP_TOL};
pub use union::{
    dr_operator, dr_operator_with_tol, project_union, reflect_union, reflect_union_with_tol,
    sparsity_set, ProjectionRule, UnionConvexSet,
};
