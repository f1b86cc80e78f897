//! Min-convex functions `f = min_i f_i`: values, Moreau envelopes, the
//! set-valued prox as a union map, and fixed-point classification.

mod extreal;
mod function;
mod piece;
mod quadratic;
mod smooth;

pub use extreal::ExtReal;
pub use function::{MinConvexFn, OscReport, OscSelector, ProxClassification};
pub(crate) use piece::check_gamma;
pub use piece::{ConvexPiece, PieceKind, ProxFn, ValueFn};
pub use quadratic::Quadratic;
pub use smooth::SmoothConvex;
