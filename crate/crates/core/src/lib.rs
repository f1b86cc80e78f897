//! Union averaged nonexpansive operators and the fixed-point algorithms
//! built on them.
//!
//! The crate is organized bottom-up:
//!
//! - [`ops`]: averaged maps, set-valued union maps and their combinators.
//! - [`minconvex`]: pointwise minima of convex functions, their Moreau
//!   envelopes and set-valued proximity operators.
//! - [`sets`]: finite unions of closed convex sets, projectors, reflectors
//!   and the two-set Douglas-Rachford operator.
//! - [`solvers`]: Krasnosel'skii-Mann style iterations, projection methods,
//!   proximal point, forward-backward and Douglas-Rachford splitting.
//! - [`oracle`]: brute-force checks used by tests and the CLI.

pub mod error;
pub mod minconvex;
pub mod ops;
pub mod oracle;
pub mod sets;
pub mod solvers;
mod vector;

pub use error::{Error, Result};
pub use minconvex::{ConvexPiece, ExtReal, MinConvexFn, SmoothConvex};
pub use ops::{
    check_averaged, compose, convex_combination, relax, union_of, Alpha, AveragedMap, Evaluation,
    FixedClass, FixedPointReport, SelectionPolicy, UnionMap,
};
pub use sets::{ConvexSet, ConvexSetPiece, UnionConvexSet};
pub use solvers::{IterationTrace, Schedule, StopRule, TerminalStatus};
pub use vector::Vector;
