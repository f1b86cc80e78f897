//! Operator algebra: averaged maps, union maps with active selectors, and
//! the closure combinators.

mod alpha;
mod averaged;
mod check;
mod policy;
mod union;

pub use alpha::Alpha;
pub use averaged::{AveragedMap, MapFn};
pub use check::{averaged_violation, check_averaged, AveragedReport, PieceCheck, SampleSpec};
pub use policy::{ChoiceFn, PolicyState, SelectionPolicy};
pub use union::{
    compose, convex_combination, reflect, relax, union_of, Evaluation, FixedClass,
    FixedPointReport, SelectorFn, UnionMap, DEDUP_TOL, DEFAULT_TIE_TOL,
};
