//! Fixed-point iterations: Krasnosel'skii-Mann with admissible control,
//! union iterations, projection methods and proximal splitting.
//!
//! Every driver returns an [`IterationTrace`] and never assumes the start
//! point is close to a fixed point; the trace's diagnostics report what the
//! final iterate actually is.

mod fixed_point;
mod projection;
mod schedule;
mod splitting;
mod trace;

pub use fixed_point::{cyclic_compose, iterate_union, km_admissible};
pub use projection::{cadr, cyclic_dr, cyclic_projections};
pub use schedule::{check_admissible, ControlSequence, Schedule, DEFAULT_SCHEDULE_EPS};
pub use splitting::{
    douglas_rachford, drs_operator, fb_operator, forward_backward, ppa, smooth_plus_local_min,
};
pub use trace::{
    Diagnostics, IterationTrace, StopRule, TerminalStatus, TraceStep, DIVERGENCE_GUARD,
};
