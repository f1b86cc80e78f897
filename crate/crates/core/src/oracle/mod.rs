//! Brute-force oracles: grid prox, sampled radius of attraction, sampled
//! averagedness inequality, and a two-route fixed-point classification.
//!
//! These deliberately avoid the analytic shortcuts used elsewhere in the
//! crate (the grid prox only calls `f.value`), so they can serve as
//! independent checks.

mod classify;
mod grid;
mod inequality;
mod radius;
mod sampling;

pub use classify::{verify_fixed_classification, VerifiedClassification};
pub use grid::{brute_force_prox, hausdorff, GridProx, GridSpec, MAX_GRID_DIM, MAX_GRID_EVALS};
pub use inequality::{sample_inequality, InequalityReport, Region};
pub use radius::{estimate_radius, RadiusEstimate};
pub(crate) use sampling::sample_ball;
pub use sampling::sample_in_ball;
