use crate::error::{Error, Result};
use crate::ops::{compose, SelectionPolicy, DEFAULT_TIE_TOL};
use crate::sets::{dr_operator, project_union, UnionConvexSet};
use crate::solvers::fixed_point::{run_cyclic, run_relaxed};
use crate::solvers::schedule::Schedule;
use crate::solvers::trace::{IterationTrace, StopRule};
use crate::vector::Vector;

fn need_two(sets: &[UnionConvexSet]) -> Result<()> {
    if sets.len() < 2 {
        return Err(Error::param("sets", format!("need at least 2 sets, got {}", sets.len())));
    }
    let dim = sets[0].dim();
    if let Some(s) = sets.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    Ok(())
}

/// `x_{n+1} in P_{C_{i_n}}(x_n)` with `i_n = n mod m`.
///
/// `diagnostics.set_residuals` holds the distance of the final iterate to
/// each set.
pub fn cyclic_projections(
    sets: &[UnionConvexSet],
    x0: &Vector,
    policy: &SelectionPolicy,
    stop: &StopRule,
) -> Result<IterationTrace> {
    need_two(sets)?;
    let maps = sets
        .iter()
        .map(|s| project_union(s, DEFAULT_TIE_TOL))
        .collect::<Result<Vec<_>>>()?;
    let mut trace = run_cyclic("cyclic-projections", &maps, x0, policy, stop)?;
    trace.diagnostics.set_residuals = sets.iter().map(|s| s.distance(&trace.final_point)).collect();
    Ok(trace)
}

/// Iterates `T = T_{C_m,C_1} o ... o T_{C_2,C_3} o T_{C_1,C_2}`; one step is
/// a full sweep. The limit is classified against `Fix T`; no shadow point
/// is computed.
pub fn cyclic_dr(
    sets: &[UnionConvexSet],
    x0: &Vector,
    policy: &SelectionPolicy,
    stop: &StopRule,
) -> Result<IterationTrace> {
    need_two(sets)?;
    let m = sets.len();
    let ops = (0..m)
        .map(|j| dr_operator(&sets[j], &sets[(j + 1) % m]))
        .collect::<Result<Vec<_>>>()?;
    let t = compose(&ops)?;
    let mut trace = run_relaxed("cyclic-dr", &t, &Schedule::constant(1.0), policy, x0, stop)?;
    trace
        .diagnostics
        .notes
        .push("shadow recovery is not attempted for the cyclic method".into());
    Ok(trace)
}

/// Cyclically anchored Douglas-Rachford: `x_{n+1} in T_{A, C_{i_n}}(x_n)`
/// with the anchor `A` fixed and `C_{i_n}` cycling through the other sets.
///
/// The anchor is `sets[0]` when `anchor_first` is set, otherwise the last
/// set. When the anchor is convex, `diagnostics.shadow` is `P_A(x)` at the
/// final iterate and `shadow_residuals` its distance to every set. For a
/// nonconvex anchor the projection candidate with the smallest worst-case
/// residual is reported instead, with a note.
pub fn cadr(
    sets: &[UnionConvexSet],
    anchor_first: bool,
    x0: &Vector,
    policy: &SelectionPolicy,
    stop: &StopRule,
) -> Result<IterationTrace> {
    need_two(sets)?;
    let anchor_pos = if anchor_first { 0 } else { sets.len() - 1 };
    let anchor = &sets[anchor_pos];
    let ops = sets
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != anchor_pos)
        .map(|(_, s)| dr_operator(anchor, s))
        .collect::<Result<Vec<_>>>()?;
    let mut trace = run_cyclic("cadr", &ops, x0, policy, stop)?;

    let xbar = &trace.final_point;
    let candidates = project_union(anchor, DEFAULT_TIE_TOL)?.evaluate(xbar)?.points();
    let worst = |p: &Vector| sets.iter().map(|s| s.distance(p)).fold(0.0, f64::max);
    let shadow = candidates
        .into_iter()
        .min_by(|a, b| worst(a).total_cmp(&worst(b)))
        .expect("projection is nonempty");
    if !anchor.is_convex() {
        trace
            .diagnostics
            .notes
            .push("anchor is not convex; shadow is the best projection candidate".into());
    }
    trace.diagnostics.shadow_residuals = sets.iter().map(|s| s.distance(&shadow)).collect();
    trace.diagnostics.shadow = Some(shadow);
    trace.diagnostics.set_residuals = sets.iter().map(|s| s.distance(xbar)).collect();
    Ok(trace)
}
