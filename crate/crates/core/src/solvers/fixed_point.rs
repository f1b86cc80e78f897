use crate::error::{Error, Result};
use crate::ops::{AveragedMap, PolicyState, SelectionPolicy, UnionMap};
use crate::solvers::schedule::{ControlSequence, Schedule};
use crate::solvers::trace::{drive, IterationTrace, StopRule, Stepped};
use crate::vector::Vector;

/// One relaxed step `x -> (1 - lambda) x + lambda v` with `v` picked from
/// `T(x)` by the policy.
pub(crate) fn relaxed_union_step(
    t: &UnionMap,
    x: &Vector,
    lambda: f64,
    policy: &mut PolicyState,
    n: usize,
) -> Result<Stepped> {
    let eval = t.evaluate(x)?;
    let pos = policy.choose(n, &eval.entries);
    let (index, v) = &eval.entries[pos];
    let next = if lambda == 1.0 {
        v.clone()
    } else {
        x.lincomb(1.0 - lambda, v, lambda)
    };
    Ok(Stepped {
        next,
        index: *index,
        lambda,
        candidates: eval.entries.len(),
        aux: Vec::new(),
    })
}

/// Krasnosel'skii-Mann iteration `x_{n+1} = (1 - lambda_n) x_n + lambda_n T_{i_n} x_n`
/// driven by an admissible control sequence.
///
/// On return, `diagnostics.fixed_residuals` holds `|x - T_i x|` at the final
/// iterate for every map used in the last control window.
pub fn km_admissible(
    maps: &[AveragedMap],
    control: &ControlSequence,
    schedule: &Schedule,
    x0: &Vector,
    stop: &StopRule,
) -> Result<IterationTrace> {
    let first = maps.first().ok_or(Error::Empty("no maps"))?;
    let dim = first.dim();
    for m in maps {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
    }
    x0.check_dim(dim)?;
    if control.num_maps() != maps.len() {
        return Err(Error::param(
            "control",
            format!("control ranges over {} maps, {} given", control.num_maps(), maps.len()),
        ));
    }
    let indices = control.generate(stop.max_iters)?;
    schedule.validate(stop.max_iters, |n| maps[indices[n]].alpha().max_relaxation())?;

    let mut trace = drive("km-admissible", x0, &stop.clone().with_window(stop.window.max(control.window())), 1, |n, x| {
        let i = indices[n];
        let lambda = schedule.lambda_at(n);
        let tx = maps[i].apply(x);
        Ok(Stepped {
            next: x.lincomb(1.0 - lambda, &tx, lambda),
            index: i,
            lambda,
            candidates: 1,
            aux: Vec::new(),
        })
    })?;
    let tail = trace.steps.len().saturating_sub(control.window());
    let mut recurring: Vec<usize> = trace.steps[tail..].iter().map(|s| s.index).collect();
    recurring.sort_unstable();
    recurring.dedup();
    let xbar = trace.final_point.clone();
    trace.diagnostics.fixed_residuals = recurring
        .into_iter()
        .map(|i| (i, xbar.dist(&maps[i].apply(&xbar))))
        .collect();
    Ok(trace)
}

/// `x_{n+1} in (1 - lambda_n) x_n + lambda_n T(x_n)` for a union averaged `T`.
pub fn iterate_union(
    t: &UnionMap,
    schedule: &Schedule,
    policy: &SelectionPolicy,
    x0: &Vector,
    stop: &StopRule,
) -> Result<IterationTrace> {
    run_relaxed("iterate-union", t, schedule, policy, x0, stop)
}

pub(crate) fn run_relaxed(
    name: &str,
    t: &UnionMap,
    schedule: &Schedule,
    policy: &SelectionPolicy,
    x0: &Vector,
    stop: &StopRule,
) -> Result<IterationTrace> {
    x0.check_dim(t.dim())?;
    let bound = t.alpha().max_relaxation();
    schedule.validate(stop.max_iters, |_| bound)?;
    let mut state = policy.start();
    let mut trace = drive(name, x0, stop, 1, |n, x| {
        relaxed_union_step(t, x, schedule.lambda_at(n), &mut state, n)
    })?;
    trace.diagnostics.classification = Some(t.classify(&trace.final_point, stop.diag_tol)?);
    Ok(trace)
}

/// `x_{n+1} in T_{i_n}(x_n)` with `i_n = n mod m`; the limit is classified
/// against `T_m o ... o T_1`.
pub fn cyclic_compose(
    maps: &[UnionMap],
    x0: &Vector,
    policy: &SelectionPolicy,
    stop: &StopRule,
) -> Result<IterationTrace> {
    run_cyclic("cyclic-compose", maps, x0, policy, stop)
}

pub(crate) fn run_cyclic(
    name: &str,
    maps: &[UnionMap],
    x0: &Vector,
    policy: &SelectionPolicy,
    stop: &StopRule,
) -> Result<IterationTrace> {
    let composite = crate::ops::compose(maps)?;
    x0.check_dim(composite.dim())?;
    if let Some((j, _)) = maps.iter().enumerate().find(|(_, m)| !m.alpha().is_averaged()) {
        return Err(Error::param(
            "maps",
            format!("map {j} is only nonexpansive; unrelaxed cyclic steps need averaged maps"),
        ));
    }
    let m = maps.len();
    let mut state = policy.start();
    let mut trace = drive(name, x0, stop, m, |n, x| {
        relaxed_union_step(&maps[n % m], x, 1.0, &mut state, n)
    })?;
    trace.diagnostics.classification = Some(composite.classify(&trace.final_point, stop.diag_tol)?);
    Ok(trace)
}
