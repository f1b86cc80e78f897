use crate::error::{Error, Result};
use crate::minconvex::{check_gamma, MinConvexFn, SmoothConvex};
use crate::ops::{compose, relax, Alpha, AveragedMap, SelectionPolicy, UnionMap, DEFAULT_TIE_TOL};
use crate::solvers::fixed_point::run_relaxed;
use crate::solvers::schedule::Schedule;
use crate::solvers::trace::{drive, IterationTrace, StopRule, Stepped};
use crate::vector::Vector;

/// Proximal point algorithm `x_{n+1} in prox_{gamma f}(x_n)`.
///
/// `diagnostics.local_min` reports whether the final iterate is a local
/// minimum of `f`.
pub fn ppa(
    f: &MinConvexFn,
    gamma: f64,
    policy: &SelectionPolicy,
    x0: &Vector,
    stop: &StopRule,
) -> Result<IterationTrace> {
    let t = f.prox_union(gamma, DEFAULT_TIE_TOL)?;
    let mut trace = run_relaxed("ppa", &t, &Schedule::constant(1.0), policy, x0, stop)?;
    trace.diagnostics.local_min = Some(match f.is_local_min(&trace.final_point, stop.diag_tol) {
        Ok(b) => b,
        Err(_) => {
            trace.diagnostics.notes.push("f = +inf at the final iterate".into());
            false
        }
    });
    Ok(trace)
}

fn check_fb_gamma(gamma: f64, lipschitz: f64) -> Result<()> {
    check_gamma(gamma)?;
    if lipschitz > 0.0 && gamma * lipschitz >= 2.0 {
        return Err(Error::param(
            "gamma",
            format!(
                "gamma = {gamma} is outside (0, 2/L) = (0, {}) for L = {lipschitz}",
                2.0 / lipschitz
            ),
        ));
    }
    Ok(())
}

/// `T_FB = prox_{gamma g} o (Id - gamma grad f)`, union
/// `2/(4 - gamma L)`-averaged for `gamma` in `(0, 2/L)`.
pub fn fb_operator(f: &SmoothConvex, g: &MinConvexFn, gamma: f64) -> Result<UnionMap> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: f.dim(),
        });
    }
    let lip = f.lipschitz();
    check_fb_gamma(gamma, lip)?;
    if lip == 0.0 {
        // A constant gradient makes the forward step a translation, which
        // leaves prox_{gamma g} firmly nonexpansive.
        let pieces = g
            .pieces()
            .iter()
            .map(|p| {
                let (p, f) = (p.clone(), f.clone());
                AveragedMap::new(g.dim(), Alpha::FIRM, format!("fb[{}]", p.label()), move |x| {
                    p.prox(gamma, &x.axpy(-gamma, &f.gradient(x)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (f, g) = (f.clone(), g.clone());
        return UnionMap::new(pieces, move |x| {
            g.active_selector(gamma, &x.axpy(-gamma, &f.gradient(x)), DEFAULT_TIE_TOL)
                .expect("dimensions checked")
        });
    }
    let fc = f.clone();
    let step = AveragedMap::new(g.dim(), Alpha::new(gamma * lip / 2.0)?, "grad-step", move |x| {
        x.axpy(-gamma, &fc.gradient(x))
    })?;
    compose(&[UnionMap::single(step), g.prox_union(gamma, DEFAULT_TIE_TOL)?])
}

/// Forward-backward splitting for `f + g`, `f` smooth convex and `g`
/// min-convex: `x_{n+1} in (1 - lambda_n) x_n + lambda_n T_FB(x_n)`.
///
/// Diagnostics: the final iterate is classified against `T_FB`; when it is
/// strongly fixed, `local_min` records whether it is a local minimum of
/// `f + g`, i.e. `x = prox_{gamma g_i}(x - gamma grad f(x))` for every piece
/// `g_i` attaining `g(x)`.
pub fn forward_backward(
    f: &SmoothConvex,
    g: &MinConvexFn,
    gamma: f64,
    schedule: &Schedule,
    policy: &SelectionPolicy,
    x0: &Vector,
    stop: &StopRule,
) -> Result<IterationTrace> {
    let t = fb_operator(f, g, gamma)?;
    let mut trace = run_relaxed("forward-backward", &t, schedule, policy, x0, stop)?;
    let strong = trace
        .diagnostics
        .classification
        .as_ref()
        .is_some_and(|c| c.class == crate::ops::FixedClass::StrongFixed);
    if strong {
        trace.diagnostics.local_min = Some(smooth_plus_local_min(f, g, gamma, &trace.final_point, stop.diag_tol)?);
    }
    Ok(trace)
}

/// Local-minimum test for `f + g` with `f` smooth: every value-active
/// `g_i` satisfies `x = prox_{gamma g_i}(x - gamma grad f(x))`.
pub fn smooth_plus_local_min(f: &SmoothConvex, g: &MinConvexFn, gamma: f64, x: &Vector, tol: f64) -> Result<bool> {
    check_gamma(gamma)?;
    let active = g.value_active(x, tol)?;
    if active.is_empty() {
        return Ok(false);
    }
    let w = x.axpy(-gamma, &f.gradient(x));
    Ok(active.into_iter().all(|i| g.pieces()[i].prox(gamma, &w).dist(x) <= tol))
}

/// `T_DR = (Id + R_g R_f) / 2` with `R = 2 prox_gamma - Id`; union
/// 1/2-averaged.
pub fn drs_operator(f: &MinConvexFn, g: &MinConvexFn, gamma: f64) -> Result<UnionMap> {
    let rf = relax(&f.prox_union(gamma, DEFAULT_TIE_TOL)?, 2.0)?;
    let rg = relax(&g.prox_union(gamma, DEFAULT_TIE_TOL)?, 2.0)?;
    relax(&compose(&[rf, rg])?, 0.5)
}

/// Douglas-Rachford splitting for `f + g`:
/// `y_n in prox_{gamma f}(x_n)`, `z_n in prox_{gamma g}(2 y_n - x_n)`,
/// `x_{n+1} = x_n + lambda_n (z_n - y_n)`.
///
/// Each step records `(y_n, z_n)` in `aux` and the index `i * |g| + j` of
/// the pieces chosen. When `f` has a single piece, `diagnostics.shadow` is
/// `prox_{gamma f}` of the final iterate and `local_min` tests it as a
/// local minimum of `f + g` using the certificate `u = (x - y) / gamma`.
pub fn douglas_rachford(
    f: &MinConvexFn,
    g: &MinConvexFn,
    gamma: f64,
    schedule: &Schedule,
    policy: &SelectionPolicy,
    x0: &Vector,
    stop: &StopRule,
) -> Result<IterationTrace> {
    let t = drs_operator(f, g, gamma)?;
    x0.check_dim(t.dim())?;
    schedule.validate(stop.max_iters, |_| 2.0)?;
    let pf = f.prox_union(gamma, DEFAULT_TIE_TOL)?;
    let pg = g.prox_union(gamma, DEFAULT_TIE_TOL)?;
    let ng = g.pieces().len();
    let mut state = policy.start();
    let mut trace = drive("douglas-rachford", x0, stop, 1, |n, x| {
        let ye = pf.evaluate(x)?;
        let (i, y) = ye.entries[state.choose(n, &ye.entries)].clone();
        let r = y.lincomb(2.0, x, -1.0);
        let ze = pg.evaluate(&r)?;
        let (j, z) = ze.entries[state.choose(n, &ze.entries)].clone();
        let lambda = schedule.lambda_at(n);
        Ok(Stepped {
            next: x.axpy(lambda, &z.sub(&y)),
            index: i * ng + j,
            lambda,
            candidates: ye.entries.len() * ze.entries.len(),
            aux: vec![y, z],
        })
    })?;
    let xbar = trace.final_point.clone();
    trace.diagnostics.classification = Some(t.classify(&xbar, stop.diag_tol)?);
    if f.pieces().len() == 1 {
        let ybar = f.pieces()[0].prox(gamma, &xbar);
        let u = xbar.sub(&ybar).scale(1.0 / gamma);
        trace.diagnostics.local_min = Some(certified_local_min(f, g, gamma, &ybar, &u, stop.diag_tol)?);
        trace.diagnostics.shadow = Some(ybar);
    } else {
        trace
            .diagnostics
            .notes
            .push("f has several pieces; no shadow point is reported".into());
    }
    Ok(trace)
}

/// `y` minimizes every `f_i + g_j` attaining `(f + g)(y)`, certified by
/// `u in df_i(y)`, `-u in dg_j(y)` through the prox characterization.
fn certified_local_min(f: &MinConvexFn, g: &MinConvexFn, gamma: f64, y: &Vector, u: &Vector, tol: f64) -> Result<bool> {
    let fv = f.piece_values(y)?;
    let gv = g.piece_values(y)?;
    let mut best = f64::INFINITY;
    for a in &fv {
        for b in &gv {
            best = best.min((*a + *b).to_f64());
        }
    }
    if !best.is_finite() {
        return Ok(false);
    }
    let fwd = y.axpy(gamma, u);
    let bwd = y.axpy(-gamma, u);
    for (i, a) in fv.iter().enumerate() {
        for (j, b) in gv.iter().enumerate() {
            if (*a + *b).to_f64() <= best + tol {
                let ok_f = f.pieces()[i].prox(gamma, &fwd).dist(y) <= tol;
                let ok_g = g.pieces()[j].prox(gamma, &bwd).dist(y) <= tol;
                if !(ok_f && ok_g) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minconvex::{ConvexPiece, Quadratic};
    use crate::ops::FixedClass;
    use crate::sets::ConvexSet;
    use crate::vector;

    fn points(a: f64, b: f64) -> MinConvexFn {
        MinConvexFn::new(vec![
            ConvexPiece::indicator(ConvexSet::singleton(vector![a])),
            ConvexPiece::indicator(ConvexSet::singleton(vector![b])),
        ])
        .unwrap()
    }

    fn half_square() -> Quadratic {
        Quadratic::diagonal(&[1.0], &[0.0], 0.0).unwrap()
    }

    #[test]
    fn ppa_examples() {
        let tr = ppa(&points(0.0, 2.0), 1.0, &SelectionPolicy::LowestIndex, &vector![0.9], &StopRule::new(20)).unwrap();
        assert_eq!(tr.final_point, vector![0]);
        assert_eq!(tr.diagnostics.local_min, Some(true));

        let squares = MinConvexFn::new(vec![
            ConvexPiece::quadratic(Quadratic::centered(&vector![0], 2.0).unwrap()),
            ConvexPiece::quadratic(Quadratic::centered(&vector![2], 2.0).unwrap()),
        ])
        .unwrap();
        let tr = ppa(&squares, 1.0, &SelectionPolicy::LowestIndex, &vector![1.6], &StopRule::new(1000)).unwrap();
        assert!(tr.converged());
        assert!((tr.final_point[0] - 2.0).abs() < 1e-9);
        assert!(tr.steps.iter().all(|s| s.index == 1));
        assert_eq!(tr.diagnostics.local_min, Some(true));
    }

    #[test]
    fn fb_alpha_matches_closed_form() {
        let g = points(-1.0, 1.0);
        for (lip, gamma) in [(1.0, 0.5), (2.0, 0.9), (4.0, 0.1)] {
            let f = SmoothConvex::quadratic(Quadratic::diagonal(&[lip], &[0.0], 0.0).unwrap());
            let t = fb_operator(&f, &g, gamma).unwrap();
            let expected = 2.0 / (4.0 - gamma * lip);
            assert!((t.alpha().value() - expected).abs() <= 1e-15, "L={lip} gamma={gamma}");
        }
    }

    #[test]
    fn fb_gamma_window() {
        let f = SmoothConvex::quadratic(half_square());
        let err = fb_operator(&f, &points(-1.0, 1.0), 3.0).unwrap_err();
        assert!(err.to_string().contains("(0, 2)"), "{err}");
        assert!(fb_operator(&f, &points(-1.0, 1.0), 2.0).is_err());
    }

    #[test]
    fn fb_two_points() {
        let f = SmoothConvex::quadratic(half_square());
        let tr = forward_backward(
            &f,
            &points(-1.0, 1.0),
            0.5,
            &Schedule::constant(1.0),
            &SelectionPolicy::LowestIndex,
            &vector![-0.8],
            &StopRule::new(50),
        )
        .unwrap();
        assert_eq!(tr.final_point, vector![-1]);
        assert_eq!(tr.diagnostics.classification.unwrap().class, FixedClass::StrongFixed);
        assert_eq!(tr.diagnostics.local_min, Some(true));
    }

    #[test]
    fn fb_with_zero_smooth_part_is_ppa() {
        let g = MinConvexFn::single(ConvexPiece::l1(2, 1.0).unwrap());
        let x0 = vector![3, -0.5];
        let fb = forward_backward(
            &SmoothConvex::zero(2),
            &g,
            0.7,
            &Schedule::constant(1.0),
            &SelectionPolicy::LowestIndex,
            &x0,
            &StopRule::new(50),
        )
        .unwrap();
        let p = ppa(&g, 0.7, &SelectionPolicy::LowestIndex, &x0, &StopRule::new(50)).unwrap();
        assert_eq!(fb.iterates().collect::<Vec<_>>(), p.iterates().collect::<Vec<_>>());
    }

    #[test]
    fn fb_convex_case_reaches_global_minimizer() {
        // min (x-3)^2/2 + |x|: minimizer x = 2
        let f = SmoothConvex::quadratic(Quadratic::centered(&vector![3], 1.0).unwrap());
        let g = MinConvexFn::single(ConvexPiece::l1(1, 1.0).unwrap());
        let tr = forward_backward(
            &f,
            &g,
            1.0,
            &Schedule::constant(1.0),
            &SelectionPolicy::LowestIndex,
            &vector![-5],
            &StopRule::new(1000),
        )
        .unwrap();
        assert!((tr.final_point[0] - 2.0).abs() <= 1e-8);
    }

    #[test]
    fn dr_crossing_axes_one_step() {
        let f = MinConvexFn::single(ConvexPiece::indicator(ConvexSet::coordinate(2, vec![0]).unwrap()));
        let g = MinConvexFn::single(ConvexPiece::indicator(ConvexSet::coordinate(2, vec![1]).unwrap()));
        let tr = douglas_rachford(
            &f,
            &g,
            1.0,
            &Schedule::constant(1.0),
            &SelectionPolicy::LowestIndex,
            &vector![3, -2],
            &StopRule::new(10),
        )
        .unwrap();
        assert_eq!(tr.steps[1].x, vector![0, 0]);
        assert_eq!(tr.diagnostics.shadow, Some(vector![0, 0]));
        assert_eq!(tr.diagnostics.local_min, Some(true));
        assert_eq!(drs_operator(&f, &g, 1.0).unwrap().alpha(), Alpha::FIRM);
    }

    #[test]
    fn dr_quadratic_plus_two_points() {
        let f = MinConvexFn::single(ConvexPiece::quadratic(half_square()));
        let g = points(-1.0, 1.0);
        // gamma = 1: 2y - x = 0 for every x, so the g-step always sits on a tie;
        // x = 2 is fixed through the piece at +1 only.
        let take_last = SelectionPolicy::callback(|_, e| e.len() - 1);
        let tr = douglas_rachford(&f, &g, 1.0, &Schedule::constant(1.0), &take_last, &vector![2], &StopRule::new(10))
            .unwrap();
        assert_eq!(tr.final_point, vector![2]);
        assert!(tr.diagnostics.shadow.unwrap().dist(&vector![1]) < 1e-15);
        assert_eq!(tr.diagnostics.local_min, Some(true));
        assert_eq!(tr.diagnostics.classification.unwrap().class, FixedClass::Fixed);

        let tr = douglas_rachford(
            &f,
            &g,
            0.5,
            &Schedule::constant(1.0),
            &SelectionPolicy::LowestIndex,
            &vector![1.4],
            &StopRule::new(1000),
        )
        .unwrap();
        assert!(tr.converged());
        assert!((tr.final_point[0] - 1.5).abs() < 1e-9);
        assert_eq!(tr.diagnostics.classification.unwrap().class, FixedClass::StrongFixed);
        assert!(tr.diagnostics.shadow.unwrap().dist(&vector![1]) < 1e-9);
        assert_eq!(tr.diagnostics.local_min, Some(true));
        assert_eq!(tr.steps[0].aux.len(), 2);
    }

    #[test]
    fn dr_equal_singletons() {
        let c = vector![1, -2];
        let f = MinConvexFn::single(ConvexPiece::indicator(ConvexSet::singleton(c.clone())));
        let tr = douglas_rachford(
            &f,
            &f.clone(),
            1.0,
            &Schedule::constant(1.0),
            &SelectionPolicy::LowestIndex,
            &vector![7, 7],
            &StopRule::new(10),
        )
        .unwrap();
        assert!(tr.steps.iter().all(|s| s.aux[0] == c));
        assert_eq!(tr.diagnostics.shadow, Some(c));
    }

    #[test]
    fn dr_rejects_bad_parameters() {
        let f = MinConvexFn::single(ConvexPiece::quadratic(half_square()));
        let g = points(-1.0, 1.0);
        let p = SelectionPolicy::LowestIndex;
        assert!(douglas_rachford(&f, &g, 0.0, &Schedule::constant(1.0), &p, &vector![1], &StopRule::new(5)).is_err());
        assert!(douglas_rachford(&f, &g, 1.0, &Schedule::constant(2.0), &p, &vector![1], &StopRule::new(5)).is_err());
    }
}
