use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unionavg::ops::{
    check_averaged, compose, convex_combination, relax, union_of, Alpha, AveragedMap, SampleSpec, UnionMap,
    DEFAULT_TIE_TOL,
};
use unionavg::oracle::estimate_radius;
use unionavg::sets::{project_union, sparsity_set, ConvexSet, UnionConvexSet};
use unionavg::{vector, Vector};

fn scaled(alpha: f64) -> UnionMap {
    // x -> (1 - 2 alpha) x is exactly alpha-averaged (R = -Id).
    UnionMap::single(AveragedMap::new(2, Alpha::new(alpha).unwrap(), "scaled", move |x| x.scale(1.0 - 2.0 * alpha)).unwrap())
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

proptest! {
    #[test]
    fn union_constant_is_the_max(a in prop::collection::vec(alpha_strategy(), 1..6)) {
        let maps: Vec<_> = a.iter().map(|&v| scaled(v)).collect();
        let u = union_of(&maps).unwrap();
        let max = a.iter().copied().fold(0.0, f64::max);
        prop_assert_eq!(u.alpha().value(), max);
    }

    #[test]
    fn combination_constant(a in prop::collection::vec(alpha_strategy(), 2..5), raw in prop::collection::vec(0.1f64..1.0, 5)) {
        let w: Vec<f64> = raw[..a.len()].to_vec();
        let s: f64 = w.iter().sum();
        let mut w: Vec<f64> = w.iter().map(|v| v / s).collect();
        let tail: f64 = w[..w.len() - 1].iter().sum();
        *w.last_mut().unwrap() = 1.0 - tail;
        let maps: Vec<_> = a.iter().map(|&v| scaled(v)).collect();
        let c = convex_combination(&maps, &w).unwrap();
        let expected: f64 = a.iter().zip(&w).map(|(x, y)| x * y).sum();
        prop_assert!((c.alpha().value() - expected).abs() <= 1e-15);
    }

    #[test]
    fn composition_constant(a in prop::collection::vec(alpha_strategy(), 1..5)) {
        let maps: Vec<_> = a.iter().map(|&v| scaled(v)).collect();
        let c = compose(&maps).unwrap();
        let s: f64 = a.iter().map(|v| v / (1.0 - v)).sum();
        let expected = 1.0 / (1.0 + 1.0 / s);
        prop_assert!((c.alpha().value() - expected).abs() <= 1e-15);
    }

    #[test]
    fn composites_of_projectors_pass_the_sampled_inequality(
        centers in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..4),
        seed in any::<u64>(),
        lambda in 0.2f64..1.0,
    ) {
        let maps: Vec<UnionMap> = centers
            .iter()
            .map(|&(a, b)| {
                let set = UnionConvexSet::new(vec![
                    ConvexSet::ball(vector![a, b], 0.5).unwrap().into(),
                    ConvexSet::singleton(vector![-a, b]).into(),
                ]).unwrap();
                project_union(&set, DEFAULT_TIE_TOL).unwrap()
            })
            .collect();
        let spec = SampleSpec::new(Vector::zeros(2), 3.0, 200, seed);
        let composite = relax(&compose(&maps).unwrap(), lambda).unwrap();
        let r = check_averaged(&composite, composite.alpha().value(), &spec).unwrap();
        prop_assert!(r.passed, "{:?}", r.max_violation);
        let comb = convex_combination(&maps[..2], &[0.25, 0.75]).unwrap();
        let r = check_averaged(&comb, comb.alpha().value(), &spec).unwrap();
        prop_assert!(r.passed, "{:?}", r.max_violation);
    }

    #[test]
    fn evaluation_is_nonempty_and_repeatable(x in prop::collection::vec(-3.0f64..3.0, 4)) {
        let p = project_union(&sparsity_set(4, 2).unwrap(), DEFAULT_TIE_TOL).unwrap();
        let t = compose(&[p.clone(), relax(&p, 1.5).unwrap()]).unwrap();
        let x = Vector::new(x).unwrap();
        let a = t.evaluate(&x).unwrap();
        let b = t.evaluate(&x).unwrap();
        prop_assert!(!a.entries.is_empty());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn selector_is_osc_within_the_estimated_radius() {
    let p = project_union(&sparsity_set(3, 1).unwrap(), DEFAULT_TIE_TOL).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for xstar in [vector![1, 0, 0], vector![2, 1, 0.5], vector![0, 0, 0], vector![1, 1, 0]] {
        let est = estimate_radius(&p, &xstar, 2.0, 300, 5).unwrap();
        let base = p.selector(&xstar).unwrap();
        for _ in 0..1000 {
            let dir: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let d = Vector::new(dir).unwrap();
            if d.norm() == 0.0 {
                continue;
            }
            let r = est.radius * rng.random::<f64>();
            let x = xstar.axpy(r / d.norm(), &d);
            let sel = p.selector(&x).unwrap();
            assert!(sel.iter().all(|i| base.contains(i)), "x*={xstar:?} x={x:?}");
        }
    }
}

#[test]
fn reflector_composition_is_nonexpansive_only() {
    let a = UnionConvexSet::convex(ConvexSet::coordinate(2, vec![0]).unwrap());
    let r = unionavg::sets::reflect_union(&a).unwrap();
    let rr = compose(&[r.clone(), r]).unwrap();
    assert_eq!(rr.alpha(), Alpha::NONEXPANSIVE);
    assert!(relax(&rr, 0.5).unwrap().alpha() == Alpha::FIRM);
    let spec = SampleSpec::new(Vector::zeros(2), 2.0, 300, 3);
    assert!(check_averaged(&rr, 1.0, &spec).unwrap().passed);
}
