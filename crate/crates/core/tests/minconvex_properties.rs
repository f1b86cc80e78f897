use proptest::prelude::*;
use unionavg::minconvex::{ConvexPiece, MinConvexFn, OscSelector, Quadratic};
use unionavg::ops::{check_averaged, FixedClass, SampleSpec, DEFAULT_TIE_TOL};
use unionavg::oracle::{brute_force_prox, hausdorff, GridSpec};
use unionavg::sets::ConvexSet;
use unionavg::{vector, Vector};

fn mixed_2d() -> MinConvexFn {
    MinConvexFn::new(vec![
        ConvexPiece::quadratic(Quadratic::new(&[vec![2.0, 0.3], vec![0.3, 1.0]], &[0.5, -1.0], 0.2).unwrap()),
        ConvexPiece::l1(2, 0.8).unwrap().with_label("l1"),
        ConvexPiece::l2(2, 1.1).unwrap(),
        ConvexPiece::indicator(ConvexSet::ball(vector![1.5, -1], 0.4).unwrap()),
        ConvexPiece::indicator(ConvexSet::singleton(vector![-1, 1])),
        ConvexPiece::indicator(ConvexSet::affine(&[vec![1.0, 1.0]], &[2.5]).unwrap()),
    ])
    .unwrap()
}

fn point2() -> impl Strategy<Value = Vector> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| vector![a, b])
}

proptest! {
    #[test]
    fn envelope_minorizes_the_function(x in point2(), gamma in 0.05f64..10.0) {
        let f = mixed_2d();
        let e = f.envelope(gamma, &x).unwrap();
        prop_assert!(e.is_finite());
        prop_assert!(e <= f.value(&x).unwrap().to_f64() + 1e-12);
    }

    #[test]
    fn envelope_is_attained_at_prox_points(x in point2(), gamma in 0.05f64..10.0, y in point2()) {
        let f = mixed_2d();
        let e = f.envelope(gamma, &x).unwrap();
        let t = f.prox_union(gamma, DEFAULT_TIE_TOL).unwrap();
        for p in t.evaluate(&x).unwrap().points() {
            let obj = f.value(&p).unwrap().to_f64() + x.dist_sq(&p) / (2.0 * gamma);
            prop_assert!((obj - e).abs() <= 1e-9 * e.abs().max(1.0));
        }
        let other = f.value(&y).unwrap().to_f64() + x.dist_sq(&y) / (2.0 * gamma);
        prop_assert!(e <= other + 1e-12);
    }

    #[test]
    fn strong_fixed_points_are_local_minima(x in point2(), gamma in 0.1f64..5.0) {
        let f = mixed_2d();
        let t = f.prox_union(gamma, DEFAULT_TIE_TOL).unwrap();
        // land on a fixed point by iterating the prox a few times
        let mut y = x;
        for _ in 0..200 {
            y = t.evaluate(&y).unwrap().entries[0].1.clone();
        }
        let c = f.classify_point(gamma, &y, 1e-7).unwrap();
        if c.class() == FixedClass::StrongFixed {
            prop_assert!(f.is_local_min(&y, 1e-7).unwrap());
        }
    }
}

#[test]
fn piece_minimizers_are_strong_fixed() {
    let cases = vec![
        (ConvexPiece::quadratic(Quadratic::centered(&vector![0.3, -0.7], 1.5).unwrap()), vector![0.3, -0.7]),
        (ConvexPiece::l1(2, 1.0).unwrap(), vector![0, 0]),
        (ConvexPiece::l2(2, 1.0).unwrap(), vector![0, 0]),
        (ConvexPiece::indicator(ConvexSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()), vector![0.5, 1]),
    ];
    for (piece, argmin) in cases {
        let f = MinConvexFn::single(piece);
        for gamma in [0.1, 1.0, 10.0] {
            let c = f.classify_point(gamma, &argmin, 1e-12).unwrap();
            assert_eq!(c.class(), FixedClass::StrongFixed);
            assert!(c.consistent);
        }
        assert!(f.is_local_min(&argmin, 1e-12).unwrap());
    }
}

#[test]
fn prox_union_is_firmly_nonexpansive_piecewise() {
    let f = mixed_2d();
    for gamma in [0.1, 1.0, 10.0] {
        let t = f.prox_union(gamma, DEFAULT_TIE_TOL).unwrap();
        let spec = SampleSpec::new(Vector::zeros(2), 4.0, 3000, 17);
        let r = check_averaged(&t, 0.5, &spec).unwrap();
        assert!(r.passed, "gamma={gamma}: {}", r.max_violation);
    }
}

#[test]
fn osc_holds_for_continuous_and_envelope_selectors() {
    let f = mixed_2d();
    let cont = MinConvexFn::new(vec![
        ConvexPiece::quadratic(Quadratic::centered(&vector![0, 0], 1.0).unwrap()),
        ConvexPiece::quadratic(Quadratic::centered(&vector![1, 1], 3.0).unwrap()),
    ])
    .unwrap();
    for x in [vector![0, 0], vector![0.5, 0.5], vector![2, -1]] {
        let r = cont.osc_probe(&x, 1e-3, 500, OscSelector::Value { tie_tol: 1e-10 }, 4).unwrap();
        assert!(r.passed);
        let r = f.osc_probe(&x, 1e-4, 500, OscSelector::Envelope { gamma: 1.0, tie_tol: 1e-10 }, 4).unwrap();
        assert!(r.passed);
    }
    let pts = MinConvexFn::new(vec![
        ConvexPiece::indicator(ConvexSet::singleton(vector![0, 0])),
        ConvexPiece::indicator(ConvexSet::affine(&[vec![1.0, 0.0]], &[1.0]).unwrap()),
    ])
    .unwrap();
    let r = pts.osc_probe(&vector![1, 3], 0.5, 500, OscSelector::Value { tie_tol: 0.0 }, 9).unwrap();
    assert!(r.passed);
}

#[test]
fn prox_agrees_with_grid_oracle_on_a_fixed_instance() {
    let f = MinConvexFn::new(vec![
        ConvexPiece::quadratic(Quadratic::diagonal(&[2.0, 1.0], &[0.4, -0.2], 0.0).unwrap()),
        ConvexPiece::indicator(ConvexSet::singleton(vector![1, 1])),
        ConvexPiece::l1(2, 0.5).unwrap(),
    ])
    .unwrap();
    let grid = GridSpec::cube(2, -2.0, 2.0, 201).unwrap();
    for x in [vector![0.7, 0.9], vector![-1.2, 0.4], vector![1.4, -1.4]] {
        for gamma in [0.1, 1.0, 10.0] {
            let ours = f.prox_union(gamma, DEFAULT_TIE_TOL).unwrap().evaluate(&x).unwrap().points();
            let oracle = brute_force_prox(&f, gamma, &x, &grid).unwrap();
            assert!(!oracle.boundary);
            assert!(hausdorff(&ours, &oracle.points) <= oracle.cell_diameter, "x={x:?} gamma={gamma}");
        }
    }
}
