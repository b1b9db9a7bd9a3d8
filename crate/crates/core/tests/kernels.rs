mod common;

use chermite_core::kernels::*;
use chermite_core::ComplexValue;
use common::*;

const POINTS: usize = 20;

fn assert_agree(name: &str, closed: ComplexValue, series: SeriesResult, tol: f64) {
    let cmp = KernelComparison::new(name, closed, series, tol);
    assert!(cmp.ok(), "{name}: {cmp:?}");
}

fn policy(tol: f64) -> TruncationPolicy {
    TruncationPolicy::new(tol * SERIES_TOL_FACTOR, DEFAULT_MAX_ORDER).unwrap()
}

#[test]
fn genfn_seeded_points() {
    let mut rng = rng(11);
    for _ in 0..POINTS {
        let p = GenfnParams {
            x: in_disk(&mut rng, 2.0),
            y: in_disk(&mut rng, 2.0),
            z: in_disk(&mut rng, 2.0),
            s: in_disk(&mut rng, 1.0),
            t: in_disk(&mut rng, 1.0),
        };
        assert_agree(
            "genfn",
            genfn_closed(&p).unwrap(),
            genfn_series(&p, policy(1e-10)).unwrap(),
            1e-10,
        );
    }
}

#[test]
fn mehler_seeded_points() {
    let mut rng = rng(12);
    for _ in 0..POINTS {
        let p = mehler_point(&mut rng);
        assert_agree(
            "mehler",
            mehler_closed(&p).unwrap(),
            mehler_series(&p, policy(1e-10)).unwrap(),
            1e-10,
        );
    }
}

#[test]
fn mehler_near_the_guard() {
    // |s t z1 z2| = 0.81: slow geometric convergence, still inside the domain
    let p = MehlerParams {
        x1: 0.2.into(),
        y1: 0.1.into(),
        z1: 0.9.into(),
        x2: (-0.1).into(),
        y2: 0.3.into(),
        z2: 0.9.into(),
        s: 1.0.into(),
        t: 1.0.into(),
    };
    let series = mehler_series(&p, TruncationPolicy::new(1e-12, 400).unwrap()).unwrap();
    assert!(series.converged);
    assert_agree("mehler", mehler_closed(&p).unwrap(), series, 1e-9);
}

#[test]
fn multilinear_seeded_points() {
    let mut rng = rng(13);
    for r in 1..=2 {
        for _ in 0..POINTS {
            let p = multilinear_point(&mut rng, r);
            assert_agree(
                "multilinear",
                multilinear_closed(&p).unwrap(),
                multilinear_series(&p, policy(1e-9)).unwrap(),
                1e-9,
            );
        }
    }
}

#[test]
fn multilinear_three_blocks() {
    let mut rng = rng(14);
    for _ in 0..5 {
        let p = multilinear_point(&mut rng, 3);
        assert_agree(
            "multilinear",
            multilinear_closed(&p).unwrap(),
            multilinear_series(&p, policy(1e-9)).unwrap(),
            1e-9,
        );
    }
}

#[test]
fn mixed_seeded_points() {
    let mut rng = rng(15);
    for _ in 0..POINTS {
        let p = mixed_point(&mut rng);
        assert_agree(
            "mixed",
            mixed_kernel_closed(&p).unwrap(),
            mixed_kernel_series(&p, policy(1e-8)).unwrap(),
            1e-8,
        );
        for k in 1..=3 {
            assert_agree(
                "mixed-shifted",
                mixed_kernel_shifted_closed(k, &p).unwrap(),
                mixed_kernel_shifted_series(k, &p, policy(1e-8)).unwrap(),
                1e-8,
            );
        }
    }
}

#[test]
fn classical_seeded_points() {
    let mut rng = rng(16);
    for _ in 0..POINTS {
        let p = classical_point(&mut rng);
        assert_agree(
            "classical-mehler",
            classical_mehler_closed(&p).unwrap(),
            classical_mehler_series(&p, policy(1e-10)).unwrap(),
            1e-10,
        );
        for k in 0..=4 {
            assert_agree(
                "weisner",
                weisner_closed(k, &p).unwrap(),
                weisner_series(k, &p, policy(1e-10)).unwrap(),
                1e-10,
            );
        }
    }
}

#[test]
fn mehler_is_symmetric_in_its_points() {
    let mut rng = rng(17);
    for _ in 0..POINTS {
        let p = mehler_point(&mut rng);
        let q = MehlerParams {
            x1: p.x2,
            y1: p.y2,
            z1: p.z2,
            x2: p.x1,
            y2: p.y1,
            z2: p.z1,
            ..p
        };
        assert!(rel_err(mehler_closed(&q).unwrap(), mehler_closed(&p).unwrap()) < 1e-13);
        let a = mehler_series(&p, policy(1e-10)).unwrap().value;
        let b = mehler_series(&q, policy(1e-10)).unwrap().value;
        assert!(rel_err(a, b) < 1e-11);
    }
}

#[test]
fn multilinear_with_one_block_is_mehler() {
    let mut rng = rng(18);
    for _ in 0..POINTS {
        let p = multilinear_point(&mut rng, 1);
        let m = MehlerParams {
            x1: p.xs[0],
            y1: p.ys[0],
            z1: p.zs[0],
            x2: p.x,
            y2: p.y,
            z2: p.z,
            s: p.ss[0],
            t: p.ts[0],
        };
        assert!(rel_err(multilinear_closed(&p).unwrap(), mehler_closed(&m).unwrap()) < 1e-13);
        let a = multilinear_series(&p, policy(1e-10)).unwrap().value;
        let b = mehler_series(&m, policy(1e-10)).unwrap().value;
        assert!(rel_err(a, b) < 1e-11);
    }
}

#[test]
fn guards_reject_every_kernel_outside_its_domain() {
    let on = |v: f64| ComplexValue::new(v, 0.0);
    let m = MehlerParams {
        x1: on(0.1),
        y1: on(0.1),
        z1: on(1.0),
        x2: on(0.1),
        y2: on(0.1),
        z2: on(1.0),
        s: on(1.0),
        t: on(1.0),
    };
    assert!(matches!(
        mehler_closed(&m),
        Err(chermite_core::Error::OutsideConvergenceDomain { .. })
    ));
    let mut ml = multilinear_point(&mut rng(19), 2);
    ml.z = on(1e3);
    assert!(multilinear_series(&ml, TruncationPolicy::default()).is_err());
    let mx = MixedParams {
        x: on(0.0),
        y: on(0.0),
        z: on(1.0),
        u: on(0.0),
        v: on(0.0),
        s: on(1.0),
        t: on(0.5),
    };
    assert!(mixed_kernel_series(&mx, TruncationPolicy::default()).is_err());
    let c = ClassicalParams {
        u: on(0.0),
        v: on(0.0),
        t: on(-0.5),
    };
    assert!(weisner_closed(2, &c).is_err());
}
