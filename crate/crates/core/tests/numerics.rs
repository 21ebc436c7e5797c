use std::f64::consts::E;

use eds_core::numerics::{
    convergence_factor, evaluate_batch, fd_closure_check, goursat_numeric, lambert_w,
    residual_goursat, residual_lambertw, tau_numeric, w_factor, wm1_of_negexp, BranchId, Equation,
    NumericChart, NumericError, ResidualSample,
};
use eds_core::structure::{builtin, StructureModel};

const W0: BranchId = BranchId::Principal;
const WM1: BranchId = BranchId::Lower;

/// Root of w e^w = x by bisection on [lo, hi], where w e^w is monotone.
fn bisect(x: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |w: f64| w * w.exp() - x;
    let increasing = f(hi) > f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn within(w: f64, x: f64) -> bool {
    (w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0)
}

#[test]
fn lambert_examples() {
    assert_eq!(lambert_w(W0, 0.0).unwrap(), 0.0);
    assert_eq!(lambert_w(WM1, -1.0 / E).unwrap(), -1.0);
    assert_eq!(lambert_w(W0, -1.0 / E).unwrap(), -1.0);
    assert!((lambert_w(W0, 2.0 * E * E).unwrap() - 2.0).abs() < 1e-14);
    assert!((lambert_w(WM1, -0.3678794411714423).unwrap() + 1.0).abs() < 1e-6);
    assert!((lambert_w(W0, 1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
}

#[test]
fn lambert_domain() {
    assert!(matches!(lambert_w(W0, -0.4), Err(NumericError::Domain(_))));
    assert!(matches!(lambert_w(WM1, -0.4), Err(NumericError::Domain(_))));
    assert!(matches!(lambert_w(WM1, 0.0), Err(NumericError::Domain(_))));
    assert!(matches!(lambert_w(WM1, 1.0), Err(NumericError::Domain(_))));
    assert!(lambert_w(W0, f64::NAN).is_err());
    assert!(BranchId::try_from(1).is_err());
    assert_eq!("-1".parse::<BranchId>().unwrap(), WM1);
}

#[test]
fn lambert_round_trip_log_spaced() {
    let n = 10_000;
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        // branch 0 over 1e-300 .. 1e300 and over (-1/e, 0)
        let x = 10f64.powf(-300.0 + 600.0 * t);
        let w = lambert_w(W0, x).unwrap();
        assert!(within(w, x) && w >= -1.0, "W0({x:e}) = {w}");
        let x = -10f64.powf(-300.0 * t) / E;
        let w = lambert_w(W0, x).unwrap();
        assert!(within(w, x) && w >= -1.0, "W0({x:e}) = {w}");
        // branch -1 over (-1/e, -1e-300)
        let w = lambert_w(WM1, x).unwrap();
        assert!(within(w, x) && w <= -1.0, "W-1({x:e}) = {w}");
    }
}

#[test]
fn lambert_against_bisection() {
    for x in [-0.3, -0.1, -1e-3, 0.5, 1.0, 10.0, 1e5] {
        let w = lambert_w(W0, x).unwrap();
        let oracle = bisect(x, -1.0, 20.0);
        assert!((w - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "W0({x})");
    }
    for x in [-0.36, -0.3, -0.1, -1e-3, -1e-8] {
        let w = lambert_w(WM1, x).unwrap();
        let oracle = bisect(x, -30.0, -1.0);
        assert!((w - oracle).abs() < 1e-10 * oracle.abs(), "W-1({x})");
    }
}

#[test]
fn lower_branch_inversion() {
    for t in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let q = (1.0f64 + t).ln() - t - 1.0;
        let w = lambert_w(WM1, -q.exp()).unwrap();
        assert!((w + 1.0 + t).abs() < 1e-10, "t={t}: {w}");
        assert!((wm1_of_negexp(q).unwrap() + 1.0 + t).abs() < 1e-10);
    }
}

#[test]
fn w_factor_values() {
    for p in [-5.0, 0.0, 3.0, 800.0] {
        assert_eq!(w_factor(p, -1.0).unwrap(), 0.0);
    }
    let expected = (bisect(1.0, -1.0, 5.0) + 1.0) * (bisect(-(-2f64).exp(), -30.0, -1.0) + 1.0);
    let got = w_factor(0.0, -2.0).unwrap();
    assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    assert!(w_factor(0.0, -0.5).is_err());
    // far tails avoid overflow and underflow
    assert!(w_factor(1000.0, -1000.0).unwrap().is_finite());
    assert!((w_factor(1000.0, -2.0).unwrap() - w_factor(1000.0, -2.0).unwrap()).abs() == 0.0);
}

#[test]
fn pde_residuals() {
    // z = x^2: p = 2x, q = 0, zxy = 0
    for (x, y) in [(1.0, 2.0), (-3.0, 0.5), (0.25, -7.0)] {
        let s = ResidualSample::new(x, y, 2.0 * x, 0.0, 0.0);
        assert_eq!(residual_goursat(&s).unwrap(), 0.0);
    }
    // z = xy at (1, 1)
    let s = ResidualSample::new(1.0, 1.0, 1.0, 1.0, 1.0);
    assert_eq!(residual_goursat(&s).unwrap(), 4.0);
    assert!(matches!(
        residual_goursat(&ResidualSample::new(1.0, 1.0, 1.0, -1.0, 1.0)),
        Err(NumericError::Domain(_))
    ));
    assert!(matches!(
        residual_lambertw(&ResidualSample::new(1.0, 1.0, 0.0, -0.5, 1.0)),
        Err(NumericError::Domain(_))
    ));
    let s = ResidualSample::new(2.0, -1.0, 0.3, -1.0, 0.0);
    assert_eq!(residual_lambertw(&s).unwrap(), 0.0);
}

#[test]
fn goursat_residual_symmetry() {
    for s in [
        ResidualSample::new(1.5, -0.25, 2.0, 3.0, 0.7),
        ResidualSample::new(-2.0, 4.0, -1.0, -0.5, 1.25),
    ] {
        assert_eq!(residual_goursat(&s).unwrap(), residual_goursat(&s.swapped()).unwrap());
    }
}

#[test]
fn batches_keep_order_and_round_trip_json() {
    let samples: Vec<ResidualSample> = (0..50)
        .map(|k| ResidualSample::new(k as f64, 1.0, 1.0, k as f64, 1.0))
        .collect();
    let done = evaluate_batch(Equation::Goursat, &samples).unwrap();
    for (k, s) in done.iter().enumerate() {
        assert_eq!(s.x, k as f64);
        assert_eq!(s.residual, residual_goursat(&samples[k]).unwrap());
    }
    let text = serde_json::to_string(&done).unwrap();
    let back: Vec<ResidualSample> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, done);
    let mut bad = samples.clone();
    bad[17].q = -1.0;
    assert!(evaluate_batch(Equation::Goursat, &bad).is_err());
}

fn sigma() -> StructureModel {
    builtin("SIGMA", Some(1)).unwrap().structure().unwrap()
}

fn goursat() -> NumericChart {
    goursat_numeric(&builtin("CHART_GOURSAT", None).unwrap().chart().unwrap())
}

#[test]
fn goursat_numeric_closure() {
    let chart = goursat();
    let pts = chart.sample_points(20, 5);
    assert_eq!(pts, chart.sample_points(20, 5));
    let r = fd_closure_check(&chart, &sigma(), &pts, 1e-5, 1e-6).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.max_d2 <= 1e-6 && r.max_error <= 1e-6);
    assert_eq!(r.outcomes.len(), 10);
}

#[test]
fn goursat_is_not_a_chart_for_the_other_sign() {
    let chart = goursat();
    let pts = chart.sample_points(20, 5);
    let other = builtin("SIGMA", Some(-1)).unwrap().structure().unwrap();
    let r = fd_closure_check(&chart, &other, &pts, 1e-5, 1e-6).unwrap();
    assert!(!r.passed);
    assert!(r.max_error > 1e-3);
}

#[test]
fn second_order_convergence() {
    let chart = goursat();
    let pts = chart.sample_points(20, 5);
    let f = convergence_factor(&chart, &sigma(), &pts, 1e-2).unwrap();
    assert!((3.5..=4.5).contains(&f), "{f}");
}

#[test]
fn tau_numeric_closure() {
    let tau = builtin("TAU", None).unwrap().structure().unwrap();
    let chart = tau_numeric();
    let pts = chart.sample_points(20, 9);
    let r = fd_closure_check(&chart, &tau, &pts, 1e-5, 1e-5).unwrap();
    assert!(r.passed, "{r:?}");
    // five 1-forms and R, S, each with its d² check
    assert_eq!(r.outcomes.len(), 14);
}

#[test]
fn tau_chart_solves_the_lambert_equation_on_the_q_side() {
    // q = ln(1 + W) - W - 1 inverts to W_-1(-e^q) = -(1 + W)
    let chart = tau_numeric();
    for x in chart.sample_points(10, 3) {
        let (d, a, f) = (x[0] - x[1], x[3], x[4]);
        let r = (2.0 * a.cosh() + 2.0).ln() - f;
        let w = (r + a).exp() / ((a.exp() + 1.0) * d);
        let q = w.ln_1p() - w - 1.0;
        assert!((wm1_of_negexp(q).unwrap() + 1.0 + w).abs() < 1e-9);
    }
}

#[test]
fn points_outside_the_domain_are_rejected() {
    let chart = goursat();
    let bad = vec![vec![0.0, 1.0, 1.0, 1.0, 0.0]];
    assert!(matches!(
        fd_closure_check(&chart, &sigma(), &bad, 1e-5, 1e-6),
        Err(NumericError::Domain(_))
    ));
    let near = vec![vec![1.0, 1.0 - 1e-6, 1.0, 1.0, 0.0]];
    assert!(fd_closure_check(&chart, &sigma(), &near, 1e-5, 1e-6).is_err());
    let tau = builtin("TAU", None).unwrap().structure().unwrap();
    assert!(matches!(
        fd_closure_check(&chart, &tau, &chart.sample_points(2, 1), 1e-5, 1e-6),
        Err(NumericError::Model(_))
    ));
}
