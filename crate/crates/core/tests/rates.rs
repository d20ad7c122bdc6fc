use fracld::laws::FracParams;
use fracld::rates::{self, conjugate, kappa, limit_cgf, Interval, RateMethod};
use fracld::Extended;
use proptest::prelude::*;

fn fp(nu: f64, h: f64, lambda: f64) -> FracParams {
    FracParams::new(nu, h, lambda).unwrap()
}

/// Brute-force `sup_{θ ≤ 0} θx − κ(θ)` over a dense grid with a final
/// parabolic polish.
fn dense_grid_rate_t(p: &FracParams, x: f64) -> f64 {
    let phi = |s: f64| {
        let theta = -s * s;
        theta * x - kappa(p, theta).unwrap()
    };
    let mut best = (0.0, phi(0.0));
    let n = 200_000;
    let s_max = 60.0;
    for i in 1..=n {
        let s = s_max * i as f64 / n as f64;
        let v = phi(s);
        if v > best.1 {
            best = (s, v);
        }
    }
    let step = s_max / n as f64;
    let (s, f0) = best;
    let (fm, fp_) = (phi(s - step), phi(s + step));
    let denom = fm - 2.0 * f0 + fp_;
    if denom < 0.0 {
        let ds = 0.5 * step * (fm - fp_) / denom;
        phi(s + ds).max(f0)
    } else {
        f0
    }
}

#[test]
fn general_nu_matches_dense_grid() {
    for (nu, h, lambda) in [(0.7, 1.0, 1.0), (0.3, 2.0, 0.5), (0.9, 1.5, 2.0)] {
        let p = fp(nu, h, lambda);
        for x in [0.2, 1.0, 3.0, 8.0] {
            let r = rates::rate_t(&p, x).unwrap();
            assert_eq!(r.method, RateMethod::NumericConjugate);
            let o = dense_grid_rate_t(&p, x);
            assert!(
                (r.value.unwrap() - o).abs() < 1e-8,
                "p={p:?} x={x}: {:?} vs {o}",
                r.value
            );
        }
    }
}

#[test]
fn half_case_against_dense_grid() {
    let p = fp(0.5, 1.0, 1.0);
    let v = rates::rate_t(&p, 1.0).unwrap().value.unwrap();
    assert!((v - dense_grid_rate_t(&p, 1.0)).abs() < 1e-9);
    let conj = conjugate(|t| Extended::Finite(limit_cgf(&p, t)), 1.0, Interval::REAL_LINE).unwrap();
    assert!((conj.value.unwrap() - v).abs() < 1e-8);
}

#[test]
fn classical_limit_conjugate_vanishes_at_lambda() {
    for lambda in [0.5, 1.0, 4.0] {
        let p = fp(1.0, 1.0, lambda);
        let r = conjugate(|t| Extended::Finite(limit_cgf(&p, t)), lambda, Interval::REAL_LINE).unwrap();
        assert!(r.value.unwrap().abs() < 1e-12);
        assert!(r.argmax_theta.unwrap().abs() < 1e-6);
    }
}

#[test]
fn kappa_conjugate_on_half_line() {
    let p = fp(0.5, 1.0, 1.0);
    let r = conjugate(|t| kappa(&p, t), 2.0, Interval::up_to(0.0)).unwrap();
    let closed = rates::rate_t(&p, 2.0).unwrap().value.unwrap();
    assert!((r.value.unwrap() - closed).abs() < 1e-8);
}

#[test]
fn shape_for_fractional_holding_rate() {
    for nu in [0.3, 0.5, 0.8] {
        let p = fp(nu, 1.0, 1.0);
        let v = |x: f64| rates::rate_t(&p, x).unwrap().value.unwrap();
        let xs: Vec<f64> = (0..60).map(|i| 0.01 * 1.2f64.powi(i)).collect();
        for w in xs.windows(2) {
            assert!(v(w[1]) < v(w[0]), "nu={nu}: not decreasing at {}", w[1]);
        }
        let growth = (v(1e-10) - v(1e-8)) / 100f64.ln();
        assert!((growth - nu).abs() < 0.01, "nu={nu}: log growth {growth}");
        let slope = (v(1e5) / v(1e3)).ln() / 100f64.ln();
        assert!((slope + nu / (1.0 - nu)).abs() < 0.01, "nu={nu}: tail exponent {slope}");
        assert!(rates::rate_t(&p, 0.0).unwrap().value.is_infinite());
    }
}

#[test]
fn shape_for_fractional_count_rate() {
    for nu in [0.3, 0.5, 0.8] {
        let p = fp(nu, 1.0, 1.0);
        assert_eq!(rates::rate_m(&p, 0.0).unwrap().value, Extended::ZERO);
        let mut last = 0.0;
        for i in 1..80 {
            let v = rates::rate_m(&p, 0.1 * i as f64).unwrap().value.unwrap();
            assert!(v >= last - 1e-12, "nu={nu}");
            last = v;
        }
        assert!(rates::rate_m(&p, -0.5).unwrap().value.is_infinite());
    }
}

#[test]
fn residuals_of_the_inverse_identity() {
    for (nu, h, lambda) in [(1.0, 1.0, 1.0), (0.5, 2.0, 1.0), (0.4, 1.0, 3.0)] {
        let p = fp(nu, h, lambda);
        for i in 0..50 {
            let theta = -0.2 * i as f64;
            assert!(rates::glynn_whitt_inverse_residual(&p, theta).unwrap() < 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn count_rate_is_midpoint_convex(nu in prop::sample::select(vec![0.4, 0.5, 0.75, 1.0]),
                                     a in 0.01f64..6.0, b in 0.01f64..6.0) {
        let p = fp(nu, 1.0, 1.0);
        let v = |x: f64| rates::rate_m(&p, x).unwrap().value.unwrap();
        prop_assert!(v(0.5 * (a + b)) <= 0.5 * (v(a) + v(b)) + 1e-10);
    }

    #[test]
    fn rates_are_nonnegative(nu in 0.2f64..=1.0, h in 0.2f64..3.0, x in 0.01f64..10.0) {
        let p = fp(nu, h, 1.0);
        prop_assert!(rates::rate_t(&p, x).unwrap().value.unwrap() >= 0.0);
        prop_assert!(rates::rate_m(&p, x).unwrap().value.unwrap() >= 0.0);
        prop_assert!(rates::rate_a(nu, 1.0, x).unwrap().value.unwrap() >= 0.0);
    }
}
