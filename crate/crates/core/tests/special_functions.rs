use fracld::special_fn::{log_ml, ml, ml_generalized};
use fracld::Error;
use proptest::prelude::*;

/// Direct power series for non-negative arguments, where no cancellation
/// can occur. Terms are scaled by the largest one to avoid overflow.
fn naive_series(alpha: f64, beta: f64, z: f64) -> f64 {
    assert!(z >= 0.0);
    if z == 0.0 {
        return 1.0 / libm::tgamma(beta);
    }
    let logs: Vec<f64> = (0..20_000)
        .map(|k| k as f64 * z.ln() - libm::lgamma(alpha * k as f64 + beta))
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top.exp() * logs.iter().map(|l| (l - top).exp()).sum::<f64>()
}

#[test]
fn agrees_with_naive_series_on_positive_axis() {
    for alpha in [0.3, 0.5, 0.9, 1.0, 1.5, 2.5] {
        for beta in [0.5, 1.0, 2.0, 3.3] {
            for z in [0.0, 0.1, 1.0, 2.5, 5.0] {
                let v = ml(alpha, beta, z).unwrap();
                let o = naive_series(alpha, beta, z);
                assert!(
                    (v / o - 1.0).abs() < 1e-12,
                    "alpha={alpha} beta={beta} z={z}: {v} vs {o}"
                );
            }
        }
    }
}

#[test]
fn shift_identity_in_beta() {
    // E_{a,b}(z) = 1/Γ(b) + z E_{a,a+b}(z)
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    for z in [-2.0, -0.7, 0.0, 0.4, 1.5, 3.0] {
        let lhs = ml(0.5, 0.5, z).unwrap();
        let rhs = inv_sqrt_pi + z * ml(0.5, 1.0, z).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "z={z}: {lhs} vs {rhs}");
    }
}

#[test]
fn trigonometric_cases() {
    for x in [0.1f64, 0.5, 1.0, 2.0, 3.0, 4.5] {
        let c = ml(2.0, 1.0, -x * x).unwrap();
        assert!((c - x.cos()).abs() < 1e-13, "cos {x}");
        let s = ml(2.0, 2.0, -x * x).unwrap();
        assert!((s - x.sin() / x).abs() < 1e-13, "sin {x}");
    }
}

#[test]
fn exponential_half_line() {
    for z in [0.0f64, 0.3, 1.0, 2.0, 2.9] {
        let v = ml(0.5, 1.0, -z).unwrap();
        let o = (z * z).exp() * libm::erfc(z);
        assert!((v / o - 1.0).abs() < 1e-9, "z={z}");
        let v = ml(0.5, 1.0, z).unwrap();
        let o = (z * z).exp() * libm::erfc(-z);
        assert!((v / o - 1.0).abs() < 1e-12, "z={z}");
    }
}

#[test]
fn generalized_reduces_to_exponential() {
    // E^γ_{1,γ}(z) = e^z / Γ(γ)
    for gamma in [0.5, 1.0, 2.0, 3.5] {
        for z in [-3.0f64, -0.5, 0.0, 1.0, 4.0] {
            let v = ml_generalized(1.0, gamma, gamma, z).unwrap();
            let o = z.exp() / libm::tgamma(gamma);
            assert!((v / o - 1.0).abs() < 1e-12, "gamma={gamma} z={z}: {v} vs {o}");
        }
    }
}

#[test]
fn log_scale_matches_plain_scale() {
    for (alpha, beta) in [(0.5, 1.0), (0.8, 0.8), (1.0, 2.0), (1.7, 1.0)] {
        for z in [0.5, 3.0, 10.0, 25.0] {
            let l = log_ml(alpha, beta, z).unwrap();
            let p = match ml(alpha, beta, z) {
                Ok(v) => v.ln(),
                Err(Error::Range(_)) => {
                    assert!(l > f64::MAX.ln(), "alpha={alpha} z={z}: overflow reported at log {l}");
                    continue;
                }
                Err(e) => panic!("alpha={alpha} z={z}: {e}"),
            };
            assert!((l - p).abs() < 1e-12 * p.abs().max(1.0), "alpha={alpha} z={z}");
        }
    }
}

#[test]
fn log_ml_switches_to_leading_term_continuously() {
    // z^{1/α} = 700 at the switch.
    let alpha = 0.2;
    let z0 = 700f64.powf(alpha);
    let below = log_ml(alpha, 1.0, z0 * (1.0 - 1e-9)).unwrap();
    let above = log_ml(alpha, 1.0, z0 * (1.0 + 1e-9)).unwrap();
    assert!((above - below).abs() < 1e-5);
    assert!(log_ml(alpha, 1.0, 13.5).unwrap() > 4e5);
}

#[test]
fn large_arguments_need_log_scale() {
    assert!(matches!(ml(0.5, 1.0, 1e6), Err(Error::Range(_))));
    assert!(log_ml(0.5, 1.0, 1e6).unwrap().is_finite());
}

proptest! {
    #[test]
    fn exponential_case(z in -15.0f64..15.0) {
        let v = ml(1.0, 1.0, z).unwrap();
        prop_assert!((v / z.exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_ml_is_increasing(nu in 0.2f64..1.0, z in 0.01f64..40.0, dz in 0.01f64..5.0) {
        let a = log_ml(nu, 1.0, z).unwrap();
        let b = log_ml(nu, 1.0, z + dz).unwrap();
        prop_assert!(b > a);
    }
}
