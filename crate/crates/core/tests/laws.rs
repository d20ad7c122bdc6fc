use fracld::laws::{mean_by_summation, sample_holding, sample_positive_stable, FracParams, WeightedPoissonLaw};
use fracld::stream::{replicate, McEstimate};

fn mc(seed: u64, n: u64, f: impl Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync) -> McEstimate {
    let v = replicate(seed, n, |_, rng| Ok(f(rng))).unwrap();
    McEstimate::from_samples(&v, seed).unwrap()
}

#[test]
fn positive_stable_laplace_transform() {
    for nu in [0.3, 0.5, 0.9] {
        for s in [0.5f64, 1.0, 3.0] {
            let e = mc(11, 200_000, |rng| (-s * sample_positive_stable(nu, rng)).exp());
            assert!(e.covers((-s.powf(nu)).exp(), 4.0), "nu={nu} s={s}: {e:?}");
        }
    }
}

#[test]
fn fractional_survival_function() {
    // P(T > 1) = E_{1/2,1}(-1) = e·erfc(1) for ν = 1/2, h = λ = 1.
    let p = FracParams::new(0.5, 1.0, 1.0).unwrap();
    let e = mc(12, 200_000, |rng| if sample_holding(&p, rng) > 1.0 { 1.0 } else { 0.0 });
    assert!(e.covers(std::f64::consts::E * libm::erfc(1.0), 4.0), "{e:?}");
}

/// Poisson pmf built by the recurrence `p_{k+1} = p_k·μ/(k+1)` in log scale.
fn poisson_log_pmf(mu: f64, k_max: usize) -> Vec<f64> {
    let mut out = vec![-mu];
    for k in 0..k_max {
        let next = out[k] + mu.ln() - ((k + 1) as f64).ln();
        out.push(next);
    }
    out
}

#[test]
fn classical_weighted_law_is_poisson() {
    for (lambda, t) in [(1.0, 3.0), (2.5, 4.0), (0.3, 10.0)] {
        let law = WeightedPoissonLaw::new(1.0, lambda, t).unwrap();
        let oracle = poisson_log_pmf(lambda * t, 60);
        for (k, &o) in oracle.iter().enumerate() {
            assert!((law.log_pmf(k as u64) - o).abs() < 1e-11 * o.abs().max(1.0), "k={k}");
        }
    }
}

#[test]
fn weighted_law_normalizes_and_means_agree() {
    for (nu, lambda, t) in [(0.3, 1.0, 2.0), (0.5, 2.0, 5.0), (0.8, 0.7, 30.0)] {
        let law = WeightedPoissonLaw::new(nu, lambda, t).unwrap();
        let total: f64 = law.support_scan().unwrap().iter().map(|l| l.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let m = law.mean().unwrap();
        assert!((m - mean_by_summation(&law).unwrap()).abs() < 1e-10 * m.max(1.0));
    }
}

#[test]
fn weighted_sampler_mean() {
    let law = WeightedPoissonLaw::new(0.6, 1.5, 4.0).unwrap();
    let e = mc(13, 100_000, |rng| law.sample(rng).unwrap() as f64);
    assert!(e.covers(law.mean().unwrap(), 4.0), "{e:?}");
}

#[test]
fn tail_matches_direct_sum() {
    let law = WeightedPoissonLaw::new(0.5, 1.0, 9.0).unwrap();
    let direct: f64 = (12..400).map(|k| law.pmf(k)).sum();
    let tail = law.log_tail(12.0).unwrap().exp();
    assert!((tail / direct - 1.0).abs() < 1e-12);
    assert!((law.log_tail(11.2).unwrap() - law.log_tail(12.0).unwrap()).abs() < 1e-15);
}
