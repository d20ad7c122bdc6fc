//! Renewal path simulation, large-deviation profiles and the subordinated
//! representation of the `ν = 1/2` count.

mod quadrature;

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::laws::{sample_holding, FracParams, WeightedPoissonLaw};
use crate::num::CompensatedSum;
use crate::special_fn::ln_gamma;
use crate::stream::replicate;

pub use quadrature::integrate;

/// Arrival epochs of the renewal process on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewalPath {
    pub params: FracParams,
    pub horizon: f64,
    pub arrivals: Vec<f64>,
}

impl RenewalPath {
    pub fn count(&self) -> u64 {
        self.arrivals.len() as u64
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("horizon must be > 0, got {t}")))
    }
}

pub fn simulate_path<R: Rng + ?Sized>(p: &FracParams, t: f64, rng: &mut R) -> Result<RenewalPath> {
    check_horizon(t)?;
    let mut arrivals = Vec::new();
    let mut s = 0.0;
    loop {
        s += sample_holding(p, rng);
        if s > t {
            break;
        }
        arrivals.push(s);
    }
    Ok(RenewalPath {
        params: *p,
        horizon: t,
        arrivals,
    })
}

/// `M(t)`: number of partial sums of holding times not exceeding `t`.
pub fn simulate_count<R: Rng + ?Sized>(p: &FracParams, t: f64, rng: &mut R) -> Result<u64> {
    check_horizon(t)?;
    let mut s = 0.0;
    let mut n = 0;
    loop {
        s += sample_holding(p, rng);
        if s > t {
            return Ok(n);
        }
        n += 1;
    }
}

/// A point of a Monte Carlo profile `−(1/t) log P(M(t)/t ≥ x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub t: f64,
    /// Profile estimate, or its lower bound when `bound` is set.
    pub estimate: f64,
    /// Delta-method standard error; zero for bounds.
    pub std_error: f64,
    pub hits: u64,
    pub n_rep: u64,
    /// No replication hit the event: `estimate` is `−(1/t) log(3/n_rep)`.
    pub bound: bool,
}

/// Largest supported number of cells in a Monte Carlo profile.
pub const MAX_PROFILE_CELLS: usize = 64;

/// Monte Carlo profile of the upper tail `{M(t)/t ≥ x}` along `t_grid`.
///
/// All cells share the same replications: replication `i` simulates one path
/// up to `max t`, stopping as soon as every cell is decided.
pub fn ldp_profile_renewal(p: &FracParams, x: f64, t_grid: &[f64], n_rep: u64, seed: u64) -> Result<Vec<ProfilePoint>> {
    if t_grid.is_empty() || t_grid.len() > MAX_PROFILE_CELLS {
        return Err(Error::InvalidInput(format!(
            "t grid must have 1..={MAX_PROFILE_CELLS} points, got {}",
            t_grid.len()
        )));
    }
    for &t in t_grid {
        check_horizon(t)?;
    }
    if n_rep == 0 {
        return Err(Error::InvalidInput("n_rep must be positive".into()));
    }
    if !(x.is_finite()) {
        return Err(Error::InvalidInput(format!("x must be finite, got {x}")));
    }
    let needed: Vec<u64> = t_grid.iter().map(|&t| (x * t).ceil().max(0.0) as u64).collect();
    let k_max = needed.iter().copied().max().unwrap_or(0);
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);

    let masks = replicate(seed, n_rep, |_, rng| {
        let mut mask = 0u64;
        for (j, &k) in needed.iter().enumerate() {
            if k == 0 {
                mask |= 1 << j;
            }
        }
        let mut s = 0.0;
        for n in 1..=k_max {
            s += sample_holding(p, rng);
            if s > t_max {
                break;
            }
            for (j, &k) in needed.iter().enumerate() {
                if k == n && s <= t_grid[j] {
                    mask |= 1 << j;
                }
            }
        }
        Ok(mask)
    })?;

    let mut out = Vec::with_capacity(t_grid.len());
    for (j, &t) in t_grid.iter().enumerate() {
        let hits = masks.iter().filter(|&&m| m & (1 << j) != 0).count() as u64;
        let n = n_rep as f64;
        let point = if hits == 0 {
            ProfilePoint {
                t,
                estimate: -(3.0 / n).ln() / t,
                std_error: 0.0,
                hits,
                n_rep,
                bound: true,
            }
        } else {
            let phat = hits as f64 / n;
            ProfilePoint {
                t,
                estimate: (-phat.ln() / t).max(0.0),
                std_error: ((1.0 - phat) / (n * phat)).sqrt() / t,
                hits,
                n_rep,
                bound: false,
            }
        };
        out.push(point);
    }
    if out.iter().all(|pt| pt.bound) {
        return Err(Error::InsufficientReplications { n_rep });
    }
    Ok(out)
}

/// A point of an exact profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactProfilePoint {
    pub t: f64,
    pub value: f64,
}

/// Exact profile `−(1/t) log P(A(t) ≥ xt)` of the weighted Poisson
/// (alternative) version.
pub fn ldp_profile_weighted(nu: f64, lambda: f64, x: f64, t_grid: &[f64]) -> Result<Vec<ExactProfilePoint>> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x must be >= 0, got {x}")));
    }
    t_grid
        .iter()
        .map(|&t| {
            check_horizon(t)?;
            let law = WeightedPoissonLaw::new(nu, lambda, t)?;
            let lt = law.log_tail(x * t)?;
            Ok(ExactProfilePoint { t, value: -lt / t })
        })
        .collect()
}

/// Absolute accuracy of [`subordinated_pmf`].
pub const SUBORDINATED_TOL: f64 = 1e-10;

/// `P(N_λ(|B(2t)|) = k)`: the Poisson(`λy`) pmf mixed over the half-normal
/// law of `|B(2t)|`.
///
/// The integral is split at the 99.9999% quantile `q` of `|B(2t)|`; the tail
/// `[q, ∞)` is mapped to `(0, 1]` by `y = q − log v`.
pub fn subordinated_pmf(lambda: f64, t: f64, k: u64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
    }
    check_horizon(t)?;
    let kf = k as f64;
    let log_const = -ln_gamma(kf + 1.0) - 0.5 * (std::f64::consts::PI * t).ln();
    let integrand = |y: f64| {
        if y <= 0.0 {
            return if k == 0 { log_const.exp() } else { 0.0 };
        }
        (kf * (lambda * y).ln() - lambda * y - y * y / (4.0 * t) + log_const).exp()
    };
    let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
    let q = (2.0 * t).sqrt() * std_normal.inverse_cdf(1.0 - 0.5e-6);
    let (body, _) = integrate(integrand, 0.0, q, 0.5 * SUBORDINATED_TOL)?;
    let tail_integrand = |v: f64| if v <= 0.0 { 0.0 } else { integrand(q - v.ln()) / v };
    let (tail, _) = integrate(tail_integrand, 0.0, 1.0, 0.5 * SUBORDINATED_TOL)?;
    Ok((body + tail).clamp(0.0, 1.0))
}

/// One cell of a χ² comparison. `k = None` is the tail bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmfBin {
    pub k: Option<u64>,
    pub expected: f64,
    pub observed: u64,
}

/// Simulated `M_{1/2,1,λ}(t)` against [`subordinated_pmf`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinatedComparison {
    pub lambda: f64,
    pub t: f64,
    pub n_rep: u64,
    pub seed: u64,
    pub bins: Vec<PmfBin>,
    pub chi2: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// χ² test of simulated counts over `k = 0..=K₉₉` (the smallest `K` with
/// 99% of the mass) and one tail bin.
pub fn compare_subordinated(lambda: f64, t: f64, n_rep: u64, seed: u64) -> Result<SubordinatedComparison> {
    let p = FracParams::new(0.5, 1.0, lambda)?;
    check_horizon(t)?;
    if n_rep == 0 {
        return Err(Error::InvalidInput("n_rep must be positive".into()));
    }
    let mut probs = Vec::new();
    let mut cum = CompensatedSum::new();
    while cum.value() < 0.99 {
        let pk = subordinated_pmf(lambda, t, probs.len() as u64)?;
        cum.add(pk);
        probs.push(pk);
        if probs.len() > 100_000 {
            return Err(Error::Internal("subordinated pmf mass does not accumulate".into()));
        }
    }
    let k99 = probs.len() as u64 - 1;
    let counts = replicate(seed, n_rep, |_, rng| simulate_count(&p, t, rng))?;
    let mut observed = vec![0u64; probs.len() + 1];
    for c in counts {
        observed[c.min(k99 + 1) as usize] += 1;
    }
    let tail_prob = (1.0 - cum.value()).max(0.0);
    let n = n_rep as f64;
    let mut bins: Vec<PmfBin> = probs
        .iter()
        .enumerate()
        .map(|(k, &e)| PmfBin {
            k: Some(k as u64),
            expected: e * n,
            observed: observed[k],
        })
        .collect();
    bins.push(PmfBin {
        k: None,
        expected: tail_prob * n,
        observed: observed[probs.len()],
    });
    let chi2 = bins
        .iter()
        .map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected)
        .collect::<CompensatedSum>()
        .value();
    let dof = bins.len() as u64 - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Internal(e.to_string()))?
        .sf(chi2);
    Ok(SubordinatedComparison {
        lambda,
        t,
        n_rep,
        seed,
        bins,
        chi2,
        dof,
        p_value,
    })
}
