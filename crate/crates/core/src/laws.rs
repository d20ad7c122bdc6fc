//! Exact laws: generalized Mittag-Leffler holding times and the weighted
//! Poisson distribution of the alternative version.
//!
//! Holding times are drawn as `G^{1/ν} S_ν` with `G ~ Gamma(h, λ)` and `S_ν`
//! positive stable with `E[e^{-sS_ν}] = e^{-s^ν}`. Conditioning on `G` gives
//! `E[e^{-sT}] = E[e^{-s^ν G}] = (λ/(λ+s^ν))^h`, which is exactly the
//! holding-time Laplace transform. No density evaluation is needed.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{CompensatedSum, LogSumExp};
use crate::special_fn::{self, ln_gamma};

/// Parameters `(ν, h, λ)` of the renewal fractional Poisson process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracParams {
    nu: f64,
    h: f64,
    lambda: f64,
}

impl FracParams {
    pub fn new(nu: f64, h: f64, lambda: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::Domain(format!("nu must lie in (0, 1], got {nu}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("h must be > 0, got {h}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
        }
        Ok(Self { nu, h, lambda })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `ν = 1`: Gamma holding times.
    pub fn is_classical(&self) -> bool {
        self.nu == 1.0
    }

    /// Same `ν, λ` with a different `h`.
    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.nu, h, self.lambda)
    }

    fn gamma_law(&self) -> Gamma<f64> {
        Gamma::new(self.h, 1.0 / self.lambda).expect("shape and scale validated at construction")
    }
}

/// Density `λ^h t^{νh-1} E^h_{ν,νh}(-λt^ν)` of a holding time, `0` for
/// `t ≤ 0`.
///
/// Meant for plotting and validation; samplers never call it. Fails with a
/// range error once `λt^ν` leaves the series guard.
pub fn holding_pdf(p: &FracParams, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let (nu, h, lambda) = (p.nu, p.h, p.lambda);
    let z = lambda * t.powf(nu);
    let e = special_fn::ml_generalized(nu, nu * h, h, -z)?;
    Ok((h * lambda.ln() + (nu * h - 1.0) * t.ln()).exp() * e)
}

/// One draw of a positive stable variable, `E[e^{-sS}] = e^{-s^ν}`,
/// `0 < ν < 1` (Kanter's representation).
pub fn sample_positive_stable<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> f64 {
    debug_assert!(nu > 0.0 && nu < 1.0, "positive stable index must lie in (0, 1)");
    let u: f64 = PI * rng.sample::<f64, _>(Open01);
    let e: f64 = rng.sample(Exp1);
    let a = (nu * u).sin() / u.sin().powf(1.0 / nu);
    let b = ((1.0 - nu) * u).sin() / e;
    a * b.powf((1.0 - nu) / nu)
}

/// One holding time with Laplace transform `(λ/(λ+s^ν))^h`.
pub fn sample_holding<R: Rng + ?Sized>(p: &FracParams, rng: &mut R) -> f64 {
    let g = p.gamma_law().sample(rng);
    if p.is_classical() {
        g
    } else {
        g.powf(1.0 / p.nu) * sample_positive_stable(p.nu, rng)
    }
}

/// Terms this many nats below the running maximum end a pmf scan.
const TRUNCATION_NATS: f64 = 40.0;
/// Hard cap on pmf scans.
pub const MAX_TERMS: u64 = 1_000_000;
/// Tail sums stop when the geometric remainder bound drops below this
/// fraction of the accumulated sum.
const TAIL_REMAINDER: f64 = 1e-15;

/// Law of `A_{ν,λ}(t)`: `P(A=k) = (λt^ν)^k / Γ(νk+1) / E_{ν,1}(λt^ν)`.
///
/// A weighted Poisson law with weights `k!/Γ(νk+1)` that do not depend on
/// `t`. At `t = 0` (or `λ = 0`) it is the point mass at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedPoissonLaw {
    nu: f64,
    lambda: f64,
    t: f64,
    #[serde(skip)]
    log_z: f64,
    #[serde(skip)]
    log_norm: f64,
}

impl WeightedPoissonLaw {
    pub fn new(nu: f64, lambda: f64, t: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::Domain(format!("nu must lie in (0, 1], got {nu}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t must be >= 0, got {t}")));
        }
        let z = lambda * t.powf(nu);
        let (log_z, log_norm) = if z == 0.0 {
            (f64::NEG_INFINITY, 0.0)
        } else {
            (z.ln(), special_fn::log_ml(nu, 1.0, z)?)
        };
        Ok(Self {
            nu,
            lambda,
            t,
            log_z,
            log_norm,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `λ t^ν`.
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }

    pub fn is_point_mass(&self) -> bool {
        self.log_z == f64::NEG_INFINITY
    }

    /// `log E_{ν,1}(λt^ν)`.
    pub fn log_normalizer(&self) -> f64 {
        self.log_norm
    }

    /// Weight `w(k) = k!/Γ(νk+1)` relative to the Poisson pmf with mean
    /// `λt^ν`, in log scale.
    pub fn log_weight(&self, k: u64) -> f64 {
        ln_gamma(k as f64 + 1.0) - ln_gamma(self.nu * k as f64 + 1.0)
    }

    pub fn log_pmf(&self, k: u64) -> f64 {
        if self.is_point_mass() {
            return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        k as f64 * self.log_z - ln_gamma(self.nu * k as f64 + 1.0) - self.log_norm
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.log_pmf(k).exp()
    }

    /// `log(pmf(k+1)/pmf(k))`; decreasing in `k` (log-concave pmf).
    fn log_ratio(&self, k: u64) -> f64 {
        let kf = k as f64;
        self.log_z - (ln_gamma(self.nu * (kf + 1.0) + 1.0) - ln_gamma(self.nu * kf + 1.0))
    }

    /// Mean `(λt^ν/ν) E_{ν,ν}(λt^ν) / E_{ν,1}(λt^ν)`.
    pub fn mean(&self) -> Result<f64> {
        if self.is_point_mass() {
            return Ok(0.0);
        }
        let z = self.z();
        let l = self.log_z - self.nu.ln() + special_fn::log_ml(self.nu, self.nu, z)? - self.log_norm;
        Ok(l.exp())
    }

    /// Log-pmf values `k = 0..=K` where `K` is past the mode and the pmf
    /// has dropped 40 nats below its maximum.
    pub fn support_scan(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let mut max = f64::NEG_INFINITY;
        for k in 0..MAX_TERMS {
            let l = self.log_pmf(k);
            out.push(l);
            if l > max {
                max = l;
            } else if l < max - TRUNCATION_NATS {
                return Ok(out);
            }
            if l == f64::NEG_INFINITY && k > 0 {
                return Ok(out);
            }
        }
        Err(Error::Internal(format!(
            "weighted Poisson pmf still significant after {MAX_TERMS} terms (z = {})",
            self.z()
        )))
    }

    /// Inverse-CDF draw scanning the cumulative pmf from zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        if self.is_point_mass() {
            return Ok(0);
        }
        let u: f64 = rng.random();
        let mut cum = 0.0;
        let mut max = f64::NEG_INFINITY;
        for k in 0..MAX_TERMS {
            let l = self.log_pmf(k);
            cum += l.exp();
            if u < cum {
                return Ok(k);
            }
            max = max.max(l);
            if l < max - TRUNCATION_NATS {
                if cum < 1.0 - 1e-12 {
                    break;
                }
                // Rounding left u above the accumulated mass.
                return Ok(k);
            }
        }
        Err(Error::Internal(format!(
            "cumulative weighted Poisson mass {cum} < 1 - 1e-12 at the truncation horizon"
        )))
    }

    /// `log P(A ≥ threshold)`.
    pub fn log_tail(&self, threshold: f64) -> Result<f64> {
        if !(threshold >= 0.0) {
            return Err(Error::Domain(format!("threshold must be >= 0, got {threshold}")));
        }
        if threshold == 0.0 {
            return Ok(0.0);
        }
        if self.is_point_mass() {
            return Ok(f64::NEG_INFINITY);
        }
        let k0 = threshold.ceil();
        if k0 >= MAX_TERMS as f64 {
            return Err(Error::Internal(format!(
                "threshold {threshold} beyond the truncation horizon"
            )));
        }
        let k0 = k0 as u64;
        let mut acc = LogSumExp::new();
        for k in k0..k0 + MAX_TERMS {
            let l = self.log_pmf(k);
            acc.add(l);
            let lr = self.log_ratio(k);
            if lr < 0.0 {
                // Log-concavity: later ratios are smaller, so the remainder is
                // at most pmf(k) r/(1-r).
                let bound = l + lr - (-lr.exp()).ln_1p();
                if bound < acc.value() + TAIL_REMAINDER.ln() {
                    return Ok(acc.value());
                }
            }
        }
        Err(Error::Internal(format!(
            "weighted Poisson tail from {k0} did not converge in {MAX_TERMS} terms"
        )))
    }
}

/// Exact mean of the law via the scanned support, used to cross-check
/// [`WeightedPoissonLaw::mean`].
pub fn mean_by_summation(law: &WeightedPoissonLaw) -> Result<f64> {
    let scan = law.support_scan()?;
    Ok(scan
        .iter()
        .enumerate()
        .map(|(k, l)| k as f64 * l.exp())
        .collect::<CompensatedSum>()
        .value())
}
