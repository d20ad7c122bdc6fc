//! Mittag-Leffler functions, Pochhammer symbols and log-gamma helpers.
//!
//! ```text
//! E_{α,β}(z)   = Σ_{r≥0} z^r / Γ(αr+β)
//! E^γ_{α,β}(z) = Σ_{r≥0} (γ)_r z^r / (r! Γ(αr+β))
//! ```
//!
//! Both series are summed directly. Terms are formed in log space and added
//! with compensated summation; when `α` is a small integer the ratio of
//! consecutive terms is rational and the series is summed in double-double
//! instead, which keeps the alternating case `z < 0` accurate far past the
//! point where plain `f64` cancellation gives up.
//!
//! For `z ≥ 0` the log-scale evaluator [`log_ml`] sums scaled terms around
//! the maximal one and never overflows. Beyond the series guard, or once
//! `z^{1/ν}` exceeds [`ASYMPTOTIC_EXPONENT`], it switches to the leading term
//! of the large-argument expansion
//! `E_{ν,β}(z) ~ (1/ν) z^{(1-β)/ν} exp(z^{1/ν})`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::num::{CompensatedSum, DoubleDouble, LogSumExp};

/// Terms more than this many times smaller than the partial sum no longer
/// change an `f64` result.
const NEGLIGIBLE: f64 = 1e-17;
/// Consecutive negligible terms required before the series stops.
const STOP_RUN: usize = 50;
/// For `ν ≤ 1` and `z^{1/ν}` above this, the algebraic correction to the
/// leading asymptotic term is below `e^{-700}` relative.
pub const ASYMPTOTIC_EXPONENT: f64 = 700.0;
/// Largest integer `α` handled by the double-double path.
const MAX_EXACT_ALPHA: f64 = 16.0;
/// Relative rounding of a double-double operation.
const DD_EPS: f64 = 1e-31;

/// `ln|Γ(x)|` and the sign of `Γ(x)`. At the poles (non-positive integers)
/// the sign is `0`, meaning `1/Γ(x) = 0`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (ln_gamma(x), 1.0);
    }
    if x == x.floor() {
        return (f64::INFINITY, 0.0);
    }
    let (ln, sign) = libm::lgamma_r(x);
    (ln, sign as f64)
}

/// `ln Γ(x)` for `x > 0`. Exact (to rounding) at small integers.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= FACTORIAL_TABLE as f64 && x == x.floor() {
        return ln_factorials()[x as usize - 1];
    }
    libm::lgamma_r(x).0
}

const FACTORIAL_TABLE: usize = 170;

fn ln_factorials() -> &'static [f64; FACTORIAL_TABLE] {
    static TABLE: OnceLock<[f64; FACTORIAL_TABLE]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; FACTORIAL_TABLE];
        let mut f = 1.0f64;
        for (n, slot) in out.iter_mut().enumerate() {
            // slot n holds ln(n!)
            if n > 0 {
                f *= n as f64;
            }
            *slot = f.ln();
        }
        out
    })
}

/// `1/Γ(x)`, finite everywhere (zero at the poles).
pub fn recip_gamma(x: f64) -> f64 {
    let (ln, sign) = ln_gamma_signed(x);
    if sign == 0.0 {
        0.0
    } else {
        sign * (-ln).exp()
    }
}

/// `ln (γ)_r` where `(γ)_r = γ(γ+1)⋯(γ+r-1)` and `(γ)_0 = 1`.
pub fn pochhammer_log(gamma: f64, r: u64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("Pochhammer parameter must be > 0, got {gamma}")));
    }
    Ok(pochhammer_log_unchecked(gamma, r))
}

fn pochhammer_log_unchecked(gamma: f64, r: u64) -> f64 {
    if r == 0 {
        return 0.0;
    }
    if r <= 32 {
        // Short products are more accurate than a difference of log-gammas.
        let mut acc = CompensatedSum::new();
        for i in 0..r {
            acc.add((gamma + i as f64).ln());
        }
        acc.value()
    } else {
        ln_gamma(gamma + r as f64) - ln_gamma(gamma)
    }
}

/// Tuning of the series evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Largest `|z|` summed by the series.
    pub guard: f64,
    /// Absolute tolerance target.
    pub abs_tol: f64,
    /// Relative tolerance target.
    pub rel_tol: f64,
    /// Largest estimated relative rounding error accepted for alternating
    /// sums before reporting loss of significance.
    pub cancellation_limit: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            guard: 100.0,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            cancellation_limit: 1e-8,
            max_terms: 1_000_000,
        }
    }
}

/// Arguments of a (generalized) Mittag-Leffler evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlArgs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub z: f64,
}

impl MlArgs {
    pub fn new(alpha: f64, beta: f64, gamma: f64, z: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
        }
        if !beta.is_finite() || !z.is_finite() {
            return Err(Error::Domain("beta and z must be finite".into()));
        }
        Ok(Self { alpha, beta, gamma, z })
    }

    pub fn plain(alpha: f64, beta: f64, z: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, z)
    }

    /// Evaluates `E^γ_{α,β}(z)` with the given configuration.
    pub fn eval(&self, cfg: &SeriesConfig) -> Result<f64> {
        let gamma = (self.gamma != 1.0).then_some(self.gamma);
        cfg.series(self.alpha, self.beta, gamma, self.z)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be > 0, got {alpha}")))
    }
}

/// `E_{α,β}(z)` with the default configuration.
pub fn ml(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    SeriesConfig::default().ml(alpha, beta, z)
}

/// `E^γ_{α,β}(z)` with the default configuration.
pub fn ml_generalized(alpha: f64, beta: f64, gamma: f64, z: f64) -> Result<f64> {
    SeriesConfig::default().ml_generalized(alpha, beta, gamma, z)
}

/// `log E_{α,β}(z)` for `z ≥ 0` with the default configuration.
pub fn log_ml(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    SeriesConfig::default().log_ml(alpha, beta, z)
}

/// Leading term `(1/ν) z^{(1-β)/ν} exp(z^{1/ν})` of `E_{ν,β}(z)` as
/// `z → ∞`. Overflows to `inf` quickly; see [`log_asymptotic_ml`].
pub fn asymptotic_ml(nu: f64, beta: f64, z: f64) -> Result<f64> {
    log_asymptotic_ml(nu, beta, z).map(f64::exp)
}

/// Logarithm of [`asymptotic_ml`].
pub fn log_asymptotic_ml(nu: f64, beta: f64, z: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Domain(format!("nu must lie in (0, 1], got {nu}")));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("asymptotic form needs z > 0, got {z}")));
    }
    Ok(leading_log_term(nu, beta, z))
}

fn leading_log_term(nu: f64, beta: f64, z: f64) -> f64 {
    let lz = z.ln();
    -nu.ln() + (1.0 - beta) / nu * lz + (lz / nu).exp()
}

impl SeriesConfig {
    pub fn ml(&self, alpha: f64, beta: f64, z: f64) -> Result<f64> {
        MlArgs::plain(alpha, beta, z)?;
        self.series(alpha, beta, None, z)
    }

    pub fn ml_generalized(&self, alpha: f64, beta: f64, gamma: f64, z: f64) -> Result<f64> {
        MlArgs::new(alpha, beta, gamma, z)?;
        let gamma = (gamma != 1.0).then_some(gamma);
        self.series(alpha, beta, gamma, z)
    }

    /// `log E_{α,β}(z)` for `z ≥ 0`.
    pub fn log_ml(&self, alpha: f64, beta: f64, z: f64) -> Result<f64> {
        check_alpha(alpha)?;
        if !(z >= 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!(
                "log_ml needs finite beta and z >= 0, got z = {z}"
            )));
        }
        if z == 0.0 {
            let (ln, sign) = ln_gamma_signed(beta);
            return if sign > 0.0 {
                Ok(-ln)
            } else {
                Err(Error::Domain(format!(
                    "E_{{{alpha},{beta}}}(0) = 1/Γ({beta}) is not positive"
                )))
            };
        }
        if z > self.guard {
            if alpha > 1.0 {
                return Err(Error::Range(format!(
                    "z = {z} beyond the series guard {} and no asymptotic form for alpha = {alpha} > 1",
                    self.guard
                )));
            }
            return Ok(leading_log_term(alpha, beta, z));
        }
        if alpha <= 1.0 && z.ln() / alpha > ASYMPTOTIC_EXPONENT.ln() {
            return Ok(leading_log_term(alpha, beta, z));
        }
        self.log_series(alpha, beta, z)
    }

    fn log_series(&self, alpha: f64, beta: f64, z: f64) -> Result<f64> {
        let lz = z.ln();
        let mut pos = LogSumExp::new();
        let mut neg = LogSumExp::new();
        let mut run = 0usize;
        for r in 0..self.max_terms {
            let (lg, sign) = ln_gamma_signed(alpha * r as f64 + beta);
            if sign != 0.0 {
                let l = r as f64 * lz - lg;
                let total = pos.value().max(neg.value());
                if l < total + NEGLIGIBLE.ln() {
                    run += 1;
                } else {
                    run = 0;
                }
                if sign > 0.0 {
                    pos.add(l);
                } else {
                    neg.add(l);
                }
            } else {
                run += 1;
            }
            if run >= STOP_RUN {
                let p = pos.value();
                let n = neg.value();
                if n == f64::NEG_INFINITY {
                    return Ok(p);
                }
                if n >= p {
                    return Err(Error::Domain(format!(
                        "E_{{{alpha},{beta}}}({z}) is not positive; no logarithm"
                    )));
                }
                return Ok(p + (-(n - p).exp()).ln_1p());
            }
        }
        Err(non_convergence(self.max_terms, alpha, beta, z))
    }

    pub(crate) fn series(&self, alpha: f64, beta: f64, gamma: Option<f64>, z: f64) -> Result<f64> {
        if z == 0.0 {
            return Ok(recip_gamma(beta));
        }
        if z.abs() > self.guard {
            return Err(Error::Range(format!(
                "|z| = {} exceeds the series guard {}; use log_ml or the asymptotic form",
                z.abs(),
                self.guard
            )));
        }
        if alpha == alpha.floor() && alpha <= MAX_EXACT_ALPHA {
            self.series_exact_ratio(alpha as u32, beta, gamma, z)
        } else {
            self.series_log_terms(alpha, beta, gamma, z)
        }
    }

    fn series_log_terms(&self, alpha: f64, beta: f64, gamma: Option<f64>, z: f64) -> Result<f64> {
        let lz = z.abs().ln();
        let mut sum = CompensatedSum::new();
        let mut abs_sum = 0.0;
        let mut run = 0usize;
        for r in 0..self.max_terms {
            let rf = r as f64;
            let (lg, mut sign) = ln_gamma_signed(alpha * rf + beta);
            let term = if sign == 0.0 {
                0.0
            } else {
                let mut l = rf * lz - lg;
                if let Some(g) = gamma {
                    l += pochhammer_log_unchecked(g, r as u64) - ln_gamma(rf + 1.0);
                }
                if z < 0.0 && r % 2 == 1 {
                    sign = -sign;
                }
                if l > f64::MAX.ln() {
                    return Err(overflow(alpha, beta, z));
                }
                sign * l.exp()
            };
            sum.add(term);
            abs_sum += term.abs();
            if term.abs() <= NEGLIGIBLE * sum.value().abs() {
                run += 1;
            } else {
                run = 0;
            }
            if run >= STOP_RUN {
                let value = sum.value();
                // Each term carries a few ulps of error from exp/ln-gamma.
                self.check_cancellation(8.0 * f64::EPSILON * abs_sum, value)?;
                return Ok(value);
            }
        }
        Err(non_convergence(self.max_terms, alpha, beta, z))
    }

    /// Integer `α`: `t_{r+1} = t_r · z (γ+r)/(r+1) / Π_{j<α}(αr+β+j)`.
    fn series_exact_ratio(&self, alpha: u32, beta: f64, gamma: Option<f64>, z: f64) -> Result<f64> {
        let a = alpha as f64;
        // Skip leading terms that vanish at the poles of Γ.
        let r0 = if beta <= 0.0 && beta == beta.floor() {
            ((1.0 - beta) / a).ceil() as usize
        } else {
            0
        };
        let (lg, sign) = ln_gamma_signed(a * r0 as f64 + beta);
        let mut l0 = r0 as f64 * z.abs().ln() - lg;
        if let Some(g) = gamma {
            l0 += pochhammer_log_unchecked(g, r0 as u64) - ln_gamma(r0 as f64 + 1.0);
        }
        if l0 > f64::MAX.ln() {
            return Err(overflow(a, beta, z));
        }
        let odd = z < 0.0 && r0 % 2 == 1;
        let t0 = if odd { -sign } else { sign } * l0.exp();

        let zd = DoubleDouble::new(z);
        let mut term = DoubleDouble::new(t0);
        let mut sum = term;
        let mut abs_sum = t0.abs();
        let mut run = 0usize;
        for r in r0..self.max_terms {
            let rf = r as f64;
            let mut num = zd;
            if let Some(g) = gamma {
                num = num.mul(DoubleDouble::sum_of(g, rf)).div(DoubleDouble::new(rf + 1.0));
            }
            let base = DoubleDouble::sum_of(a * rf, beta);
            let mut den = base;
            for j in 1..alpha {
                den = den.mul(base.add(DoubleDouble::new(j as f64)));
            }
            term = term.mul(num).div(den);
            let t = term.to_f64();
            if !t.is_finite() || t.abs() > 1e300 {
                return Err(overflow(a, beta, z));
            }
            sum = sum.add(term);
            abs_sum += t.abs();
            if t.abs() <= NEGLIGIBLE * sum.abs() {
                run += 1;
            } else {
                run = 0;
            }
            if run >= STOP_RUN {
                let value = sum.to_f64();
                // The leading term carries f64 rounding, but it scales every
                // term alike; only the recurrence rounding can cancel badly.
                self.check_cancellation(DD_EPS * abs_sum, value)?;
                return Ok(value);
            }
        }
        Err(non_convergence(self.max_terms, a, beta, z))
    }

    fn check_cancellation(&self, abs_error: f64, value: f64) -> Result<()> {
        let rel = if value == 0.0 {
            if abs_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            abs_error / value.abs()
        };
        if rel > self.cancellation_limit && abs_error > self.abs_tol {
            Err(Error::Cancellation {
                what: "Mittag-Leffler series",
                estimate: rel,
            })
        } else {
            Ok(())
        }
    }
}

fn overflow(alpha: f64, beta: f64, z: f64) -> Error {
    Error::Range(format!(
        "E_{{{alpha},{beta}}}({z}) overflows f64; use log_ml or the asymptotic form"
    ))
}

fn non_convergence(max_terms: usize, alpha: f64, beta: f64, z: f64) -> Error {
    Error::NonConvergence {
        what: "Mittag-Leffler series",
        detail: format!("{max_terms} terms at alpha = {alpha}, beta = {beta}, z = {z}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(pochhammer_log(3.7, 0).unwrap(), 0.0);
        assert_relative_eq!(pochhammer_log(2.0, 3).unwrap(), 24f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(pochhammer_log(0.5, 2).unwrap(), 0.75f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(
            pochhammer_log(1.5, 40).unwrap(),
            ln_gamma(41.5) - ln_gamma(1.5),
            max_relative = 1e-13
        );
        assert!(matches!(pochhammer_log(0.0, 2), Err(Error::Domain(_))));
        assert!(matches!(pochhammer_log(-1.0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn reciprocal_gamma_at_poles_and_negatives() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        // Γ(-0.5) = -2√π
        assert_relative_eq!(recip_gamma(-0.5), -1.0 / (2.0 * PI.sqrt()), max_relative = 1e-14);
        assert_relative_eq!(recip_gamma(0.5), 1.0 / PI.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn ml_reduces_to_exp() {
        assert_relative_eq!(ml(1.0, 1.0, 2.5).unwrap(), 2.5f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(ml(1.0, 1.0, -20.0).unwrap(), (-20f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn ml_at_zero_is_reciprocal_gamma() {
        assert_relative_eq!(ml(0.7, 1.3, 0.0).unwrap(), recip_gamma(1.3), max_relative = 1e-15);
        assert_relative_eq!(
            ml_generalized(0.5, 0.5, 3.0, 0.0).unwrap(),
            1.0 / PI.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn ml_beyond_guard_is_a_range_error() {
        assert!(matches!(ml(0.5, 1.0, 150.0), Err(Error::Range(_))));
        assert!(matches!(ml(0.5, 1.0, -150.0), Err(Error::Range(_))));
    }

    #[test]
    fn ml_overflow_points_to_log_ml() {
        // E_{1/2,1}(40) ~ 2e^{1600}
        match ml(0.5, 1.0, 40.0) {
            Err(Error::Range(msg)) => assert!(msg.contains("log_ml")),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn alternating_cancellation_is_reported() {
        assert!(matches!(ml(0.5, 1.0, -8.0), Err(Error::Cancellation { .. })));
        assert!(matches!(ml(1.0, 1.0, -90.0), Err(Error::Cancellation { .. })));
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(ml(0.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(ml_generalized(1.0, 1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(log_ml(0.5, 1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(asymptotic_ml(0.5, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_ml_simple_values() {
        assert_eq!(log_ml(0.9, 1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(log_ml(1.0, 1.0, 700.0).unwrap(), 700.0, max_relative = 1e-15);
        assert_relative_eq!(log_ml(1.0, 1.0, 50.0).unwrap(), 50.0, max_relative = 1e-14);
    }

    #[test]
    fn asymptotic_plug_values() {
        assert_relative_eq!(
            asymptotic_ml(1.0, 1.0, 10.0).unwrap(),
            10f64.exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            log_asymptotic_ml(0.5, 1.0, 9.0).unwrap(),
            2f64.ln() + 81.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn negative_beta_series() {
        // E_{1,0}(z) = z e^z, E_{1,-1}(z) = z^2 e^z
        assert_relative_eq!(ml(1.0, 0.0, 1.5).unwrap(), 1.5 * 1.5f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(ml(1.0, -1.0, -2.0).unwrap(), 4.0 * (-2f64).exp(), max_relative = 1e-13);
        // E_{2,1}(z^2) = cosh z
        assert_relative_eq!(ml(2.0, 1.0, 9.0).unwrap(), 3f64.cosh(), max_relative = 1e-14);
        assert_relative_eq!(ml(2.0, 1.0, -9.0).unwrap(), 3f64.cos(), max_relative = 1e-12);
    }
}
