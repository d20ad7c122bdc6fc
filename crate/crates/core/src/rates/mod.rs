//! Cumulants, the limiting scaled cumulant and rate functions of the renewal
//! fractional Poisson process, the composition rate of the subordinated
//! representation and the rate of the alternative (weighted Poisson)
//! version.
//!
//! Closed forms are used for `ν = 1` and `ν = 1/2`; every other `ν` goes
//! through [`conjugate()`]. The `*_numeric` variants always conjugate and exist
//! so that callers can cross-check the two paths.

pub mod conjugate;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::Extended;
use crate::laws::FracParams;

pub use conjugate::{conjugate, Bound, Interval};

/// How a rate value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateMethod {
    #[serde(rename = "closed_nu1")]
    ClosedNu1,
    #[serde(rename = "closed_nu_half")]
    ClosedNuHalf,
    #[serde(rename = "numeric_conjugate")]
    NumericConjugate,
    #[serde(rename = "composition")]
    Composition,
    #[serde(rename = "alternative_A")]
    AlternativeA,
}

impl RateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMethod::ClosedNu1 => "closed_nu1",
            RateMethod::ClosedNuHalf => "closed_nu_half",
            RateMethod::NumericConjugate => "numeric_conjugate",
            RateMethod::Composition => "composition",
            RateMethod::AlternativeA => "alternative_A",
        }
    }
}

/// A rate function value at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEvaluation {
    pub x: f64,
    pub value: Extended,
    pub method: RateMethod,
    /// Maximizing `θ` for numerically conjugated values.
    pub argmax_theta: Option<f64>,
}

impl RateEvaluation {
    fn new(x: f64, value: Extended, method: RateMethod) -> Self {
        let value = match value {
            Extended::Finite(v) => Extended::Finite(v.max(0.0)),
            inf => inf,
        };
        Self {
            x,
            value,
            method,
            argmax_theta: None,
        }
    }

    pub(crate) fn numeric(x: f64, value: Extended, argmax_theta: Option<f64>) -> Self {
        Self {
            x,
            value,
            method: RateMethod::NumericConjugate,
            argmax_theta,
        }
    }

    fn infinite(x: f64, method: RateMethod) -> Self {
        Self::new(x, Extended::Infinite, method)
    }
}

fn is_half(nu: f64) -> bool {
    nu == 0.5
}

/// `log E[e^{θT}]` for a holding time `T`.
pub fn kappa(p: &FracParams, theta: f64) -> Extended {
    let (nu, h, lambda) = (p.nu(), p.h(), p.lambda());
    if p.is_classical() {
        if theta < lambda {
            Extended::Finite(-h * (-theta / lambda).ln_1p())
        } else {
            Extended::Infinite
        }
    } else if theta <= 0.0 {
        Extended::Finite(-h * ((-theta).powf(nu) / lambda).ln_1p())
    } else {
        Extended::Infinite
    }
}

/// `lim (1/t) log E[e^{θM(t)}]`.
pub fn limit_cgf(p: &FracParams, theta: f64) -> f64 {
    let (nu, h, lambda) = (p.nu(), p.h(), p.lambda());
    let base = lambda * (theta / h).exp_m1();
    if p.is_classical() {
        base
    } else if theta >= 0.0 {
        base.powf(1.0 / nu)
    } else {
        0.0
    }
}

/// Rate function of `(T₁+…+Tₙ)/n`.
pub fn rate_t(p: &FracParams, x: f64) -> Result<RateEvaluation> {
    check_x(x)?;
    let method = if p.is_classical() {
        RateMethod::ClosedNu1
    } else if is_half(p.nu()) {
        RateMethod::ClosedNuHalf
    } else {
        RateMethod::NumericConjugate
    };
    if x <= 0.0 {
        return Ok(RateEvaluation::infinite(x, method));
    }
    let (h, lambda) = (p.h(), p.lambda());
    let value = match method {
        RateMethod::ClosedNu1 => {
            let v = lambda * x / h - 1.0;
            h * (v - v.ln_1p())
        }
        RateMethod::ClosedNuHalf => {
            let s = (lambda * lambda + 2.0 * h / x).sqrt();
            let a = 2.0 * h / (lambda * lambda * x);
            let log_term = (a / (2.0 * ((1.0 + a).sqrt() + 1.0))).ln_1p();
            let shift = h / (s + lambda);
            h * log_term - shift * shift / x
        }
        _ => return rate_t_numeric(p, x),
    };
    Ok(RateEvaluation::new(x, Extended::Finite(value), method))
}

/// [`rate_t`] by conjugating `κ` regardless of `ν`.
pub fn rate_t_numeric(p: &FracParams, x: f64) -> Result<RateEvaluation> {
    check_x(x)?;
    if x <= 0.0 {
        return Ok(RateEvaluation::infinite(x, RateMethod::NumericConjugate));
    }
    let domain = if p.is_classical() {
        Interval::below(p.lambda())
    } else {
        Interval::up_to(0.0)
    };
    conjugate(|theta| kappa(p, theta), x, domain)
}

/// Rate function of `M(t)/t`.
pub fn rate_m(p: &FracParams, x: f64) -> Result<RateEvaluation> {
    check_x(x)?;
    let (h, lambda) = (p.h(), p.lambda());
    let method = if p.is_classical() {
        RateMethod::ClosedNu1
    } else if is_half(p.nu()) {
        RateMethod::ClosedNuHalf
    } else {
        RateMethod::NumericConjugate
    };
    if x < 0.0 {
        return Ok(RateEvaluation::infinite(x, method));
    }
    if x == 0.0 {
        let v = if p.is_classical() { lambda } else { 0.0 };
        return Ok(RateEvaluation::new(x, Extended::Finite(v), method));
    }
    let value = match method {
        RateMethod::ClosedNu1 => {
            let u = h * x / lambda;
            let v = u - 1.0;
            lambda * (u * v.ln_1p() - v)
        }
        RateMethod::ClosedNuHalf => {
            let b = 2.0 * h * x / (lambda * lambda);
            let log_term = (b / (2.0 * ((1.0 + b).sqrt() + 1.0))).ln_1p();
            let shift = h * x / ((lambda * lambda + 2.0 * h * x).sqrt() + lambda);
            h * x * log_term - shift * shift
        }
        _ => {
            let inner = rate_t(p, 1.0 / x)?;
            return Ok(RateEvaluation {
                x,
                value: inner.value.scale(x),
                ..inner
            });
        }
    };
    Ok(RateEvaluation::new(x, Extended::Finite(value), method))
}

/// [`rate_m`] as the conjugate of [`limit_cgf`].
pub fn rate_m_numeric(p: &FracParams, x: f64) -> Result<RateEvaluation> {
    check_x(x)?;
    if x < 0.0 {
        return Ok(RateEvaluation::infinite(x, RateMethod::NumericConjugate));
    }
    conjugate(|theta| Extended::Finite(limit_cgf(p, theta)), x, Interval::REAL_LINE)
}

/// Rate function of the alternative version, `νx log(νx/λ^{1/ν}) − νx + λ^{1/ν}`.
pub fn rate_a(nu: f64, lambda: f64, x: f64) -> Result<RateEvaluation> {
    check_nu_lambda(nu, lambda)?;
    check_x(x)?;
    if x < 0.0 {
        return Ok(RateEvaluation::infinite(x, RateMethod::AlternativeA));
    }
    let l = lambda.powf(1.0 / nu);
    let u = nu * x;
    let value = if u == 0.0 {
        l
    } else {
        let v = u / l - 1.0;
        l * ((v + 1.0) * v.ln_1p() - v)
    };
    Ok(RateEvaluation::new(
        x,
        Extended::Finite(value),
        RateMethod::AlternativeA,
    ))
}

/// [`rate_a`] as the conjugate of `θ ↦ λ^{1/ν}(e^{θ/ν} − 1)`.
pub fn rate_a_numeric(nu: f64, lambda: f64, x: f64) -> Result<RateEvaluation> {
    check_nu_lambda(nu, lambda)?;
    check_x(x)?;
    if x < 0.0 {
        return Ok(RateEvaluation::infinite(x, RateMethod::NumericConjugate));
    }
    let l = lambda.powf(1.0 / nu);
    conjugate(
        |theta| Extended::Finite(l * (theta / nu).exp_m1()),
        x,
        Interval::REAL_LINE,
    )
}

/// `inf_{y ≥ 0} {K(x|y) + y²/4}` with `K(·|y)` the Poisson rate of intensity
/// `λy`.
///
/// The derivative of the objective is bisected on `(0, x/λ + 2√x + 1]`
/// and the result is checked against the root `√(λ²+2x) − λ`.
pub fn composition_rate(lambda: f64, x: f64) -> Result<RateEvaluation> {
    check_nu_lambda(1.0, lambda)?;
    check_x(x)?;
    if x < 0.0 {
        return Ok(RateEvaluation::infinite(x, RateMethod::Composition));
    }
    if x == 0.0 {
        return Ok(RateEvaluation::new(x, Extended::ZERO, RateMethod::Composition));
    }
    let y_star = x / (((lambda * lambda + 2.0 * x).sqrt() + lambda) * 0.5);
    let derivative = |y: f64| lambda + 0.5 * y - x / y;
    let (mut lo, mut hi) = (0.0_f64, x / lambda + 2.0 * x.sqrt() + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if derivative(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    if (y - y_star).abs() > 1e-9 * (1.0 + y_star) {
        return Err(Error::Internal(format!(
            "composition minimizer {y} disagrees with the analytic root {y_star}"
        )));
    }
    let objective = |y: f64| {
        let v = x / (lambda * y) - 1.0;
        // x log(x/(λy)) − x + λy = λy·((1+v) log(1+v) − v)
        lambda * y * ((1.0 + v) * v.ln_1p() - v) + 0.25 * y * y
    };
    Ok(RateEvaluation::new(
        x,
        Extended::Finite(objective(y_star)),
        RateMethod::Composition,
    ))
}

/// `|κ(−Λ(θ)) + θ|`, valid for all `θ` when `ν = 1` and `θ ≥ 0` otherwise.
pub fn glynn_whitt_residual(p: &FracParams, theta: f64) -> Result<f64> {
    if !theta.is_finite() || (!p.is_classical() && theta < 0.0) {
        return Err(Error::Domain(format!(
            "theta = {theta} outside the range of the identity for nu = {}",
            p.nu()
        )));
    }
    match kappa(p, -limit_cgf(p, theta)) {
        Extended::Finite(k) => Ok((k + theta).abs()),
        Extended::Infinite => Err(Error::Internal(format!("kappa infinite at -Lambda({theta})"))),
    }
}

/// `|Λ(−κ(θ)) + θ|`, valid for `θ < λ` when `ν = 1` and `θ ≤ 0` otherwise.
pub fn glynn_whitt_inverse_residual(p: &FracParams, theta: f64) -> Result<f64> {
    match kappa(p, theta) {
        Extended::Finite(k) if theta.is_finite() && (p.is_classical() || theta <= 0.0) => {
            Ok((limit_cgf(p, -k) + theta).abs())
        }
        _ => Err(Error::Domain(format!(
            "theta = {theta} outside the range of the identity for nu = {}",
            p.nu()
        ))),
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() {
        Err(Error::InvalidInput("rate evaluated at NaN".into()))
    } else {
        Ok(())
    }
}

fn check_nu_lambda(nu: f64, lambda: f64) -> Result<()> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Domain(format!("nu must lie in (0, 1], got {nu}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(nu: f64, h: f64, lambda: f64) -> FracParams {
        FracParams::new(nu, h, lambda).unwrap()
    }

    fn half_value_at_one() -> f64 {
        let r = 3f64.sqrt();
        (0.5 + 0.5 * r).ln() - (0.5 * r - 0.5).powi(2)
    }

    #[test]
    fn kappa_values() {
        assert!((kappa(&fp(0.5, 1.0, 1.0), -1.0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(kappa(&fp(0.3, 2.0, 1.0), 0.0), Extended::ZERO);
        assert_eq!(kappa(&fp(0.3, 2.0, 1.0), 0.1), Extended::Infinite);
        assert_eq!(kappa(&fp(1.0, 1.0, 2.0), 2.0), Extended::Infinite);
    }

    #[test]
    fn limit_cgf_values() {
        assert!((limit_cgf(&fp(1.0, 1.0, 2.0), 2f64.ln()) - 2.0).abs() < 1e-15);
        assert_eq!(limit_cgf(&fp(0.5, 1.0, 1.0), -3.0), 0.0);
        assert!((limit_cgf(&fp(0.5, 1.0, 1.0), 2f64.ln()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classical_closed_forms() {
        let p = fp(1.0, 1.0, 1.0);
        assert_eq!(rate_t(&p, 1.0).unwrap().value, Extended::ZERO);
        assert_eq!(rate_m(&p, 0.0).unwrap().value, Extended::Finite(1.0));
        let v = rate_m(&p, 2.0).unwrap().value.unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!(rate_t(&p, -1.0).unwrap().value.is_infinite());
    }

    #[test]
    fn half_closed_forms() {
        let p = fp(0.5, 1.0, 1.0);
        let t = rate_t(&p, 1.0).unwrap();
        assert_eq!(t.method, RateMethod::ClosedNuHalf);
        assert!((t.value.unwrap() - half_value_at_one()).abs() < 1e-15);
        assert!((t.value.unwrap() - 0.177931).abs() < 1e-6);
        assert_eq!(rate_m(&p, 0.0).unwrap().value, Extended::ZERO);
        assert!((rate_m(&p, 1.0).unwrap().value.unwrap() - half_value_at_one()).abs() < 1e-15);
        assert!(rate_t(&fp(0.7, 1.0, 1.0), -2.0).unwrap().value.is_infinite());
    }

    #[test]
    fn numeric_matches_closed_forms() {
        for p in [
            fp(1.0, 1.0, 1.0),
            fp(0.5, 1.0, 1.0),
            fp(0.5, 2.0, 1.5),
            fp(1.0, 3.0, 0.5),
        ] {
            for i in 1..=50 {
                let x = 0.1 * i as f64;
                let c = rate_t(&p, x).unwrap().value.unwrap();
                let n = rate_t_numeric(&p, x).unwrap().value.unwrap();
                assert!((c - n).abs() < 1e-8, "I_T {p:?} x={x}: {c} vs {n}");
                let c = rate_m(&p, x).unwrap().value.unwrap();
                let n = rate_m_numeric(&p, x).unwrap().value.unwrap();
                assert!((c - n).abs() < 1e-8, "I_M {p:?} x={x}: {c} vs {n}");
            }
        }
    }

    #[test]
    fn conjugate_of_limit_vanishes_at_the_mean() {
        let p = fp(1.0, 1.0, 3.0);
        let r = rate_m_numeric(&p, 3.0).unwrap();
        assert!(r.value.unwrap().abs() < 1e-12);
        assert!(r.argmax_theta.unwrap().abs() < 1e-6);
    }

    #[test]
    fn general_nu_uses_conjugation() {
        let p = fp(0.7, 1.0, 1.0);
        let t = rate_t(&p, 2.0).unwrap();
        assert_eq!(t.method, RateMethod::NumericConjugate);
        assert!(t.argmax_theta.unwrap() < 0.0);
        let m = rate_m(&p, 0.5).unwrap();
        assert!((m.value.unwrap() - 0.5 * rate_t(&p, 2.0).unwrap().value.unwrap()).abs() < 1e-15);
        assert!((m.value.unwrap() - rate_m_numeric(&p, 0.5).unwrap().value.unwrap()).abs() < 1e-8);
    }

    #[test]
    fn alternative_rate() {
        assert!(rate_a(0.5, 1.0, 2.0).unwrap().value.unwrap().abs() < 1e-15);
        let v = rate_a(1.0, 1.0, 2.0).unwrap().value.unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!(rate_a(0.5, 1.0, -0.1).unwrap().value.is_infinite());
        assert_eq!(rate_a(0.5, 3.0, 0.0).unwrap().value, Extended::Finite(9.0));
        for x in [0.3, 1.0, 2.5, 6.0] {
            let c = rate_a(0.6, 1.3, x).unwrap().value.unwrap();
            let n = rate_a_numeric(0.6, 1.3, x).unwrap().value.unwrap();
            assert!((c - n).abs() < 1e-8);
        }
    }

    #[test]
    fn composition_values() {
        assert_eq!(composition_rate(1.0, 0.0).unwrap().value, Extended::ZERO);
        assert!(composition_rate(2.0, -1.0).unwrap().value.is_infinite());
        let v = composition_rate(1.0, 1.0).unwrap().value.unwrap();
        assert!((v - half_value_at_one()).abs() < 1e-14);
    }

    #[test]
    fn residuals() {
        assert_eq!(glynn_whitt_residual(&fp(1.0, 1.0, 1.0), 0.0).unwrap(), 0.0);
        assert!(glynn_whitt_residual(&fp(0.5, 1.0, 1.0), 1.0).unwrap() < 1e-10);
        assert!(matches!(
            glynn_whitt_residual(&fp(0.5, 1.0, 1.0), -1.0),
            Err(Error::Domain(_))
        ));
        assert!(glynn_whitt_inverse_residual(&fp(0.5, 2.0, 1.0), -3.0).unwrap() < 1e-12);
        assert!(glynn_whitt_inverse_residual(&fp(0.5, 2.0, 1.0), 3.0).is_err());
    }
}
