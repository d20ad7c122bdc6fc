//! Relative entropy between weighted Poisson laws `Q_{ν,λ,t}` and its
//! normalized large-`t` limit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::Extended;
use crate::laws::WeightedPoissonLaw;
use crate::num::CompensatedSum;

/// `H(Q_{ν,λ₁,t} | Q_{ν,λ₂,t})`, or its limit `H/t → 𝓗_ν(λ₁|λ₂)` when `t`
/// is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyQuery {
    pub nu: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub t: Option<f64>,
}

impl EntropyQuery {
    pub fn finite_t(nu: f64, lambda1: f64, lambda2: f64, t: f64) -> Result<Self> {
        let q = Self {
            nu,
            lambda1,
            lambda2,
            t: Some(t),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn limit(nu: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        let q = Self {
            nu,
            lambda1,
            lambda2,
            t: None,
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::Domain(format!("nu must lie in (0, 1], got {}", self.nu)));
        }
        for (name, l) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Domain(format!("{name} must be >= 0, got {l}")));
            }
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Domain(format!("t must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    fn require_t(&self) -> Result<f64> {
        self.validate()?;
        self.t
            .ok_or_else(|| Error::InvalidInput("finite-t relative entropy needs t".into()))
    }

    fn laws(&self, t: f64) -> Result<(WeightedPoissonLaw, WeightedPoissonLaw)> {
        Ok((
            WeightedPoissonLaw::new(self.nu, self.lambda1, t)?,
            WeightedPoissonLaw::new(self.nu, self.lambda2, t)?,
        ))
    }
}

/// Agreement demanded between the direct sum and the closed form.
const AGREEMENT: f64 = 1e-9;

/// Unnormalized `H(Q₁|Q₂) = Σ P₁(k) log(P₁(k)/P₂(k))` by direct summation
/// over the support of `Q₁`, checked against
/// [`relative_entropy_closed_form`].
pub fn relative_entropy(q: &EntropyQuery) -> Result<Extended> {
    let t = q.require_t()?;
    if let Some(v) = degenerate(q, t)? {
        return Ok(v);
    }
    let (p1, p2) = q.laws(t)?;
    let scan = p1.support_scan()?;
    let mut acc = CompensatedSum::new();
    for (k, &l1) in scan.iter().enumerate() {
        if l1 == f64::NEG_INFINITY {
            continue;
        }
        let w = l1.exp();
        acc.add(w * (l1 - p2.log_pmf(k as u64)));
    }
    let direct = acc.value().max(0.0);
    let closed = relative_entropy_closed_form(q)?.unwrap();
    if (direct - closed).abs() > AGREEMENT * direct.max(1.0) {
        return Err(Error::NonConvergence {
            what: "relative entropy",
            detail: format!("direct sum {direct} disagrees with closed form {closed}"),
        });
    }
    Ok(Extended::Finite(direct))
}

/// `log(λ₁/λ₂)·E₁[A] + log E_{ν,1}(λ₂t^ν) − log E_{ν,1}(λ₁t^ν)`.
pub fn relative_entropy_closed_form(q: &EntropyQuery) -> Result<Extended> {
    let t = q.require_t()?;
    if let Some(v) = degenerate(q, t)? {
        return Ok(v);
    }
    let (p1, p2) = q.laws(t)?;
    let value = (q.lambda1 / q.lambda2).ln() * p1.mean()? + p2.log_normalizer() - p1.log_normalizer();
    Ok(Extended::Finite(value.max(0.0)))
}

fn degenerate(q: &EntropyQuery, t: f64) -> Result<Option<Extended>> {
    if q.lambda1 == q.lambda2 {
        return Ok(Some(Extended::ZERO));
    }
    if q.lambda2 == 0.0 {
        return Ok(Some(Extended::Infinite));
    }
    if q.lambda1 == 0.0 {
        let p2 = WeightedPoissonLaw::new(q.nu, q.lambda2, t)?;
        return Ok(Some(Extended::Finite(p2.log_normalizer())));
    }
    Ok(None)
}

/// `𝓗_ν(λ₁|λ₂) = λ₁^{1/ν} log(λ₁^{1/ν}/λ₂^{1/ν}) − λ₁^{1/ν} + λ₂^{1/ν}`.
pub fn entropy_rate(q: &EntropyQuery) -> Result<Extended> {
    q.validate()?;
    let l1 = q.lambda1.powf(1.0 / q.nu);
    let l2 = q.lambda2.powf(1.0 / q.nu);
    if l1 == l2 {
        return Ok(Extended::ZERO);
    }
    if l2 == 0.0 {
        return Ok(Extended::Infinite);
    }
    if l1 == 0.0 {
        return Ok(Extended::Finite(l2));
    }
    let v = l1 / l2 - 1.0;
    Ok(Extended::Finite((l2 * ((1.0 + v) * v.ln_1p() - v)).max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::log_ml;

    #[test]
    fn identical_laws_have_zero_entropy() {
        for (nu, l, t) in [(0.3, 1.0, 2.0), (1.0, 4.0, 0.5), (0.5, 0.0, 3.0)] {
            let q = EntropyQuery::finite_t(nu, l, l, t).unwrap();
            assert_eq!(relative_entropy(&q).unwrap(), Extended::ZERO);
            assert_eq!(
                entropy_rate(&EntropyQuery::limit(nu, l, l).unwrap()).unwrap(),
                Extended::ZERO
            );
        }
    }

    #[test]
    fn point_mass_cases() {
        let q = EntropyQuery::finite_t(0.6, 0.0, 2.0, 1.0).unwrap();
        let v = relative_entropy(&q).unwrap().unwrap();
        assert!((v - log_ml(0.6, 1.0, 2.0).unwrap()).abs() < 1e-14);
        let q = EntropyQuery::finite_t(0.6, 2.0, 0.0, 1.0).unwrap();
        assert!(relative_entropy(&q).unwrap().is_infinite());
        let r = entropy_rate(&EntropyQuery::limit(0.5, 0.0, 3.0).unwrap()).unwrap();
        assert!((r.unwrap() - 9.0).abs() < 1e-14);
        assert!(entropy_rate(&EntropyQuery::limit(0.5, 3.0, 0.0).unwrap())
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn classical_entropy_is_linear_in_t() {
        let limit = 2.0 * 2f64.ln() - 1.0;
        for t in [0.5, 1.0, 7.0] {
            let q = EntropyQuery::finite_t(1.0, 2.0, 1.0, t).unwrap();
            let h = relative_entropy(&q).unwrap().unwrap();
            assert!((h / t - limit).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn limit_formula() {
        let r = entropy_rate(&EntropyQuery::limit(0.5, 1.0, 2.0).unwrap()).unwrap();
        assert!((r.unwrap() - (3.0 - 4f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn missing_t_is_rejected() {
        let q = EntropyQuery::limit(0.5, 1.0, 2.0).unwrap();
        assert!(matches!(relative_entropy(&q), Err(Error::InvalidInput(_))));
        assert!(EntropyQuery::finite_t(0.5, -1.0, 2.0, 1.0).is_err());
    }
}
