//! Ruin probabilities of the risk model with fractional renewal claim
//! arrivals: `R(t) = u + ct − Σ_{k ≤ M(t)} U_k`.
//!
//! Ruin can only happen at claim epochs, so `Ψ(u)` is the probability that
//! the random walk `S_n = Σ (U_k − c T_k)` ever exceeds `u`. The importance
//! sampler runs the walk under the exponential tilt at the adjustment
//! coefficient `w`, where passage is certain, and weights each passage by
//! `e^{−w S_τ}`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use roots::{find_root_brent, SimpleConvergency};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::Extended;
use crate::laws::{sample_holding, FracParams};
use crate::rates::kappa;
use crate::stream::{replicate, McEstimate};

/// Claim size distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClaimLaw {
    Exponential { mu: f64 },
    Gamma { shape: f64, rate: f64 },
    Deterministic { m: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be > 0, got {v}")))
    }
}

impl ClaimLaw {
    pub fn exponential(mu: f64) -> Result<Self> {
        Ok(ClaimLaw::Exponential {
            mu: positive("mu", mu)?,
        })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Ok(ClaimLaw::Gamma {
            shape: positive("shape", shape)?,
            rate: positive("rate", rate)?,
        })
    }

    pub fn deterministic(m: f64) -> Result<Self> {
        Ok(ClaimLaw::Deterministic { m: positive("m", m)? })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ClaimLaw::Exponential { mu } => 1.0 / mu,
            ClaimLaw::Gamma { shape, rate } => shape / rate,
            ClaimLaw::Deterministic { m } => m,
        }
    }

    /// Supremum of the domain of the moment generating function.
    pub fn mgf_boundary(&self) -> f64 {
        match *self {
            ClaimLaw::Exponential { mu } => mu,
            ClaimLaw::Gamma { rate, .. } => rate,
            ClaimLaw::Deterministic { .. } => f64::INFINITY,
        }
    }

    /// `log E[e^{θU}]`.
    pub fn log_mgf(&self, theta: f64) -> Extended {
        match *self {
            ClaimLaw::Exponential { mu } if theta < mu => Extended::Finite(-(-theta / mu).ln_1p()),
            ClaimLaw::Gamma { shape, rate } if theta < rate => Extended::Finite(-shape * (-theta / rate).ln_1p()),
            ClaimLaw::Deterministic { m } => Extended::Finite(theta * m),
            _ => Extended::Infinite,
        }
    }

    /// Law with density `e^{θx}/E[e^{θU}]` relative to this one.
    pub fn tilt(&self, theta: f64) -> Result<ClaimLaw> {
        if self.log_mgf(theta).is_infinite() || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "claim tilt at theta = {theta} outside the MGF domain"
            )));
        }
        Ok(match *self {
            ClaimLaw::Exponential { mu } => ClaimLaw::Exponential { mu: mu - theta },
            ClaimLaw::Gamma { shape, rate } => ClaimLaw::Gamma {
                shape,
                rate: rate - theta,
            },
            d @ ClaimLaw::Deterministic { .. } => d,
        })
    }

    pub fn sampler(&self) -> ClaimSampler {
        match *self {
            ClaimLaw::Exponential { mu } => ClaimSampler::Exponential(1.0 / mu),
            ClaimLaw::Gamma { shape, rate } => {
                ClaimSampler::Gamma(Gamma::new(shape, 1.0 / rate).expect("validated gamma claim law"))
            }
            ClaimLaw::Deterministic { m } => ClaimSampler::Constant(m),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// Prepared claim-size sampler.
#[derive(Debug, Clone, Copy)]
pub enum ClaimSampler {
    Exponential(f64),
    Gamma(Gamma<f64>),
    Constant(f64),
}

impl Distribution<f64> for ClaimSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ClaimSampler::Exponential(scale) => scale * rng.sample::<f64, _>(Exp1),
            ClaimSampler::Gamma(g) => g.sample(rng),
            ClaimSampler::Constant(m) => *m,
        }
    }
}

impl fmt::Display for ClaimLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimLaw::Exponential { mu } => write!(f, "exp:{mu}"),
            ClaimLaw::Gamma { shape, rate } => write!(f, "gamma:{shape}:{rate}"),
            ClaimLaw::Deterministic { m } => write!(f, "det:{m}"),
        }
    }
}

impl FromStr for ClaimLaw {
    type Err = Error;

    /// `exp:MU`, `gamma:SHAPE:RATE` or `det:M`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number '{}' in claim law '{s}'", parts[i])))
        };
        match (parts[0], parts.len()) {
            ("exp", 2) => ClaimLaw::exponential(num(1)?),
            ("gamma", 3) => ClaimLaw::gamma(num(1)?, num(2)?),
            ("det", 2) => ClaimLaw::deterministic(num(1)?),
            _ => Err(Error::InvalidInput(format!(
                "claim law '{s}' is not one of exp:MU, gamma:SHAPE:RATE, det:M"
            ))),
        }
    }
}

/// Arrival law, premium rate and claim law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinModel {
    pub frac: FracParams,
    pub c: f64,
    pub claims: ClaimLaw,
}

impl RuinModel {
    pub fn new(frac: FracParams, c: f64, claims: ClaimLaw) -> Result<Self> {
        positive("c", c)?;
        Ok(Self { frac, c, claims })
    }

    /// `λE[U]/h`, the premium rate the net profit condition must exceed
    /// when `ν = 1`.
    pub fn required_premium(&self) -> f64 {
        self.frac.lambda() * self.claims.mean() / self.frac.h()
    }
}

/// `log E[e^{θU}] + κ(−cθ)`.
pub fn kappa_tilde(model: &RuinModel, theta: f64) -> Extended {
    model.claims.log_mgf(theta) + kappa(&model.frac, -model.c * theta)
}

const ROOT_TOL: f64 = 1e-12;
const ROOT_CHECK: f64 = 1e-10;

/// Adjustment coefficient: the positive root `w` of [`kappa_tilde`].
pub fn lundberg_root(model: &RuinModel) -> Result<f64> {
    if model.frac.is_classical() && model.c <= model.required_premium() {
        return Err(Error::NetProfitViolated {
            c: model.c,
            required: model.required_premium(),
        });
    }
    let boundary = model.claims.mgf_boundary();
    let grid: Vec<f64> = if boundary.is_finite() {
        (1..=60)
            .rev()
            .map(|k| boundary * 2f64.powi(-k))
            .chain((2..=60).map(|k| boundary * (1.0 - 2f64.powi(-k))))
            .collect()
    } else {
        (-60..=60).map(|k| 2f64.powi(k)).collect()
    };
    let mut last_negative = None;
    let mut bracket = None;
    for &theta in &grid {
        match kappa_tilde(model, theta) {
            Extended::Finite(v) if v < 0.0 => last_negative = Some(theta),
            Extended::Finite(v) if v > 0.0 => {
                if let Some(lo) = last_negative {
                    bracket = Some((lo, theta));
                    break;
                }
            }
            Extended::Infinite => {
                if let Some(lo) = last_negative {
                    bracket = Some((lo, theta));
                }
                break;
            }
            _ => {}
        }
    }
    let (lo, hi) = bracket.ok_or_else(|| {
        Error::NoLundbergRoot(format!(
            "kappa_tilde has no sign change on (0, {boundary}) for c = {}",
            model.c
        ))
    })?;
    let f = |theta: f64| kappa_tilde(model, theta).to_f64();
    let mut conv = SimpleConvergency {
        eps: ROOT_TOL * lo.max(1e-300),
        max_iter: 500,
    };
    let w = find_root_brent(lo, hi, f, &mut conv).map_err(|e| Error::NonConvergence {
        what: "adjustment coefficient",
        detail: format!("{e:?} on [{lo}, {hi}]"),
    })?;
    let residual = kappa_tilde(model, w);
    match residual {
        Extended::Finite(r) if r.abs() <= ROOT_CHECK && w > 0.0 && w < boundary => Ok(w),
        _ => Err(Error::NoLundbergRoot(format!(
            "root candidate {w} has kappa_tilde = {residual} (domain boundary {boundary})"
        ))),
    }
}

/// A draw from the tilted product law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedPair {
    pub claim: f64,
    pub holding: f64,
    /// Proposals consumed by the holding-time rejection step.
    pub proposals: u64,
}

/// Sampler of `(U, T)` under the tilt `θ`.
#[derive(Debug, Clone, Copy)]
pub struct TiltedSampler {
    frac: FracParams,
    c_theta: f64,
    claims: ClaimSampler,
    holding: HoldingTilt,
}

#[derive(Debug, Clone, Copy)]
enum HoldingTilt {
    Gamma(Gamma<f64>),
    Rejection,
}

impl TiltedSampler {
    pub fn new(model: &RuinModel, theta: f64) -> Result<Self> {
        if kappa_tilde(model, theta).is_infinite() || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "tilt theta = {theta} outside the finiteness domain of kappa_tilde"
            )));
        }
        let c_theta = model.c * theta;
        let p = model.frac;
        let holding = if p.is_classical() {
            HoldingTilt::Gamma(Gamma::new(p.h(), 1.0 / (p.lambda() + c_theta)).expect("tilted gamma rate is positive"))
        } else {
            HoldingTilt::Rejection
        };
        Ok(Self {
            frac: p,
            c_theta,
            claims: model.claims.tilt(theta)?.sampler(),
            holding,
        })
    }

    /// Probability that a holding-time proposal is accepted,
    /// `(λ/(λ+(cθ)^ν))^h`, for `ν < 1`.
    pub fn acceptance_probability(&self) -> Option<f64> {
        match self.holding {
            HoldingTilt::Gamma(_) => None,
            HoldingTilt::Rejection => kappa(&self.frac, -self.c_theta).finite().map(f64::exp),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TiltedPair {
        let claim = self.claims.sample(rng);
        let (holding, proposals) = match &self.holding {
            HoldingTilt::Gamma(g) => (g.sample(rng), 1),
            HoldingTilt::Rejection => {
                let mut n = 0;
                loop {
                    n += 1;
                    let t = sample_holding(&self.frac, rng);
                    if self.c_theta == 0.0 || rng.random::<f64>() < (-self.c_theta * t).exp() {
                        break (t, n);
                    }
                }
            }
        };
        TiltedPair {
            claim,
            holding,
            proposals,
        }
    }
}

/// One draw of `(U, T)` under the tilt `θ`.
pub fn sample_tilted_pair<R: Rng + ?Sized>(model: &RuinModel, theta: f64, rng: &mut R) -> Result<TiltedPair> {
    Ok(TiltedSampler::new(model, theta)?.sample(rng))
}

/// Default cap on the length of a single tilted walk.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Importance-sampling estimate of `Ψ(u)` with run diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinIsReport {
    pub u: f64,
    pub w: f64,
    pub estimate: McEstimate,
    pub mean_steps: f64,
    /// Fraction of accepted holding-time proposals (`ν < 1`).
    pub acceptance_rate: Option<f64>,
}

/// Importance-sampling estimate of `Ψ(u)` under the tilt at `w`.
pub fn ruin_is(model: &RuinModel, u: f64, n_rep: u64, seed: u64) -> Result<RuinIsReport> {
    ruin_is_with_cap(model, u, n_rep, seed, DEFAULT_STEP_CAP)
}

pub fn ruin_is_with_cap(model: &RuinModel, u: f64, n_rep: u64, seed: u64, step_cap: u64) -> Result<RuinIsReport> {
    positive("u", u)?;
    if n_rep == 0 {
        return Err(Error::InvalidInput("n_rep must be positive".into()));
    }
    let w = lundberg_root(model)?;
    let drift = tilted_drift(model, w);
    if !(drift > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tilted mean step {drift} is not positive at w = {w}"
        )));
    }
    let sampler = TiltedSampler::new(model, w)?;
    let c = model.c;
    let runs = replicate(seed, n_rep, |i, rng| {
        let mut s = 0.0;
        let mut proposals = 0;
        for step in 1..=step_cap {
            let pair = sampler.sample(rng);
            proposals += pair.proposals;
            s += pair.claim - c * pair.holding;
            if s > u {
                return Ok(((-w * s).exp(), step, proposals));
            }
        }
        Err(Error::StepCapExceeded {
            replication: i,
            cap: step_cap,
            partial_sum: s,
        })
    })?;
    let weights: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let estimate = McEstimate::from_samples(&weights, seed)?;
    if !(estimate.value > 0.0 && estimate.value < 1.0) {
        return Err(Error::Internal(format!(
            "importance-sampling estimate {} outside (0, 1)",
            estimate.value
        )));
    }
    let steps: u64 = runs.iter().map(|r| r.1).sum();
    let proposals: u64 = runs.iter().map(|r| r.2).sum();
    let acceptance_rate = (!model.frac.is_classical()).then(|| steps as f64 / proposals as f64);
    Ok(RuinIsReport {
        u,
        w,
        estimate,
        mean_steps: steps as f64 / n_rep as f64,
        acceptance_rate,
    })
}

/// `d/dθ κ̃` at `w`: the mean step of the walk under the tilt.
fn tilted_drift(model: &RuinModel, w: f64) -> f64 {
    let h = 1e-6 * w;
    (kappa_tilde(model, w + h).to_f64() - kappa_tilde(model, w - h).to_f64()) / (2.0 * h)
}

/// Untilted estimate of `P(passage within step_horizon steps)`, a lower
/// bound for `Ψ(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrudeReport {
    pub u: f64,
    pub step_horizon: u64,
    pub estimate: McEstimate,
    pub hits: u64,
    /// Always set: passage beyond the horizon is not observed.
    pub lower_bound: bool,
    /// `3/n_rep` upper confidence bound when there are no hits.
    pub rule_of_three: Option<f64>,
}

pub fn ruin_crude(model: &RuinModel, u: f64, n_rep: u64, step_horizon: u64, seed: u64) -> Result<CrudeReport> {
    positive("u", u)?;
    if n_rep == 0 {
        return Err(Error::InvalidInput("n_rep must be positive".into()));
    }
    let claims = model.claims.sampler();
    let (frac, c) = (model.frac, model.c);
    let hits = replicate(seed, n_rep, |_, rng| {
        let mut s = 0.0;
        for _ in 0..step_horizon {
            s += claims.sample(rng) - c * sample_holding(&frac, rng);
            if s > u {
                return Ok(1.0);
            }
        }
        Ok(0.0)
    })?;
    let estimate = McEstimate::from_samples(&hits, seed)?;
    let n_hits = hits.iter().filter(|&&h| h > 0.0).count() as u64;
    Ok(CrudeReport {
        u,
        step_horizon,
        estimate,
        hits: n_hits,
        lower_bound: true,
        rule_of_three: (n_hits == 0).then(|| 3.0 / n_rep as f64),
    })
}

/// Fitted decay of `log Ψ(u)` against `−w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeCheck {
    pub slope: f64,
    pub w: f64,
    pub rel_gap: f64,
    pub estimates: Vec<RuinIsReport>,
}

/// Least-squares slope of `log Ψ̂(u)` over `u_grid`. Every grid point uses
/// the same `seed`.
pub fn lundberg_slope_check(model: &RuinModel, u_grid: &[f64], n_rep: u64, seed: u64) -> Result<SlopeCheck> {
    if u_grid.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "slope check needs at least 3 capital levels, got {}",
            u_grid.len()
        )));
    }
    if u_grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidInput("capital grid must be strictly increasing".into()));
    }
    let estimates = u_grid
        .iter()
        .map(|&u| ruin_is(model, u, n_rep, seed))
        .collect::<Result<Vec<_>>>()?;
    let w = estimates[0].w;
    let n = u_grid.len() as f64;
    let ys: Vec<f64> = estimates.iter().map(|e| e.estimate.value.ln()).collect();
    let mx = u_grid.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = u_grid.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = u_grid.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(SlopeCheck {
        slope,
        w,
        rel_gap: (slope + w).abs() / w,
        estimates,
    })
}
