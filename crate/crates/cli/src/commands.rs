use fracld::entropy::{entropy_rate, relative_entropy, EntropyQuery};
use fracld::laws::{sample_holding, FracParams, WeightedPoissonLaw};
use fracld::rates::{self, RateEvaluation};
use fracld::ruin::{self, ClaimLaw, RuinModel};
use fracld::simulate::{self, compare_subordinated, subordinated_pmf};
use fracld::special_fn::{log_ml, ml_generalized};
use fracld::stream::{replicate, McEstimate};
use fracld::{Error, Extended};
use serde::Serialize;

use crate::args::*;
use crate::report::{format_float, Cell, Report};

/// Failure of a subcommand, mapped to an exit code by `main`.
#[derive(Debug)]
pub enum Failure {
    /// Bad parameters: exit 2.
    Validation(String),
    /// Error from a numerical routine.
    Numeric(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) => Failure::Validation(msg),
            other => Failure::Numeric(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn valid<T>(r: fracld::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Validation(e.to_string()))
}

/// Flattens the effective arguments into sorted `key = value` pairs.
fn echo<A: Serialize>(subcommand: &str, args: &A) -> Vec<(String, String)> {
    let mut out = vec![("subcommand".to_owned(), subcommand.to_owned())];
    if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(args) {
        for (k, v) in map {
            let key = k.replace('_', "-");
            out.push((key, render_value(&v)));
        }
    }
    out
}

fn render_value(v: &serde_json::Value) -> String {
    use serde_json::Value;
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map(format_float).unwrap_or_else(|| n.to_string()),
        Value::Array(a) => a.iter().map(render_value).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

fn process(p: &ProcessArgs) -> Result<FracParams, Failure> {
    valid(FracParams::new(p.nu, p.h, p.lambda))
}

pub fn ml_eval(a: &MlEvalArgs) -> Result<Report, Failure> {
    let mut r = Report::new(echo("ml-eval", a), &["z", if a.log { "log_value" } else { "value" }]);
    for &z in &a.z {
        let v = if a.log {
            if a.gamma != 1.0 {
                return Err(Failure::Validation("--log supports gamma = 1 only".into()));
            }
            log_ml(a.alpha, a.beta, z)?
        } else {
            ml_generalized(a.alpha, a.beta, a.gamma, z)?
        };
        r.push(vec![z.into(), v.into()]);
    }
    Ok(r)
}

pub fn pmf(a: &PmfArgs) -> Result<Report, Failure> {
    match a.law {
        PmfLaw::Weighted => {
            let law = valid(WeightedPoissonLaw::new(a.nu, a.lambda, a.t))?;
            let mut r = Report::new(echo("pmf", a), &["k", "pmf", "log_pmf"]);
            let k_max = match a.k_max {
                Some(k) => k,
                None => law.support_scan()?.len() as u64 - 1,
            };
            for k in 0..=k_max {
                let l = law.log_pmf(k);
                r.push(vec![k.into(), l.exp().into(), l.into()]);
            }
            r.summary("mean", law.mean()?);
            r.summary("log_normalizer", law.log_normalizer());
            Ok(r)
        }
        PmfLaw::Subordinated => {
            if a.nu != 0.5 {
                return Err(Failure::Validation(
                    "the subordinated representation holds for nu = 0.5 only".into(),
                ));
            }
            let mut r = Report::new(echo("pmf", a), &["k", "pmf"]);
            let mut total = 0.0;
            let mut k = 0;
            loop {
                let p = subordinated_pmf(a.lambda, a.t, k)?;
                total += p;
                r.push(vec![k.into(), p.into()]);
                let done = match a.k_max {
                    Some(m) => k >= m,
                    None => 1.0 - total < 1e-10,
                };
                if done || k >= 100_000 {
                    break;
                }
                k += 1;
            }
            r.summary("total_mass", total);
            Ok(r)
        }
    }
}

pub fn sample(a: &SampleArgs) -> Result<Report, Failure> {
    let p = process(&a.process)?;
    let law = match a.kind {
        SampleKind::Weighted => Some(valid(WeightedPoissonLaw::new(p.nu(), p.lambda(), a.t))?),
        SampleKind::Count if a.t.is_nan() || a.t <= 0.0 => {
            return Err(Failure::Validation(format!("t must be > 0, got {}", a.t)))
        }
        _ => None,
    };
    let values = replicate(a.seed, a.n_rep, |_, rng| match a.kind {
        SampleKind::Holding => Ok(sample_holding(&p, rng)),
        SampleKind::Count => simulate::simulate_count(&p, a.t, rng).map(|n| n as f64),
        SampleKind::Weighted => law.expect("law built above").sample(rng).map(|n| n as f64),
    })?;
    let mut r = Report::new(echo("sample", a), &["replication", "value"]);
    for (i, &v) in values.iter().enumerate() {
        r.push(vec![(i as u64).into(), v.into()]);
    }
    let est = McEstimate::from_samples(&values, a.seed)?;
    r.summary("mean", est.value);
    r.summary("std_error", est.std_error);
    Ok(r)
}

pub fn rate(a: &RateArgs) -> Result<Report, Failure> {
    let p = process(&a.process)?;
    let mut r = Report::new(echo("rate", a), &["x", "value", "method", "argmax_theta"]);
    for &x in &a.x {
        let e: RateEvaluation = match (a.kind, a.numeric) {
            (RateKind::T, false) => rates::rate_t(&p, x)?,
            (RateKind::T, true) => rates::rate_t_numeric(&p, x)?,
            (RateKind::M, false) => rates::rate_m(&p, x)?,
            (RateKind::M, true) => rates::rate_m_numeric(&p, x)?,
            (RateKind::A, false) => rates::rate_a(p.nu(), p.lambda(), x)?,
            (RateKind::A, true) => rates::rate_a_numeric(p.nu(), p.lambda(), x)?,
            (RateKind::J, _) => rates::composition_rate(p.lambda(), x)?,
        };
        r.push(vec![
            x.into(),
            e.value.into(),
            e.method.as_str().into(),
            e.argmax_theta.into(),
        ]);
    }
    Ok(r)
}

pub fn entropy(a: &EntropyArgs) -> Result<Report, Failure> {
    let limit = entropy_rate(&valid(EntropyQuery::limit(a.nu, a.lambda1, a.lambda2))?)?;
    let mut r = Report::new(echo("entropy", a), &["t", "h_over_t", "limit", "gap"]);
    for &t in &a.t {
        let q = valid(EntropyQuery::finite_t(a.nu, a.lambda1, a.lambda2, t))?;
        let h = relative_entropy(&q)?;
        let normalized = h.scale(1.0 / t);
        let gap = match (normalized, limit) {
            (Extended::Finite(x), Extended::Finite(l)) => Cell::Float(x - l),
            _ => Cell::Text(String::new()),
        };
        r.push(vec![t.into(), normalized.into(), limit.into(), gap]);
    }
    r.summary("limit", limit);
    Ok(r)
}

pub fn ldp_profile(a: &ProfileArgs) -> Result<Report, Failure> {
    let p = process(&a.process)?;
    let columns = ["t", "estimate", "stderr_or_bound_flag", "limit", "gap"];
    let mut r = Report::new(echo("ldp-profile", a), &columns);
    match a.model {
        ProfileModel::Renewal => {
            let limit = rates::rate_m(&p, a.x)?.value;
            for pt in simulate::ldp_profile_renewal(&p, a.x, &a.t, a.n_rep, a.seed)? {
                let flag: Cell = if pt.bound {
                    "lower_bound".into()
                } else {
                    pt.std_error.into()
                };
                r.push(vec![
                    pt.t.into(),
                    pt.estimate.into(),
                    flag,
                    limit.into(),
                    (limit.to_f64() - pt.estimate).into(),
                ]);
            }
            r.summary("limit", limit);
        }
        ProfileModel::Weighted => {
            let limit = rates::rate_a(p.nu(), p.lambda(), a.x)?.value;
            for pt in simulate::ldp_profile_weighted(p.nu(), p.lambda(), a.x, &a.t)? {
                r.push(vec![
                    pt.t.into(),
                    pt.value.into(),
                    "exact".into(),
                    limit.into(),
                    (limit.to_f64() - pt.value).into(),
                ]);
            }
            r.summary("limit", limit);
        }
    }
    Ok(r)
}

pub fn compare(a: &CompareArgs) -> Result<Report, Failure> {
    let c = compare_subordinated(a.lambda, a.t, a.n_rep, a.seed)?;
    let mut r = Report::new(echo("compare-subordinated", a), &["k", "expected", "observed"]);
    for b in &c.bins {
        let k: Cell = b.k.map_or_else(|| "tail".into(), Cell::from);
        r.push(vec![k, b.expected.into(), b.observed.into()]);
    }
    r.summary("chi2", c.chi2);
    r.summary("dof", c.dof);
    r.summary("p_value", c.p_value);
    Ok(r)
}

pub fn ruin(a: &RuinArgs) -> Result<Report, Failure> {
    let frac = process(&a.process)?;
    let claims: ClaimLaw = a
        .claims
        .parse()
        .map_err(|e: Error| Failure::Validation(e.to_string()))?;
    let model = valid(RuinModel::new(frac, a.c, claims))?;
    let w = ruin::lundberg_root(&model)?;
    let columns = [
        "u",
        "estimate",
        "std_error",
        "mean_steps",
        "acceptance_rate",
        "crude_estimate",
        "crude_std_error",
        "crude_hits",
    ];
    let mut r = Report::new(echo("ruin", a), &columns);
    let mut estimates = Vec::new();
    for &u in &a.u {
        let is = ruin::ruin_is_with_cap(&model, u, a.n_rep, a.seed, a.step_cap)?;
        let (ce, cse, hits): (Cell, Cell, Cell) = if a.crude_horizon > 0 {
            let c = ruin::ruin_crude(&model, u, a.n_rep, a.crude_horizon, a.seed)?;
            (c.estimate.value.into(), c.estimate.std_error.into(), c.hits.into())
        } else {
            ("".into(), "".into(), "".into())
        };
        r.push(vec![
            u.into(),
            is.estimate.value.into(),
            is.estimate.std_error.into(),
            is.mean_steps.into(),
            is.acceptance_rate.into(),
            ce,
            cse,
            hits,
        ]);
        estimates.push((u, is.estimate.value));
    }
    r.summary("w", w);
    r.summary(
        "estimates",
        estimates
            .iter()
            .map(|e| format_float(e.1))
            .collect::<Vec<_>>()
            .join(";"),
    );
    if estimates.len() >= 3 {
        let check = ruin::lundberg_slope_check(&model, &a.u, a.n_rep, a.seed)?;
        r.summary("slope", check.slope);
        r.summary("rel_gap", check.rel_gap);
    }
    Ok(r)
}
