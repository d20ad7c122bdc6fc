//! Numerical Legendre–Fenchel conjugation of convex scalar functions.
//!
//! `f*(x) = sup_{θ ∈ D} {θx − f(θ)}` is found in three stages:
//!
//! 1. The concave objective is evaluated on a two-sided geometric grid
//!    around an anchor point (scales `2^-60 … 2^60`, or approaching finite
//!    ends of `D` geometrically). Each side stops once the objective has
//!    decreased three times in a row.
//! 2. The grid maximum brackets the maximizer; golden-section search
//!    shrinks the bracket.
//! 3. Bisection on the sign of a central finite difference refines the
//!    bracket to `1e-12·r`, where `r` is the bracket's distance from the
//!    anchor.  Maximizers close to the anchor are resolved relatively.
//!
//! A maximum on the outermost grid point of an unbounded side that is still
//! growing at a non-negligible rate is reported as `+∞`.

use crate::error::{Error, Result};
use crate::ext::Extended;

use super::RateEvaluation;

/// One end of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Unbounded,
    Open(f64),
    Closed(f64),
}

impl Bound {
    fn value(self) -> Option<f64> {
        match self {
            Bound::Unbounded => None,
            Bound::Open(v) | Bound::Closed(v) => Some(v),
        }
    }
}

/// Interval on which the conjugated function is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: Bound::Unbounded,
        hi: Bound::Unbounded,
    };

    pub fn new(lo: Bound, hi: Bound) -> Self {
        Self { lo, hi }
    }

    /// `(-∞, hi]`
    pub fn up_to(hi: f64) -> Self {
        Self::new(Bound::Unbounded, Bound::Closed(hi))
    }

    /// `(-∞, hi)`
    pub fn below(hi: f64) -> Self {
        Self::new(Bound::Unbounded, Bound::Open(hi))
    }

    pub fn contains(&self, theta: f64) -> bool {
        let lo_ok = match self.lo {
            Bound::Unbounded => true,
            Bound::Open(a) => theta > a,
            Bound::Closed(a) => theta >= a,
        };
        let hi_ok = match self.hi {
            Bound::Unbounded => true,
            Bound::Open(b) => theta < b,
            Bound::Closed(b) => theta <= b,
        };
        lo_ok && hi_ok
    }

    fn anchor(&self) -> f64 {
        if self.contains(0.0) {
            return 0.0;
        }
        match (self.lo.value(), self.hi.value()) {
            (Some(a), Some(b)) => 0.5 * (a + b),
            (Some(a), None) => a + 1.0,
            (None, Some(b)) => b - 1.0,
            (None, None) => 0.0,
        }
    }
}

const GRID_EXP: i32 = 60;
const GOLDEN_REL: f64 = 1e-8;
const FINAL_REL: f64 = 1e-12;
const GROWTH_REL: f64 = 1e-9;

/// Points from the anchor outward toward `end`.
fn side_points(anchor: f64, end: Bound, dir: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    match end {
        Bound::Unbounded => {
            for k in -GRID_EXP..=GRID_EXP {
                pts.push(anchor + dir * 2f64.powi(k));
            }
        }
        Bound::Open(e) | Bound::Closed(e) => {
            let d = (e - anchor).abs();
            if d == 0.0 {
                return pts;
            }
            for k in (1..=GRID_EXP).rev() {
                pts.push(anchor + dir * d * 2f64.powi(-k));
            }
            for k in 2..=GRID_EXP {
                pts.push(e - dir * d * 2f64.powi(-k));
            }
            if let Bound::Closed(_) = end {
                pts.push(e);
            }
            pts.dedup();
        }
    }
    pts
}

struct Objective<'a, F> {
    f: &'a F,
    x: f64,
    best: (f64, f64),
}

impl<F: Fn(f64) -> Extended> Objective<'_, F> {
    fn eval(&mut self, theta: f64) -> Result<f64> {
        match (self.f)(theta) {
            Extended::Finite(v) if v.is_finite() => {
                let phi = theta * self.x - v;
                if phi > self.best.1 {
                    self.best = (theta, phi);
                }
                Ok(phi)
            }
            _ => Err(Error::ContractViolation { theta }),
        }
    }
}

/// `sup_{θ ∈ domain} {θx − f(θ)}` for `f` convex and finite on `domain`.
pub fn conjugate<F>(f: F, x: f64, domain: Interval) -> Result<RateEvaluation>
where
    F: Fn(f64) -> Extended,
{
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!(
            "conjugate evaluated at non-finite x = {x}"
        )));
    }
    let mut obj = Objective {
        f: &f,
        x,
        best: (f64::NAN, f64::NEG_INFINITY),
    };
    let anchor = domain.anchor();
    let phi0 = obj.eval(anchor)?;

    let mut grid: Vec<(f64, f64)> = vec![(anchor, phi0)];
    let mut edge_unbounded: Vec<usize> = Vec::new();
    let mut edge_open: Vec<usize> = Vec::new();
    for (end, dir) in [(domain.hi, 1.0), (domain.lo, -1.0)] {
        let pts = side_points(anchor, end, dir);
        let mut prev = phi0;
        let mut decreases = 0;
        let n = pts.len();
        for (i, &th) in pts.iter().enumerate() {
            if !domain.contains(th) {
                continue;
            }
            let phi = obj.eval(th)?;
            grid.push((th, phi));
            if i + 1 == n {
                match end {
                    Bound::Unbounded => edge_unbounded.push(grid.len() - 1),
                    Bound::Open(_) => edge_open.push(grid.len() - 1),
                    Bound::Closed(_) => {}
                }
            }
            if phi < prev {
                decreases += 1;
                if decreases >= 3 {
                    break;
                }
            } else {
                decreases = 0;
            }
            prev = phi;
        }
    }

    let imax = grid
        .iter()
        .enumerate()
        .fold(0, |b, (i, g)| if g.1 > grid[b].1 { i } else { b });
    let (theta_max, phi_max) = grid[imax];
    let mut sorted = grid.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pos = sorted
        .iter()
        .position(|g| g.0 == theta_max)
        .expect("maximum is on the grid");

    if edge_unbounded.contains(&imax) {
        let neighbour = if pos + 1 == sorted.len() {
            sorted[pos - 1]
        } else {
            sorted[pos + 1]
        };
        let growth = phi_max - neighbour.1;
        if growth > GROWTH_REL * (1.0 + phi_max.abs()) {
            return Ok(RateEvaluation::numeric(x, Extended::Infinite, None));
        }
        return Ok(RateEvaluation::numeric(x, Extended::Finite(phi_max), None));
    }
    if edge_open.contains(&imax) {
        return Ok(RateEvaluation::numeric(x, Extended::Finite(phi_max), None));
    }

    let mut a = if pos > 0 { sorted[pos - 1].0 } else { theta_max };
    let mut b = if pos + 1 < sorted.len() {
        sorted[pos + 1].0
    } else {
        theta_max
    };

    let scale = (a - anchor).abs().max((b - anchor).abs()).max(f64::MIN_POSITIVE);
    golden(&mut obj, &mut a, &mut b, scale)?;
    derivative_bisection(&mut obj, &mut a, &mut b, scale)?;

    let (theta, value) = obj.best;
    Ok(RateEvaluation::numeric(x, Extended::Finite(value), Some(theta)))
}

fn golden<F: Fn(f64) -> Extended>(obj: &mut Objective<'_, F>, a: &mut f64, b: &mut f64, scale: f64) -> Result<()> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = *b - INV_PHI * (*b - *a);
    let mut d = *a + INV_PHI * (*b - *a);
    let mut fc = obj.eval(c)?;
    let mut fd = obj.eval(d)?;
    for _ in 0..400 {
        if (*b - *a) <= GOLDEN_REL * scale {
            break;
        }
        if fc >= fd {
            *b = d;
            d = c;
            fd = fc;
            c = *b - INV_PHI * (*b - *a);
            fc = obj.eval(c)?;
        } else {
            *a = c;
            c = d;
            fc = fd;
            d = *a + INV_PHI * (*b - *a);
            fd = obj.eval(d)?;
        }
    }
    Ok(())
}

fn derivative_bisection<F: Fn(f64) -> Extended>(
    obj: &mut Objective<'_, F>,
    a: &mut f64,
    b: &mut f64,
    scale: f64,
) -> Result<()> {
    for _ in 0..200 {
        let m = 0.5 * (*a + *b);
        if (*b - *a) <= FINAL_REL * scale {
            break;
        }
        let step = (0.25 * (*b - *a)).min(1e-7 * scale);
        let up = obj.eval(m + step)?;
        let down = obj.eval(m - step)?;
        obj.eval(m)?;
        if up > down {
            *a = m;
        } else {
            *b = m;
        }
    }
    Ok(())
}
