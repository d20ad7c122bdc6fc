//! Extended reals used for cumulants and rate functions.

use std::fmt;

use serde::{Serialize, Serializer};

/// A real number or `+∞`.
///
/// Cumulant generating functions and rate functions are genuinely
/// extended-real valued, so infinity is a state of its own rather than a
/// float sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub const ZERO: Extended = Extended::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// Finite value or panic. Intended for tests and call sites that have
    /// already established finiteness.
    #[track_caller]
    pub fn unwrap(self) -> f64 {
        self.finite().expect("value is +inf")
    }

    /// Maps into `f64`, sending `+∞` to `f64::INFINITY`. Only for output.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn scale(self, factor: f64) -> Extended {
        debug_assert!(factor >= 0.0);
        match self {
            Extended::Finite(v) => Extended::Finite(v * factor),
            Extended::Infinite if factor == 0.0 => Extended::ZERO,
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl std::ops::Add for Extended {
    type Output = Extended;

    fn add(self, rhs: Extended) -> Extended {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinite,
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        Extended::Finite(v)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}
