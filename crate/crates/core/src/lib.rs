//! Numerics for large deviations of fractional Poisson processes.
//!
//! * [`special_fn`]: Mittag-Leffler functions, plain and log scale.
//! * [`laws`]: holding-time and weighted Poisson laws with exact samplers.
//! * [`rates`]: cumulants, numeric conjugation and closed-form rate functions.
//! * [`entropy`]: relative entropy of weighted Poisson laws and its limit.
//! * [`simulate`]: renewal paths, tail profiles, subordinated representation.
//! * [`ruin`]: adjustment coefficients and importance-sampled ruin probabilities.
//!
//! Monte Carlo routines take a `seed` and draw replication `i` from stream
//! `i` (see [`stream`]), so their output does not depend on thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod ext;
pub mod laws;
pub mod num;
pub mod rates;
pub mod ruin;
pub mod simulate;
pub mod special_fn;
pub mod stream;

pub use entropy::EntropyQuery;
pub use error::{Error, Result};
pub use ext::Extended;
pub use laws::{FracParams, WeightedPoissonLaw};
pub use rates::{RateEvaluation, RateMethod};
pub use ruin::{ClaimLaw, RuinModel};
pub use simulate::RenewalPath;
pub use stream::McEstimate;
