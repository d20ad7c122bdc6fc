//! Shared fixtures for the `fracld` benchmarks.

use fracld::ruin::{ClaimLaw, RuinModel};
use fracld::FracParams;

/// `ν = 1/2`, `h = λ = 1`.
pub fn fractional_half() -> FracParams {
    FracParams::new(0.5, 1.0, 1.0).expect("valid parameters")
}

/// `ν = 0.7`, `h = 1.5`, `λ = 2`; no closed-form rate.
pub fn fractional_generic() -> FracParams {
    FracParams::new(0.7, 1.5, 2.0).expect("valid parameters")
}

/// Unit premium and exp(1) claims on [`fractional_half`].
pub fn ruin_half() -> RuinModel {
    RuinModel::new(
        fractional_half(),
        1.0,
        ClaimLaw::exponential(1.0).expect("valid claims"),
    )
    .expect("valid model")
}
