//! Airy functions, the first zero of Ai', and the gamma function at a
//! configurable working precision.

mod airy;
mod gamma;

pub use airy::{airy_asymptotic_crossover, airy_eval, airy_prime_first_zero, AiryValues};
pub use gamma::gamma_eval;

#[allow(unused_imports)]
pub(crate) use gamma::even_bernoulli;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("cannot reach {digits} digits at x = {x} with the configured series depth")]
    PrecisionUnreachable { x: f64, digits: u32 },
    #[error("gamma function pole at {0}")]
    Pole(f64),
    #[error("argument {0} outside the supported domain")]
    OutOfDomain(f64),
}
