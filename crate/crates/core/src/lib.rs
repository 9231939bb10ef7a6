//! Connection problem for the generalized Painlevé II equation
//! `y'' = 2 y^N + x y`.
//!
//! The crate computes the separatrix constant `k_N` multiplying `Ai(x)` at
//! `x → +∞` by shooting and bisection, generates the exact rational
//! coefficients of the trans-series on both sides of `x = 0`, extracts their
//! large-order growth by Richardson acceleration, and evaluates the
//! Airy-kernel integral equation and its perturbative tower.
//!
//! Floating-point work is carried out in [`PrecFloat`] at the precision of a
//! [`PrecContext`]; coefficient recursions are exact in [`BigRational`].

pub mod asymptotics;
pub mod coeffs;
pub mod export;
pub mod inteq;
pub mod ode;
pub mod prec;
pub mod shooting;
pub mod specfun;

pub use prec::{BigRational, PrecContext, PrecFloat};
