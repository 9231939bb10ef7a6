//! Exact rational coefficients of the trans-series on both sides of `x = 0`.
//!
//! Positive side, with `φ = k e^(-ζ) / (2√π x^(1/4))` and `ζ = (2/3) x^(3/2)`:
//! the perturbative sector is `φ Σ a_m x^(-3m/2)` (the Airy expansion) and
//! the one-instanton sector is `φ^N x^-1 Σ d_m x^(-3m/2)`. Substituting into
//! the equation gives
//!
//! `(N²-1) d_m + (N/2)(N+6m-3) d_{m-1} + (1/16)(N+6m-8)(N+6m-4) d_{m-2} = b_m`
//!
//! with `Σ b_m x^(-3m/2) = 2 (Σ a_m x^(-3m/2))^N`.
//!
//! Negative side: `y = (-x/2)^(1/(N-1)) Σ c_l (-x)^(-3l)`, with
//! `(N-1) c_l = B(l) c_{l-1} / (N-1)² - r_l`, where
//! `B(l) = [(3l-3)N - (3l-2)] [(3l-2)N - (3l-1)]` and `r_l` is the degree-`l`
//! coefficient of `C^N - C` without its `c_l` terms.
//!
//! Every table built here is checked against [`oracle`] before it is
//! returned.

pub mod oracle;
mod pole;
mod poly;
pub mod series;

use serde::Serialize;
use thiserror::Error;

pub use pole::{pole_laurent_n3, pole_obstruction, pole_residual, pole_series, PoleSeries};
pub use poly::BiPoly;

use crate::prec::BigRational;
use series::{pow_trunc, PowerTracker};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("N must be at least 2, got {0}")]
    BadPower(u32),
    #[error("need at least {needed} coefficients, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("no integer-order pole exists for N = {0}")]
    NoIntegerPole(u32),
    #[error("resonance condition fails: {0} != 0")]
    ResonanceInconsistent(String),
    #[error("{sector:?} table for N = {n_power} fails re-substitution at order {key}")]
    OracleMismatch {
        sector: Sector,
        n_power: u32,
        key: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sector {
    /// Airy asymptotic coefficients `a_m`
    AiryBase,
    /// `b_m`, the coefficients of twice the `N`-th power of the Airy series
    AiryPowerB,
    /// one-instanton fluctuation coefficients `d_m` on the positive side
    PosInstanton1,
    /// perturbative coefficients `c_l` on the negative side
    NegPerturbative,
}

impl Sector {
    pub fn short_name(self) -> &'static str {
        match self {
            Sector::AiryBase => "airy",
            Sector::AiryPowerB => "b",
            Sector::PosInstanton1 => "d1",
            Sector::NegPerturbative => "c",
        }
    }
}

/// An indexed run of exact coefficients for one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    /// `N`, or 0 for the `N`-independent Airy table
    pub n_power: u32,
    pub sector: Sector,
    pub coeffs: Vec<BigRational>,
}

impl CoeffTable {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Re-substitutes the table into the equation; `Ok` when every order the
    /// table determines cancels exactly.
    pub fn verify(&self) -> Result<(), CoeffError> {
        let check = |(res, floor): (oracle::Puiseux, i64)| match oracle::first_violation(&res, floor) {
            None => Ok(()),
            Some(key) => Err(CoeffError::OracleMismatch {
                sector: self.sector,
                n_power: self.n_power,
                key,
            }),
        };
        let airy = || airy_asym_coeffs(self.coeffs.len().saturating_sub(1)).coeffs;
        match self.sector {
            Sector::AiryBase => check(oracle::airy_base_residual(&self.coeffs)),
            Sector::AiryPowerB => check(oracle::b_residual(self.n_power, &airy(), &self.coeffs)),
            Sector::PosInstanton1 => check(oracle::d1_residual(self.n_power, &airy(), &self.coeffs)),
            Sector::NegPerturbative => check(oracle::c_residual(self.n_power, &self.coeffs)),
        }
    }
}

fn check_power(n_power: u32) -> Result<(), CoeffError> {
    if n_power < 2 {
        Err(CoeffError::BadPower(n_power))
    } else {
        Ok(())
    }
}

/// Airy asymptotic coefficients
/// `a_m = (-1)^m Γ(m+1/6) Γ(m+5/6) / (2π (4/3)^m m!)` for `m = 0..=m_max`,
/// built as `a_m = -a_{m-1} (m - 5/6)(m - 1/6) / ((4/3) m)`.
pub fn airy_asym_coeffs(m_max: usize) -> CoeffTable {
    let mut coeffs = Vec::with_capacity(m_max + 1);
    coeffs.push(BigRational::from(1));
    for m in 1..=m_max as i64 {
        let num = BigRational::from((6 * m - 5, 6)) * BigRational::from((6 * m - 1, 6));
        let step = num / BigRational::from((4 * m, 3));
        let prev = coeffs.last().expect("nonempty");
        coeffs.push(-(step * prev));
    }
    CoeffTable {
        n_power: 0,
        sector: Sector::AiryBase,
        coeffs,
    }
}

/// `b_m` for `m = 0..=m_max`: twice the `N`-th power of the Airy series.
pub fn airy_power_coeffs(n_power: u32, m_max: usize) -> Result<CoeffTable, CoeffError> {
    check_power(n_power)?;
    let a = airy_asym_coeffs(m_max).coeffs;
    let coeffs = pow_trunc(&a, n_power, m_max + 1)
        .into_iter()
        .map(|c| c * 2)
        .collect();
    Ok(CoeffTable {
        n_power,
        sector: Sector::AiryPowerB,
        coeffs,
    })
}

fn d1_unchecked(n_power: u32, m_max: usize) -> Result<Vec<BigRational>, CoeffError> {
    let b = airy_power_coeffs(n_power, m_max)?.coeffs;
    let n = n_power as i64;
    let lead = BigRational::from(n * n - 1);
    let mut d: Vec<BigRational> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max as i64 {
        let mut rhs = b[m as usize].clone();
        if m >= 1 {
            rhs -= BigRational::from((n * (n + 6 * m - 3), 2)) * &d[m as usize - 1];
        }
        if m >= 2 {
            rhs -= BigRational::from(((n + 6 * m - 8) * (n + 6 * m - 4), 16)) * &d[m as usize - 2];
        }
        d.push(rhs / &lead);
    }
    Ok(d)
}

/// One-instanton coefficients `d_m` for `m = 0..=m_max`, oracle-verified.
pub fn d1_coeffs(n_power: u32, m_max: usize) -> Result<CoeffTable, CoeffError> {
    let table = CoeffTable {
        n_power,
        sector: Sector::PosInstanton1,
        coeffs: d1_unchecked(n_power, m_max)?,
    };
    table.verify()?;
    Ok(table)
}

/// The `d_m` recursion in the form
/// `d_m + (N/2)(N+6m-3) d_{m-1} + (1/16)(N+6m-8)(N+6m-4) d_{m-2} = b_{m+1}/(N²-1)`.
/// Kept for comparison only: it does not satisfy the equation.
pub fn d1_coeffs_unit_leading(n_power: u32, m_max: usize) -> Result<CoeffTable, CoeffError> {
    let b = airy_power_coeffs(n_power, m_max + 1)?.coeffs;
    let n = n_power as i64;
    let mut d: Vec<BigRational> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max as i64 {
        let mut v = b[m as usize + 1].clone() / BigRational::from(n * n - 1);
        if m >= 1 {
            v -= BigRational::from((n * (n + 6 * m - 3), 2)) * &d[m as usize - 1];
        }
        if m >= 2 {
            v -= BigRational::from(((n + 6 * m - 8) * (n + 6 * m - 4), 16)) * &d[m as usize - 2];
        }
        d.push(v);
    }
    Ok(CoeffTable {
        n_power,
        sector: Sector::PosInstanton1,
        coeffs: d,
    })
}

/// Negative-side perturbative coefficients `c_l` for `l = 0..=l_max`,
/// oracle-verified.
pub fn c_coeffs(n_power: u32, l_max: usize) -> Result<CoeffTable, CoeffError> {
    check_power(n_power)?;
    let n = n_power as i64;
    let nm1 = BigRational::from(n - 1);
    let nm1_sq = BigRational::from((n - 1) * (n - 1));
    let mut c = vec![BigRational::from(1)];
    let mut power = PowerTracker::new(n_power);
    for l in 1..=l_max as i64 {
        let bl = ((3 * l - 3) * n - (3 * l - 2)) * ((3 * l - 2) * n - (3 * l - 1));
        let partial = power.partial(&c);
        // the c_l part of [C^N - C]_l is (N - 1) c_l
        let cl = (BigRational::from(bl) * &c[l as usize - 1] / &nm1_sq - &partial) / &nm1;
        power.push(partial, &cl);
        c.push(cl);
    }
    let table = CoeffTable {
        n_power,
        sector: Sector::NegPerturbative,
        coeffs: c,
    };
    table.verify()?;
    Ok(table)
}

/// `coef · √radicand`, an exact real algebraic number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdValue {
    pub coef: BigRational,
    pub radicand: BigRational,
}

impl SurdValue {
    pub fn to_f64(&self) -> f64 {
        self.coef.to_f64() * self.radicand.to_f64().sqrt()
    }

    /// Exact square.
    pub fn squared(&self) -> BigRational {
        BigRational::from(&self.coef * &self.coef) * &self.radicand
    }
}

/// Exponents of the exponentially small sectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstantonData {
    pub n_power: u32,
    /// coefficient of `x^(3/2)` on the positive side
    pub action_pos: BigRational,
    /// coefficient of `(-x)^(3/2)` on the negative side, `(2/3)√(N-1)`
    pub action_neg: SurdValue,
    /// `9/(4(N-1))`, the geometric rate of the `c_l`
    pub growth_rate_neg: BigRational,
}

pub fn instanton_data(n_power: u32) -> Result<InstantonData, CoeffError> {
    check_power(n_power)?;
    let n = n_power as i64;
    Ok(InstantonData {
        n_power,
        action_pos: BigRational::from((2, 3)),
        action_neg: SurdValue {
            coef: BigRational::from((2, 3)),
            radicand: BigRational::from(n - 1),
        },
        growth_rate_neg: BigRational::from((9, 4 * (n - 1))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from((n, d))
    }

    #[test]
    fn airy_leading_terms() {
        let a = airy_asym_coeffs(3).coeffs;
        assert_eq!(a[0], 1);
        assert_eq!(a[1], q(-5, 48));
        // classical u_2 = 385/10368 in powers of ζ = (2/3) x^(3/2)
        assert_eq!(a[2], q(385, 10368) * q(9, 4));
    }

    #[test]
    fn d1_base_case() {
        let d = d1_coeffs(3, 4).unwrap().coeffs;
        assert_eq!(d[0], q(1, 4));
    }

    #[test]
    fn c_low_orders() {
        let c = c_coeffs(3, 3).unwrap().coeffs;
        assert_eq!(c[1], q(-1, 8));
        let c4 = c_coeffs(4, 1).unwrap().coeffs;
        assert_eq!(c4[1], q(-2, 27));
    }

    #[test]
    fn rejects_linear_power() {
        assert_eq!(airy_power_coeffs(1, 3).unwrap_err(), CoeffError::BadPower(1));
    }
}
