//! Large-order growth of coefficient tables via Richardson acceleration.
//!
//! Two growth models are fitted:
//!
//! * one-factorial, `d_m ~ S (-1)^m A^(m-1) Γ(m+1+θ) (1 + β/(m-1))`;
//! * two-factorial, `c_l ~ -S A^l Γ(2l+θ)`.
//!
//! Ratios are formed from the exact coefficients and only then converted to
//! floating point. The rate `A` and the offset `θ` are first extracted from
//! accelerated ratio sequences and snapped to nearby simple fractions when
//! one is close enough, so that errors in them do not leak exponentially into
//! `S` through `A^m`.

use serde::Serialize;
use thiserror::Error;

use crate::coeffs::{CoeffTable, Sector};
use crate::prec::{BigRational, PrecContext, PrecFloat};
use crate::specfun::{gamma_eval, SpecfunError};

pub const DEFAULT_ORDER: usize = 6;
/// Accepted fits need the last two Richardson orders to agree this well.
pub const RESIDUAL_LIMIT: f64 = 1e-3;
const SNAP_MAX_DEN: i64 = 200;
const SNAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("sequence of length {len} is too short for Richardson order {order}")]
    InsufficientLength { len: usize, order: usize },
    #[error("need at least {needed} coefficients, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },
    #[error("expected a {expected:?} table, got {got:?}")]
    WrongSector { expected: Sector, got: Sector },
    #[error("coefficients do not alternate in sign (first failure at index {0})")]
    NotAlternating(usize),
    #[error("coefficient tail vanishes identically; there is no growth to fit")]
    ZeroTail,
    #[error("two-factorial fits need N >= 3, got {0}")]
    PowerTooSmall(u32),
    #[error("fit residual {} exceeds the limit {}", .0.residual, RESIDUAL_LIMIT)]
    ResidualTooLarge(Box<LargeOrderFit>),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthModel {
    OneFactorial,
    TwoFactorial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeOrderFit {
    pub model: GrowthModel,
    pub n_power: u32,
    pub rate_a: f64,
    pub constant_s: f64,
    pub offset: f64,
    pub subleading_beta: f64,
    /// accelerated estimates before snapping to a fraction
    pub rate_raw: f64,
    pub offset_raw: f64,
    /// fractions used for `A` and `θ`, when snapping succeeded
    pub rate_fraction: Option<(i64, i64)>,
    pub offset_fraction: Option<(i64, i64)>,
    pub richardson_order: usize,
    pub residual: f64,
    pub terms: usize,
}

/// Richardson transform of order `order` on a sequence whose element `j`
/// belongs to index `m = first_m + j`, using the last `order + 1` terms:
///
/// `R = Σ_k s_{m+k} (m+k)^order (-1)^(k+order) / (k! (order-k)!)`.
pub fn richardson_indexed(
    seq: &[PrecFloat],
    first_m: usize,
    order: usize,
) -> Result<PrecFloat, FitError> {
    if order < 1 || seq.len() <= order {
        return Err(FitError::InsufficientLength {
            len: seq.len(),
            order,
        });
    }
    let start = seq.len() - order - 1;
    let m = first_m + start;
    let prec = seq.iter().map(PrecFloat::prec).max().unwrap_or(64);
    let mut acc = PrecFloat::from_f64(0.0, prec);
    let mut fact_k = 1.0f64;
    for k in 0..=order {
        if k > 0 {
            fact_k *= k as f64;
        }
        let fact_rest: f64 = (1..=(order - k)).map(|v| v as f64).product();
        let idx = PrecFloat::from_f64((m + k) as f64, prec);
        let mut term = &seq[start + k] * idx.powu(order as u32);
        // factorials up to 20! are exact in f64
        term /= fact_k;
        term /= fact_rest;
        if (k + order) % 2 == 1 {
            term = -term;
        }
        acc += term;
    }
    Ok(acc)
}

/// Richardson transform with the sequence indexed from `m = 1`.
pub fn richardson(seq: &[PrecFloat], order: usize) -> Result<PrecFloat, FitError> {
    richardson_indexed(seq, 1, order)
}

/// Nearest fraction with denominator at most `max_den`, accepted only when
/// it lies within `tol` of `x`.
pub fn snap_fraction(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn snapped(x: f64) -> (f64, Option<(i64, i64)>) {
    match snap_fraction(x, SNAP_MAX_DEN, SNAP_TOL) {
        Some((p, q)) => (p as f64 / q as f64, Some((p, q))),
        None => (x, None),
    }
}

fn frac_value(ctx: &PrecContext, value: f64, frac: Option<(i64, i64)>) -> PrecFloat {
    match frac {
        Some((p, q)) => ctx.ratio(p, q),
        None => ctx.float(value),
    }
}

fn ratio(ctx: &PrecContext, num: &BigRational, den: &BigRational) -> PrecFloat {
    ctx.rational(&(num.clone() / den))
}

/// Accelerated limit at two consecutive orders; returns the estimate at
/// `order` and the relative change from `order - 1`.
fn accelerate(seq: &[PrecFloat], first_m: usize, order: usize) -> Result<(PrecFloat, f64), FitError> {
    let hi = richardson_indexed(seq, first_m, order)?;
    let lo = richardson_indexed(seq, first_m, order - 1)?;
    let scale = hi.abs().max(PrecFloat::from_f64(1e-300, hi.prec()));
    let change = ((&hi - &lo).abs() / scale).to_f64();
    Ok((hi, change))
}

/// `Γ(first + j)` for `j = 0..count`, by upward recurrence.
fn gamma_run(ctx: &PrecContext, first: &PrecFloat, count: usize) -> Result<Vec<PrecFloat>, FitError> {
    let mut out = Vec::with_capacity(count);
    let mut g = gamma_eval(first, ctx)?;
    let mut z = first.clone();
    for _ in 0..count {
        out.push(g.clone());
        g = g * &z;
        z += 1.0;
    }
    Ok(out)
}

/// Fits `d_m ~ S (-1)^m A^(m-1) Γ(m+1+θ) (1 + β/(m-1))`.
pub fn fit_one_factorial(
    table: &CoeffTable,
    order: usize,
    ctx: &PrecContext,
) -> Result<LargeOrderFit, FitError> {
    if table.sector != Sector::PosInstanton1 {
        return Err(FitError::WrongSector {
            expected: Sector::PosInstanton1,
            got: table.sector,
        });
    }
    let d = &table.coeffs;
    if d.len() < 80 {
        return Err(FitError::TooFewCoefficients {
            needed: 80,
            got: d.len(),
        });
    }
    let sign0 = d[0] < 0;
    for (m, c) in d.iter().enumerate() {
        if *c == 0 || (*c < 0) != (sign0 ^ (m % 2 == 1)) {
            return Err(FitError::NotAlternating(m));
        }
    }
    let work = ctx.widened(10);
    let last = d.len() - 1;
    let window = (4 * order + 8).min(last - 2);
    let first = last - window + 1;

    // |d_m / d_{m-1}| / m -> A
    let ratios: Vec<PrecFloat> = (first..=last)
        .map(|m| ratio(&work, &d[m], &d[m - 1]).abs())
        .collect();
    let per_m: Vec<PrecFloat> = ratios
        .iter()
        .zip(first..)
        .map(|(r, m)| r / m as f64)
        .collect();
    let (a_raw, _) = accelerate(&per_m, first, order)?;
    let (rate_a, rate_fraction) = snapped(a_raw.to_f64());
    let a = frac_value(&work, rate_a, rate_fraction);

    // |d_m / d_{m-1}| / A - m -> θ
    let shifted: Vec<PrecFloat> = ratios
        .iter()
        .zip(first..)
        .map(|(r, m)| r / &a - m as f64)
        .collect();
    let (theta_raw, _) = accelerate(&shifted, first, order)?;
    let (offset, offset_fraction) = snapped(theta_raw.to_f64());
    let theta = frac_value(&work, offset, offset_fraction);

    // d_m (-1)^m / (A^(m-1) Γ(m+1+θ)) -> S
    let gammas = gamma_run(&work, &(&theta + (first + 1) as f64), window)?;
    let mut a_pow = a.powi(first as i32 - 1);
    let mut normalized = Vec::with_capacity(window);
    for (j, m) in (first..=last).enumerate() {
        let mut v = work.rational(&d[m]) / (&a_pow * &gammas[j]);
        if m % 2 == 1 {
            v = -v;
        }
        normalized.push(v);
        a_pow *= &a;
    }
    let (s, residual) = accelerate(&normalized, first, order)?;

    // (m - 1) (normalized / S - 1) -> β
    let beta_seq: Vec<PrecFloat> = normalized
        .iter()
        .zip(first..)
        .map(|(v, m)| (v / &s - 1.0) * (m - 1) as f64)
        .collect();
    let (beta, _) = accelerate(&beta_seq, first, order)?;

    let fit = LargeOrderFit {
        model: GrowthModel::OneFactorial,
        n_power: table.n_power,
        rate_a,
        constant_s: s.to_f64(),
        offset,
        subleading_beta: beta.to_f64(),
        rate_raw: a_raw.to_f64(),
        offset_raw: theta_raw.to_f64(),
        rate_fraction,
        offset_fraction,
        richardson_order: order,
        residual,
        terms: d.len(),
    };
    if residual < RESIDUAL_LIMIT {
        Ok(fit)
    } else {
        Err(FitError::ResidualTooLarge(Box::new(fit)))
    }
}

/// Fits `c_l ~ -S A^l Γ(2l+θ)`.
pub fn fit_two_factorial(
    table: &CoeffTable,
    order: usize,
    ctx: &PrecContext,
) -> Result<LargeOrderFit, FitError> {
    if table.sector != Sector::NegPerturbative {
        return Err(FitError::WrongSector {
            expected: Sector::NegPerturbative,
            got: table.sector,
        });
    }
    let c = &table.coeffs;
    if c.len() > 1 && c[1..].iter().all(|v| *v == 0) {
        return Err(FitError::ZeroTail);
    }
    if table.n_power < 3 {
        return Err(FitError::PowerTooSmall(table.n_power));
    }
    if c.len() < 40 {
        return Err(FitError::TooFewCoefficients {
            needed: 40,
            got: c.len(),
        });
    }
    let work = ctx.widened(10);
    let last = c.len() - 1;
    let window = (4 * order + 8).min(last - 2);
    let first = last - window + 1;

    // c_l / c_{l-1} / (2l (2l - 1)) -> A
    let ratios: Vec<PrecFloat> = (first..=last).map(|l| ratio(&work, &c[l], &c[l - 1])).collect();
    let per_l: Vec<PrecFloat> = ratios
        .iter()
        .zip(first..)
        .map(|(r, l)| r / (2.0 * l as f64 * (2.0 * l as f64 - 1.0)))
        .collect();
    let (a_raw, _) = accelerate(&per_l, first, order)?;
    let (rate_a, rate_fraction) = snapped(a_raw.to_f64());
    let a = frac_value(&work, rate_a, rate_fraction);

    // (r_l / A - 4 l^2) / (4 l) + 3/2 -> θ, since
    // Γ(2l+θ)/Γ(2l-2+θ) = 4l² + 2l(2θ - 3) + (θ - 1)(θ - 2)
    let shifted: Vec<PrecFloat> = ratios
        .iter()
        .zip(first..)
        .map(|(r, l)| {
            let lf = l as f64;
            (r / &a - 4.0 * lf * lf) / (4.0 * lf) + 1.5
        })
        .collect();
    let (theta_raw, _) = accelerate(&shifted, first, order)?;
    let (offset, offset_fraction) = snapped(theta_raw.to_f64());
    let theta = frac_value(&work, offset, offset_fraction);

    // -c_l / (A^l Γ(2l+θ)) -> S
    let mut normalized = Vec::with_capacity(window);
    let mut a_pow = a.powi(first as i32);
    let mut g = gamma_eval(&(&theta + (2 * first) as f64), &work)?;
    for l in first..=last {
        normalized.push(-work.rational(&c[l]) / (&a_pow * &g));
        // Γ(2l+2+θ) = (2l+θ)(2l+1+θ) Γ(2l+θ)
        let z = &theta + (2 * l) as f64;
        g = g * &z * (&z + 1.0);
        a_pow *= &a;
    }
    let (s, residual) = accelerate(&normalized, first, order)?;

    let fit = LargeOrderFit {
        model: GrowthModel::TwoFactorial,
        n_power: table.n_power,
        rate_a,
        constant_s: s.to_f64(),
        offset,
        subleading_beta: 0.0,
        rate_raw: a_raw.to_f64(),
        offset_raw: theta_raw.to_f64(),
        rate_fraction,
        offset_fraction,
        richardson_order: order,
        residual,
        terms: c.len(),
    };
    if residual < RESIDUAL_LIMIT {
        Ok(fit)
    } else {
        Err(FitError::ResidualTooLarge(Box::new(fit)))
    }
}

/// Relative difference between `√(1/A)` and the negative-side action ratio
/// `2√(N-1)/3`; it vanishes when the large-order rate matches the
/// exponential `e^(-(2/3)√(N-1)(-x)^(3/2))`.
pub fn borel_consistency(n_power: u32, fit: &LargeOrderFit) -> f64 {
    let expected = 2.0 * ((n_power as f64) - 1.0).sqrt() / 3.0;
    ((1.0 / fit.rate_raw).sqrt() - expected).abs() / expected
}

/// Exact form of [`borel_consistency`] on the squares:
/// `1/A - 4(N-1)/9`, zero when the rate is exactly `9/(4(N-1))`.
pub fn borel_consistency_exact(n_power: u32, rate: &BigRational) -> BigRational {
    BigRational::from(1) / rate - BigRational::from((4 * (n_power as i64 - 1), 9))
}
