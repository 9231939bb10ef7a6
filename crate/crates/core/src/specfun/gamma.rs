//! Gamma function by Stirling's series with an upward shift, plus reflection.

use std::sync::Mutex;

use rug::Integer;

use super::SpecfunError;
use crate::prec::{BigRational, PrecContext, PrecFloat};

/// B_0, B_2, B_4, ... grown on demand. Exact constants, not cached results.
static EVEN_BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// Even-index Bernoulli numbers `B_{2j}` for `j = 0..count`.
pub(crate) fn even_bernoulli(count: usize) -> Vec<BigRational> {
    let mut table = EVEN_BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    if table.is_empty() {
        table.push(BigRational::from(1));
    }
    while table.len() < count {
        let m = table.len() as u32;
        let n = 2 * m + 1;
        // sum_{j<n} C(n, j) B_j = 0, split into B_0, B_1 = -1/2 and the even terms
        let mut acc = BigRational::from(1) - BigRational::from((n, 2));
        for j in 1..m {
            acc += BigRational::from(binomial(n, 2 * j)) * &table[j as usize];
        }
        acc /= BigRational::from(-(n as i64));
        table.push(acc);
    }
    table[..count].to_vec()
}

fn digits_for_bits(bits: u32) -> u32 {
    ((bits as f64) / std::f64::consts::LOG2_10).ceil() as u32
}

/// `ln Γ(w)` for `w` large enough that the Stirling tail is below `2^-bits`.
fn ln_gamma_stirling(w: &PrecFloat, bits: u32) -> Result<PrecFloat, SpecfunError> {
    let ctx = PrecContext::new(digits_for_bits(bits).max(15)).expect("digits >= 15");
    let w = w.with_prec(bits);
    let two_pi = ctx.pi() * 2.0;
    let mut result = (&w - 0.5) * w.ln() - &w + two_pi.ln() * 0.5;
    let w2 = &w * &w;
    let mut wpow = w.clone();
    let tol = PrecFloat::from_f64(2.0, bits).powi(-(bits as i32));
    let mut prev_term: Option<PrecFloat> = None;
    let mut k = 1usize;
    loop {
        let bern = even_bernoulli(k + 1);
        let coef = ctx.rational(&(bern[k].clone() / BigRational::from((2 * k * (2 * k - 1)) as u64)));
        let term = coef / &wpow;
        let mag = term.abs();
        if mag <= &tol * result.abs().max(ctx.one()) {
            result += term;
            return Ok(result);
        }
        if let Some(prev) = &prev_term {
            if &mag > prev {
                return Err(SpecfunError::PrecisionUnreachable {
                    x: w.to_f64(),
                    digits: digits_for_bits(bits),
                });
            }
        }
        result += term;
        prev_term = Some(mag);
        wpow *= &w2;
        k += 1;
    }
}

/// Γ(z) at `bits` of precision.
pub(crate) fn gamma_bits(z: &PrecFloat, bits: u32) -> Result<PrecFloat, SpecfunError> {
    if !z.is_finite() {
        return Err(SpecfunError::OutOfDomain(z.to_f64()));
    }
    if z <= &0.0 && z.to_integer_exact().is_some() {
        return Err(SpecfunError::Pole(z.to_f64()));
    }
    let mag_bits = z.abs().to_f64().max(2.0).log2().ceil() as u32;
    let work = bits + 24 + mag_bits;
    let z = z.with_prec(work);
    if z < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        let pi = PrecFloat::from_float(rug::Float::with_val(work, rug::float::Constant::Pi));
        let reflected = gamma_bits(&(1.0 - &z), work)?;
        let s = (&pi * &z).sin();
        return Ok((pi / (s * reflected)).with_prec(bits));
    }
    let w_min = 0.12 * work as f64 + 4.0;
    let shift = (w_min - z.to_f64()).ceil().max(0.0) as u64;
    let w = &z + shift as f64;
    // exp() of a large logarithm needs its magnitude in extra bits
    let lg_mag = (w.to_f64() * w.to_f64().max(2.0).ln()).max(2.0).log2().ceil() as u32;
    let lg = ln_gamma_stirling(&w, work + lg_mag)?;
    let mut value = lg.exp();
    let mut denom = PrecFloat::from_f64(1.0, work + lg_mag);
    for j in 0..shift {
        denom *= &z + j as f64;
    }
    value /= denom;
    Ok(value.with_prec(bits))
}

/// Γ(z) to the accuracy of `ctx`.
pub fn gamma_eval(z: &PrecFloat, ctx: &PrecContext) -> Result<PrecFloat, SpecfunError> {
    gamma_bits(z, ctx.bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_numbers() {
        let b = even_bernoulli(6);
        assert_eq!(b[1], BigRational::from((1, 6)));
        assert_eq!(b[2], BigRational::from((-1, 30)));
        assert_eq!(b[3], BigRational::from((1, 42)));
        assert_eq!(b[5], BigRational::from((5, 66)));
    }

    #[test]
    fn integer_arguments_are_factorials() {
        let ctx = PrecContext::default();
        let g = gamma_eval(&ctx.float(6.0), &ctx).unwrap();
        assert!((g - 120.0).abs() < ctx.float(1e-28));
    }

    #[test]
    fn poles_are_rejected() {
        let ctx = PrecContext::default();
        for z in [0.0, -1.0, -7.0] {
            assert!(matches!(
                gamma_eval(&ctx.float(z), &ctx),
                Err(SpecfunError::Pole(_))
            ));
        }
    }

    #[test]
    fn negative_half_integer() {
        // Γ(-1/2) = -2√π
        let ctx = PrecContext::default();
        let g = gamma_eval(&ctx.float(-0.5), &ctx).unwrap();
        let want = ctx.pi().sqrt() * -2.0;
        assert!(crate::prec::rel_diff(&g, &want) < ctx.float(1e-30));
    }
}
