//! Airy functions Ai, Bi and their derivatives on the real line.
//!
//! Moderate arguments use the Maclaurin series `Ai = c1 f - c2 g`,
//! `Bi = √3 (c1 f + c2 g)`. The auxiliary sums grow like `e^ζ` with
//! `ζ = (2/3)|x|^(3/2)`, so the series is summed with enough guard bits to
//! absorb the cancellation. Beyond the crossover the standard asymptotic
//! expansions in `1/ζ` are used; their best accuracy is about `e^(-2ζ)`, which
//! fixes the crossover for a given working precision.

use serde::Serialize;

use super::gamma::gamma_bits;
use super::SpecfunError;
use crate::prec::{PrecContext, PrecFloat};

const MAX_SERIES_TERMS: usize = 4000;
const MAX_ABS_X: f64 = 1.0e4;
const LOG2_E: f64 = std::f64::consts::LOG2_E;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AiryValues {
    #[serde(serialize_with = "ser_float")]
    pub ai: PrecFloat,
    #[serde(serialize_with = "ser_float")]
    pub ai_prime: PrecFloat,
    #[serde(serialize_with = "ser_float")]
    pub bi: PrecFloat,
    #[serde(serialize_with = "ser_float")]
    pub bi_prime: PrecFloat,
}

fn ser_float<S: serde::Serializer>(v: &PrecFloat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_sci(20))
}

impl AiryValues {
    pub fn wronskian(&self) -> PrecFloat {
        &self.ai * &self.bi_prime - &self.ai_prime * &self.bi
    }

    fn at(self, ctx: &PrecContext) -> Self {
        Self {
            ai: self.ai.at(ctx),
            ai_prime: self.ai_prime.at(ctx),
            bi: self.bi.at(ctx),
            bi_prime: self.bi_prime.at(ctx),
        }
    }
}

/// `|x|` beyond which the asymptotic expansions reach `ctx` accuracy.
pub fn airy_asymptotic_crossover(ctx: &PrecContext) -> f64 {
    let zeta = (ctx.digits() as f64 + 4.0) * std::f64::consts::LN_10 / 2.0;
    (1.5 * zeta).powf(2.0 / 3.0)
}

/// Ai, Ai', Bi, Bi' at `x`.
pub fn airy_eval(x: &PrecFloat, ctx: &PrecContext) -> Result<AiryValues, SpecfunError> {
    let xf = x.to_f64();
    if !x.is_finite() || xf.abs() > MAX_ABS_X {
        return Err(SpecfunError::OutOfDomain(xf));
    }
    if xf.abs() > airy_asymptotic_crossover(ctx) {
        asymptotic(x, ctx)
    } else {
        maclaurin(x, ctx)
    }
}

fn maclaurin(x: &PrecFloat, ctx: &PrecContext) -> Result<AiryValues, SpecfunError> {
    let xf = x.to_f64();
    let zeta = 2.0 / 3.0 * xf.abs().powf(1.5);
    let bits = ctx.bits() + (2.0 * zeta * LOG2_E).ceil() as u32 + 24;
    let x = x.with_prec(bits);
    let one = PrecFloat::from_f64(1.0, bits);
    let three = PrecFloat::from_f64(3.0, bits);

    // c1 = Ai(0) = 3^(-2/3)/Γ(2/3), c2 = -Ai'(0) = 3^(-1/3)/Γ(1/3)
    let g13 = gamma_bits(&(&one / 3.0), bits)?;
    let g23 = gamma_bits(&(&one * 2.0 / 3.0), bits)?;
    let cbrt3 = three.cbrt();
    let c1 = &one / (&cbrt3 * &cbrt3 * g23);
    let c2 = &one / (&cbrt3 * g13);

    let x3 = &x * &x * &x;
    let mut f = one.clone();
    let mut g = x.clone();
    let mut fp = PrecFloat::from_f64(0.0, bits);
    let mut gp = one.clone();
    let mut tf = one.clone();
    let mut tg = x.clone();
    let mut tfp = PrecFloat::from_f64(0.0, bits);
    let mut tgp = one.clone();
    let tol = PrecFloat::from_f64(2.0, bits).powi(-(bits as i32));
    let mut peak = one.clone().max(x.abs());

    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        tf = tf * &x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg = tg * &x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tfp = if k == 1 {
            &x * &x / 2.0
        } else {
            tfp * &x3 / ((3.0 * kf - 1.0) * (3.0 * kf - 3.0))
        };
        tgp = tgp * &x3 / ((3.0 * kf) * (3.0 * kf - 2.0));
        f += &tf;
        g += &tg;
        fp += &tfp;
        gp += &tgp;
        let largest = tf.abs().max(tg.abs()).max(tfp.abs()).max(tgp.abs());
        if largest > peak {
            peak = largest.clone();
        }
        if largest <= &tol * &peak {
            let sqrt3 = three.sqrt();
            let values = AiryValues {
                ai: &c1 * &f - &c2 * &g,
                ai_prime: &c1 * &fp - &c2 * &gp,
                bi: &sqrt3 * (&c1 * &f + &c2 * &g),
                bi_prime: &sqrt3 * (&c1 * &fp + &c2 * &gp),
            };
            return Ok(values.at(ctx));
        }
    }
    Err(SpecfunError::PrecisionUnreachable {
        x: xf,
        digits: ctx.digits(),
    })
}

/// Partial sums of the four asymptotic series in `1/ζ`.
struct AsymSums {
    /// sum (-1)^k u_k ζ^-k
    u_alt: PrecFloat,
    /// sum u_k ζ^-k
    u_pos: PrecFloat,
    v_alt: PrecFloat,
    v_pos: PrecFloat,
    /// even/odd split with alternating signs, for the oscillatory side
    u_even: PrecFloat,
    u_odd: PrecFloat,
    v_even: PrecFloat,
    v_odd: PrecFloat,
}

fn asymptotic_sums(
    zeta: &PrecFloat,
    bits: u32,
    target_bits: u32,
    xf: f64,
    digits: u32,
) -> Result<AsymSums, SpecfunError> {
    let zero = PrecFloat::from_f64(0.0, bits);
    let one = PrecFloat::from_f64(1.0, bits);
    let mut sums = AsymSums {
        u_alt: one.clone(),
        u_pos: one.clone(),
        v_alt: one.clone(),
        v_pos: one.clone(),
        u_even: one.clone(),
        u_odd: zero.clone(),
        v_even: one.clone(),
        v_odd: zero,
    };
    let tol = PrecFloat::from_f64(2.0, bits).powi(-(target_bits as i32));
    let inv_zeta = &one / zeta;
    // u_k ζ^-k, built by u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k)
    let mut u_term = one.clone();
    let mut last = one.clone();
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        u_term = u_term * &inv_zeta * ((6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0))
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v_term = &u_term * (-(6.0 * kf + 1.0)) / (6.0 * kf - 1.0);
        let mag = u_term.abs().max(v_term.abs());
        if mag <= tol {
            return Ok(sums);
        }
        if mag > last {
            return Err(SpecfunError::PrecisionUnreachable { x: xf, digits });
        }
        last = mag;
        let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
        sums.u_alt += &u_term * alt;
        sums.v_alt += &v_term * alt;
        sums.u_pos += &u_term;
        sums.v_pos += &v_term;
        // (-1)^j for index k = 2j or k = 2j+1
        let j_sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            sums.u_even += &u_term * j_sign;
            sums.v_even += &v_term * j_sign;
        } else {
            sums.u_odd += &u_term * j_sign;
            sums.v_odd += &v_term * j_sign;
        }
    }
    Err(SpecfunError::PrecisionUnreachable { x: xf, digits })
}

fn asymptotic(x: &PrecFloat, ctx: &PrecContext) -> Result<AiryValues, SpecfunError> {
    let xf = x.to_f64();
    let t = xf.abs();
    // the phase ζ - π/4 needs absolute accuracy, so pay for its magnitude
    let bits = ctx.bits() + 24 + (t.powf(1.5).max(2.0)).log2().ceil() as u32;
    let pi = PrecFloat::from_float(rug::Float::with_val(bits, rug::float::Constant::Pi));
    let t = x.with_prec(bits).abs();
    let zeta = t.powf(&PrecFloat::from_f64(1.5, bits)) * 2.0 / 3.0;
    let sums = asymptotic_sums(&zeta, bits, ctx.bits(), xf, ctx.digits())?;
    let sqrt_pi = pi.sqrt();
    let t_quarter = t.sqrt().sqrt();

    let values = if xf > 0.0 {
        let decay = (-&zeta).exp();
        let growth = zeta.exp();
        AiryValues {
            ai: &decay / (&sqrt_pi * &t_quarter * 2.0) * &sums.u_alt,
            ai_prime: -(&t_quarter * &decay) / (&sqrt_pi * 2.0) * &sums.v_alt,
            bi: &growth / (&sqrt_pi * &t_quarter) * &sums.u_pos,
            bi_prime: &t_quarter * &growth / &sqrt_pi * &sums.v_pos,
        }
    } else {
        let phase = &zeta - &pi / 4.0;
        let (s, c) = (phase.sin(), phase.cos());
        let amp = (&sqrt_pi * &t_quarter).recip();
        let amp_p = &t_quarter / &sqrt_pi;
        AiryValues {
            ai: &amp * (&c * &sums.u_even + &s * &sums.u_odd),
            ai_prime: &amp_p * (&s * &sums.v_even - &c * &sums.v_odd),
            bi: &amp * (&c * &sums.u_odd - &s * &sums.u_even),
            bi_prime: &amp_p * (&c * &sums.v_even + &s * &sums.v_odd),
        }
    };
    Ok(values.at(ctx))
}

/// The least negative zero of Ai', by safeguarded Newton iteration on
/// `Ai'(x)` (using `Ai'' = x Ai`) inside the bracket `[-1.1, -0.9]`.
pub fn airy_prime_first_zero(ctx: &PrecContext) -> PrecFloat {
    let work = ctx.widened(6);
    let mut lo = work.float(-1.1);
    let mut hi = work.float(-0.9);
    let mut x = work.float(-1.0188);
    let tol = work.epsilon() * 10.0;
    for _ in 0..200 {
        let v = airy_eval(&x, &work).expect("bracket lies inside the series domain");
        // Ai' < 0 on the right of the zero, > 0 on the left
        if v.ai_prime > 0.0 {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let step = &v.ai_prime / (&x * &v.ai);
        let mut next = &x - &step;
        if next <= lo || next >= hi {
            next = (&lo + &hi) / 2.0;
        }
        let done = (&next - &x).abs() <= &tol * x.abs();
        x = next;
        if done {
            break;
        }
    }
    x.at(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prec::rel_diff;

    #[test]
    fn crossover_grows_with_precision() {
        let c32 = airy_asymptotic_crossover(&PrecContext::new(32).unwrap());
        let c48 = airy_asymptotic_crossover(&PrecContext::new(48).unwrap());
        assert!(c32 > 14.0 && c48 > c32);
    }

    #[test]
    fn branches_agree_across_crossover() {
        let ctx = PrecContext::default();
        let xc = airy_asymptotic_crossover(&ctx);
        for x in [xc + 0.5, -(xc + 0.5), xc + 2.0, -(xc + 2.0)] {
            let xp = ctx.float(x);
            let series = maclaurin(&xp, &ctx).unwrap();
            let asym = asymptotic(&xp, &ctx).unwrap();
            let tol = ctx.float(1e-29);
            assert!(rel_diff(&series.ai, &asym.ai) < tol, "Ai at {x}");
            assert!(rel_diff(&series.bi, &asym.bi) < tol, "Bi at {x}");
            assert!(rel_diff(&series.ai_prime, &asym.ai_prime) < tol, "Ai' at {x}");
            assert!(rel_diff(&series.bi_prime, &asym.bi_prime) < tol, "Bi' at {x}");
        }
    }

    #[test]
    fn out_of_domain() {
        let ctx = PrecContext::default();
        assert!(airy_eval(&ctx.float(2.0e4), &ctx).is_err());
    }
}
