//! Configurable-precision scalars.
//!
//! [`PrecFloat`] is a thin wrapper around an MPFR float that carries its own
//! precision. Binary operations produce a result at the larger of the two
//! operand precisions, so code written against `PrecFloat` reads like plain
//! `f64` arithmetic. [`PrecContext`] fixes the working precision in decimal
//! digits and is passed by value wherever new numbers are created.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar used by every coefficient recursion.
pub type BigRational = rug::Rational;

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 32;

/// Smallest precision a context may request.
pub const MIN_DIGITS: u32 = 15;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("precision of {0} digits is below the minimum of {MIN_DIGITS}")]
pub struct PrecisionTooLow(pub u32);

/// Working precision, in decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecContext {
    digits: u32,
}

impl Default for PrecContext {
    fn default() -> Self {
        Self {
            digits: DEFAULT_DIGITS,
        }
    }
}

impl PrecContext {
    pub fn new(digits: u32) -> Result<Self, PrecisionTooLow> {
        if digits < MIN_DIGITS {
            return Err(PrecisionTooLow(digits));
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Binary precision backing `digits`, including a few guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * BITS_PER_DIGIT).ceil() as u32 + GUARD_BITS
    }

    /// A context with `extra` more decimal digits.
    pub fn widened(&self, extra: u32) -> Self {
        Self {
            digits: self.digits + extra,
        }
    }

    /// `10^(-digits)`, the nominal unit roundoff of this context.
    pub fn epsilon(&self) -> PrecFloat {
        PrecFloat::from_f64(10.0, self.bits()).powi(-(self.digits as i32))
    }

    pub fn float(&self, v: f64) -> PrecFloat {
        PrecFloat::from_f64(v, self.bits())
    }

    pub fn zero(&self) -> PrecFloat {
        self.float(0.0)
    }

    pub fn one(&self) -> PrecFloat {
        self.float(1.0)
    }

    pub fn int(&self, v: i64) -> PrecFloat {
        PrecFloat(Float::with_val(self.bits(), v))
    }

    /// `num / den` rounded once at this precision.
    pub fn ratio(&self, num: i64, den: i64) -> PrecFloat {
        self.rational(&BigRational::from((num, den)))
    }

    pub fn rational(&self, q: &BigRational) -> PrecFloat {
        PrecFloat(Float::with_val(self.bits(), q))
    }

    pub fn pi(&self) -> PrecFloat {
        PrecFloat(Float::with_val(self.bits(), Constant::Pi))
    }

    /// Parse a decimal literal at this precision.
    pub fn parse(&self, s: &str) -> Option<PrecFloat> {
        let parsed = Float::parse(s).ok()?;
        Some(PrecFloat(Float::with_val(self.bits(), parsed)))
    }
}

/// Multiprecision float with value semantics.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct PrecFloat(Float);

impl PrecFloat {
    pub fn from_f64(v: f64, bits: u32) -> Self {
        Self(Float::with_val(bits, v))
    }

    pub fn from_float(f: Float) -> Self {
        Self(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Round to `ctx` precision.
    pub fn at(&self, ctx: &PrecContext) -> Self {
        self.with_prec(ctx.bits())
    }

    pub fn with_prec(&self, bits: u32) -> Self {
        Self(Float::with_val(bits, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Nearest exact rational, or `None` for infinities and NaN.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.0.to_rational()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        Self(self.0.clone().sqrt())
    }

    pub fn cbrt(&self) -> Self {
        Self(self.0.clone().cbrt())
    }

    pub fn exp(&self) -> Self {
        Self(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        Self(self.0.clone().ln())
    }

    pub fn sin(&self) -> Self {
        Self(self.0.clone().sin())
    }

    pub fn cos(&self) -> Self {
        Self(self.0.clone().cos())
    }

    pub fn powi(&self, n: i32) -> Self {
        Self(self.0.clone().pow(n))
    }

    pub fn powu(&self, n: u32) -> Self {
        Self(self.0.clone().pow(n))
    }

    pub fn powf(&self, e: &PrecFloat) -> Self {
        let prec = self.prec().max(e.prec());
        Self(Float::with_val(prec, (&self.0).pow(&e.0)))
    }

    pub fn recip(&self) -> Self {
        Self(self.0.clone().recip())
    }

    pub fn floor(&self) -> Self {
        Self(self.0.clone().floor())
    }

    /// Integer value, if this float is an exact integer.
    pub fn to_integer_exact(&self) -> Option<Integer> {
        if self.0.is_integer() {
            self.0.to_integer()
        } else {
            None
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Scientific notation with `sig` significant digits, e.g. `6.712312059e-1`.
    pub fn to_sci(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.0.is_zero() {
            return format!("{:.*e}", sig - 1, 0.0f64);
        }
        format!("{:.*e}", sig, self.0)
    }

    /// Fixed-point notation with `decimals` digits after the point.
    pub fn to_fixed(&self, decimals: usize) -> String {
        let scale = Float::with_val(self.prec() + 8, 10u32).pow(decimals as u32);
        let scaled = Float::with_val(self.prec() + 8, &self.0 * &scale);
        let int = scaled.round().to_integer().unwrap_or_default();
        let neg = int < 0;
        let digits = int.abs().to_string();
        let padded = if digits.len() <= decimals {
            format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (whole, frac) = padded.split_at(padded.len() - decimals);
        let sign = if neg { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{whole}")
        } else {
            format!("{sign}{whole}.{frac}")
        }
    }
}

impl fmt::Debug for PrecFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(((self.prec() as f64) / BITS_PER_DIGIT) as usize))
    }
}

impl fmt::Display for PrecFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*e}", p, self.0),
            None => write!(f, "{}", self.to_sci(17)),
        }
    }
}

impl PartialEq<f64> for PrecFloat {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for PrecFloat {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! float_binop {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident, $op:tt) => {
        impl $tr<&PrecFloat> for &PrecFloat {
            type Output = PrecFloat;
            fn $method(self, rhs: &PrecFloat) -> PrecFloat {
                let prec = self.prec().max(rhs.prec());
                PrecFloat(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<PrecFloat> for &PrecFloat {
            type Output = PrecFloat;
            fn $method(self, rhs: PrecFloat) -> PrecFloat {
                self $op &rhs
            }
        }
        impl $tr<&PrecFloat> for PrecFloat {
            type Output = PrecFloat;
            fn $method(self, rhs: &PrecFloat) -> PrecFloat {
                &self $op rhs
            }
        }
        impl $tr<PrecFloat> for PrecFloat {
            type Output = PrecFloat;
            fn $method(self, rhs: PrecFloat) -> PrecFloat {
                &self $op &rhs
            }
        }
        impl $tr<f64> for &PrecFloat {
            type Output = PrecFloat;
            fn $method(self, rhs: f64) -> PrecFloat {
                PrecFloat(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for PrecFloat {
            type Output = PrecFloat;
            fn $method(self, rhs: f64) -> PrecFloat {
                &self $op rhs
            }
        }
        impl $tr<&PrecFloat> for f64 {
            type Output = PrecFloat;
            fn $method(self, rhs: &PrecFloat) -> PrecFloat {
                PrecFloat(Float::with_val(rhs.prec(), self $op &rhs.0))
            }
        }
        impl $tr<PrecFloat> for f64 {
            type Output = PrecFloat;
            fn $method(self, rhs: PrecFloat) -> PrecFloat {
                self $op &rhs
            }
        }
        impl $atr<&PrecFloat> for PrecFloat {
            fn $amethod(&mut self, rhs: &PrecFloat) {
                *self = &*self $op rhs;
            }
        }
        impl $atr<PrecFloat> for PrecFloat {
            fn $amethod(&mut self, rhs: PrecFloat) {
                *self = &*self $op &rhs;
            }
        }
        impl $atr<f64> for PrecFloat {
            fn $amethod(&mut self, rhs: f64) {
                *self = &*self $op rhs;
            }
        }
    };
}

float_binop!(Add, add, AddAssign, add_assign, +);
float_binop!(Sub, sub, SubAssign, sub_assign, -);
float_binop!(Mul, mul, MulAssign, mul_assign, *);
float_binop!(Div, div, DivAssign, div_assign, /);

impl Neg for PrecFloat {
    type Output = PrecFloat;
    fn neg(self) -> PrecFloat {
        PrecFloat(-self.0)
    }
}

impl Neg for &PrecFloat {
    type Output = PrecFloat;
    fn neg(self) -> PrecFloat {
        PrecFloat(-self.0.clone())
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: &PrecFloat, b: &PrecFloat) -> PrecFloat {
    let scale = a.abs().max(b.abs());
    if scale.is_zero() {
        return scale;
    }
    (a - b).abs() / scale
}
