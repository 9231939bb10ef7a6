//! Polynomials in two symbols with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::prec::BigRational;

/// A polynomial `Σ q_ij s^i t^j`, stored sparsely by exponent pair.
///
/// For the pole expansions the two symbols are the pole location `x0` and
/// the free resonance coefficient `h0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: BigRational, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    /// The first symbol, `x0`.
    pub fn s() -> Self {
        Self::monomial(BigRational::from(1), 1, 0)
    }

    /// The second symbol, `h0`.
    pub fn t() -> Self {
        Self::monomial(BigRational::from(1), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `s^i t^j`.
    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if *c == 0 {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, BigRational::from(v * c)))
                .collect(),
        }
    }

    fn add_term(&mut self, key: (u32, u32), c: BigRational) {
        let entry = self.terms.entry(key).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    /// Evaluates at `s = x0`, `t = h0`.
    pub fn eval(&self, x0: &BigRational, h0: &BigRational) -> BigRational {
        let mut acc = BigRational::new();
        for (&(i, j), c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..i {
                term *= x0;
            }
            for _ in 0..j {
                term *= h0;
            }
            acc += term;
        }
        acc
    }

    /// Renders with the given symbol names, highest degree first.
    pub fn render(&self, s_name: &str, t_name: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (&(i, j), c)) in self.terms.iter().rev().enumerate() {
            let negative = *c < 0;
            let mag = BigRational::from(c.abs_ref());
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if mag != 1 || (i == 0 && j == 0) {
                factors.push(mag.to_string());
            }
            for (name, p) in [(s_name, i), (t_name, j)] {
                match p {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{p}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x0", "h0"))
    }
}

impl Add<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, BigRational::from(-v));
        }
        out
    }
}

impl Mul<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), BigRational::from(a * b));
            }
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.scale(&BigRational::from(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_rendering() {
        let x = BiPoly::s();
        let h = BiPoly::t();
        let p = &(&x * &x) - &h.scale(&BigRational::from((1, 2)));
        assert_eq!(p.render("x0", "h0"), "x0^2 - 1/2*h0");
        let zero = &p - &p;
        assert!(zero.is_zero());
        assert_eq!(zero.to_string(), "0");
        let v = p.eval(&BigRational::from(3), &BigRational::from(4));
        assert_eq!(v, 7);
    }
}
