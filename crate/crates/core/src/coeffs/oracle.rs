//! Substitution oracle: insert a truncated series into the differential
//! equation and expand the residual term by term.
//!
//! Nothing here reuses the closed-form recursions of the parent module. Each
//! residual is assembled from generic operations on sparse generalized power
//! series (differentiation, products, powers), so a table that passes is
//! certified by the equation itself.

use std::collections::BTreeMap;

use crate::prec::BigRational;

/// Sparse series `Σ c_k z^(k·unit)` with exact coefficients, truncated below
/// the key `floor`.
#[derive(Debug, Clone, PartialEq)]
pub struct Puiseux {
    unit: BigRational,
    floor: i64,
    terms: BTreeMap<i64, BigRational>,
}

impl Puiseux {
    pub fn new(unit: BigRational, floor: i64) -> Self {
        Self {
            unit,
            floor,
            terms: BTreeMap::new(),
        }
    }

    pub fn with_term(mut self, key: i64, c: BigRational) -> Self {
        self.add(key, c);
        self
    }

    fn add(&mut self, key: i64, c: BigRational) {
        if key < self.floor || c == 0 {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e += c;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    fn empty_like(&self) -> Self {
        Self::new(self.unit.clone(), self.floor)
    }

    pub fn coeff(&self, key: i64) -> BigRational {
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    /// Keys `k` with nonzero coefficient, highest first.
    pub fn nonzero_keys(&self) -> Vec<i64> {
        self.terms.keys().rev().copied().collect()
    }

    /// `d/dz` of `z^(k·unit)` is `k·unit · z^(k·unit - 1)`; requires
    /// `1/unit` to be an integer.
    pub fn derivative(&self) -> Self {
        let step = BigRational::from(1) / &self.unit;
        assert!(step.denom() == &1, "unit must be 1/integer");
        let shift = step.numer().to_i64().expect("small unit");
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            let factor = BigRational::from(&self.unit * *k);
            out.add(k - shift, factor * c);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = self.empty_like();
        for (k, v) in &self.terms {
            out.add(*k, BigRational::from(v * c));
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add(*k, v.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&BigRational::from(-1)))
    }

    pub fn times(&self, other: &Self) -> Self {
        let mut out = self.empty_like();
        for (k1, a) in &self.terms {
            for (k2, b) in &other.terms {
                out.add(k1 + k2, BigRational::from(a * b));
            }
        }
        out
    }

    /// Positive integer power by repeated squaring. Truncation is safe only
    /// when every factor has no positive keys, which holds for the series
    /// used here.
    pub fn power(&self, n: u32) -> Self {
        let mut result = self.empty_like().with_term(0, BigRational::from(1));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        result
    }
}

fn half() -> BigRational {
    BigRational::from((1, 2))
}

/// Residual of the exponentially weighted equation
/// `e^(-S) (d²/dx² - x) (e^S g)` with `S' = -w x^(1/2) - (w/4) x^(-1)`,
/// i.e. `g'' + 2 S' g' + (S'' + S'^2 - x) g`, in powers of `x^(1/2)`.
fn weighted_airy_operator(g: &Puiseux, w: i64) -> Puiseux {
    let floor = g.floor;
    let wq = BigRational::from(w);
    let s1 = Puiseux::new(half(), floor)
        .with_term(1, -wq.clone())
        .with_term(-2, -BigRational::from((w, 4)));
    let s2 = s1.derivative();
    let x = Puiseux::new(half(), floor).with_term(2, BigRational::from(1));
    let g1 = g.derivative();
    let g2 = g1.derivative();
    let pot = s2.plus(&s1.times(&s1)).minus(&x);
    g2.plus(&s1.times(&g1).scale(&BigRational::from(2)))
        .plus(&pot.times(g))
}

/// Airy asymptotic series `Σ a_m x^(-3m/2)` as a half-power series.
fn airy_series(a: &[BigRational], floor: i64) -> Puiseux {
    let mut f = Puiseux::new(half(), floor);
    for (m, am) in a.iter().enumerate() {
        f.add(-3 * m as i64, am.clone());
    }
    f
}

/// Lowest key that a table of `count` coefficients fully determines in the
/// positive-side residuals.
fn positive_floor(count: usize) -> i64 {
    -3 * (count as i64 - 1)
}

/// Residual of `y = e^(-ζ) x^(-1/4) Σ a_m x^(-3m/2)` in `y'' = x y`.
/// Keys at or above the returned floor must vanish.
pub fn airy_base_residual(a: &[BigRational]) -> (Puiseux, i64) {
    // a_m is pinned by the equation at key -3(m+1)
    let floor = positive_floor(a.len()) - 3;
    let f = airy_series(a, floor - 6);
    (weighted_airy_operator(&f, 1), floor)
}

/// Residual of the one-instanton sector: with `φ = e^(-ζ) x^(-1/4)`,
/// `(d²/dx² - x)[φ^N x^-1 Σ d_m x^(-3m/2)] = 2 (φ Σ a_m x^(-3m/2))^N`,
/// divided through by `φ^N`.
pub fn d1_residual(n_power: u32, a: &[BigRational], d: &[BigRational]) -> (Puiseux, i64) {
    let count = a.len().min(d.len());
    let floor = positive_floor(count);
    let work = floor - 6;
    let mut g = Puiseux::new(half(), work);
    for (m, dm) in d.iter().take(count).enumerate() {
        g.add(-2 - 3 * m as i64, dm.clone());
    }
    let lhs = weighted_airy_operator(&g, n_power as i64);
    let f = airy_series(&a[..count], work);
    let rhs = f.power(n_power).scale(&BigRational::from(2));
    (lhs.minus(&rhs), floor)
}

/// Residual of `2 (Σ a_m x^(-3m/2))^N - Σ b_m x^(-3m/2)` from naive
/// repeated multiplication.
pub fn b_residual(n_power: u32, a: &[BigRational], b: &[BigRational]) -> (Puiseux, i64) {
    let count = a.len().min(b.len());
    let floor = positive_floor(count);
    let f = airy_series(&a[..count], floor);
    let mut prod = Puiseux::new(half(), floor).with_term(0, BigRational::from(1));
    for _ in 0..n_power {
        prod = prod.times(&f);
    }
    let bs = airy_series(&b[..count], floor);
    (prod.scale(&BigRational::from(2)).minus(&bs), floor)
}

/// Residual of `y = (t/2)^r Σ c_l t^(-3l)`, `t = -x`, `r = 1/(N-1)`, in
/// `y_tt = 2 y^N - t y`, divided by `(t/2)^r`, in integer powers of `t`.
pub fn c_residual(n_power: u32, c: &[BigRational]) -> (Puiseux, i64) {
    let count = c.len();
    // c_l is pinned at key -3l + 1, so keys down to 1 - 3(count - 1) are exact
    let floor = 1 - 3 * (count as i64 - 1);
    let work = floor - 6;
    let one = BigRational::from(1);
    let r = BigRational::from((1, n_power as i64 - 1));
    let mut cs = Puiseux::new(one.clone(), work);
    for (l, cl) in c.iter().enumerate() {
        cs.add(-3 * l as i64, cl.clone());
    }
    // t^-r (t^r C)'' term by term: (r + e)(r + e - 1) t^(e - 2)
    let mut lhs = Puiseux::new(one.clone(), work);
    for (e, ce) in &cs.terms {
        let re = BigRational::from(&r + *e);
        let factor = BigRational::from(&re * &re) - &re;
        lhs.add(e - 2, factor * ce);
    }
    let t = Puiseux::new(one, work).with_term(1, BigRational::from(1));
    let rhs = t.times(&cs.power(n_power).minus(&cs));
    (lhs.minus(&rhs), floor)
}

/// The highest nonzero key at or above `floor`, if any.
pub fn first_violation(residual: &Puiseux, floor: i64) -> Option<i64> {
    residual.nonzero_keys().into_iter().find(|k| *k >= floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_half_powers() {
        // d/dx x^(3/2) = (3/2) x^(1/2)
        let p = Puiseux::new(half(), -10).with_term(3, BigRational::from(1));
        let d = p.derivative();
        assert_eq!(d.coeff(1), BigRational::from((3, 2)));
    }

    #[test]
    fn wrong_airy_coefficient_is_caught() {
        let a = vec![BigRational::from(1), BigRational::from((-5, 48)), BigRational::from(1)];
        let (res, floor) = airy_base_residual(&a);
        assert!(first_violation(&res, floor).is_some());
    }
}
