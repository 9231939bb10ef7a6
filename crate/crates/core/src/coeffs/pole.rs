//! Movable-pole Laurent expansions `y = Σ a_j (x - x0)^j`.
//!
//! A pole of order `p` balances `y''` against `2 y^N` only when
//! `p = 2/(N-1)` is an integer, i.e. for `N = 2` and `N = 3`. Writing
//! `y = s^-p Σ a_i s^i` with `s = x - x0`, the coefficient of `s^(i-p-2)` gives
//!
//! `((i-p)(i-p-1) - N p(p+1)) a_i = 2 rest_i + x0 a_{i-2} + a_{i-3}`,
//!
//! where `rest_i` is the part of `[A^N]_i` not linear in `a_i`. At the
//! resonance index the bracket vanishes; the expansion exists only if the
//! right side vanishes there too, and the resonance coefficient is then free.

use super::poly::BiPoly;
use super::CoeffError;
use crate::prec::BigRational;

#[derive(Debug, Clone, PartialEq)]
pub struct PoleSeries {
    pub n_power: u32,
    /// pole order `p`; `coeffs[i]` multiplies `(x - x0)^(i - p)`
    pub pole_order: u32,
    pub coeffs: Vec<BiPoly>,
    /// Laurent index `j = i - p` of the resonance, if reached
    pub resonance: Option<i64>,
    /// right side of the resonance equation; zero when the expansion closes
    pub compatibility: BiPoly,
}

impl PoleSeries {
    /// Coefficient of `(x - x0)^j`.
    pub fn laurent(&self, j: i64) -> Option<&BiPoly> {
        let i = j + self.pole_order as i64;
        if i < 0 {
            return None;
        }
        self.coeffs.get(i as usize)
    }

    pub fn first_index(&self) -> i64 {
        -(self.pole_order as i64)
    }

    pub fn last_index(&self) -> i64 {
        self.coeffs.len() as i64 - 1 - self.pole_order as i64
    }
}

/// Pole order `2/(N-1)` when it is a positive integer.
fn pole_order(n_power: u32) -> Option<u32> {
    if n_power >= 2 && 2 % (n_power - 1) == 0 {
        Some(2 / (n_power - 1))
    } else {
        None
    }
}

/// Leading coefficient `c` with `c^(N-1) = p(p+1)/2`, taking the real
/// positive root; rational for both admissible `N`.
fn leading_coefficient(n_power: u32, p: u32) -> BigRational {
    let target = (p * (p + 1) / 2) as i64;
    match n_power {
        2 => BigRational::from(target),
        3 => BigRational::from(1),
        _ => unreachable!("pole order is integral only for N = 2, 3"),
    }
}

/// Builds the Laurent expansion through Laurent index `j_max`.
pub fn pole_series(n_power: u32, j_max: i64) -> Result<PoleSeries, CoeffError> {
    let p = pole_order(n_power).ok_or(CoeffError::NoIntegerPole(n_power))?;
    let pi = p as i64;
    let n = n_power as i64;
    let c0 = leading_coefficient(n_power, p);
    let x0 = BiPoly::s();
    let h0 = BiPoly::t();
    let count = (j_max + pi + 1).max(1) as usize;

    let mut a: Vec<BiPoly> = vec![BiPoly::constant(c0.clone())];
    // coefficients of A^N, tracked incrementally
    let mut pw: Vec<BiPoly> = vec![BiPoly::constant(pow_rational(&c0, n_power))];
    let mut resonance = None;
    let mut compatibility = BiPoly::zero();

    for i in 1..count {
        let l = i as i64;
        // rest of [A^N]_i without the a_i term
        let mut rest = BiPoly::zero();
        for k in 1..i {
            let w = BigRational::from((n + 1) * k as i64 - l);
            rest = &rest + &(&a[k] * &pw[i - k]).scale(&w);
        }
        let inv = BigRational::from(1) / (BigRational::from(l) * &c0);
        let rest = rest.scale(&inv);

        let mut rhs = rest.scale(&BigRational::from(2));
        if i >= 2 {
            rhs = &rhs + &(&x0 * &a[i - 2]);
        }
        if i >= 3 {
            rhs = &rhs + &a[i - 3];
        }
        let j = l - pi;
        let lhs = j * (j - 1) - n * pi * (pi + 1);
        let a_i = if lhs == 0 {
            resonance = Some(j);
            compatibility = rhs;
            h0.clone()
        } else {
            rhs.scale(&BigRational::from((1, lhs)))
        };
        let lin = (&a_i * &BiPoly::constant(pow_rational(&c0, n_power - 1))).scale(&BigRational::from(n));
        pw.push(&rest + &lin);
        a.push(a_i);
    }
    Ok(PoleSeries {
        n_power,
        pole_order: p,
        coeffs: a,
        resonance,
        compatibility,
    })
}

fn pow_rational(q: &BigRational, e: u32) -> BigRational {
    let mut out = BigRational::from(1);
    for _ in 0..e {
        out *= q;
    }
    out
}

/// The `N = 3` pole expansion with coefficients `a_{-1} .. a_{k_max}`.
pub fn pole_laurent_n3(k_max: i64) -> Result<PoleSeries, CoeffError> {
    if k_max < 4 {
        return Err(CoeffError::TooShort {
            needed: 4,
            got: k_max.max(0) as usize,
        });
    }
    let series = pole_series(3, k_max)?;
    if !series.compatibility.is_zero() {
        return Err(CoeffError::ResonanceInconsistent(series.compatibility.to_string()));
    }
    Ok(series)
}

/// True when no pure Laurent expansion with integer pole order exists.
pub fn pole_obstruction(n_power: u32) -> bool {
    match pole_order(n_power) {
        None => true,
        Some(p) => {
            // run far enough to pass the resonance, which sits at j <= 2p + 2
            let series = pole_series(n_power, 2 * p as i64 + 3).expect("pole order is integral");
            series.resonance.is_none() || !series.compatibility.is_zero()
        }
    }
}

/// Coefficients of `y'' - 2 y^N - (x0 + s) y` for the truncated series,
/// from `s^(-p-2)` upward, computed by direct substitution.
pub fn pole_residual(series: &PoleSeries) -> Vec<BiPoly> {
    let p = series.pole_order as i64;
    let len = series.coeffs.len();
    let a = &series.coeffs;
    // every term is s^(i - p - 2) for i = 0..len
    let mut res: Vec<BiPoly> = vec![BiPoly::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        let j = i as i64 - p;
        let f = BigRational::from(j * (j - 1));
        res[i] = &res[i] + &ai.scale(&f);
    }
    // y^N = s^(-p-2) A^N, by repeated multiplication
    let mut power: Vec<BiPoly> = a.clone();
    for _ in 1..series.n_power {
        let mut next = vec![BiPoly::zero(); len];
        for (i, u) in power.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (k, v) in a.iter().enumerate().take(len - i) {
                next[i + k] = &next[i + k] + &(u * v);
            }
        }
        power = next;
    }
    let x0 = BiPoly::s();
    for i in 0..len {
        res[i] = &res[i] - &power[i].scale(&BigRational::from(2));
        if i >= 2 {
            res[i] = &res[i] - &(&x0 * &a[i - 2]);
        }
        if i >= 3 {
            res[i] = &res[i] - &a[i - 3];
        }
    }
    res
}
