//! Truncated power series over exact rationals.

use crate::prec::BigRational;

/// Cauchy product of `a` and `b`, keeping the first `len` coefficients.
pub fn mul_trunc(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::new(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if *ai == 0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += BigRational::from(ai * bj);
        }
    }
    out
}

/// `a^n` truncated to `len` coefficients, by binary exponentiation.
pub fn pow_trunc(a: &[BigRational], n: u32, len: usize) -> Vec<BigRational> {
    let mut result = vec![BigRational::new(); len];
    if len == 0 {
        return result;
    }
    result[0] = BigRational::from(1);
    let mut base: Vec<BigRational> = a.iter().take(len).cloned().collect();
    base.resize(len, BigRational::new());
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_trunc(&result, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = mul_trunc(&base, &base, len);
        }
    }
    result
}

/// Incremental `N`-th power of a series with unit constant term.
///
/// Uses the recurrence `p_l = (1/l) Σ_{k=1..l} ((N+1)k - l) c_k p_{l-k}`,
/// which lets a recursion learn the degree-`l` coefficient of `C^N` before
/// `c_l` itself is known: the `k = l` term contributes exactly `N c_l`.
#[derive(Debug, Clone)]
pub struct PowerTracker {
    n: u32,
    p: Vec<BigRational>,
}

impl PowerTracker {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            p: vec![BigRational::from(1)],
        }
    }

    /// Degree-`l` coefficient of `C^N` with `c_l` treated as zero, where
    /// `l = c.len()` and `c` holds `c_0 = 1, ..., c_{l-1}`.
    pub fn partial(&self, c: &[BigRational]) -> BigRational {
        let l = c.len();
        debug_assert_eq!(self.p.len(), l);
        let n1 = self.n as i64 + 1;
        let mut acc = BigRational::new();
        for k in 1..l {
            if c[k] == 0 {
                continue;
            }
            let w = n1 * k as i64 - l as i64;
            acc += BigRational::from(&c[k] * &self.p[l - k]) * w;
        }
        acc / l as i64
    }

    /// Records the completed degree-`l` coefficient once `c_l` is known.
    pub fn push(&mut self, partial: BigRational, c_l: &BigRational) {
        self.p.push(partial + BigRational::from(c_l * self.n));
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.p
    }
}
