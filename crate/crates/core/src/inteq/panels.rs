//! Piecewise Chebyshev–Lobatto panels carrying Airy values at their nodes.
//!
//! On each panel a function is represented by its values at the `P + 1`
//! Lobatto points; integrals use the Clenshaw–Curtis weights and running
//! integrals use the spectral integration matrix of the same interpolant.

use std::sync::Arc;

use crate::prec::{PrecContext, PrecFloat};
use crate::specfun::airy_eval;

use super::{InteqError, QuadratureSpec};

/// Polynomial degree per panel.
const DEGREE: usize = 24;
const MAX_WIDTH: f64 = 0.5;
const MIN_WIDTH: f64 = 1.0 / 512.0;
/// Distance past the last requested abscissa by which integrands must have
/// decayed.
pub(crate) const DECAY_WINDOW: f64 = 40.0;

/// Node set, integration matrix and weights for one degree.
pub(crate) struct Rules {
    p: usize,
    /// `t_j = cos(π j / p)`, running from 1 down to -1
    t: Vec<PrecFloat>,
    /// `integ[i][j]`: weight of `f_j` in `∫_{t_i}^1 f`
    integ: Vec<Vec<PrecFloat>>,
    /// Clenshaw–Curtis weights of the degree `p/2` rule on the even nodes
    coarse: Vec<PrecFloat>,
}

impl Rules {
    pub(crate) fn new(ctx: &PrecContext) -> Self {
        let p = DEGREE;
        let integ = integration_matrix(p, ctx);
        let coarse = integration_matrix(p / 2, ctx).pop().expect("nonempty");
        let cos = cos_table(p, ctx);
        let t = (0..=p).map(|j| cos[j].clone()).collect();
        Self { p, t, integ, coarse }
    }

    fn full(&self) -> &[PrecFloat] {
        &self.integ[self.p]
    }
}

fn cos_table(p: usize, ctx: &PrecContext) -> Vec<PrecFloat> {
    let pi = ctx.pi();
    (0..2 * p)
        .map(|m| (&pi * m as f64 / p as f64).cos())
        .collect()
}

/// `S[i][j]` with `∫_{t_i}^1 f(t) dt ≈ Σ_j S[i][j] f(t_j)` for the degree-`p`
/// Lobatto interpolant.
fn integration_matrix(p: usize, ctx: &PrecContext) -> Vec<Vec<PrecFloat>> {
    let cos = cos_table(p, ctx);
    let tk = |k: usize, i: usize| cos[(k * i) % (2 * p)].clone();
    let half_end = |j: usize| if j == 0 || j == p { 0.5 } else { 1.0 };
    // ∫_{t_i}^1 T_k
    let tail = |k: usize, i: usize| -> PrecFloat {
        let t = tk(1, i);
        match k {
            0 => ctx.one() - t,
            1 => (ctx.one() - &t * &t) / 2.0,
            _ => {
                let up = (ctx.one() - tk(k + 1, i)) / (2 * (k + 1)) as f64;
                let down = (ctx.one() - tk(k - 1, i)) / (2 * (k - 1)) as f64;
                up - down
            }
        }
    };
    let tails: Vec<Vec<PrecFloat>> = (0..=p).map(|i| (0..=p).map(|k| tail(k, i)).collect()).collect();
    (0..=p)
        .map(|i| {
            (0..=p)
                .map(|j| {
                    let mut acc = ctx.zero();
                    for k in 0..=p {
                        let c = tk(k, j) * (2.0 * half_end(j) * half_end(k)) / p as f64;
                        acc += c * &tails[i][k];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub(crate) struct Panel {
    pub(crate) a: PrecFloat,
    pub(crate) b: PrecFloat,
    mid: PrecFloat,
    half: PrecFloat,
    pub(crate) z: Vec<PrecFloat>,
    pub(crate) ai: Vec<PrecFloat>,
    pub(crate) bi: Vec<PrecFloat>,
}

impl Panel {
    fn new(a: PrecFloat, b: PrecFloat, rules: &Rules, ctx: &PrecContext) -> Result<Self, InteqError> {
        let mid = (&a + &b) / 2.0;
        let half = (&b - &a) / 2.0;
        let mut z = Vec::with_capacity(rules.p + 1);
        let mut ai = Vec::with_capacity(rules.p + 1);
        let mut bi = Vec::with_capacity(rules.p + 1);
        for t in &rules.t {
            let zj = &mid + &half * t;
            let v = airy_eval(&zj, ctx)?;
            z.push(zj);
            ai.push(v.ai);
            bi.push(v.bi);
        }
        Ok(Self { a, b, mid, half, z, ai, bi })
    }
}

/// Panels covering `[lo, end]`, where `end` lies past `hi` at the point the
/// integrand has become negligible.
pub(crate) struct Mesh {
    pub(crate) panels: Vec<Panel>,
    rules: Arc<Rules>,
}

/// Values of some function at every node of a mesh, panel by panel.
pub(crate) type NodeValues = Vec<Vec<PrecFloat>>;

fn abs_max(v: &[PrecFloat]) -> PrecFloat {
    v.iter().map(PrecFloat::abs).fold(PrecFloat::from_f64(0.0, v[0].prec()), PrecFloat::max)
}

fn dot(w: &[PrecFloat], g: &[PrecFloat]) -> PrecFloat {
    let mut acc = PrecFloat::from_f64(0.0, g[0].prec());
    for (wi, gi) in w.iter().zip(g) {
        acc += wi * gi;
    }
    acc
}

impl Mesh {
    /// Builds panels adaptively for the kernel integrands `f·Bi` and `f·Ai`,
    /// where `f(z, Ai(z))` is evaluated at the nodes. Returns the mesh and
    /// the node values of `f`.
    pub(crate) fn build(
        lo: &PrecFloat,
        hi: &PrecFloat,
        spec: &QuadratureSpec,
        f: &dyn Fn(&PrecFloat, &PrecFloat) -> PrecFloat,
    ) -> Result<(Self, NodeValues), InteqError> {
        let ctx = &spec.ctx;
        let rules = Arc::new(Rules::new(ctx));
        let tol = spec.rel_tol.max(1e3 * ctx.epsilon().to_f64());
        let limit = hi.to_f64() + DECAY_WINDOW;
        let mut panels = Vec::new();
        let mut values = Vec::new();
        let mut a = lo.clone();
        let mut width = MAX_WIDTH;
        let mut peak = ctx.zero();
        loop {
            if a.to_f64() > limit {
                return Err(InteqError::DecayViolation {
                    x: hi.to_f64(),
                    z: a.to_f64(),
                });
            }
            let b = &a + width;
            let panel = Panel::new(a.clone(), b.clone(), &rules, ctx)?;
            let fv: Vec<PrecFloat> = panel.z.iter().zip(&panel.ai).map(|(z, ai)| f(z, ai)).collect();
            if fv.iter().any(|v| !v.is_finite()) {
                return Err(InteqError::DecayViolation {
                    x: hi.to_f64(),
                    z: a.to_f64(),
                });
            }
            let g_b: Vec<PrecFloat> = fv.iter().zip(&panel.bi).map(|(f, b)| f * b).collect();
            let g_a: Vec<PrecFloat> = fv.iter().zip(&panel.ai).map(|(f, a)| f * a).collect();
            let mut converged = true;
            for g in [&g_b, &g_a] {
                let fine = dot(rules.full(), g);
                let even: Vec<PrecFloat> = g.iter().step_by(2).cloned().collect();
                let coarse = dot(&rules.coarse, &even);
                let scale: PrecFloat = rules
                    .full()
                    .iter()
                    .zip(g.iter())
                    .map(|(w, v)| (w * v).abs())
                    .fold(ctx.zero(), |acc, x| acc + x);
                if (fine - coarse).abs() > scale * tol {
                    converged = false;
                }
            }
            if !converged && width > MIN_WIDTH {
                width /= 2.0;
                continue;
            }
            let local = abs_max(&g_b).max(abs_max(&g_a));
            peak = peak.max(local.clone());
            let done = b >= *hi && local <= &peak * spec.truncation_threshold;
            panels.push(panel);
            values.push(fv);
            a = b;
            width = (width * 2.0).min(MAX_WIDTH);
            if done {
                break;
            }
        }
        Ok((Self { panels, rules }, values))
    }

    /// Airy values at the nodes.
    pub(crate) fn ai(&self) -> NodeValues {
        self.panels.iter().map(|p| p.ai.clone()).collect()
    }

    /// Applies `f ↦ 2π [Ai(x) ∫_x^∞ f Bi − Bi(x) ∫_x^∞ f Ai]` to node values,
    /// truncating the integrals at the end of the mesh.
    pub(crate) fn kernel(&self, f: &NodeValues, ctx: &PrecContext) -> NodeValues {
        let r = &self.rules;
        let two_pi = ctx.pi() * 2.0;
        let mut tail_b = ctx.zero();
        let mut tail_a = ctx.zero();
        let mut out: NodeValues = vec![Vec::new(); self.panels.len()];
        for (idx, (panel, fv)) in self.panels.iter().zip(f).enumerate().rev() {
            let g_b: Vec<PrecFloat> = fv.iter().zip(&panel.bi).map(|(f, b)| f * b).collect();
            let g_a: Vec<PrecFloat> = fv.iter().zip(&panel.ai).map(|(f, a)| f * a).collect();
            let vals = (0..=r.p)
                .map(|i| {
                    let ib = &panel.half * dot(&r.integ[i], &g_b) + &tail_b;
                    let ia = &panel.half * dot(&r.integ[i], &g_a) + &tail_a;
                    (&panel.ai[i] * ib - &panel.bi[i] * ia) * &two_pi
                })
                .collect();
            tail_b += &panel.half * dot(r.full(), &g_b);
            tail_a += &panel.half * dot(r.full(), &g_a);
            out[idx] = vals;
        }
        out
    }

    /// Evaluates the panel interpolant of `values` at `x`.
    pub(crate) fn interpolate(&self, values: &NodeValues, x: &PrecFloat) -> Option<PrecFloat> {
        let idx = self.panels.iter().position(|p| *x >= p.a && *x <= p.b)?;
        let panel = &self.panels[idx];
        let v = &values[idx];
        let t = (x - &panel.mid) / &panel.half;
        let mut num = x.clone() * 0.0;
        let mut den = num.clone();
        for (j, tj) in self.rules.t.iter().enumerate() {
            let diff = &t - tj;
            if diff.is_zero() {
                return Some(v[j].clone());
            }
            let mut w = if j == 0 || j == self.rules.p { 0.5 } else { 1.0 };
            if j % 2 == 1 {
                w = -w;
            }
            let q = diff.recip() * w;
            num += &q * &v[j];
            den += q;
        }
        Some(num / den)
    }

    /// Pointwise map over node values.
    pub(crate) fn map(values: &NodeValues, f: impl Fn(&PrecFloat) -> PrecFloat) -> NodeValues {
        values.iter().map(|p| p.iter().map(&f).collect()).collect()
    }

    /// Pointwise combination of two sets of node values.
    pub(crate) fn zip(a: &NodeValues, b: &NodeValues, f: impl Fn(&PrecFloat, &PrecFloat) -> PrecFloat) -> NodeValues {
        a.iter()
            .zip(b)
            .map(|(pa, pb)| pa.iter().zip(pb).map(|(x, y)| f(x, y)).collect())
            .collect()
    }

    pub(crate) fn max_abs(values: &NodeValues) -> f64 {
        values
            .iter()
            .flat_map(|p| p.iter().map(|v| v.abs().to_f64()))
            .fold(0.0, f64::max)
    }
}
