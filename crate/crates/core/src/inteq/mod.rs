//! Airy-kernel integral equation for `y'' = 2 y^N + x y` on the positive
//! side, its expansion in powers of `k`, and the mirrored `N = 2` tower on
//! the negative side.
//!
//! With `K[f](x) = 2π [Ai(x) ∫_x^∞ f Bi − Bi(x) ∫_x^∞ f Ai]`, the decaying
//! solution satisfies `y = k Ai + K[y^N]`. Writing
//! `y = k Y_1 + k^N Y_N + k^(2N-1) Y_(2N-1) + …` gives
//! `Y_N = K[Ai^N]` and `Y_(2N-1) = N K[Y_N Ai^(N-1)]`.
//!
//! All functions live on piecewise Chebyshev panels shared by every integral
//! of one computation, so the Picard iterate and the tower are expansions of
//! the same discrete operator.

mod panels;

use serde::Serialize;
use thiserror::Error;

use crate::coeffs::{airy_asym_coeffs, d1_coeffs, CoeffError};
use crate::ode::{integrate_at, OdeError, OdeProblem, DEFAULT_CAP};
use crate::prec::{PrecContext, PrecFloat};
use crate::specfun::{airy_eval, SpecfunError};

use panels::{Mesh, NodeValues};

/// Successive Picard differences may grow this many times in a row before
/// the iteration is declared divergent.
const MAX_GROWTH_RUN: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InteqError {
    #[error("invalid quadrature settings: {0}")]
    BadSpec(String),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("nonlinearity exponent must be at least 2, got {0}")]
    BadPower(u32),
    #[error("unsupported level {0}")]
    BadLevel(u32),
    #[error("the trans-series parameter must be non-negative, got {0}")]
    NegativeK(f64),
    #[error("iteration count must be at least 1")]
    NoIterations,
    #[error("integrand for x = {x} has not decayed by z = {z}")]
    DecayViolation { x: f64, z: f64 },
    #[error("Picard iteration diverges (differences grew through iteration {iteration})")]
    PicardDivergence { iteration: usize },
    #[error("x = {0} is outside the asymptotic region x >= 3")]
    OutOfDomain(f64),
    #[error("truncation order {m_max} is past the optimal order {optimal}")]
    TruncationBeyondOptimal { m_max: usize, optimal: usize },
    #[error("reference trajectory failed: {0}")]
    ReferenceFailed(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    /// integrands below this fraction of their running peak end the
    /// semi-infinite range
    pub truncation_threshold: f64,
    #[serde(skip)]
    pub ctx: PrecContext,
}

impl QuadratureSpec {
    pub fn new(ctx: PrecContext) -> Self {
        Self {
            rel_tol: 1e-12,
            truncation_threshold: 1e-18,
            ctx,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Result<Self, InteqError> {
        self.rel_tol = rel_tol;
        self.truncation_threshold = self.truncation_threshold.min(rel_tol);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), InteqError> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(InteqError::BadSpec(format!("rel_tol {} not in (0, 1e-6]", self.rel_tol)));
        }
        if !(self.truncation_threshold > 0.0 && self.truncation_threshold <= self.rel_tol) {
            return Err(InteqError::BadSpec(format!(
                "truncation threshold {} not in (0, rel_tol]",
                self.truncation_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainTag {
    PositiveSide,
    NegativeSide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub xs: Vec<PrecFloat>,
    pub ys: Vec<PrecFloat>,
    pub domain: DomainTag,
}

impl GridFunction {
    pub fn new(xs: Vec<PrecFloat>, ys: Vec<PrecFloat>, domain: DomainTag) -> Result<Self, InteqError> {
        if xs.len() != ys.len() {
            return Err(InteqError::BadGrid(format!("{} abscissae, {} values", xs.len(), ys.len())));
        }
        check_grid(&xs)?;
        Ok(Self { xs, ys, domain })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Largest `|self − other|` over the shared grid.
    pub fn max_deviation(&self, other: &GridFunction) -> f64 {
        self.ys
            .iter()
            .zip(&other.ys)
            .map(|(a, b)| (a - b).abs().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn xs_f64(&self) -> Vec<f64> {
        self.xs.iter().map(PrecFloat::to_f64).collect()
    }

    pub fn ys_f64(&self) -> Vec<f64> {
        self.ys.iter().map(PrecFloat::to_f64).collect()
    }
}

fn check_grid(xs: &[PrecFloat]) -> Result<(), InteqError> {
    if xs.is_empty() {
        return Err(InteqError::BadGrid("empty grid".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(InteqError::BadGrid("abscissae must be strictly increasing".into()));
    }
    Ok(())
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, count: usize, ctx: &PrecContext) -> Vec<PrecFloat> {
    assert!(count >= 2, "a grid needs two points");
    let lo_p = ctx.float(lo);
    let step = (ctx.float(hi) - &lo_p) / (count - 1) as f64;
    (0..count).map(|i| &lo_p + &step * i as f64).collect()
}

/// `K[f](x)` for a single abscissa.
pub fn airy_kernel_integral(
    f: &dyn Fn(&PrecFloat) -> PrecFloat,
    x: &PrecFloat,
    spec: &QuadratureSpec,
) -> Result<PrecFloat, InteqError> {
    spec.validate()?;
    let (mesh, fv) = Mesh::build(x, x, spec, &|z, _| f(z))?;
    let k = mesh.kernel(&fv, &spec.ctx);
    // x is the left end of the first panel, which is its last node
    Ok(k[0].last().expect("nonempty panel").clone())
}

/// `K[f]` on a whole grid from one shared set of panels.
pub fn airy_kernel_grid(
    f: &dyn Fn(&PrecFloat) -> PrecFloat,
    xs: &[PrecFloat],
    spec: &QuadratureSpec,
) -> Result<GridFunction, InteqError> {
    spec.validate()?;
    check_grid(xs)?;
    let (mesh, fv) = Mesh::build(&xs[0], &xs[xs.len() - 1], spec, &|z, _| f(z))?;
    let k = mesh.kernel(&fv, &spec.ctx);
    sample(&mesh, &k, xs, DomainTag::PositiveSide)
}

fn sample(mesh: &Mesh, values: &NodeValues, xs: &[PrecFloat], domain: DomainTag) -> Result<GridFunction, InteqError> {
    let ys = xs
        .iter()
        .map(|x| {
            mesh.interpolate(values, x)
                .ok_or_else(|| InteqError::BadGrid(format!("{x} lies outside the panels")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    GridFunction::new(xs.to_vec(), ys, domain)
}

/// Panels adapted to `Ai^N`, the shape of every integrand in the tower.
fn tower_mesh(n_power: u32, xs: &[PrecFloat], spec: &QuadratureSpec) -> Result<Mesh, InteqError> {
    if n_power < 2 {
        return Err(InteqError::BadPower(n_power));
    }
    spec.validate()?;
    check_grid(xs)?;
    let (mesh, _) = Mesh::build(&xs[0], &xs[xs.len() - 1], spec, &|_, ai| ai.powu(n_power))?;
    Ok(mesh)
}

#[derive(Debug, Clone)]
pub struct PicardRun {
    pub solution: GridFunction,
    /// max-norm change of each iterate over the previous one, at the nodes
    pub differences: Vec<f64>,
}

/// Iterates `y ← k Ai + K[y^N]` from `y = k Ai`, stopping early once an
/// update changes the iterate by less than `rel_tol` relative to its size.
pub fn picard_iterate(
    n_power: u32,
    k: &PrecFloat,
    xs: &[PrecFloat],
    iterations: usize,
    spec: &QuadratureSpec,
) -> Result<PicardRun, InteqError> {
    if k.is_sign_negative() && !k.is_zero() {
        return Err(InteqError::NegativeK(k.to_f64()));
    }
    if iterations == 0 {
        return Err(InteqError::NoIterations);
    }
    let mesh = tower_mesh(n_power, xs, spec)?;
    let ctx = &spec.ctx;
    let k = k.at(ctx);
    let base = Mesh::map(&mesh.ai(), |a| a * &k);
    let mut y = base.clone();
    let mut differences = Vec::new();
    let mut growth_run = 0;
    for it in 1..=iterations {
        let source = Mesh::map(&y, |v| v.powu(n_power));
        let next = Mesh::zip(&base, &mesh.kernel(&source, ctx), |a, b| a + b);
        let diff = Mesh::max_abs(&Mesh::zip(&next, &y, |a, b| a - b));
        let size = Mesh::max_abs(&next);
        if !diff.is_finite() || !size.is_finite() {
            return Err(InteqError::PicardDivergence { iteration: it });
        }
        if differences.last().is_some_and(|prev| diff > *prev) {
            growth_run += 1;
            if growth_run >= MAX_GROWTH_RUN {
                return Err(InteqError::PicardDivergence { iteration: it });
            }
        } else {
            growth_run = 0;
        }
        differences.push(diff);
        y = next;
        if diff <= spec.rel_tol * size {
            break;
        }
    }
    let solution = sample(&mesh, &y, xs, DomainTag::PositiveSide)?;
    Ok(PicardRun { solution, differences })
}

pub fn picard_solve(
    n_power: u32,
    k: &PrecFloat,
    xs: &[PrecFloat],
    iterations: usize,
    spec: &QuadratureSpec,
) -> Result<GridFunction, InteqError> {
    picard_iterate(n_power, k, xs, iterations, spec).map(|r| r.solution)
}

/// The first three members `Y_1`, `Y_N`, `Y_(2N-1)` of the tower.
pub fn y_tower_levels(n_power: u32, xs: &[PrecFloat], spec: &QuadratureSpec) -> Result<Vec<GridFunction>, InteqError> {
    let mesh = tower_mesh(n_power, xs, spec)?;
    tower_on(&mesh, n_power, 3, &spec.ctx)?
        .iter()
        .map(|v| sample(&mesh, v, xs, DomainTag::PositiveSide))
        .collect()
}

fn tower_on(mesh: &Mesh, n_power: u32, levels: u32, ctx: &PrecContext) -> Result<Vec<NodeValues>, InteqError> {
    let y1 = mesh.ai();
    let mut out = vec![y1.clone()];
    if levels >= 2 {
        let yn = mesh.kernel(&Mesh::map(&y1, |a| a.powu(n_power)), ctx);
        out.push(yn.clone());
        if levels >= 3 {
            let src = Mesh::zip(&yn, &y1, |w, a| w * a.powu(n_power - 1) * n_power as f64);
            out.push(mesh.kernel(&src, ctx));
        }
    }
    Ok(out)
}

/// Tower member `level` (1, 2, 3 for `Y_1`, `Y_N`, `Y_(2N-1)`) on the grid.
pub fn y_tower(n_power: u32, level: u32, xs: &[PrecFloat], spec: &QuadratureSpec) -> Result<GridFunction, InteqError> {
    if !(1..=3).contains(&level) {
        return Err(InteqError::BadLevel(level));
    }
    let mesh = tower_mesh(n_power, xs, spec)?;
    let all = tower_on(&mesh, n_power, level, &spec.ctx)?;
    sample(&mesh, &all[level as usize - 1], xs, DomainTag::PositiveSide)
}

/// Negative-side `N = 2` tower. Writing `y = −x/2 + w` turns the equation
/// into `w'' = 2 w^2 − x w`, which is the original one under `x → −x`, so
/// `W_n(x) = Y_n(−x)`.
pub fn w_tower_n2(level: u32, xs_neg: &[PrecFloat], spec: &QuadratureSpec) -> Result<GridFunction, InteqError> {
    Ok(w_levels(level, xs_neg, spec)?.pop().expect("at least one level"))
}

fn w_levels(levels: u32, xs_neg: &[PrecFloat], spec: &QuadratureSpec) -> Result<Vec<GridFunction>, InteqError> {
    if !(1..=3).contains(&levels) {
        return Err(InteqError::BadLevel(levels));
    }
    check_grid(xs_neg)?;
    if xs_neg[xs_neg.len() - 1] > 0.0 {
        return Err(InteqError::BadGrid("negative-side grid must lie in x <= 0".into()));
    }
    let mirrored: Vec<PrecFloat> = xs_neg.iter().rev().map(|x| -x.clone()).collect();
    let mesh = tower_mesh(2, &mirrored, spec)?;
    tower_on(&mesh, 2, levels, &spec.ctx)?
        .iter()
        .map(|v| {
            let g = sample(&mesh, v, &mirrored, DomainTag::NegativeSide)?;
            GridFunction::new(xs_neg.to_vec(), g.ys.into_iter().rev().collect(), DomainTag::NegativeSide)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MatchReport {
    /// `−x/2 + Σ k2^n W_n(x)`
    pub transseries: GridFunction,
    /// numerical solution launched from `x = 10` with `k2 Ai`
    pub reference: GridFunction,
    pub max_deviation: f64,
}

/// Compares the negative-side `N = 2` trans-series with `levels`
/// exponential corrections against the shooting trajectory for `k2`.
pub fn n2_match(k2: &PrecFloat, xs_neg: &[PrecFloat], levels: u32, spec: &QuadratureSpec) -> Result<MatchReport, InteqError> {
    if levels > 3 {
        return Err(InteqError::BadLevel(levels));
    }
    check_grid(xs_neg)?;
    if xs_neg[xs_neg.len() - 1] > 0.0 {
        return Err(InteqError::BadGrid("negative-side grid must lie in x <= 0".into()));
    }
    let ctx = &spec.ctx;
    let k2 = k2.at(ctx);
    let mut ys: Vec<PrecFloat> = xs_neg.iter().map(|x| -x.clone() / 2.0).collect();
    if levels > 0 {
        for (n, w) in w_levels(levels, xs_neg, spec)?.iter().enumerate() {
            let c = k2.powu(n as u32 + 1);
            for (y, wv) in ys.iter_mut().zip(&w.ys) {
                *y += &c * wv;
            }
        }
    }
    let transseries = GridFunction::new(xs_neg.to_vec(), ys, DomainTag::NegativeSide)?;
    let reference = shooting_reference(2, &k2, xs_neg, ctx)?;
    let max_deviation = transseries.max_deviation(&reference);
    Ok(MatchReport {
        transseries,
        reference,
        max_deviation,
    })
}

fn shooting_reference(n_power: u32, k: &PrecFloat, xs: &[PrecFloat], ctx: &PrecContext) -> Result<GridFunction, InteqError> {
    let x_plus = ctx.float(10.0);
    let a = airy_eval(&x_plus, ctx)?;
    let problem = OdeProblem::new(n_power, x_plus, a.ai * k, a.ai_prime * k, xs[0].clone(), ctx.clone())?
        .with_tolerances(1e-14, 1e-30)?;
    let descending: Vec<PrecFloat> = xs.iter().rev().cloned().collect();
    let traj = integrate_at(&problem, DEFAULT_CAP, &descending)?;
    if !traj.reached_end() || traj.samples.len() != xs.len() {
        return Err(InteqError::ReferenceFailed(format!("{:?}", traj.termination)));
    }
    let ys = traj.samples.iter().rev().map(|s| s.y.clone()).collect();
    GridFunction::new(xs.to_vec(), ys, DomainTag::NegativeSide)
}

/// Optimal truncation order `⌊(4/3) x^(3/2)⌋` of the Airy series at `x`.
pub fn optimal_order(x: f64) -> usize {
    (4.0 / 3.0 * x.powf(1.5)).floor() as usize
}

/// Partial sum of the positive-side trans-series
/// `σ φ Σ a_m x^(-3m/2) + σ^N φ^N x^(-1) Σ d_m x^(-3m/2)`, with
/// `φ = e^(-ζ) x^(-1/4)`, `ζ = (2/3) x^(3/2)` and `σ = k / (2√π)`.
pub fn eval_pos_transseries(
    n_power: u32,
    k: &PrecFloat,
    x: &PrecFloat,
    n_max: u32,
    m_max: usize,
    ctx: &PrecContext,
) -> Result<PrecFloat, InteqError> {
    if n_power < 2 {
        return Err(InteqError::BadPower(n_power));
    }
    if n_max > 1 {
        return Err(InteqError::BadLevel(n_max));
    }
    let xf = x.to_f64();
    if xf < 3.0 {
        return Err(InteqError::OutOfDomain(xf));
    }
    let optimal = optimal_order(xf);
    if m_max > optimal {
        return Err(InteqError::TruncationBeyondOptimal { m_max, optimal });
    }
    let x = x.at(ctx);
    let sigma = k.at(ctx) / (ctx.pi().sqrt() * 2.0);
    let zeta = x.powf(&ctx.ratio(3, 2)) * ctx.ratio(2, 3);
    let phi = (-zeta).exp() / x.powf(&ctx.ratio(1, 4));
    let u = x.powf(&ctx.ratio(-3, 2));
    let horner = |coeffs: &[crate::BigRational]| {
        coeffs
            .iter()
            .rev()
            .fold(ctx.zero(), |acc, c| acc * &u + ctx.rational(c))
    };
    let mut total = &sigma * &phi * horner(&airy_asym_coeffs(m_max).coeffs);
    if n_max == 1 {
        let d = d1_coeffs(n_power, m_max)?;
        total += (&sigma * &phi).powu(n_power) * horner(&d.coeffs) / &x;
    }
    Ok(total)
}
