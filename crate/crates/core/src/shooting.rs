//! Separatrix search for the constant `k_N` in `y ~ k_N Ai(x)` as `x → +∞`.
//!
//! A trajectory is launched from `(x_plus, k Ai(x_plus), k Ai'(x_plus))` and
//! integrated toward negative `x`. Below the separatrix it turns over and
//! oscillates about the negative axis; above it it diverges. Bisection on this
//! step function of `k` brackets `k_N`.

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ode::{integrate_until, OdeError, OdeProblem, Termination, DEFAULT_CAP};
use crate::prec::{PrecContext, PrecFloat};
use crate::specfun::{airy_eval, airy_prime_first_zero, SpecfunError};

/// Abscissa left of which the oscillation and divergence tests apply.
const TEST_REGION: f64 = -2.0;
/// How many times an undetermined verdict may push the horizon deeper.
const MAX_DEEPEN: u32 = 4;
const MAX_BISECTIONS: u32 = 400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error("invalid shooting configuration: {0}")]
    Config(String),
    #[error("bracket [{low}, {high}] does not straddle the separatrix (both {verdict:?})")]
    BracketFailure {
        low: f64,
        high: f64,
        verdict: Verdict,
    },
    #[error("trajectory at k = {k} stayed undetermined down to x = {x_minus}")]
    Undetermined { k: f64, x_minus: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Serialize)]
pub struct ShootConfig {
    pub n_power: u32,
    pub x_plus: f64,
    pub x_minus: f64,
    pub k_tol: f64,
    /// initial bisection bracket
    pub k_low: f64,
    pub k_high: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub cap: f64,
    pub ctx: PrecContext,
}

impl ShootConfig {
    pub fn new(n_power: u32, ctx: PrecContext) -> Self {
        Self {
            n_power,
            x_plus: 10.0,
            x_minus: -12.0,
            k_tol: 1e-7,
            k_low: 0.1,
            k_high: 4.0,
            // the launch value is ~1e-10 at x = 10, so the absolute tolerance
            // must be far below it for the error control to be relative
            rel_tol: 1e-14,
            abs_tol: 1e-30,
            cap: DEFAULT_CAP,
            ctx,
        }
    }

    pub fn validate(&self) -> Result<(), ShootError> {
        let err = |m: String| Err(ShootError::Config(m));
        if self.n_power < 2 {
            return err(format!("N must be at least 2, got {}", self.n_power));
        }
        if self.x_plus < 8.0 {
            return err(format!("x_plus must be at least 8, got {}", self.x_plus));
        }
        if self.x_minus > -6.0 {
            return err(format!("x_minus must be at most -6, got {}", self.x_minus));
        }
        let floor = 10f64.powi(6 - self.ctx.digits() as i32);
        if self.k_tol < floor {
            return err(format!("k_tol {} is below 1e(6 - digits) = {floor}", self.k_tol));
        }
        if !(self.k_low >= 0.0 && self.k_low < self.k_high) {
            return err(format!("bad bracket [{}, {}]", self.k_low, self.k_high));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Oscillatory,
    Divergent,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub witness_x: f64,
    /// set when divergence was inferred from a collapsing step size
    pub step_underflow: bool,
}

fn ser_sci<S: Serializer>(v: &PrecFloat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_sci(15))
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparatrixResult {
    pub n_power: u32,
    #[serde(serialize_with = "ser_sci")]
    pub k_n: PrecFloat,
    #[serde(serialize_with = "ser_sci")]
    pub bracket_low: PrecFloat,
    #[serde(serialize_with = "ser_sci")]
    pub bracket_high: PrecFloat,
    pub iterations: u32,
    /// classification horizon actually used after any deepening
    pub x_minus: f64,
}

/// The power-law asymptote `(-x/2)^(1/(N-1))` for `x < 0`.
pub fn asymptote(n_power: u32, x: f64) -> f64 {
    (-x / 2.0).max(0.0).powf(1.0 / (n_power as f64 - 1.0))
}

/// Classifies the trajectory launched with amplitude `k`.
pub fn classify(n_power: u32, k: &PrecFloat, config: &ShootConfig) -> Result<Classification, ShootError> {
    let mut config = config.clone();
    config.n_power = n_power;
    config.validate()?;
    if k < &0.0 {
        return Err(ShootError::Config(format!("k must be non-negative, got {k}")));
    }
    let ctx = &config.ctx;
    let xp = ctx.float(config.x_plus);
    let airy = airy_eval(&xp, ctx)?;
    let problem = OdeProblem::new(
        n_power,
        xp,
        k * &airy.ai,
        k * &airy.ai_prime,
        ctx.float(config.x_minus),
        ctx.clone(),
    )?
    .with_tolerances(config.rel_tol, config.abs_tol)?;

    let mut verdict = Verdict::Undetermined;
    let mut witness = config.x_minus;
    let traj = integrate_until(&problem, config.cap, |s| {
        let x = s.x.to_f64();
        if x >= TEST_REGION {
            return false;
        }
        let y = s.y.to_f64();
        if y < 0.0 {
            verdict = Verdict::Oscillatory;
        } else if y > 2.0 * asymptote(n_power, x) {
            verdict = Verdict::Divergent;
        } else {
            return false;
        }
        witness = x;
        true
    })?;
    let classification = match traj.termination {
        Termination::Stopped(_) | Termination::ReachedEnd => Classification {
            verdict,
            witness_x: witness,
            step_underflow: false,
        },
        Termination::BlowUp(x) => Classification {
            verdict: Verdict::Divergent,
            witness_x: x,
            step_underflow: false,
        },
        Termination::StepUnderflow(x) => Classification {
            verdict: Verdict::Divergent,
            witness_x: x,
            step_underflow: true,
        },
    };
    Ok(classification)
}

/// Classifies, pushing the horizon 25% deeper on each undetermined verdict.
/// Returns the verdict and the horizon that produced it.
fn classify_deepening(
    n_power: u32,
    k: &PrecFloat,
    config: &ShootConfig,
) -> Result<(Classification, f64), ShootError> {
    let mut cfg = config.clone();
    for _ in 0..=MAX_DEEPEN {
        let c = classify(n_power, k, &cfg)?;
        if c.verdict != Verdict::Undetermined {
            return Ok((c, cfg.x_minus));
        }
        cfg.x_minus *= 1.25;
    }
    Err(ShootError::Undetermined {
        k: k.to_f64(),
        x_minus: cfg.x_minus,
    })
}

/// Bisects for the separatrix value `k_N`.
pub fn find_k(n_power: u32, config: &ShootConfig) -> Result<SeparatrixResult, ShootError> {
    let mut cfg = config.clone();
    cfg.n_power = n_power;
    cfg.validate()?;
    let ctx = cfg.ctx.clone();
    let mut lo = ctx.float(cfg.k_low);
    let mut hi = ctx.float(cfg.k_high);

    let (c_lo, x_lo) = classify_deepening(n_power, &lo, &cfg)?;
    cfg.x_minus = cfg.x_minus.min(x_lo);
    let (c_hi, x_hi) = classify_deepening(n_power, &hi, &cfg)?;
    cfg.x_minus = cfg.x_minus.min(x_hi);
    if c_lo.verdict == c_hi.verdict {
        return Err(ShootError::BracketFailure {
            low: cfg.k_low,
            high: cfg.k_high,
            verdict: c_lo.verdict,
        });
    }
    // the lower end must be the oscillating one
    if c_lo.verdict == Verdict::Divergent {
        return Err(ShootError::BracketFailure {
            low: cfg.k_low,
            high: cfg.k_high,
            verdict: Verdict::Divergent,
        });
    }

    let mut iterations = 0;
    while (&hi - &lo).to_f64() > cfg.k_tol && iterations < MAX_BISECTIONS {
        let mid = (&lo + &hi) / 2.0;
        let (c, x_used) = classify_deepening(n_power, &mid, &cfg)?;
        cfg.x_minus = cfg.x_minus.min(x_used);
        match c.verdict {
            Verdict::Oscillatory => lo = mid,
            _ => hi = mid,
        }
        iterations += 1;
    }
    Ok(SeparatrixResult {
        n_power,
        k_n: (&lo + &hi) / 2.0,
        bracket_low: lo,
        bracket_high: hi,
        iterations,
        x_minus: cfg.x_minus,
    })
}

/// `1 / Ai(x_0)`, the large-`N` limit of the bound, where `x_0` is the first
/// zero of `Ai'`.
pub fn k_infinity(ctx: &PrecContext) -> PrecFloat {
    let x0 = airy_prime_first_zero(ctx);
    airy_eval(&x0, ctx)
        .expect("x_0 lies inside the series domain")
        .ai
        .recip()
}

/// The upper bound `(1/Ai(x_0)) (-x_0/2)^(1/(N-1))` on `k_N`.
pub fn k_bound(n_power: u32, ctx: &PrecContext) -> PrecFloat {
    assert!(n_power >= 2, "N must be at least 2");
    let x0 = airy_prime_first_zero(ctx);
    let ai = airy_eval(&x0, ctx).expect("x_0 lies inside the series domain").ai;
    let base = -&x0 / 2.0;
    let expo = ctx.ratio(1, n_power as i64 - 1);
    base.powf(&expo) / ai
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub n_power: u32,
    pub result: Result<SeparatrixResult, String>,
    #[serde(serialize_with = "ser_sci")]
    pub bound: PrecFloat,
}

/// Runs [`find_k`] for each `N` in parallel; rows keep the input order and a
/// failure for one `N` does not stop the others.
pub fn table_scan(n_list: &[u32], config: &ShootConfig) -> Vec<ScanRow> {
    n_list
        .par_iter()
        .map(|&n| {
            let result = if n < 2 {
                Err(format!("N must be at least 2, got {n}"))
            } else {
                find_k(n, config).map_err(|e| e.to_string())
            };
            let bound = if n >= 2 {
                k_bound(n, &config.ctx)
            } else {
                config.ctx.float(f64::NAN)
            };
            ScanRow {
                n_power: n,
                result,
                bound,
            }
        })
        .collect()
}
