//! Adaptive Dormand–Prince 5(4) integration of `y'' = 2 y^N + x y`.
//!
//! The system `(y, y')` is advanced with the embedded 5(4) pair, a PI step
//! size controller and Hairer's continuous extension for dense output. All
//! stage arithmetic is carried out in [`PrecFloat`] at the problem's working
//! precision; the Butcher tableau is built from exact ratios so that no
//! double-precision rounding leaks into the scheme.

use serde::Serialize;
use thiserror::Error;

use crate::prec::{PrecContext, PrecFloat};

/// Default blow-up cap on `|y|`.
pub const DEFAULT_CAP: f64 = 1.0e6;

const MAX_STEPS: usize = 5_000_000;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("nonlinearity exponent must be at least 2, got {0}")]
    BadPower(u32),
    #[error("tolerances must lie in (0, 1e-6], got rel {rel} abs {abs}")]
    BadTolerance { rel: f64, abs: f64 },
    #[error("integration interval is empty")]
    EmptyInterval,
    #[error("blow-up cap must be positive, got {0}")]
    BadCap(f64),
}

#[derive(Debug, Clone)]
pub struct OdeProblem {
    pub n_power: u32,
    pub x_start: PrecFloat,
    pub y_start: PrecFloat,
    pub yp_start: PrecFloat,
    pub x_end: PrecFloat,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub ctx: PrecContext,
}

impl OdeProblem {
    /// A problem with the default tolerances `rel_tol = abs_tol = 1e-14`.
    pub fn new(
        n_power: u32,
        x_start: PrecFloat,
        y_start: PrecFloat,
        yp_start: PrecFloat,
        x_end: PrecFloat,
        ctx: PrecContext,
    ) -> Result<Self, OdeError> {
        let problem = Self {
            n_power,
            x_start: x_start.at(&ctx),
            y_start: y_start.at(&ctx),
            yp_start: yp_start.at(&ctx),
            x_end: x_end.at(&ctx),
            rel_tol: 1e-14,
            abs_tol: 1e-14,
            ctx,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Result<Self, OdeError> {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        if self.n_power < 2 {
            return Err(OdeError::BadPower(self.n_power));
        }
        let ok = |t: f64| t > 0.0 && t <= 1e-6;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(OdeError::BadTolerance {
                rel: self.rel_tol,
                abs: self.abs_tol,
            });
        }
        if self.x_end == self.x_start {
            return Err(OdeError::EmptyInterval);
        }
        Ok(())
    }

    fn rhs(&self, x: &PrecFloat, y: &PrecFloat, yp: &PrecFloat) -> [PrecFloat; 2] {
        [yp.clone(), y.powu(self.n_power) * 2.0 + x * y]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    #[serde(serialize_with = "ser_f64")]
    pub x: PrecFloat,
    #[serde(serialize_with = "ser_f64")]
    pub y: PrecFloat,
    #[serde(serialize_with = "ser_f64")]
    pub yp: PrecFloat,
}

fn ser_f64<S: serde::Serializer>(v: &PrecFloat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(v.to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Termination {
    ReachedEnd,
    /// `|y|` exceeded the cap just past this abscissa.
    BlowUp(f64),
    /// The step size collapsed below `10^-digits` (or the step budget ran out),
    /// which in practice means a pole is being approached.
    StepUnderflow(f64),
    /// A caller-supplied stop condition fired at this abscissa.
    Stopped(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn reached_end(&self) -> bool {
        self.termination == Termination::ReachedEnd
    }
}

/// Dormand–Prince tableau and dense-output weights at one precision.
struct Tableau {
    c: [PrecFloat; 7],
    a: Vec<Vec<PrecFloat>>,
    /// fifth-order weights (equal to the last row of `a`)
    b: [PrecFloat; 7],
    /// difference between the fifth- and fourth-order weights
    e: [PrecFloat; 7],
    d: [PrecFloat; 7],
}

impl Tableau {
    fn new(ctx: &PrecContext) -> Self {
        let r = |n: i64, d: i64| ctx.ratio(n, d);
        let a = vec![
            vec![],
            vec![r(1, 5)],
            vec![r(3, 40), r(9, 40)],
            vec![r(44, 45), r(-56, 15), r(32, 9)],
            vec![r(19372, 6561), r(-25360, 2187), r(64448, 6561), r(-212, 729)],
            vec![
                r(9017, 3168),
                r(-355, 33),
                r(46732, 5247),
                r(49, 176),
                r(-5103, 18656),
            ],
            vec![
                r(35, 384),
                r(0, 1),
                r(500, 1113),
                r(125, 192),
                r(-2187, 6784),
                r(11, 84),
            ],
        ];
        Self {
            c: [r(0, 1), r(1, 5), r(3, 10), r(4, 5), r(8, 9), r(1, 1), r(1, 1)],
            b: [
                r(35, 384),
                r(0, 1),
                r(500, 1113),
                r(125, 192),
                r(-2187, 6784),
                r(11, 84),
                r(0, 1),
            ],
            e: [
                r(71, 57600),
                r(0, 1),
                r(-71, 16695),
                r(71, 1920),
                r(-17253, 339200),
                r(22, 525),
                r(-1, 40),
            ],
            d: [
                r(-12715105075, 11282082432),
                r(0, 1),
                r(87487479700, 32700410799),
                r(-10690763975, 1880347072),
                r(701980252875, 199316789632),
                r(-1453857185, 822651844),
                r(69997945, 29380423),
            ],
            a,
        }
    }
}

/// One accepted step with its continuous extension.
struct Step {
    x0: PrecFloat,
    h: PrecFloat,
    /// Hairer's five interpolation coefficient vectors per component
    rcont: [[PrecFloat; 2]; 5],
}

impl Step {
    fn interpolate(&self, x: &PrecFloat) -> [PrecFloat; 2] {
        let theta = (x - &self.x0) / &self.h;
        let theta1 = 1.0 - &theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            let inner = &r[3][i] + &theta1 * &r[4][i];
            let inner = &r[2][i] + &theta * inner;
            let inner = &r[1][i] + &theta1 * inner;
            &r[0][i] + &theta * inner
        })
    }
}

struct Stepper<'a> {
    problem: &'a OdeProblem,
    tab: Tableau,
}

struct Attempt {
    y: [PrecFloat; 2],
    /// derivative at the new point (first-same-as-last)
    f_new: [PrecFloat; 2],
    err: f64,
    k: Vec<[PrecFloat; 2]>,
}

impl<'a> Stepper<'a> {
    fn new(problem: &'a OdeProblem) -> Self {
        Self {
            problem,
            tab: Tableau::new(&problem.ctx),
        }
    }

    fn attempt(&self, x: &PrecFloat, y: &[PrecFloat; 2], f0: &[PrecFloat; 2], h: &PrecFloat) -> Attempt {
        let tab = &self.tab;
        let mut k: Vec<[PrecFloat; 2]> = Vec::with_capacity(7);
        k.push(f0.clone());
        for s in 1..7 {
            let stage: [PrecFloat; 2] = std::array::from_fn(|i| {
                let mut acc = y[i].clone();
                for (j, a) in tab.a[s].iter().enumerate() {
                    if !a.is_zero() {
                        acc += h * a * &k[j][i];
                    }
                }
                acc
            });
            let xs = x + h * &tab.c[s];
            k.push(self.problem.rhs(&xs, &stage[0], &stage[1]));
        }
        // the seventh stage is evaluated at the fifth-order solution
        let y_new: [PrecFloat; 2] = std::array::from_fn(|i| {
            let mut acc = y[i].clone();
            for (j, b) in tab.b.iter().enumerate() {
                if !b.is_zero() {
                    acc += h * b * &k[j][i];
                }
            }
            acc
        });
        let mut sq = 0.0;
        for i in 0..2 {
            let mut e = PrecFloat::from_f64(0.0, y[i].prec());
            for (j, ej) in tab.e.iter().enumerate() {
                if !ej.is_zero() {
                    e += ej * &k[j][i];
                }
            }
            let e = (e * h).abs().to_f64();
            let scale = self.problem.abs_tol
                + self.problem.rel_tol * y[i].abs().to_f64().max(y_new[i].abs().to_f64());
            sq += (e / scale).powi(2);
        }
        let err = (sq / 2.0).sqrt();
        Attempt {
            f_new: k[6].clone(),
            y: y_new,
            err: if err.is_finite() { err } else { f64::INFINITY },
            k,
        }
    }

    fn dense(&self, x0: &PrecFloat, h: &PrecFloat, y0: &[PrecFloat; 2], att: &Attempt) -> Step {
        let tab = &self.tab;
        let k = &att.k;
        let rc = |f: &dyn Fn(usize) -> PrecFloat| -> [PrecFloat; 2] { std::array::from_fn(f) };
        let r0 = rc(&|i| y0[i].clone());
        let r1 = rc(&|i| &att.y[i] - &y0[i]);
        let r2 = rc(&|i| h * &k[0][i] - &r1[i]);
        let r3 = rc(&|i| &r1[i] - h * &k[6][i] - &r2[i]);
        let r4 = rc(&|i| {
            let mut acc = PrecFloat::from_f64(0.0, y0[i].prec());
            for (j, d) in tab.d.iter().enumerate() {
                if !d.is_zero() {
                    acc += d * &k[j][i];
                }
            }
            acc * h
        });
        Step {
            x0: x0.clone(),
            h: h.clone(),
            rcont: [r0, r1, r2, r3, r4],
        }
    }
}

/// How samples are recorded during a run.
enum Output<'o> {
    EveryStep,
    At(&'o [PrecFloat]),
}

fn run(
    problem: &OdeProblem,
    cap: f64,
    output: Output<'_>,
    mut stop: impl FnMut(&Sample) -> bool,
) -> Result<Trajectory, OdeError> {
    problem.validate()?;
    if !(cap > 0.0) {
        return Err(OdeError::BadCap(cap));
    }
    let ctx = &problem.ctx;
    let stepper = Stepper::new(problem);
    let forward = problem.x_end > problem.x_start;
    let dir = if forward { 1.0 } else { -1.0 };
    let span = (&problem.x_end - &problem.x_start).abs();
    let h_min = ctx.float(10f64.powi(-(ctx.digits() as i32)));

    let mut x = problem.x_start.clone();
    let mut y = [problem.y_start.clone(), problem.yp_start.clone()];
    let mut f = problem.rhs(&x, &y[0], &y[1]);
    let mut h = span.clone().min(ctx.float(1e-2)) * dir;
    let mut err_old = 1e-4f64;
    let mut samples = Vec::new();
    let mut next_out = 0usize;

    let start = Sample {
        x: x.clone(),
        y: y[0].clone(),
        yp: y[1].clone(),
    };
    match output {
        Output::EveryStep => {
            let halt = stop(&start);
            samples.push(start);
            if halt {
                return Ok(Trajectory {
                    samples,
                    termination: Termination::Stopped(x.to_f64()),
                });
            }
        }
        Output::At(points) => {
            while next_out < points.len() && points[next_out] == x {
                samples.push(start.clone());
                next_out += 1;
            }
        }
    }

    for _ in 0..MAX_STEPS {
        let remaining = &problem.x_end - &x;
        if remaining.is_zero() {
            return Ok(Trajectory {
                samples,
                termination: Termination::ReachedEnd,
            });
        }
        let last_step = h.abs() >= remaining.abs();
        if last_step {
            h = remaining.clone();
        }
        if h.abs() < h_min {
            return Ok(Trajectory {
                samples,
                termination: Termination::StepUnderflow(x.to_f64()),
            });
        }
        let att = stepper.attempt(&x, &y, &f, &h);
        if att.err <= 1.0 {
            let x_new = if last_step { problem.x_end.clone() } else { &x + &h };
            let blown = att.y[0].abs() > cap || !att.y[0].is_finite();
            match output {
                Output::EveryStep => {
                    if blown {
                        return Ok(Trajectory {
                            samples,
                            termination: Termination::BlowUp(x.to_f64()),
                        });
                    }
                    let s = Sample {
                        x: x_new.clone(),
                        y: att.y[0].clone(),
                        yp: att.y[1].clone(),
                    };
                    let halt = stop(&s);
                    samples.push(s);
                    if halt {
                        return Ok(Trajectory {
                            samples,
                            termination: Termination::Stopped(x_new.to_f64()),
                        });
                    }
                }
                Output::At(points) => {
                    let step = stepper.dense(&x, &h, &y, &att);
                    while next_out < points.len() {
                        let p = &points[next_out];
                        let inside = if forward { *p <= x_new } else { *p >= x_new };
                        if !inside {
                            break;
                        }
                        let v = step.interpolate(p);
                        if v[0].abs() > cap {
                            return Ok(Trajectory {
                                samples,
                                termination: Termination::BlowUp(x.to_f64()),
                            });
                        }
                        let s = Sample {
                            x: p.clone(),
                            y: v[0].clone(),
                            yp: v[1].clone(),
                        };
                        let halt = stop(&s);
                        samples.push(s);
                        next_out += 1;
                        if halt {
                            return Ok(Trajectory {
                                samples,
                                termination: Termination::Stopped(p.to_f64()),
                            });
                        }
                    }
                    if blown {
                        return Ok(Trajectory {
                            samples,
                            termination: Termination::BlowUp(x.to_f64()),
                        });
                    }
                }
            }
            x = x_new;
            y = att.y;
            f = att.f_new;
            let err = att.err.max(1e-10);
            let fac = err.powf(0.2 - 0.75 * BETA) * err_old.powf(-BETA) / SAFETY;
            let fac = fac.clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            h = h / fac;
            err_old = err.max(1e-4);
        } else {
            let fac = (att.err.powf(0.2) / SAFETY).min(1.0 / FAC_MIN);
            let fac = if fac.is_finite() { fac } else { 1.0 / FAC_MIN };
            h = h / fac;
        }
    }
    Ok(Trajectory {
        samples,
        termination: Termination::StepUnderflow(x.to_f64()),
    })
}

/// Integrates the problem, recording every accepted step. Stops with
/// [`Termination::BlowUp`] once `|y|` exceeds `cap`.
pub fn integrate(problem: &OdeProblem, cap: f64) -> Result<Trajectory, OdeError> {
    run(problem, cap, Output::EveryStep, |_| false)
}

/// Integrates the problem and records the solution only at `points`, which
/// must be ordered in the direction of integration. Values between steps
/// come from the fourth-order continuous extension.
pub fn integrate_at(
    problem: &OdeProblem,
    cap: f64,
    points: &[PrecFloat],
) -> Result<Trajectory, OdeError> {
    run(problem, cap, Output::At(points), |_| false)
}

/// Like [`integrate`], but ends with [`Termination::Stopped`] as soon as
/// `stop` returns true for an accepted sample.
pub fn integrate_until(
    problem: &OdeProblem,
    cap: f64,
    stop: impl FnMut(&Sample) -> bool,
) -> Result<Trajectory, OdeError> {
    run(problem, cap, Output::EveryStep, stop)
}

fn fixed_step_end(problem: &OdeProblem, steps: usize) -> PrecFloat {
    let stepper = Stepper::new(problem);
    let h = (&problem.x_end - &problem.x_start) / steps as f64;
    let mut x = problem.x_start.clone();
    let mut y = [problem.y_start.clone(), problem.yp_start.clone()];
    let mut f = problem.rhs(&x, &y[0], &y[1]);
    for _ in 0..steps {
        let att = stepper.attempt(&x, &y, &f, &h);
        x += &h;
        y = att.y;
        f = att.f_new;
    }
    y[0].clone()
}

/// Observed order of accuracy of the fifth-order solution, from fixed-step
/// runs with `n`, `2n` and `4n` steps over the problem interval. The base
/// step count is chosen so that the truncation error stays well above the
/// working precision.
pub fn local_error_estimate(problem: &OdeProblem) -> f64 {
    let span = (&problem.x_end - &problem.x_start).abs().to_f64();
    let n = ((span / 0.05).ceil() as usize).max(8);
    let y1 = fixed_step_end(problem, n);
    let y2 = fixed_step_end(problem, 2 * n);
    let y4 = fixed_step_end(problem, 4 * n);
    let d1 = (&y1 - &y2).abs().to_f64();
    let d2 = (&y2 - &y4).abs().to_f64();
    (d1 / d2).log2()
}
