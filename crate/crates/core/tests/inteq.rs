use hmseries::inteq::*;
use hmseries::ode::{integrate_at, OdeProblem, DEFAULT_CAP};
use hmseries::specfun::airy_eval;
use hmseries::{PrecContext, PrecFloat};

fn ctx() -> PrecContext {
    PrecContext::default()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::new(ctx())
}

fn ai(z: &PrecFloat, c: &PrecContext) -> PrecFloat {
    airy_eval(z, c).unwrap().ai
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Shooting trajectory for `k Ai` launched at x = 10, sampled on `xs`.
fn ode_reference(n: u32, k: &PrecFloat, xs: &[PrecFloat]) -> Vec<PrecFloat> {
    let c = ctx();
    let a = airy_eval(&c.float(10.0), &c).unwrap();
    let p = OdeProblem::new(n, c.float(10.0), a.ai * k, a.ai_prime * k, xs[0].clone(), c.clone())
        .unwrap()
        .with_tolerances(1e-14, 1e-30)
        .unwrap();
    let pts: Vec<PrecFloat> = xs.iter().rev().cloned().collect();
    let t = integrate_at(&p, DEFAULT_CAP, &pts).unwrap();
    assert!(t.reached_end());
    t.samples.iter().rev().map(|s| s.y.clone()).collect()
}

#[test]
fn kernel_of_zero_is_zero() {
    let c = ctx();
    let v = airy_kernel_integral(&|_| c.zero(), &c.float(1.5), &spec()).unwrap();
    assert!(v.is_zero());
}

#[test]
fn kernel_matches_fine_simpson_rule() {
    // composite Simpson on [0, 16] with h = 1/200, Airy values at 20 digits
    let c = ctx();
    let low = PrecContext::new(20).unwrap();
    let h = 1.0 / 200.0;
    let steps = 3200;
    let (mut sb, mut sa) = (0.0, 0.0);
    for i in 0..=steps {
        let z = low.float(i as f64 * h);
        let v = airy_eval(&z, &low).unwrap();
        let (a, b) = (v.ai.to_f64(), v.bi.to_f64());
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sb += w * a * a * b;
        sa += w * a * a * a;
    }
    let at0 = airy_eval(&low.zero(), &low).unwrap();
    let oracle = 2.0 * std::f64::consts::PI * (at0.ai.to_f64() * sb - at0.bi.to_f64() * sa) * h / 3.0;
    let f = |z: &PrecFloat| {
        let a = ai(z, &c);
        &a * &a
    };
    let v = airy_kernel_integral(&f, &c.zero(), &spec()).unwrap().to_f64();
    assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
    assert!(rel(v, 0.069472) < 1e-5);
}

#[test]
fn kernel_is_linear() {
    let c = ctx();
    let s = spec();
    let x = c.float(0.7);
    let sq = |z: &PrecFloat| ai(z, &c).powu(2);
    let cu = |z: &PrecFloat| ai(z, &c).powu(3);
    let mix = |z: &PrecFloat| sq(z) * 2.5 - cu(z) * 1.5;
    let lhs = airy_kernel_integral(&mix, &x, &s).unwrap();
    let rhs = airy_kernel_integral(&sq, &x, &s).unwrap() * 2.5 - airy_kernel_integral(&cu, &x, &s).unwrap() * 1.5;
    assert!((&lhs - &rhs).abs() < lhs.abs() * 1e-12);
}

#[test]
fn kernel_rejects_non_decaying_integrand() {
    let c = ctx();
    let err = airy_kernel_integral(&|_| c.one(), &c.zero(), &spec()).unwrap_err();
    assert!(matches!(err, InteqError::DecayViolation { .. }), "{err:?}");
}

#[test]
fn quadrature_spec_validation() {
    assert!(spec().with_rel_tol(1e-3).is_err());
    assert!(spec().with_rel_tol(0.0).is_err());
    let tight = spec().with_rel_tol(1e-20).unwrap();
    assert!(tight.truncation_threshold <= tight.rel_tol);
}

#[test]
fn picard_zero_launch() {
    let c = ctx();
    let xs = uniform_grid(0.0, 4.0, 21, &c);
    let g = picard_solve(3, &c.zero(), &xs, 5, &spec()).unwrap();
    assert!(g.ys.iter().all(PrecFloat::is_zero));
}

#[test]
fn picard_agrees_with_shooting_for_cubic() {
    let c = ctx();
    let xs = uniform_grid(0.0, 4.0, 81, &c);
    let g = picard_solve(3, &c.one(), &xs, 8, &spec()).unwrap();
    let reference = ode_reference(3, &c.one(), &xs);
    for (y, r) in g.ys.iter().zip(&reference) {
        assert!((y - r).abs() < 1e-8);
    }
}

#[test]
fn picard_output_solves_the_equation() {
    let c = ctx();
    let s = spec();
    let h = 1e-5;
    let mut xs = Vec::new();
    for x0 in [0.5, 1.5, 2.5, 3.5] {
        for d in [-h, 0.0, h] {
            xs.push(c.float(x0) + d);
        }
    }
    let g = picard_solve(3, &c.ratio(9, 10), &xs, 12, &s).unwrap();
    for i in (0..xs.len()).step_by(3) {
        let (ym, y, yp) = (&g.ys[i], &g.ys[i + 1], &g.ys[i + 2]);
        let y2 = (yp - y * 2.0 + ym) / (h * h);
        let residual = y2 - y.powu(3) * 2.0 - &xs[i + 1] * y;
        assert!(residual.abs() < 100.0 * s.rel_tol, "x = {}: {}", xs[i + 1], residual);
    }
}

#[test]
fn picard_contraction_scales_with_k() {
    let c = ctx();
    let xs = uniform_grid(0.0, 4.0, 9, &c);
    for n in [2u32, 3] {
        let ratio = |k: f64| {
            let d = picard_iterate(n, &c.float(k), &xs, 4, &spec()).unwrap().differences;
            d[2] / d[1]
        };
        let (r1, r2) = (ratio(0.1), ratio(0.05));
        let expected = 2f64.powi(n as i32 - 1);
        assert!(rel(r1 / r2, expected) < 0.1, "N = {n}: {}", r1 / r2);
        assert!(r1 < 0.1f64.powi(n as i32 - 1));
    }
}

#[test]
fn picard_reports_divergence() {
    let c = ctx();
    let xs = uniform_grid(0.0, 2.0, 5, &c);
    let err = picard_solve(2, &c.float(60.0), &xs, 40, &spec()).unwrap_err();
    assert!(matches!(err, InteqError::PicardDivergence { .. }), "{err:?}");
    assert!(matches!(
        picard_solve(2, &c.float(-1.0), &xs, 4, &spec()),
        Err(InteqError::NegativeK(_))
    ));
}

#[test]
fn tower_values_at_origin() {
    let c = ctx();
    let xs = uniform_grid(0.0, 8.0, 161, &c);
    let levels = y_tower_levels(2, &xs, &spec()).unwrap();
    for (x, y) in xs.iter().zip(&levels[0].ys).step_by(20) {
        assert!((ai(x, &c) - y).abs() < 1e-25);
    }
    assert!(rel(levels[0].ys[0].to_f64(), 0.35503) < 1e-5);
    assert!(rel(levels[1].ys[0].to_f64(), 0.069472) < 1e-5);
    assert!(rel(levels[2].ys[0].to_f64(), 0.0093542) < 1e-4);
    let single = y_tower(2, 2, &xs, &spec()).unwrap();
    assert_eq!(single.ys, levels[1].ys);
    assert!(matches!(y_tower(2, 4, &xs, &spec()), Err(InteqError::BadLevel(4))));
}

/// Log-log slope of the remainder after subtracting the first `levels`
/// members of the tower, between consecutive k.
fn remainder_slopes(n: u32) -> Vec<Vec<f64>> {
    let c = PrecContext::new(40).unwrap();
    let s = QuadratureSpec::new(c.clone());
    let xs = uniform_grid(0.0, 3.0, 7, &c);
    let tower = y_tower_levels(n, &xs, &s).unwrap();
    let orders = [1, n, 2 * n - 1];
    let ks = [1e-2, 1e-3, 1e-4];
    let mut rem = vec![vec![0.0; ks.len()]; 3];
    for (ik, kf) in ks.iter().enumerate() {
        let k = c.float(*kf);
        let y = picard_solve(n, &k, &xs, 30, &s).unwrap();
        for levels in 1..=3 {
            let mut worst = 0.0f64;
            for (i, yv) in y.ys.iter().enumerate() {
                let mut r = yv.clone();
                for l in 0..levels {
                    r -= k.powu(orders[l]) * &tower[l].ys[i];
                }
                worst = worst.max(r.abs().to_f64());
            }
            rem[levels - 1][ik] = worst;
        }
    }
    rem.iter()
        .map(|r| r.windows(2).map(|w| (w[0] / w[1]).log10()).collect())
        .collect()
}

#[test]
fn tower_remainder_exponents() {
    for n in [2u32, 3] {
        let expected = [n, 2 * n - 1, 3 * n - 2];
        for (slopes, e) in remainder_slopes(n).iter().zip(expected) {
            for s in slopes {
                assert!(rel(*s, e as f64) < 0.05, "N = {n}: slope {s} vs {e}");
            }
        }
    }
}

#[test]
fn tower_decay_rate() {
    // Y_N ~ C x^(-1 - N/4) e^(-N ζ)
    let c = ctx();
    for n in [2u32, 3] {
        let xs = vec![c.float(4.0), c.float(8.0)];
        let y = y_tower(n, 2, &xs, &spec()).unwrap();
        let zeta = |x: f64| 2.0 / 3.0 * x.powf(1.5);
        let scaled = |i: usize, x: f64| (y.ys[i].to_f64() * x.powf(1.0 + n as f64 / 4.0)).ln();
        let slope = (scaled(1, 8.0) - scaled(0, 4.0)) / (zeta(8.0) - zeta(4.0));
        assert!(rel(slope, -(n as f64)) < 0.02, "N = {n}: {slope}");
    }
}

#[test]
fn instanton_sector_matches_tower() {
    // σ^N φ^N x^-1 Σ d_m x^(-3m/2) is the large-x form of k^N Y_N. For N = 2
    // the d_m grow like (3/2)^m m!, which needs a larger x; for N = 4 the
    // sector is taken as a difference of two sums, so x must stay small
    // enough for it to remain visible at 32 digits.
    let c = ctx();
    for (n, xv, m) in [(2u32, 10.0, 20), (4, 8.0, 12)] {
        let x = c.float(xv);
        let y = y_tower(n, 2, std::slice::from_ref(&x), &spec()).unwrap().ys[0].clone();
        let one = c.one();
        let sector = eval_pos_transseries(n, &one, &x, 1, m, &c).unwrap()
            - eval_pos_transseries(n, &one, &x, 0, m, &c).unwrap();
        assert!(rel(sector.to_f64(), y.to_f64()) < 1e-7, "N = {n}: {sector} vs {y}");
    }
}

#[test]
fn transseries_against_shooting() {
    let c = ctx();
    let x = c.float(6.0);
    let one = c.one();
    let reference = ode_reference(3, &one, &[x.clone()])[0].clone();
    let v = eval_pos_transseries(3, &one, &x, 1, optimal_order(6.0), &c).unwrap();
    let zeta = 2.0 / 3.0 * 6f64.powf(1.5);
    assert!((v - &reference).abs() < 10.0 * (-2.0 * zeta).exp());

    let k2 = c.float(0.671231209);
    let x = c.float(5.0);
    let m = optimal_order(5.0);
    let reference = ode_reference(2, &k2, &[x.clone()])[0].clone();
    let e0 = (eval_pos_transseries(2, &k2, &x, 0, m, &c).unwrap() - &reference).abs();
    let e1 = (eval_pos_transseries(2, &k2, &x, 1, m, &c).unwrap() - &reference).abs();
    assert!(e1 < e0, "{e1} vs {e0}");
}

#[test]
fn transseries_sector_restriction_and_errors() {
    let c = ctx();
    let x = c.float(4.0);
    let k = c.ratio(3, 2);
    let v = eval_pos_transseries(3, &k, &x, 0, 5, &c).unwrap();
    let zeta = c.ratio(2, 3) * x.powf(&c.ratio(3, 2));
    let pref = &k / (c.pi().sqrt() * 2.0) * (-zeta).exp() / x.powf(&c.ratio(1, 4));
    let a = hmseries::coeffs::airy_asym_coeffs(5).coeffs;
    let u = x.powf(&c.ratio(-3, 2));
    let sum = a.iter().enumerate().fold(c.zero(), |acc, (m, am)| acc + c.rational(am) * u.powu(m as u32));
    assert!((v - pref * sum).abs() < 1e-35);
    assert!(matches!(eval_pos_transseries(3, &k, &c.float(2.0), 0, 1, &c), Err(InteqError::OutOfDomain(_))));
    assert!(matches!(
        eval_pos_transseries(3, &k, &x, 0, optimal_order(4.0) + 1, &c),
        Err(InteqError::TruncationBeyondOptimal { .. })
    ));
    assert!(matches!(eval_pos_transseries(3, &k, &x, 2, 3, &c), Err(InteqError::BadLevel(2))));
}

#[test]
fn negative_side_tower() {
    let c = ctx();
    let xs = uniform_grid(-8.0, 0.0, 161, &c);
    let w1 = w_tower_n2(1, &xs, &spec()).unwrap();
    assert_eq!(w1.domain, DomainTag::NegativeSide);
    let i = 120; // x = -2
    assert!((w1.xs[i].to_f64() + 2.0).abs() < 1e-12);
    assert!((w1.ys[i].to_f64() - 0.03492).abs() < 1e-5);
    let mirrored: Vec<PrecFloat> = xs.iter().rev().map(|x| -x.clone()).collect();
    let w2 = w_tower_n2(2, &xs, &spec()).unwrap();
    let y2 = y_tower(2, 2, &mirrored, &spec()).unwrap();
    for (a, b) in w2.ys.iter().zip(y2.ys.iter().rev()) {
        assert!((a - b).abs() < 1e-20);
    }
    assert!(w_tower_n2(1, &uniform_grid(-1.0, 1.0, 5, &c), &spec()).is_err());
}

#[test]
fn second_level_solves_shifted_equation() {
    // W_2'' = 2 W_1^2 − x W_2
    let c = ctx();
    let h = 1e-5;
    let x0 = c.float(-3.0);
    let xs = vec![&x0 - h, x0.clone(), &x0 + h];
    let w1 = w_tower_n2(1, &xs, &spec()).unwrap();
    let w2 = w_tower_n2(2, &xs, &spec()).unwrap();
    let d2 = (&w2.ys[2] - &w2.ys[1] * 2.0 + &w2.ys[0]) / (h * h);
    let residual = d2 - w1.ys[1].powu(2) * 2.0 + &x0 * &w2.ys[1];
    assert!(residual.abs() < 1e-9, "{residual}");
}

#[test]
fn quadratic_matching_improves_with_levels() {
    let c = ctx();
    let xs = uniform_grid(-6.0, 0.0, 121, &c);
    let k2 = c.float(0.671231);
    let devs: Vec<f64> = (0..=3)
        .map(|l| n2_match(&k2, &xs, l, &spec()).unwrap().max_deviation)
        .collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    assert!(devs[2] < 1e-2);
    let level0 = n2_match(&k2, &xs, 0, &spec()).unwrap();
    for (x, y) in level0.transseries.xs.iter().zip(&level0.transseries.ys) {
        assert_eq!(*y, -x.clone() / 2.0);
    }
}

#[test]
fn grid_validation() {
    let c = ctx();
    let bad = vec![c.float(1.0), c.float(0.5)];
    assert!(matches!(picard_solve(3, &c.one(), &bad, 3, &spec()), Err(InteqError::BadGrid(_))));
    assert!(GridFunction::new(vec![c.one()], vec![], DomainTag::PositiveSide).is_err());
}
