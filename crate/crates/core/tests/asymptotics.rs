use hmseries::asymptotics::*;
use hmseries::coeffs::{airy_asym_coeffs, c_coeffs, d1_coeffs, CoeffTable, Sector};
use hmseries::specfun::gamma_eval;
use hmseries::{BigRational, PrecContext, PrecFloat};
use proptest::prelude::*;
use std::f64::consts::PI;

fn ctx() -> PrecContext {
    PrecContext::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn richardson_linear_in_inverse_index() {
    let c = ctx();
    let seq: Vec<PrecFloat> = (1..=12).map(|m| c.one() + c.int(3) / m as f64).collect();
    let r = richardson(&seq, 1).unwrap();
    assert!((r - 1.0).abs() < c.float(1e-28));
}

#[test]
fn richardson_quadratic_from_thirty_terms() {
    let c = ctx();
    let seq: Vec<PrecFloat> = (1..=30)
        .map(|m| {
            let inv = c.one() / m as f64;
            c.one() + &inv + &inv * &inv
        })
        .collect();
    let r = richardson(&seq, 2).unwrap();
    assert!((r - 1.0).abs() < 1e-12);
}

#[test]
fn richardson_needs_enough_terms() {
    let c = ctx();
    let seq = vec![c.one(); 3];
    assert!(matches!(
        richardson(&seq, 3),
        Err(FitError::InsufficientLength { .. })
    ));
}

#[test]
fn normalized_instanton_coefficients_tend_to_inverse_pi() {
    // d_m (-1)^m / ((3/4)^(m-1) Γ(m)) for N = 4, built here from scratch
    let c = ctx();
    let d = d1_coeffs(4, 150).unwrap().coeffs;
    let three_quarters = c.ratio(3, 4);
    let seq: Vec<PrecFloat> = (1..=150usize)
        .map(|m| {
            let g = gamma_eval(&c.int(m as i64), &c).unwrap();
            let mut v = c.rational(&d[m]) / (three_quarters.powi(m as i32 - 1) * g);
            if m % 2 == 1 {
                v = -v;
            }
            v
        })
        .collect();
    let r = richardson(&seq, 6).unwrap();
    assert!((r.to_f64() - 1.0 / PI).abs() < 1e-4);
}

#[test]
fn one_factorial_fits() {
    let c = ctx();
    let expected = [
        (4u32, 1.0, 61.0 / 18.0),
        (5, 15.0 / 32.0, 29.0 / 12.0),
        (6, 3.0 / 10.0, 97.0 / 45.0),
        (7, 7.0 / 32.0, 25.0 / 12.0),
    ];
    for (n, s_pi, beta) in expected {
        let fit = fit_one_factorial(&d1_coeffs(n, 150).unwrap(), DEFAULT_ORDER, &c).unwrap();
        assert!((fit.rate_raw - 0.75).abs() < 1e-4, "N = {n}");
        assert_eq!(fit.rate_fraction, Some((3, 4)));
        assert_eq!(fit.offset_fraction, Some((-1, 1)));
        assert!(rel(fit.constant_s, s_pi / PI) < 1e-3, "N = {n}: S = {}", fit.constant_s);
        assert!(rel(fit.subleading_beta, beta) < 1e-2, "N = {n}: β = {}", fit.subleading_beta);
        assert!(fit.residual < RESIDUAL_LIMIT);
    }
}

#[test]
fn quadratic_case_growth() {
    let fit = fit_one_factorial(&d1_coeffs(2, 150).unwrap(), DEFAULT_ORDER, &ctx()).unwrap();
    assert!((fit.rate_raw - 1.5).abs() < 1e-4);
    assert_eq!(fit.offset_fraction, Some((-1, 6)));
    // 1.5648547668..., derived with mpmath from the same recursion
    assert!(rel(fit.constant_s, 1.5648547668) < 1e-8);
}

#[test]
fn two_factorial_fits() {
    let c = ctx();
    let expected = [
        (3u32, 9.0 / 8.0, -0.5, 0.1466323),
        (4, 9.0 / 12.0, -7.0 / 18.0, 0.12985376),
        (5, 9.0 / 16.0, -1.0 / 3.0, 0.1086460),
    ];
    for (n, a, theta, s) in expected {
        let fit = fit_two_factorial(&c_coeffs(n, 60).unwrap(), DEFAULT_ORDER, &c).unwrap();
        assert!((fit.rate_raw - a).abs() < 1e-4, "N = {n}");
        assert!((fit.offset - theta).abs() < 0.02, "N = {n}");
        assert!(rel(fit.constant_s, s) < 5e-3, "N = {n}: S = {}", fit.constant_s);
        assert!(fit.constant_s > 0.0);
        assert!(borel_consistency(n, &fit) < 1e-4);
    }
}

#[test]
fn exact_borel_identity() {
    for n in 2..=20u32 {
        let a = BigRational::from((9, 4 * (n as i64 - 1)));
        assert_eq!(borel_consistency_exact(n, &a), 0);
    }
    assert_ne!(borel_consistency_exact(3, &BigRational::from((10, 9))), 0);
}

#[test]
fn fit_rejections() {
    let c = ctx();
    let zero = c_coeffs(2, 50).unwrap();
    assert_eq!(fit_two_factorial(&zero, 6, &c).unwrap_err(), FitError::ZeroTail);
    let short = c_coeffs(3, 20).unwrap();
    assert!(matches!(
        fit_two_factorial(&short, 6, &c),
        Err(FitError::TooFewCoefficients { .. })
    ));
    let mut flipped = d1_coeffs(4, 100).unwrap();
    flipped.coeffs[40] = -flipped.coeffs[40].clone();
    assert_eq!(
        fit_one_factorial(&flipped, 6, &c).unwrap_err(),
        FitError::NotAlternating(40)
    );
    let airy = airy_asym_coeffs(100);
    assert!(matches!(
        fit_one_factorial(&airy, 6, &c),
        Err(FitError::WrongSector { .. })
    ));
}

#[test]
fn noisy_table_reports_large_residual() {
    // a sequence with no clean asymptotic expansion in 1/m
    let coeffs: Vec<BigRational> = (0..100i64)
        .map(|m| {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            BigRational::from(sign * (1 + (m * m * 7919) % 1000))
        })
        .collect();
    let t = CoeffTable {
        n_power: 4,
        sector: Sector::PosInstanton1,
        coeffs,
    };
    match fit_one_factorial(&t, 6, &ctx()) {
        Err(FitError::ResidualTooLarge(fit)) => assert!(fit.residual >= RESIDUAL_LIMIT),
        other => panic!("expected a residual failure, got {other:?}"),
    }
}

#[test]
fn fits_stable_under_higher_order() {
    let c = ctx();
    let d = d1_coeffs(5, 150).unwrap();
    let f6 = fit_one_factorial(&d, 6, &c).unwrap();
    let f7 = fit_one_factorial(&d, 7, &c).unwrap();
    assert!(rel(f7.constant_s, f6.constant_s) < f6.residual);
    let t = c_coeffs(4, 60).unwrap();
    let g6 = fit_two_factorial(&t, 6, &c).unwrap();
    let g7 = fit_two_factorial(&t, 7, &c).unwrap();
    assert!(rel(g7.constant_s, g6.constant_s) < g6.residual.max(1e-9));
}

proptest! {
    #[test]
    fn richardson_exact_on_polynomials(
        coefs in prop::collection::vec(-5.0f64..5.0, 1..=6),
        len in 10usize..40,
    ) {
        let c = ctx();
        let order = coefs.len();
        let seq: Vec<PrecFloat> = (1..=len)
            .map(|m| {
                let inv = c.one() / m as f64;
                let mut acc = c.float(2.5);
                let mut p = inv.clone();
                for a in &coefs {
                    acc += &p * *a;
                    p *= &inv;
                }
                acc
            })
            .collect();
        // degree `order - 1` in 1/m plus the constant: order `order - 1` suffices,
        // and every higher order stays exact
        for k in order.max(1)..=order + 1 {
            if k < len {
                let r = richardson(&seq, k).unwrap();
                prop_assert!((r - 2.5).abs() < c.float(1e-20));
            }
        }
    }
}
