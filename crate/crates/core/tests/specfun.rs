use hmseries::prec::rel_diff;
use hmseries::specfun::{airy_eval, airy_prime_first_zero, gamma_eval, SpecfunError};
use hmseries::{PrecContext, PrecFloat};
use proptest::prelude::*;

fn ctx32() -> PrecContext {
    PrecContext::new(32).unwrap()
}

/// MPFR's own Ai, an implementation independent of ours.
fn mpfr_ai(x: &PrecFloat, bits: u32) -> PrecFloat {
    PrecFloat::from_float(rug::Float::with_val(bits, x.as_float()).ai())
}

#[test]
fn values_at_origin() {
    let ctx = ctx32();
    let v = airy_eval(&ctx.zero(), &ctx).unwrap();
    // 3^(-2/3)/Γ(2/3) and 3^(-1/6)/Γ(2/3)
    let g23 = gamma_eval(&ctx.ratio(2, 3), &ctx).unwrap();
    let three = ctx.int(3);
    let ai0 = (&three).powf(&ctx.ratio(-2, 3)) / &g23;
    let bi0 = (&three).powf(&ctx.ratio(-1, 6)) / &g23;
    assert!(rel_diff(&v.ai, &ai0) < ctx.float(1e-30));
    assert!(rel_diff(&v.bi, &bi0) < ctx.float(1e-30));
    assert!((v.ai.to_f64() - 0.3550280539).abs() < 1e-10);
    assert!((v.bi.to_f64() - 0.6149266274).abs() < 1e-10);
}

#[test]
fn agrees_with_mpfr_ai() {
    let ctx = ctx32();
    for i in -80..=80 {
        let x = ctx.float(i as f64 * 0.25 + 0.013);
        let ours = airy_eval(&x, &ctx).unwrap().ai;
        let theirs = mpfr_ai(&x, 256);
        assert!(rel_diff(&ours, &theirs) < ctx.float(1e-30), "x = {x}");
    }
}

#[test]
fn beyond_crossover_matches_mpfr() {
    let ctx = ctx32();
    for x in [18.0, 25.0, 40.0, 50.0, -18.0, -25.0, -40.0, -50.0] {
        let xp = ctx.float(x);
        let ours = airy_eval(&xp, &ctx).unwrap();
        let theirs = mpfr_ai(&xp, 300);
        assert!(rel_diff(&ours.ai, &theirs) < ctx.float(1e-30), "x = {x}");
        let w = ours.wronskian() * ctx.pi();
        assert!((w - 1.0).abs() < ctx.float(1e-30), "wronskian at {x}");
    }
}

#[test]
fn precision_self_consistency() {
    let c32 = ctx32();
    let c48 = PrecContext::new(48).unwrap();
    for x in [-12.5, -3.3, 0.7, 4.2, 9.9, 17.0] {
        let a = airy_eval(&c32.float(x), &c32).unwrap();
        let b = airy_eval(&c48.float(x), &c48).unwrap();
        for (u, v) in [(&a.ai, &b.ai), (&a.bi_prime, &b.bi_prime)] {
            assert!(rel_diff(u, v) < c48.float(1e-30), "x = {x}");
        }
    }
}

#[test]
fn satisfies_airy_equation() {
    let ctx = ctx32();
    let h = ctx.float(1e-6);
    for i in -40..=40 {
        let x = ctx.float(i as f64 * 0.2);
        let lo = airy_eval(&(&x - &h), &ctx).unwrap().ai;
        let mid = airy_eval(&x, &ctx).unwrap().ai;
        let hi = airy_eval(&(&x + &h), &ctx).unwrap().ai;
        let second = (lo - &mid * 2.0 + hi) / (&h * &h);
        // the second difference has O(h^2) truncation error, about 1e-13 here
        assert!((second - &x * &mid).abs() < ctx.float(1e-11), "x = {x}");
    }
}

#[test]
fn first_zero_of_derivative() {
    let ctx = ctx32();
    let x0 = airy_prime_first_zero(&ctx);
    assert!((x0.to_f64() + 1.018792972).abs() < 1e-9);
    let v = airy_eval(&x0, &ctx).unwrap();
    assert!(v.ai_prime.abs() < ctx.float(1e-29));
    assert!(&x0 * &v.ai < 0.0);
    assert!((v.ai.recip().to_f64() - 1.866867495).abs() < 1e-9);
    let at_rounded_zero = airy_eval(&ctx.float(-1.018792972), &ctx).unwrap();
    assert!(at_rounded_zero.ai_prime.abs() < 1e-8);
}

#[test]
fn gamma_examples() {
    let ctx = ctx32();
    let one = gamma_eval(&ctx.one(), &ctx).unwrap();
    assert!((one - 1.0).abs() < ctx.float(1e-31));
    let half = gamma_eval(&ctx.ratio(1, 2), &ctx).unwrap();
    assert!(rel_diff(&half, &ctx.pi().sqrt()) < ctx.float(1e-31));
    let g16 = gamma_eval(&ctx.ratio(1, 6), &ctx).unwrap();
    let g56 = gamma_eval(&ctx.ratio(5, 6), &ctx).unwrap();
    assert!(rel_diff(&(g16 * g56), &(ctx.pi() * 2.0)) < ctx.float(1e-30));
    let big = gamma_eval(&ctx.float(150.5), &ctx).unwrap();
    let mpfr = PrecFloat::from_float(rug::Float::with_val(256, 150.5).gamma());
    assert!(rel_diff(&big, &mpfr) < ctx.float(1e-30));
    assert!(matches!(
        gamma_eval(&ctx.int(-3), &ctx),
        Err(SpecfunError::Pole(_))
    ));
}

#[test]
fn rejects_huge_arguments() {
    let ctx = ctx32();
    assert!(matches!(
        airy_eval(&ctx.float(1.5e4), &ctx),
        Err(SpecfunError::OutOfDomain(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn wronskian_identity(x in -20.0f64..20.0) {
        let ctx = ctx32();
        let v = airy_eval(&ctx.float(x), &ctx).unwrap();
        let w = v.wronskian() * ctx.pi();
        prop_assert!((w - 1.0).abs() < ctx.float(1e-30));
    }
}
