//! Coefficient tables checked against closed forms and against the
//! coefficient ODE.

mod common;

use common::residual::worst_row_residual;
use hydromag_core::numerics::make_context;
use hydromag_core::zeeman::{build_table, homogeneous_polynomial, SectorLabel};
use hydromag_core::Float;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn ground_state_series_is_exp_minus_r() {
    for digits in [30u32, 50, 80] {
        let ctx = make_context(digits).unwrap();
        let t = build_table(SectorLabel::new(0, 0).unwrap(), &ctx.zero(), &ctx.float(0.5), &[ctx.float(1)], 20, &ctx);
        let tol = ctx.pow10(15 - digits as i32);
        let mut fact = ctx.float(1);
        for (i, row) in t.a.iter().enumerate() {
            if i > 0 {
                fact *= i as u32;
            }
            let mut want = ctx.float(1) / &fact;
            if i % 2 == 1 {
                want = -want;
            }
            let err = ctx.float(&row[0] - &want).abs();
            assert!(err <= tol, "digits {digits}, i {i}: {err}");
            assert!(row[1..].iter().all(Float::is_zero));
        }
    }
}

#[test]
fn rows_satisfy_the_coefficient_equation() {
    let digits = 40u32;
    let ctx = make_context(digits).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    for _ in 0..20 {
        let m = rng.gen_range(-3..=3);
        let nu = rng.gen_range(0..=1u8);
        let gamma: f64 = rng.gen_range(0.0..20.0);
        let e_b: f64 = rng.gen_range(0.05..3.0);
        let constants: Vec<Float> = (0..6).map(|_| ctx.float(rng.gen_range(-2.0..2.0))).collect();
        let t = build_table(SectorLabel::new(m, nu).unwrap(), &ctx.float(gamma), &ctx.float(e_b), &constants, 30, &ctx);
        let r = worst_row_residual(&t, &ctx);
        assert!(r <= 10f64.powi(10 - digits as i32), "m {m} nu {nu} gamma {gamma} e_b {e_b}: {r}");
    }
}

#[test]
fn unit_field_rows_at_higher_precision() {
    let digits = 80u32;
    let ctx = make_context(digits).unwrap();
    let c: Vec<Float> = [1.0, -0.3, 0.05].iter().map(|&x| ctx.float(x)).collect();
    let t = build_table(SectorLabel::new(0, 0).unwrap(), &ctx.float(1), &ctx.float(0.831), &c, 60, &ctx);
    assert!(worst_row_residual(&t, &ctx) <= 10f64.powi(10 - digits as i32));
}

#[test]
fn homogeneous_rows_enter_with_their_constant() {
    let ctx = make_context(40).unwrap();
    let s = SectorLabel::new(2, 1).unwrap();
    let (g, eb) = (ctx.float(0.7), ctx.float(0.4));
    let base = build_table(s, &g, &eb, &[ctx.float(1), ctx.zero(), ctx.zero()], 12, &ctx);
    let delta = ctx.float(0.25);
    let bumped = build_table(s, &g, &eb, &[ctx.float(1), ctx.zero(), delta.clone()], 12, &ctx);
    // Rows below i = 4 are untouched; row 4 moves by δ·H_4.
    assert_eq!(base.a[..4], bumped.a[..4]);
    let h4 = homogeneous_polynomial(s, 4).unwrap();
    for (k, (a, b)) in base.a[4].iter().zip(&bumped.a[4]).enumerate() {
        let want = ctx.float(&h4[2 * k]) * &delta;
        assert!((ctx.float(b - a) - want).abs() < ctx.pow10(-35));
    }
    assert!(worst_row_residual(&bumped, &ctx) < 1e-30);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The table is affine in the constants.
    #[test]
    fn table_is_affine_in_constants(
        m in -2i32..=2, nu in 0u8..=1, gamma in 0.0f64..5.0, e_b in 0.1f64..2.0,
        c in proptest::collection::vec(-1.0f64..1.0, 3), d in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        let ctx = make_context(40).unwrap();
        let s = SectorLabel::new(m, nu).unwrap();
        let (g, eb) = (ctx.float(gamma), ctx.float(e_b));
        let cs: Vec<Float> = c.iter().map(|&x| ctx.float(x)).collect();
        let ds: Vec<Float> = d.iter().map(|&x| ctx.float(x)).collect();
        let sum: Vec<Float> = c.iter().zip(&d).map(|(a, b)| ctx.float(*a) + *b).collect();
        let zero = vec![ctx.zero(); 3];
        let tc = build_table(s, &g, &eb, &cs, 16, &ctx);
        let td = build_table(s, &g, &eb, &ds, 16, &ctx);
        let ts = build_table(s, &g, &eb, &sum, 16, &ctx);
        let t0 = build_table(s, &g, &eb, &zero, 16, &ctx);
        for i in 0..=16 {
            for k in 0..=i / 2 {
                let lin = ctx.float(&tc.a[i][k] + &td.a[i][k]) - &t0.a[i][k];
                let err = ctx.float(&ts.a[i][k] - &lin).abs();
                let scale = ctx.float(ts.a[i][k].abs_ref()).max(&ctx.float(1));
                prop_assert!(err / scale < 1e-30);
            }
        }
    }

    #[test]
    fn homogeneous_polynomials_solve_the_homogeneous_equation(m in -4i32..=4, nu in 0u8..=1, half in 0usize..8) {
        let s = SectorLabel::new(m, nu).unwrap();
        let i = 2 * half;
        let h = homogeneous_polynomial(s, i).unwrap();
        prop_assert_eq!(h.len(), i + 1);
        prop_assert_eq!(&h[0], &rug::Rational::from(1));
        let am = i64::from(m.unsigned_abs());
        let nu = i64::from(nu);
        let at = |j: usize| h.get(j).cloned().unwrap_or_default();
        for n in 0..=i + 2 {
            let nn = n as i64;
            let lhs = at(n + 2) * rug::Rational::from((nn + 2) * (nn + 1) + (2 * am + 1) * (nn + 2))
                + at(n) * rug::Rational::from(-nn * (nn - 1) - 2 * (am + nu + 1) * nn + (i as i64) * (i as i64 + 2 * am + 2 * nu + 1));
            prop_assert_eq!(lhs, rug::Rational::new());
        }
    }
}
