//! Residual of built coefficient rows against the coefficient ODE for
//! f_i(t), with every row expanded to a full polynomial in t.

use hydromag_core::numerics::PrecisionContext;
use hydromag_core::zeeman::CoefficientTable;
use hydromag_core::Float;

fn expand(row: &[Float], len: usize, ctx: &PrecisionContext) -> Vec<Float> {
    let mut full = vec![ctx.zero(); len];
    for (k, v) in row.iter().enumerate() {
        full[2 * k] = ctx.float(v);
    }
    full
}

/// Largest |L f_i − source_i| over powers of t, relative to the largest
/// single term entering that power.
pub fn worst_row_residual(t: &CoefficientTable, ctx: &PrecisionContext) -> f64 {
    let am = i64::from(t.sector.m.unsigned_abs());
    let nu = i64::from(t.sector.nu);
    let mut g4 = ctx.float(t.gamma.square_ref());
    g4 /= 4u32;
    let mut cc = ctx.float(&t.e_b * 2u32);
    cc -= ctx.float(&t.gamma * (am + 1));
    let len = t.i_max() + 4;
    let rows: Vec<Vec<Float>> = t.a.iter().map(|r| expand(r, len, ctx)).collect();
    let zero = vec![ctx.zero(); len];
    let mut worst = 0.0f64;
    for i in 0..rows.len() {
        let f = &rows[i];
        let lower = |back: usize| if i >= back { &rows[i - back] } else { &zero };
        let (f1, f2, f4) = (lower(1), lower(2), lower(4));
        for n in 0..len - 2 {
            let nn = n as i64;
            let ii = i as i64;
            let terms = [
                ctx.float(&f[n + 2] * ((nn + 2) * (nn + 1))),
                -ctx.float(&f[n] * (nn * (nn - 1))),
                ctx.float(&f[n + 2] * ((2 * am + 1) * (nn + 2))),
                -ctx.float(&f[n] * (2 * (am + nu + 1) * nn)),
                ctx.float(&f[n] * (ii * (ii + 2 * am + 2 * nu + 1))),
                -(if n >= 2 { ctx.float(&f4[n - 2] * &g4) } else { ctx.zero() }),
                -ctx.float(&f2[n] * &cc),
                ctx.float(&f1[n] * 2u32),
            ];
            let mut sum = ctx.zero();
            let mut scale = ctx.zero();
            for x in &terms {
                sum += x;
                let a = ctx.float(x.abs_ref());
                if a > scale {
                    scale = a;
                }
            }
            if !scale.is_zero() {
                let rel = ctx.float(sum.abs_ref()) / &scale;
                worst = worst.max(rel.to_f64());
            }
        }
        // Only even powers are present, and none beyond t^i.
        assert_eq!(t.a[i].len(), i / 2 + 1);
        assert!(f[i + 1..].iter().all(Float::is_zero));
    }
    worst
}
