//! Angular polynomials and the particular-integral recurrence for the
//! coefficient functions f_i(t), t = sin θ, of ψ = Σ f_i(t) r^i.
//!
//! Rows are stored by even power only: `row[k]` is the coefficient of t^{2k}.

use rug::{Assign, Float, Rational};

use super::{SectorLabel, ZeemanError};
use crate::numerics::PrecisionContext;

/// Right-hand-side weights of the row recurrence, possibly pre-scaled by
/// powers of a radius so that rows hold `A_{i,2k} R^i`.
pub(crate) struct SourceWeights {
    /// γ²/4 (times R⁴).
    pub g4: Float,
    /// 2E_b − γ(|m|+1) (times R²).
    pub cc: Float,
    /// 2 (times R).
    pub two: Float,
}

impl SourceWeights {
    pub fn new(
        sector: SectorLabel,
        gamma: &Float,
        e_b: &Float,
        radius: Option<&Float>,
        ctx: &PrecisionContext,
    ) -> Self {
        let mut g4 = ctx.float(gamma.square_ref());
        g4 /= 4u32;
        let mut cc = ctx.float(e_b * 2u32);
        cc -= ctx.float(gamma * (sector.abs_m() + 1));
        let mut two = ctx.float(2);
        if let Some(r) = radius {
            let r2 = ctx.float(r.square_ref());
            two *= r;
            cc *= &r2;
            g4 *= &r2;
            g4 *= &r2;
        }
        Self { g4, cc, two }
    }
}

/// Coefficient of a_{i,j+2} in the j-relation, with j = 2k.
#[inline]
pub(crate) fn upper_weight(am: u32, k: usize) -> u64 {
    let k = k as u64;
    (2 * k + 2) * (2 * k + 2 * u64::from(am) + 2)
}

/// Coefficient of a_{i,j} in the j-relation, with j = 2k.
#[inline]
pub(crate) fn diag_weight(sector: SectorLabel, i: usize, k: usize) -> u64 {
    let (i, k) = (i as u64, k as u64);
    (i - 2 * k) * (i + 2 * k + u64::from(sector.c2()))
}

/// Solve row `i` downward in k. Lower rows are passed as slices; an empty
/// slice stands for an identically zero row. `out` must hold `i/2 + 1`
/// entries and is overwritten.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_row(
    sector: SectorLabel,
    w: &SourceWeights,
    i: usize,
    f1: &[Float],
    f2: &[Float],
    f4: &[Float],
    out: &mut [Float],
    scratch: &mut [Float; 2],
) {
    let [s, t] = scratch;
    let am = sector.abs_m();
    let len = i / 2 + 1;
    debug_assert_eq!(out.len(), len);
    for x in out.iter_mut() {
        x.assign(0);
    }
    if i == 0 {
        return;
    }
    for k in (0..=(i - 1) / 2).rev() {
        s.assign(0);
        if k >= 1 && k - 1 < f4.len() {
            *s += &f4[k - 1] * &w.g4;
        }
        if k < f2.len() {
            *s += &f2[k] * &w.cc;
        }
        if k < f1.len() {
            *s -= &f1[k] * &w.two;
        }
        if k + 1 < len {
            t.assign(&out[k + 1] * upper_weight(am, k) as f64);
            *s -= &*t;
        }
        *s /= diag_weight(sector, i, k) as f64;
        out[k].assign(&*s);
    }
}

/// Add `scale · H_i(t)` to an even row in place.
pub(crate) fn add_homogeneous(sector: SectorLabel, i: usize, scale: &Float, row: &mut [Float]) {
    debug_assert!(i.is_multiple_of(2));
    let am = sector.abs_m();
    let mut h = Float::with_val(scale.prec(), scale);
    for (k, x) in row.iter_mut().enumerate().take(i / 2 + 1) {
        *x += &h;
        if 2 * k == i {
            break;
        }
        h *= diag_weight(sector, i, k) as f64;
        h /= upper_weight(am, k) as f64;
        h = -h;
    }
}

/// Exact angular polynomial H_i as coefficients of t^0..t^i.
pub fn homogeneous_polynomial(sector: SectorLabel, i: usize) -> Result<Vec<Rational>, ZeemanError> {
    if !i.is_multiple_of(2) {
        return Err(ZeemanError::Parity { i });
    }
    let am = sector.abs_m();
    let mut out = vec![Rational::new(); i + 1];
    let mut h = Rational::from(1);
    for k in 0..=i / 2 {
        out[2 * k].assign(&h);
        if 2 * k == i {
            break;
        }
        h *= Rational::from((diag_weight(sector, i, k), upper_weight(am, k)));
        h = -h;
    }
    Ok(out)
}

/// Lower rows feeding row i: coefficients of f_{i-1}, f_{i-2}, f_{i-4} in
/// powers t^0, t^1, …; missing rows are empty.
#[derive(Debug, Clone, Copy, Default)]
pub struct LowerRows<'a> {
    pub f1: &'a [Float],
    pub f2: &'a [Float],
    pub f4: &'a [Float],
}

fn compress(row: &[Float]) -> Vec<Float> {
    row.iter().step_by(2).cloned().collect()
}

/// Particular integral a_{i,0..i} (odd powers zero) for row `i` given the
/// full lower rows.
pub fn particular_row(
    sector: SectorLabel,
    gamma: &Float,
    e_b: &Float,
    lower: LowerRows<'_>,
    i: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Float>, ZeemanError> {
    if i == 0 {
        return Err(ZeemanError::Index { i });
    }
    let w = SourceWeights::new(sector, gamma, e_b, None, ctx);
    let (f1, f2, f4) = (compress(lower.f1), compress(lower.f2), compress(lower.f4));
    let mut row = vec![ctx.zero(); i / 2 + 1];
    let mut scratch = [ctx.zero(), ctx.zero()];
    solve_row(sector, &w, i, &f1, &f2, &f4, &mut row, &mut scratch);
    let mut full = vec![ctx.zero(); i + 1];
    for (k, v) in row.into_iter().enumerate() {
        full[2 * k] = v;
    }
    Ok(full)
}
