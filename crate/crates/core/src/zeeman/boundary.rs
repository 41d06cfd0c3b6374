//! Reduction of the condition ψ → 0 at infinity to one equation in E_b:
//! the truncated series is required to vanish at P+1 angles on the sphere
//! r = r_match, and the determinant of that homogeneous system in
//! (C_0, …, C_{2P}) must vanish.
//!
//! Every A_{i,2k} is linear in the constants, so the system is assembled from
//! one basis solution per constant. Each basis is only ever needed on the
//! sphere, so rows are carried pre-multiplied by R^i and summed column-wise:
//! ψ_p(R, s) = Σ_k T_k s^k with T_k = Σ_i A_{i,2k} R^i. Basis p is seeded as
//! C_{2p} = R^{-2p}, which rescales matrix columns by positive factors and
//! leaves the sign of the determinant untouched.

use rug::{Assign, Float};

use super::series::{add_homogeneous, solve_row, SourceWeights};
use super::{SectorLabel, SolveControls, ZeemanError};
use crate::numerics::{lu_logdet, HPMatrix, LogDet, PrecisionContext};

const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Chebyshev nodes for s = sin²θ, all inside (0, 1).
pub fn collocation_nodes(count: usize, ctx: &PrecisionContext) -> Vec<Float> {
    let pi = Float::with_val(ctx.bits(), rug::float::Constant::Pi);
    (0..count)
        .map(|q| {
            let mut x = Float::with_val(ctx.bits(), &pi * (2 * q + 1) as u32);
            x /= (2 * count) as u32;
            x.cos_mut();
            x += 1u32;
            x /= 2u32;
            x
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Collocation {
    pub nodes: Vec<Float>,
    /// `matrix[q][p] = R^{-2p} ψ_p(R, s_q)`.
    pub matrix: HPMatrix,
    /// Decimal digits cancelled between the largest term R^i A_{i,2k} and
    /// the largest basis value on the sphere, maximised over the basis.
    pub lost_digits: f64,
}

fn exponent(x: &Float) -> Option<i32> {
    if x.is_zero() {
        None
    } else {
        x.get_exp()
    }
}

pub fn collocation_system(
    sector: SectorLabel,
    gamma: &Float,
    e_b: &Float,
    controls: &SolveControls,
) -> Result<Collocation, ZeemanError> {
    let ctx = controls.validate()?;
    let n = controls.n_constants + 1;
    let i_max = controls.i_max;
    let nodes = collocation_nodes(n, &ctx);
    for w in nodes.windows(2) {
        if w[0] == w[1] {
            return Err(ZeemanError::Controls("duplicate collocation angles".into()));
        }
    }
    let radius = ctx.float(controls.r_match);
    let weights = SourceWeights::new(sector, &ctx.float(gamma), &ctx.float(e_b), Some(&radius), &ctx);
    let one = ctx.float(1);
    let width = i_max / 2 + 1;
    let mut rows: [Vec<Float>; 5] = std::array::from_fn(|_| vec![ctx.zero(); width]);
    let mut sums = vec![ctx.zero(); width];
    let mut scratch = [ctx.zero(), ctx.zero()];
    let mut matrix = HPMatrix::zeros(n, n, &ctx);
    let mut value = ctx.zero();
    let mut lost_digits = 0.0f64;

    for p in 0..n {
        let start = 2 * p;
        for x in &mut sums {
            x.assign(0);
        }
        let mut max_exp: Option<i32> = None;
        for i in start..=i_max {
            let len = i / 2 + 1;
            let mut cur = std::mem::take(&mut rows[i % 5]);
            let lower = |back: usize| -> &[Float] {
                if i >= start + back {
                    let j = i - back;
                    &rows[j % 5][..j / 2 + 1]
                } else {
                    &[]
                }
            };
            solve_row(sector, &weights, i, lower(1), lower(2), lower(4), &mut cur[..len], &mut scratch);
            if i == start {
                add_homogeneous(sector, i, &one, &mut cur[..len]);
            }
            for (sum, x) in sums.iter_mut().zip(&cur[..len]) {
                *sum += x;
                if let Some(e) = exponent(x) {
                    max_exp = Some(max_exp.map_or(e, |m| m.max(e)));
                }
            }
            rows[i % 5] = cur;
        }
        let mut best: Option<i32> = None;
        for (q, s) in nodes.iter().enumerate() {
            value.assign(0);
            for t in sums.iter().rev() {
                value *= s;
                value += t;
            }
            if let Some(e) = exponent(&value) {
                best = Some(best.map_or(e, |b| b.max(e)));
            }
            matrix.get_mut(q, p).assign(&value);
        }
        let lost = match (max_exp, best) {
            (Some(t), Some(v)) => f64::from(t - v) * LOG10_2,
            (Some(_), None) => f64::from(ctx.digits()),
            _ => 0.0,
        };
        lost_digits = lost_digits.max(lost);
    }
    Ok(Collocation { nodes, matrix, lost_digits })
}

/// Determinant whose zeros in E_b are the eigenvalues of the sector.
pub fn boundary_determinant(
    sector: SectorLabel,
    gamma: &Float,
    e_b: &Float,
    controls: &SolveControls,
) -> Result<LogDet, ZeemanError> {
    let ctx = controls.validate()?;
    let col = collocation_system(sector, gamma, e_b, controls)?;
    Ok(lu_logdet(&col.matrix, &ctx)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;
    use crate::zeeman::{build_table, evaluate_psi};

    #[test]
    fn nodes_are_distinct_and_interior() {
        let ctx = make_context(30).unwrap();
        for n in 1..40 {
            let nodes = collocation_nodes(n, &ctx);
            assert_eq!(nodes.len(), n);
            for w in nodes.windows(2) {
                assert!(w[0] > w[1]);
            }
            assert!(nodes.iter().all(|s| *s > 0 && *s < 1));
        }
    }

    #[test]
    fn column_sums_match_direct_evaluation() {
        let controls = SolveControls { i_max: 40, n_constants: 2, r_match: 3.0, digits: 40, eb_tol: 1e-12 };
        let ctx = controls.validate().unwrap();
        let sector = SectorLabel::new(1, 1).unwrap();
        let (g, eb) = (ctx.float(0.7), ctx.float(0.4));
        let col = collocation_system(sector, &g, &eb, &controls).unwrap();
        for p in 0..=2usize {
            let mut c = vec![ctx.zero(); 3];
            c[p] = ctx.float(3.0f64.powi(-2 * p as i32));
            let table = build_table(sector, &g, &eb, &c, 40, &ctx);
            for (q, s) in col.nodes.iter().enumerate() {
                let theta = s.to_f64().sqrt().asin();
                let direct = evaluate_psi(&table, 3.0, theta);
                let diff = Float::with_val(ctx.bits(), &direct - col.matrix.get(q, p)).abs();
                assert!(diff < 1e-12, "p {p} q {q}: {diff}");
            }
        }
    }

    #[test]
    fn field_free_ground_state_bracket() {
        let controls = SolveControls { i_max: 80, n_constants: 1, r_match: 20.0, digits: 40, eb_tol: 1e-12 };
        let ctx = controls.validate().unwrap();
        let s = SectorLabel::new(0, 0).unwrap();
        let lo = boundary_determinant(s, &ctx.zero(), &ctx.float(0.45), &controls).unwrap();
        let hi = boundary_determinant(s, &ctx.zero(), &ctx.float(0.55), &controls).unwrap();
        assert!(lo.sign != 0 && hi.sign != 0);
        assert_ne!(lo.sign, hi.sign);
    }

    #[test]
    fn determinant_is_reproducible() {
        let controls = SolveControls { i_max: 60, n_constants: 4, r_match: 6.0, digits: 50, eb_tol: 1e-12 };
        let ctx = controls.validate().unwrap();
        let s = SectorLabel::new(0, 0).unwrap();
        let a = boundary_determinant(s, &ctx.float(1), &ctx.float(0.8), &controls).unwrap();
        let b = boundary_determinant(s, &ctx.float(1), &ctx.float(0.8), &controls).unwrap();
        assert_eq!(a.sign, b.sign);
        assert_eq!(a.log_magnitude.to_string_radix(16, None), b.log_magnitude.to_string_radix(16, None));
    }
}
