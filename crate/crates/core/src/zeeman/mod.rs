//! Hydrogen in a uniform field B ∥ ẑ. In a sector (m, ν) the wavefunction is
//!
//! Ψ = e^{imφ} (r sin θ)^{|m|} (r cos θ)^ν ψ(r, θ),   ψ = Σ_i f_i(sin θ) r^i,
//!
//! with each f_i an even polynomial of degree ≤ i fixed by a three-term row
//! recurrence plus, for even i, a free multiple C_i of the angular
//! polynomial H_i. Energies are in Hartree, lengths in Bohr radii, and the
//! field is γ = B/B₀.

mod boundary;
mod density;
mod series;
mod solve;

pub use boundary::{boundary_determinant, collocation_nodes, collocation_system, Collocation};
pub use density::{density_grid, transverse_moment, DensityGrid};
pub use series::{homogeneous_polynomial, particular_row, LowerRows};
pub use solve::{
    default_controls, solve_binding_energy, solve_in_window, total_energy, total_energy_from, Convergence, ScanReport,
    ScanWindow, SeriesSolution, SolveOptions, Warning, DEFAULT_CONVERGENCE_TOL,
};

use rug::ops::PowAssign;
use rug::{Assign, Float};
use thiserror::Error;

use crate::numerics::{make_context, NumericsError, PrecisionContext};
use series::{add_homogeneous, solve_row, SourceWeights};

#[derive(Debug, Error)]
pub enum ZeemanError {
    #[error("invalid sector: {0}")]
    Sector(String),
    #[error("invalid controls: {0}")]
    Controls(String),
    #[error("homogeneous polynomials exist only for even i, got i = {i}")]
    Parity { i: usize },
    #[error("particular rows start at i = 1, got i = {i}")]
    Index { i: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("state {wanted} not found: {} sign changes in E_b ∈ [{:.6}, {:.6}] ({} samples)", .scan.brackets.len(), .scan.lo, .scan.hi, .scan.samples)]
    StateNotFound { wanted: usize, scan: ScanReport },
    #[error("refinement did not converge: {}", .solution.convergence)]
    NotConverged { solution: Box<SeriesSolution> },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Conserved labels of a symmetry sector: magnetic quantum number and the
/// z-parity exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorLabel {
    pub m: i32,
    pub nu: u8,
}

impl SectorLabel {
    pub fn new(m: i32, nu: u8) -> Result<Self, ZeemanError> {
        if nu > 1 {
            return Err(ZeemanError::Sector(format!("nu must be 0 or 1, got {nu}")));
        }
        if m.unsigned_abs() > 1000 {
            return Err(ZeemanError::Sector(format!("|m| = {} is out of range", m.unsigned_abs())));
        }
        Ok(Self { m, nu })
    }

    pub fn abs_m(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// 2(|m| + ν) + 1, the offset in the diagonal recurrence weight.
    pub(crate) fn c2(&self) -> u32 {
        2 * (self.abs_m() + u32::from(self.nu)) + 1
    }
}

/// Truncation and precision controls for one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveControls {
    /// Highest power of r kept.
    pub i_max: usize,
    /// P: free constants C_2..C_{2P} (C_0 is the normalization).
    pub n_constants: usize,
    /// Radius of the collocation sphere.
    pub r_match: f64,
    pub digits: u32,
    /// Bisection tolerance on E_b.
    pub eb_tol: f64,
}

impl SolveControls {
    pub fn validate(&self) -> Result<PrecisionContext, ZeemanError> {
        if self.n_constants == 0 {
            return Err(ZeemanError::Controls("n_constants must be positive".into()));
        }
        if self.i_max < 2 * self.n_constants + 2 {
            return Err(ZeemanError::Controls(format!(
                "i_max = {} is below 2·P + 2 = {}",
                self.i_max,
                2 * self.n_constants + 2
            )));
        }
        if !(self.r_match.is_finite() && self.r_match > 0.0) {
            return Err(ZeemanError::Controls(format!("r_match must be positive, got {}", self.r_match)));
        }
        if !(self.eb_tol.is_finite() && self.eb_tol > 0.0) {
            return Err(ZeemanError::Controls(format!("eb_tol must be positive, got {}", self.eb_tol)));
        }
        Ok(make_context(self.digits)?)
    }
}

/// Triangular table `a[i][k] = A_{i,2k}` of ψ = Σ_{i,k} A_{i,2k} r^i sin^{2k}θ.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub sector: SectorLabel,
    pub gamma: Float,
    pub e_b: Float,
    /// `constants[p] = C_{2p}`.
    pub constants: Vec<Float>,
    pub a: Vec<Vec<Float>>,
}

impl CoefficientTable {
    pub fn i_max(&self) -> usize {
        self.a.len() - 1
    }

    pub fn precision(&self) -> u32 {
        self.e_b.prec()
    }
}

/// Rows 0..=i_max with A_{i,2k} = a_{i,2k} + C_i h_{i,2k} for even i ≤ 2P.
pub fn build_table(
    sector: SectorLabel,
    gamma: &Float,
    e_b: &Float,
    constants: &[Float],
    i_max: usize,
    ctx: &PrecisionContext,
) -> CoefficientTable {
    let w = SourceWeights::new(sector, gamma, e_b, None, ctx);
    let mut a: Vec<Vec<Float>> = Vec::with_capacity(i_max + 1);
    let mut scratch = [ctx.zero(), ctx.zero()];
    let empty: &[Float] = &[];
    for i in 0..=i_max {
        let mut row = vec![ctx.zero(); i / 2 + 1];
        let f1 = if i >= 1 { &a[i - 1][..] } else { empty };
        let f2 = if i >= 2 { &a[i - 2][..] } else { empty };
        let f4 = if i >= 4 { &a[i - 4][..] } else { empty };
        solve_row(sector, &w, i, f1, f2, f4, &mut row, &mut scratch);
        if i % 2 == 0 {
            if let Some(c) = constants.get(i / 2) {
                if !c.is_zero() {
                    add_homogeneous(sector, i, &ctx.float(c), &mut row);
                }
            }
        }
        a.push(row);
    }
    CoefficientTable {
        sector,
        gamma: ctx.float(gamma),
        e_b: ctx.float(e_b),
        constants: constants.iter().map(|c| ctx.float(c)).collect(),
        a,
    }
}

/// ψ(r, θ) by Horner in r with an inner Horner in sin²θ.
pub fn evaluate_psi(table: &CoefficientTable, r: f64, theta: f64) -> Float {
    let bits = table.precision();
    let rr = Float::with_val(bits, r);
    let mut s = Float::with_val(bits, theta);
    s.sin_mut();
    s.square_mut();
    let mut acc = Float::new(bits);
    let mut row_val = Float::new(bits);
    for row in table.a.iter().rev() {
        row_val.assign(0);
        for c in row.iter().rev() {
            row_val *= &s;
            row_val += c;
        }
        acc *= &rr;
        acc += &row_val;
    }
    acc
}

/// A complex value as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude {
    pub re: Float,
    pub im: Float,
}

impl Amplitude {
    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.re.prec(), self.re.square_ref());
        n += Float::with_val(self.im.prec(), self.im.square_ref());
        n
    }
}

/// Ψ(r, θ, φ) including the e^{imφ} (r sin θ)^{|m|} (r cos θ)^ν prefactor.
pub fn evaluate_full_wavefunction(table: &CoefficientTable, r: f64, theta: f64, phi: f64) -> Amplitude {
    let bits = table.precision();
    let psi = evaluate_psi(table, r, theta);
    let mut pre = Float::with_val(bits, theta);
    pre.sin_mut();
    pre *= r;
    pre.pow_assign(table.sector.abs_m());
    if table.sector.nu == 1 {
        let mut z = Float::with_val(bits, theta);
        z.cos_mut();
        z *= r;
        pre *= &z;
    }
    pre *= &psi;
    let mut angle = Float::with_val(bits, phi);
    angle *= table.sector.m;
    let (sin, cos) = angle.sin_cos(Float::new(bits));
    Amplitude { re: Float::with_val(bits, &pre * &cos), im: Float::with_val(bits, &pre * &sin) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        make_context(d).unwrap()
    }

    fn ground_table(digits: u32, i_max: usize) -> CoefficientTable {
        let c = ctx(digits);
        build_table(SectorLabel::new(0, 0).unwrap(), &c.zero(), &c.float(0.5), &[c.float(1)], i_max, &c)
    }

    #[test]
    fn sector_validation() {
        assert!(SectorLabel::new(0, 2).is_err());
        assert_eq!(SectorLabel::new(-3, 1).unwrap().c2(), 9);
    }

    #[test]
    fn controls_validation() {
        let ok = SolveControls { i_max: 20, n_constants: 2, r_match: 10.0, digits: 30, eb_tol: 1e-12 };
        assert!(ok.validate().is_ok());
        assert!(SolveControls { i_max: 5, ..ok.clone() }.validate().is_err());
        assert!(SolveControls { r_match: 0.0, ..ok.clone() }.validate().is_err());
        assert!(SolveControls { eb_tol: -1.0, ..ok.clone() }.validate().is_err());
        assert!(SolveControls { digits: 10, ..ok.clone() }.validate().is_err());
        assert!(SolveControls { n_constants: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn zero_order_table() {
        let c = ctx(20);
        let t = build_table(SectorLabel::new(1, 0).unwrap(), &c.float(3), &c.float(0.7), &[c.float(2)], 0, &c);
        assert_eq!(t.a, vec![vec![c.float(2)]]);
    }

    #[test]
    fn field_free_ground_state_is_exponential() {
        let t = ground_table(40, 60);
        let v = evaluate_psi(&t, 1.0, 0.7);
        let want = Float::with_val(t.precision(), -1).exp();
        assert!(Float::with_val(t.precision(), &v - &want).abs() < make_context(40).unwrap().pow10(2 - 40));
        assert_eq!(evaluate_psi(&t, 0.0, 1.3), 1);
    }

    #[test]
    fn axis_value_ignores_angular_terms() {
        let c = ctx(30);
        let s = SectorLabel::new(0, 0).unwrap();
        let t1 = build_table(s, &c.float(1), &c.float(0.8), &[c.float(1), c.float(0.3)], 12, &c);
        let mut t2 = t1.clone();
        for row in &mut t2.a {
            for v in row.iter_mut().skip(1) {
                v.assign(17);
            }
        }
        assert_eq!(evaluate_psi(&t1, 0.9, 0.0), evaluate_psi(&t2, 0.9, 0.0));
    }

    #[test]
    fn full_wavefunction_prefactors() {
        let c = ctx(30);
        let t = ground_table(30, 20);
        let a = evaluate_full_wavefunction(&t, 0.8, 0.4, 1.1);
        assert_eq!(a.re, evaluate_psi(&t, 0.8, 0.4));
        assert!(a.im.is_zero());

        let odd = build_table(SectorLabel::new(0, 1).unwrap(), &c.float(1), &c.float(0.3), &[c.float(1)], 20, &c);
        let v = evaluate_full_wavefunction(&odd, 1.2, std::f64::consts::FRAC_PI_2, 0.0);
        assert!(v.norm_sqr() < c.pow10(-25));

        let neg = build_table(SectorLabel::new(-1, 0).unwrap(), &c.float(1), &c.float(0.3), &[c.float(1)], 20, &c);
        let v = evaluate_full_wavefunction(&neg, 1.2, 0.0, 0.5);
        assert!(v.norm_sqr().is_zero());
    }
}
