//! Eigenvalue search: scan the boundary determinant downward in E_b, bisect
//! the requested sign change, fix the constants, and re-solve under refined
//! truncation to measure self-consistency.

use std::fmt;

use rug::ops::PowAssign;
use rug::Float;

use super::boundary::collocation_system;
use super::{build_table, CoefficientTable, SectorLabel, SolveControls, ZeemanError};
use crate::numerics::{bisect, linear_solve, lu_logdet, scan_points, LogDet, PrecisionContext};

/// Largest refinement delta (Hartree) accepted as converged unless
/// `10 · eb_tol` is larger.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-8;

/// Digits kept in reserve above the cancellation estimate.
const DIGIT_MARGIN: f64 = 25.0;
/// Warning threshold: warn when fewer than this many digits survive.
const WARN_MARGIN: f64 = 20.0;
/// The matching sphere is kept inside e^{-κr} ≈ e^{-DECAY_LENGTHS}.
const DECAY_LENGTHS: f64 = 18.0;
/// Cap on γR²/4, the transverse growth exponent of generic solutions.
const FIELD_EXPONENT: f64 = 25.0;

/// Range and sampling of the E_b scan. Samples run downward from `hi`;
/// `lo` itself is excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanWindow {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl ScanWindow {
    /// (0, 1 + ln²(1+γ)/2] in 400 steps. The cap sits above the most bound
    /// level at every field strength.
    pub fn default_for(gamma: f64) -> Self {
        let ln = (1.0 + gamma.max(0.0)).ln();
        Self { lo: 0.0, hi: 1.0 + 0.5 * ln * ln, steps: 400 }
    }

    fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let h = (self.hi - self.lo) / self.steps as f64;
        (0..self.steps).map(move |k| self.hi - h * k as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    /// Sign-change brackets in the order found (decreasing E_b).
    pub brackets: Vec<(f64, f64)>,
}

/// Change of E_b under each refinement; `None` when the refined solve found
/// no root near the original one.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub d_imax: Option<f64>,
    pub d_rmatch: Option<f64>,
    pub d_nconst: Option<f64>,
    pub tolerance: f64,
}

impl Convergence {
    fn unrefined(tolerance: f64) -> Self {
        Self { d_imax: None, d_rmatch: None, d_nconst: None, tolerance }
    }

    /// Largest delta, or `None` if any refinement is missing.
    pub fn max_delta(&self) -> Option<f64> {
        let ds = [self.d_imax?, self.d_rmatch?, self.d_nconst?];
        Some(ds.into_iter().fold(0.0, f64::max))
    }

    pub fn converged(&self) -> bool {
        self.max_delta().is_some_and(|d| d <= self.tolerance)
    }
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |d: Option<f64>| d.map_or_else(|| "none".to_string(), |v| format!("{v:.3e}"));
        write!(
            f,
            "dE_b(i_max x2) = {}, dE_b(r_match x2) = {}, dE_b(P+2) = {}, tolerance {:.1e}",
            show(self.d_imax),
            show(self.d_rmatch),
            show(self.d_nconst),
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Too few digits survive cancellation in the series sums.
    Cancellation { lost_digits: f64, digits: u32 },
    /// ψ(0) is negligible, so constants are normalised by the largest one.
    SmallOrigin,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Cancellation { lost_digits, digits } => {
                write!(f, "cancellation: {lost_digits:.1} of {digits} digits lost in the series sums; raise --digits")
            }
            Warning::SmallOrigin => write!(f, "psi(0) is negligible; constants normalised by the largest one"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub table: CoefficientTable,
    pub controls: SolveControls,
    pub total_energy: Float,
    pub residual_logdet: LogDet,
    pub convergence: Convergence,
    pub scan: ScanReport,
    pub lost_digits: f64,
    pub warnings: Vec<Warning>,
}

impl SeriesSolution {
    pub fn e_b(&self) -> &Float {
        &self.table.e_b
    }

    pub fn sector(&self) -> SectorLabel {
        self.table.sector
    }
}

/// E = γ(|m| + m + 1)/2 − E_b.
pub fn total_energy_from(sector: SectorLabel, gamma: &Float, e_b: &Float) -> Float {
    let mut e = Float::with_val(e_b.prec(), gamma * (sector.abs_m() as i64 + i64::from(sector.m) + 1));
    e /= 2u32;
    e -= e_b;
    e
}

pub fn total_energy(solution: &SeriesSolution) -> Float {
    total_energy_from(solution.sector(), &solution.table.gamma, solution.e_b())
}

fn even_ceil(x: f64) -> usize {
    let n = x.ceil().max(0.0) as usize;
    n + n % 2
}

/// Truncation sized for a matching radius `r`, with `kappa_top` the largest
/// decay constant √(2E_b) the solve will meet.
fn sized_controls(gamma: f64, r: f64, kappa_top: f64, digits_floor: u32, eb_tol: f64) -> SolveControls {
    let field = gamma * r * r;
    let n_constants = (0.1 * field).ceil() as usize + 3;
    let i_max = even_ceil(std::f64::consts::E * kappa_top * r + field + 30.0).max(2 * n_constants + 2);
    let exponent = kappa_top * r + field / 4.0;
    let digits = ((exponent / std::f64::consts::LN_10 + DIGIT_MARGIN).ceil() as u32).max(digits_floor);
    SolveControls { i_max, n_constants, r_match: r, digits, eb_tol }
}

/// Controls sized for the given sector, field and state.
pub fn default_controls(sector: SectorLabel, gamma: f64, state_index: usize) -> SolveControls {
    let n = f64::from(sector.abs_m() + u32::from(sector.nu)) + state_index.max(1) as f64;
    let ln = (1.0 + gamma).ln();
    let e_guess = 0.5 / (n * n) + 0.2 * ln * ln;
    let r_decay = DECAY_LENGTHS / (2.0 * e_guess).sqrt();
    let r_field = if gamma > 0.0 { (4.0 * FIELD_EXPONENT / gamma).sqrt() } else { f64::INFINITY };
    let r = (r_decay.min(r_field) * 4.0).round() / 4.0;
    let top = ScanWindow::default_for(gamma).hi;
    sized_controls(gamma, r, (2.0 * top).sqrt(), 50, 1e-12)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub window: ScanWindow,
    pub refine: bool,
    pub convergence_tol: f64,
}

impl SolveOptions {
    pub fn default_for(gamma: f64) -> Self {
        Self { window: ScanWindow::default_for(gamma), refine: true, convergence_tol: DEFAULT_CONVERGENCE_TOL }
    }
}

fn det_sign(sector: SectorLabel, gamma: &Float, e_b: &Float, controls: &SolveControls, ctx: &PrecisionContext) -> i8 {
    collocation_system(sector, gamma, e_b, controls)
        .ok()
        .and_then(|c| lu_logdet(&c.matrix, ctx).ok())
        .map_or(0, |d| d.sign)
}

fn bisect_det(
    sector: SectorLabel,
    gamma: &Float,
    (lo, hi): (f64, f64),
    tol: f64,
    controls: &SolveControls,
    ctx: &PrecisionContext,
) -> Result<Float, ZeemanError> {
    let tol = ctx.float(tol);
    let b =
        bisect(|x| ctx.float(det_sign(sector, gamma, x, controls, ctx)), &ctx.float(lo), &ctx.float(hi), &tol, ctx)?;
    Ok(b.root)
}

/// Root of the refined determinant closest to `e0`, searched in widening
/// brackets and located to `tol`.
fn relocate(sector: SectorLabel, gamma: &Float, e0: f64, tol: f64, controls: &SolveControls) -> Option<f64> {
    let ctx = controls.validate().ok()?;
    let mut w = (1e-7 * e0.abs().max(1.0)).max(100.0 * tol);
    while w < 0.05 * e0.abs().max(1.0) {
        let (lo, hi) = ((e0 - w).max(0.5 * e0), e0 + w);
        let sl = det_sign(sector, gamma, &ctx.float(lo), controls, &ctx);
        let sh = det_sign(sector, gamma, &ctx.float(hi), controls, &ctx);
        if sl != 0 && sh != 0 && sl != sh {
            return bisect_det(sector, gamma, (lo, hi), tol, controls, &ctx).ok().map(|r| r.to_f64());
        }
        w *= 10.0;
    }
    None
}

/// Solve with the default scan window and full refinement.
pub fn solve_binding_energy(
    sector: SectorLabel,
    gamma: &Float,
    state_index: usize,
    controls: &SolveControls,
) -> Result<SeriesSolution, ZeemanError> {
    solve_in_window(sector, gamma, state_index, controls, &SolveOptions::default_for(gamma.to_f64()))
}

/// Solve for the `state_index`-th eigenvalue counted downward from the top
/// of `options.window`.
pub fn solve_in_window(
    sector: SectorLabel,
    gamma: &Float,
    state_index: usize,
    controls: &SolveControls,
    options: &SolveOptions,
) -> Result<SeriesSolution, ZeemanError> {
    let ctx = controls.validate()?;
    if state_index == 0 {
        return Err(ZeemanError::Argument("state index starts at 1".into()));
    }
    if gamma.is_sign_negative() && !gamma.is_zero() || !gamma.is_finite() {
        return Err(ZeemanError::Argument(format!("gamma must be a finite nonnegative number, got {gamma}")));
    }
    let window = &options.window;
    if window.lo.is_nan() || window.hi.is_nan() || window.lo >= window.hi || window.steps < 2 {
        return Err(ZeemanError::Argument("empty scan window".into()));
    }
    let gamma = ctx.float(gamma);

    let brackets = scan_points(
        |x| f64::from(det_sign(sector, &gamma, &ctx.float(x), controls, &ctx)),
        window.samples(),
        Some(state_index),
    );
    let scan = ScanReport { lo: window.lo, hi: window.hi, samples: window.steps, brackets };
    let Some(&(lo, hi)) = scan.brackets.get(state_index - 1) else {
        return Err(ZeemanError::StateNotFound { wanted: state_index, scan });
    };
    let e_b = bisect_det(sector, &gamma, (lo, hi), controls.eb_tol, controls, &ctx)?;

    let col = collocation_system(sector, &gamma, &e_b, controls)?;
    let residual_logdet = lu_logdet(&col.matrix, &ctx)?;
    let mut warnings = Vec::new();
    if col.lost_digits > f64::from(ctx.digits()) - WARN_MARGIN {
        warnings.push(Warning::Cancellation { lost_digits: col.lost_digits, digits: ctx.digits() });
    }
    let constants = fix_constants(&col.matrix, controls, &ctx, &mut warnings)?;
    let table = build_table(sector, &gamma, &e_b, &constants, controls.i_max, &ctx);
    let total_energy = total_energy_from(sector, &gamma, &e_b);

    let tolerance = options.convergence_tol.max(10.0 * controls.eb_tol);
    let convergence = if options.refine {
        refine(sector, &gamma, e_b.to_f64(), controls, tolerance)
    } else {
        Convergence::unrefined(tolerance)
    };
    let solution = SeriesSolution {
        table,
        controls: controls.clone(),
        total_energy,
        residual_logdet,
        convergence,
        scan,
        lost_digits: col.lost_digits,
        warnings,
    };
    if options.refine && !solution.convergence.converged() {
        return Err(ZeemanError::NotConverged { solution: Box::new(solution) });
    }
    Ok(solution)
}

/// Null vector of the collocation matrix by one step of inverse iteration,
/// converted to C_{2p} and normalised to C_0 = 1 when ψ(0) is not negligible.
fn fix_constants(
    matrix: &crate::numerics::HPMatrix,
    controls: &SolveControls,
    ctx: &PrecisionContext,
    warnings: &mut Vec<Warning>,
) -> Result<Vec<Float>, ZeemanError> {
    let n = matrix.rows();
    let ones = vec![ctx.float(1); n];
    let x = linear_solve(matrix, &ones, ctx)?;
    let largest = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp_abs(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let ratio = Float::with_val(ctx.bits(), &x[0] / &x[largest]).abs();
    let pivot = if ratio > 1e-6 {
        0
    } else {
        warnings.push(Warning::SmallOrigin);
        largest
    };
    let radius = ctx.float(controls.r_match);
    let mut out = Vec::with_capacity(n);
    let mut scale = ctx.float(1);
    for (p, xp) in x.iter().enumerate() {
        let mut c = ctx.float(xp / &x[pivot]);
        c /= &scale;
        out.push(c);
        if p + 1 < n {
            scale *= &radius;
            scale *= &radius;
        }
    }
    if pivot != 0 {
        let mut r = ctx.float(&radius);
        r.pow_assign(2 * pivot as u32);
        for c in &mut out {
            *c *= &r;
        }
    }
    Ok(out)
}

fn refine(sector: SectorLabel, gamma: &Float, e0: f64, controls: &SolveControls, tolerance: f64) -> Convergence {
    // Deltas only need resolving well below the acceptance tolerance.
    let tol = (0.01 * tolerance).max(controls.eb_tol);
    let delta = |c: &SolveControls| relocate(sector, gamma, e0, tol, c).map(|e| (e - e0).abs());

    let doubled_imax = SolveControls { i_max: 2 * controls.i_max, ..controls.clone() };

    let kappa = (2.0 * e0.max(1e-6)).sqrt() * 1.2;
    let wide = sized_controls(gamma.to_f64(), 2.0 * controls.r_match, kappa, controls.digits, controls.eb_tol);
    let doubled_radius = SolveControls {
        n_constants: wide.n_constants.max(controls.n_constants),
        i_max: wide.i_max.max(controls.i_max),
        ..wide
    };

    let more_constants = SolveControls {
        n_constants: controls.n_constants + 2,
        i_max: controls.i_max.max(2 * controls.n_constants + 6),
        ..controls.clone()
    };

    Convergence {
        d_imax: delta(&doubled_imax),
        d_rmatch: delta(&doubled_radius),
        d_nconst: delta(&more_constants),
        tolerance,
    }
}
