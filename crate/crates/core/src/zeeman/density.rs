//! |Ψ|² on a uniform cylindrical (ρ, z) grid.
//!
//! The truncated series only meets the boundary condition at the collocation
//! angles, so near the matching sphere it picks up a small multiple of the
//! solution that grows outward (like e^{γρ²/4} across the field). Along each
//! direction the density is therefore followed inward from the sphere while
//! it keeps falling; everything beyond the first local minimum is dropped.

use rug::Float;

use super::{evaluate_psi, CoefficientTable, SeriesSolution, ZeemanError};

/// Directions sampled for the trust radius, spread over θ ∈ [0, π/2].
const RAYS: usize = 33;
/// Radial samples per direction.
const RAY_SAMPLES: usize = 160;
/// Rays on either side consulted for a direction's limit.
const NEIGHBOURS: usize = 2;

/// Density samples on ρ ∈ [0, rho_max], z ∈ [0, z_max]. The density is even
/// in z, so the lower half-space is implied and included in the norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    /// `values[l * rho.len() + j]` at (rho[j], z[l]).
    pub values: Vec<f64>,
    /// 2π ∫|Ψ|² ρ dρ dz over the full grid after normalisation.
    pub norm_integral: f64,
    /// Samples set to zero as lying outside the trusted region.
    pub clipped: usize,
}

impl DensityGrid {
    pub fn at(&self, j: usize, l: usize) -> f64 {
        self.values[l * self.rho.len() + j]
    }
}

fn axis(max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| max * k as f64 / (n - 1) as f64).collect()
}

fn trapezoid(n: usize, h: f64) -> Vec<f64> {
    (0..n).map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h }).collect()
}

fn integral(values: &[f64], rho: &[f64], z: &[f64], moment: u32) -> f64 {
    let wr = trapezoid(rho.len(), rho[1] - rho[0]);
    let wz = trapezoid(z.len(), z[1] - z[0]);
    let mut acc = 0.0;
    for (l, wzl) in wz.iter().enumerate() {
        for (j, wrj) in wr.iter().enumerate() {
            acc += wzl * wrj * rho[j].powi(moment as i32 + 1) * values[l * rho.len() + j];
        }
    }
    4.0 * std::f64::consts::PI * acc
}

/// |Ψ|² at (ρ, z), unnormalised, at the table's precision.
fn raw_density(table: &CoefficientTable, rho: f64, z: f64) -> Float {
    let (am, nu) = (table.sector.abs_m() as i32, i32::from(table.sector.nu));
    let mut v = evaluate_psi(table, rho.hypot(z), rho.atan2(z));
    v *= rho.powi(am) * z.powi(nu);
    v.square_mut();
    v
}

/// Radius along θ beyond which the density rises toward the sphere.
fn trust_radius(table: &CoefficientTable, r_match: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let at = |k: usize| {
        let r = r_match * k as f64 / RAY_SAMPLES as f64;
        raw_density(table, r * s, r * c)
    };
    let mut k = RAY_SAMPLES;
    let mut outer = at(k);
    while k > 1 {
        let inner = at(k - 1);
        if inner <= outer {
            k -= 1;
            outer = inner;
        } else {
            break;
        }
    }
    if k == RAY_SAMPLES {
        r_match
    } else {
        r_match * k as f64 / RAY_SAMPLES as f64
    }
}

/// Normalised |Ψ|² samples, zero outside the matching sphere and beyond the
/// trust radius of each direction.
pub fn density_grid(
    solution: &SeriesSolution,
    rho_max: f64,
    z_max: f64,
    n_rho: usize,
    n_z: usize,
) -> Result<DensityGrid, ZeemanError> {
    if !(rho_max > 0.0 && z_max > 0.0) || n_rho < 2 || n_z < 2 {
        return Err(ZeemanError::Argument(
            "density grid needs positive extents and at least 2 samples per axis".into(),
        ));
    }
    let table = &solution.table;
    let bits = table.precision();
    let r_match = solution.controls.r_match;
    let step = std::f64::consts::FRAC_PI_2 / (RAYS - 1) as f64;
    let trust: Vec<f64> = (0..RAYS).map(|q| trust_radius(table, r_match, q as f64 * step)).collect();
    // The tail can vanish along isolated directions, so each direction takes
    // the smallest trust radius among its nearby rays.
    let limit = |theta: f64| {
        let q = ((theta / step).round() as usize).min(RAYS - 1);
        let lo = q.saturating_sub(NEIGHBOURS);
        let hi = (q + NEIGHBOURS).min(RAYS - 1);
        trust[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min)
    };
    let rho = axis(rho_max, n_rho);
    let z = axis(z_max, n_z);
    let mut raw = Vec::with_capacity(n_rho * n_z);
    let mut clipped = 0;
    for &zl in &z {
        for &rj in &rho {
            let r = rj.hypot(zl);
            if r > r_match || r > limit(rj.atan2(zl)) {
                raw.push(Float::new(bits));
                clipped += 1;
                continue;
            }
            raw.push(raw_density(table, rj, zl));
        }
    }
    let peak = raw.iter().max_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)).cloned();
    let peak =
        peak.filter(|p| !p.is_zero()).ok_or_else(|| ZeemanError::Argument("density vanishes on the grid".into()))?;
    let scaled: Vec<f64> = raw.iter().map(|v| Float::with_val(bits, v / &peak).to_f64()).collect();
    let norm = integral(&scaled, &rho, &z, 0);
    let values: Vec<f64> = scaled.iter().map(|v| v / norm).collect();
    let norm_integral = integral(&values, &rho, &z, 0);
    Ok(DensityGrid { rho, z, values, norm_integral, clipped })
}

/// ⟨ρ²⟩ on the grid.
pub fn transverse_moment(grid: &DensityGrid) -> f64 {
    integral(&grid.values, &grid.rho, &grid.z, 2)
}
