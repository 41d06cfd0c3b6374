//! Independent double-precision reference for m = 0, even z-parity levels:
//! H = −½∇² + γ²ρ²/8 − 1/r on a cell-centred (ρ, z ≥ 0) grid with a mirror
//! condition at z = 0 and u = 0 beyond the outer faces. The radial part is
//! written in flux form and symmetrised with the weight √ρ. The lowest
//! eigenvalue comes from plain Lanczos with Sturm-count bisection on the
//! tridiagonal matrix, and successive halvings of the spacing are combined
//! by Richardson extrapolation.

pub struct Grid {
    pub h: f64,
    pub n_rho: usize,
    pub n_z: usize,
    diag: Vec<f64>,
    off_rho: Vec<f64>,
    off_z: f64,
}

impl Grid {
    pub fn new(gamma: f64, h: f64, rho_max: f64, z_max: f64) -> Self {
        let n_rho = (rho_max / h).round() as usize;
        let n_z = (z_max / h).round() as usize;
        let h2 = h * h;
        let rho = |j: usize| (j as f64 + 0.5) * h;
        let face = |j: usize| (j as f64 + 1.0) * h;
        let off_rho: Vec<f64> = (0..n_rho).map(|j| -0.5 * face(j) / (h2 * (rho(j) * rho(j + 1)).sqrt())).collect();
        let mut diag = vec![0.0; n_rho * n_z];
        for l in 0..n_z {
            let z = (l as f64 + 0.5) * h;
            let kz = if l == 0 { 0.5 / h2 } else { 1.0 / h2 };
            for j in 0..n_rho {
                let inner = if j == 0 { 0.0 } else { face(j - 1) };
                let kr = 0.5 * (face(j) + inner) / (rho(j) * h2);
                let p = rho(j);
                diag[l * n_rho + j] = kr + kz + gamma * gamma * p * p / 8.0 - 1.0 / (p * p + z * z).sqrt();
            }
        }
        Self { h, n_rho, n_z, diag, off_rho, off_z: -0.5 / h2 }
    }

    pub fn len(&self) -> usize {
        self.n_rho * self.n_z
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n_rho;
        for l in 0..self.n_z {
            for j in 0..n {
                let i = l * n + j;
                let mut v = self.diag[i] * x[i];
                if j > 0 {
                    v += self.off_rho[j - 1] * x[i - 1];
                }
                if j + 1 < n {
                    v += self.off_rho[j] * x[i + 1];
                }
                if l > 0 {
                    v += self.off_z * x[i - n];
                }
                if l + 1 < self.n_z {
                    v += self.off_z * x[i + n];
                }
                y[i] = v;
            }
        }
    }

    fn start_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        for l in 0..self.n_z {
            for j in 0..self.n_rho {
                let rho = (j as f64 + 0.5) * self.h;
                let z = (l as f64 + 0.5) * self.h;
                v[l * self.n_rho + j] = rho.sqrt() * (-(rho * rho + z * z).sqrt()).exp();
            }
        }
        v
    }
}

/// Number of eigenvalues of the tridiagonal (a, b) below x.
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for k in 0..a.len() {
        let off = if k == 0 { 0.0 } else { b[k - 1] * b[k - 1] / q };
        q = a[k] - x - off;
        if q == 0.0 {
            q = -1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn lowest_tridiagonal(a: &[f64], b: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..a.len() {
        let r = if k > 0 { b[k - 1].abs() } else { 0.0 } + if k < b.len() { b[k].abs() } else { 0.0 };
        lo = lo.min(a[k] - r);
        hi = hi.max(a[k] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(a, b, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Lowest eigenvalue of the grid operator, iterated until the Ritz value
/// settles to 1e-11.
pub fn lowest_eigenvalue(grid: &Grid) -> f64 {
    let n = grid.len();
    let mut v = grid.start_vector();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut v_prev = vec![0.0; n];
    let mut w = vec![0.0; n];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let mut last = f64::INFINITY;
    let mut beta = 0.0;
    for k in 0..20_000 {
        grid.apply(&v, &mut w);
        let alpha: f64 = w.iter().zip(&v).map(|(x, y)| x * y).sum();
        for i in 0..n {
            w[i] -= alpha * v[i] + beta * v_prev[i];
        }
        a.push(alpha);
        beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if k % 50 == 49 {
            let e = lowest_tridiagonal(&a, &b);
            if (e - last).abs() < 1e-11 {
                return e;
            }
            last = e;
        }
        if beta == 0.0 {
            break;
        }
        b.push(beta);
        for i in 0..n {
            v_prev[i] = v[i];
            v[i] = w[i] / beta;
        }
    }
    b.truncate(a.len().saturating_sub(1));
    lowest_tridiagonal(&a, &b)
}

/// Binding energies γ/2 − E for the (m = 0, even) ground state on each
/// spacing, and the last entry of the Richardson table built from them with
/// a factor of 4 per halving.
pub fn ground_binding_energy(gamma: f64, spacings: &[f64], rho_max: f64, z_max: f64) -> (f64, Vec<f64>) {
    let raw: Vec<f64> =
        spacings.iter().map(|&h| gamma / 2.0 - lowest_eigenvalue(&Grid::new(gamma, h, rho_max, z_max))).collect();
    let mut level = raw.clone();
    while level.len() > 1 {
        level = level.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    }
    (level[0], raw)
}
