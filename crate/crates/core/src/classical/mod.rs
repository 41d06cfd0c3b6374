//! Classical Kepler, Stark and two-center dynamics in double precision.
//!
//! Vectors are plain `[f64; 3]`. The Stark force on the electron is `+E`
//! (Hamiltonian `p²/2μ − α/r − E·r`), and the two-center problem places the
//! second nucleus at `r12` with charges `z1` at the origin and `z2` there.

mod brackets;
mod integrate;
pub mod suites;

pub use brackets::{poisson_bracket, poisson_bracket_approx, Bracket, Gradient, Observable};
pub use integrate::{conservation_drift, integrate, Monitor, Trajectory};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type Vec3 = [f64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("singular configuration: {0}")]
    Singularity(&'static str),
    #[error("state is not bound (H = {energy})")]
    Unbound { energy: f64 },
    #[error("invalid field configuration: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("no analytic gradient for observable `{0}`")]
    GradientUnavailable(&'static str),
    #[error("step size underflow near a collision at t = {t}")]
    Collision { t: f64, last: Box<PhaseState> },
}

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// A point in phase space with its reduced mass μ and Coulomb coupling α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub r: Vec3,
    pub p: Vec3,
    pub mu: f64,
    pub alpha: f64,
}

impl PhaseState {
    pub fn new(r: Vec3, p: Vec3, mu: f64, alpha: f64) -> Result<Self, ClassicalError> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(ClassicalError::Argument(format!("mu must be positive, got {mu}")));
        }
        if !alpha.is_finite() || r.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(ClassicalError::Argument("non-finite phase-space coordinate".into()));
        }
        Ok(Self { r, p, mu, alpha })
    }

    /// μ = α = 1.
    pub fn unit(r: Vec3, p: Vec3) -> Self {
        Self { r, p, mu: 1.0, alpha: 1.0 }
    }

    fn radius(&self) -> Result<f64, ClassicalError> {
        let r = norm(&self.r);
        if r == 0.0 {
            Err(ClassicalError::Singularity("r = 0"))
        } else {
            Ok(r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldConfig {
    Kepler,
    Stark { e_field: Vec3 },
    TwoCenter { r12: Vec3, z1: f64, z2: f64 },
}

impl FieldConfig {
    pub fn stark(e_field: Vec3) -> Result<Self, ClassicalError> {
        let cfg = FieldConfig::Stark { e_field };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn two_center(r12: Vec3, z1: f64, z2: f64) -> Result<Self, ClassicalError> {
        let cfg = FieldConfig::TwoCenter { r12, z1, z2 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ClassicalError> {
        match self {
            FieldConfig::Kepler => Ok(()),
            FieldConfig::Stark { e_field } => {
                if norm(e_field) == 0.0 || e_field.iter().any(|x| !x.is_finite()) {
                    Err(ClassicalError::Config("Stark field must be finite and nonzero".into()))
                } else {
                    Ok(())
                }
            }
            FieldConfig::TwoCenter { r12, z1, z2 } => {
                if norm(r12) == 0.0 || r12.iter().any(|x| !x.is_finite()) {
                    Err(ClassicalError::Config("internuclear separation must be finite and nonzero".into()))
                } else if !(z1.is_finite() && z2.is_finite()) {
                    Err(ClassicalError::Config("charges must be finite".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Kepler energy p²/2μ − α/r.
pub fn kepler_energy(s: &PhaseState) -> Result<f64, ClassicalError> {
    Ok(dot(&s.p, &s.p) / (2.0 * s.mu) - s.alpha / s.radius()?)
}

pub fn hamiltonian(s: &PhaseState, cfg: &FieldConfig) -> Result<f64, ClassicalError> {
    match cfg {
        FieldConfig::Kepler => kepler_energy(s),
        FieldConfig::Stark { e_field } => Ok(kepler_energy(s)? - dot(e_field, &s.r)),
        FieldConfig::TwoCenter { r12, z1, z2 } => {
            let d = norm(&sub(&s.r, r12));
            if d == 0.0 {
                return Err(ClassicalError::Singularity("electron at the second center"));
            }
            Ok(dot(&s.p, &s.p) / (2.0 * s.mu) - z1 / s.radius()? - z2 / d)
        }
    }
}

pub fn angular_momentum(s: &PhaseState) -> Vec3 {
    cross(&s.r, &s.p)
}

/// R = [p × M]/μ − α r/r.
pub fn runge_lenz(s: &PhaseState) -> Result<Vec3, ClassicalError> {
    let r = s.radius()?;
    let pm = cross(&s.p, &angular_momentum(s));
    Ok(std::array::from_fn(|i| pm[i] / s.mu - s.alpha * s.r[i] / r))
}

/// 𝓡 = R/√(−2μH) for a bound Kepler state.
pub fn scaled_runge_lenz(s: &PhaseState) -> Result<Vec3, ClassicalError> {
    let h = kepler_energy(s)?;
    if h >= 0.0 {
        return Err(ClassicalError::Unbound { energy: h });
    }
    Ok(scale(&runge_lenz(s)?, 1.0 / (-2.0 * s.mu * h).sqrt()))
}

/// (G⁺, G⁻) = ((M + 𝓡)/2, (M − 𝓡)/2).
pub fn g_vectors(s: &PhaseState) -> Result<(Vec3, Vec3), ClassicalError> {
    let m = angular_momentum(s);
    let sr = scaled_runge_lenz(s)?;
    Ok((std::array::from_fn(|i| 0.5 * (m[i] + sr[i])), std::array::from_fn(|i| 0.5 * (m[i] - sr[i]))))
}

/// R·E + ½|r × E|², conserved under the force −αr/r³ + E.
pub fn stark_constant(s: &PhaseState, e_field: &Vec3) -> Result<f64, ClassicalError> {
    let rxe = cross(&s.r, e_field);
    Ok(dot(&runge_lenz(s)?, e_field) + 0.5 * dot(&rxe, &rxe))
}

/// ([p × M]/μ − z1 r/r + z2 (r − r12)/|r − r12|)·r12 − M²/μ.
pub fn two_center_constant(s: &PhaseState, r12: &Vec3, z1: f64, z2: f64) -> Result<f64, ClassicalError> {
    let r = s.radius()?;
    let d = sub(&s.r, r12);
    let dn = norm(&d);
    if dn == 0.0 {
        return Err(ClassicalError::Singularity("electron at the second center"));
    }
    let m = angular_momentum(s);
    let pm = cross(&s.p, &m);
    let v: Vec3 = std::array::from_fn(|i| pm[i] / s.mu - z1 * s.r[i] / r + z2 * d[i] / dn);
    Ok(dot(&v, r12) - dot(&m, &m) / s.mu)
}

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Seeded states with μ = α = 1, |r| uniform in volume over [0.5, 2] and |p|
/// uniform in [0.2, 0.9]. With `bound`, states with H ≥ 0 are redrawn.
pub fn sample_states(seed: u64, count: usize, bound: bool) -> Vec<PhaseState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: f64 = rng.gen_range(0.125..=8.0);
        let r = scale(&random_direction(&mut rng), u.cbrt());
        let p = scale(&random_direction(&mut rng), rng.gen_range(0.2..=0.9));
        let s = PhaseState::unit(r, p);
        if bound && kepler_energy(&s).map_or(true, |h| h >= 0.0) {
            continue;
        }
        out.push(s);
    }
    out
}
