//! Verification suites over seeded random states and fixed reference orbits.
//!
//! Bracket and identity errors are measured against max(|v|, 1), where v is
//! the vector (or scalar) on the right-hand side, so values near zero do not
//! inflate the ratio.

use std::f64::consts::TAU;
use std::fmt;

use super::{
    angular_momentum, conservation_drift, dot, g_vectors, integrate, kepler_energy, norm, poisson_bracket, runge_lenz,
    sample_states, scaled_runge_lenz, stark_constant, two_center_constant, ClassicalError, FieldConfig, Monitor,
    Observable, PhaseState, Vec3,
};

pub const SUITES: [&str; 6] =
    ["brackets", "identities", "kepler-drift", "stark-drift", "two-center-drift", "stark-limit"];

pub const BRACKET_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-13;
pub const DRIFT_TOL: f64 = 1e-8;
pub const STARK_FIELD: f64 = 0.01;
pub const HORIZON: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max error {:.3e} (tolerance {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.max_error,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

type Family = fn(usize) -> Observable;

struct Relation {
    name: &'static str,
    a: Family,
    b: Family,
    /// Right-hand side vector v in {A_i, B_j} = ε_ijk v_k.
    rhs: fn(&PhaseState) -> Result<Vec3, ClassicalError>,
}

fn relations() -> Vec<Relation> {
    vec![
        Relation {
            name: "{M_i,M_j} = e_ijk M_k",
            a: Observable::M,
            b: Observable::M,
            rhs: |s| Ok(angular_momentum(s)),
        },
        Relation { name: "{M_i,R_j} = e_ijk R_k", a: Observable::M, b: Observable::R, rhs: runge_lenz },
        Relation {
            name: "{R_i,R_j} = -2 mu H e_ijk M_k",
            a: Observable::R,
            b: Observable::R,
            rhs: |s| {
                let k = -2.0 * s.mu * kepler_energy(s)?;
                Ok(super::scale(&angular_momentum(s), k))
            },
        },
        Relation { name: "{M_i,Rs_j} = e_ijk Rs_k", a: Observable::M, b: Observable::ScaledR, rhs: scaled_runge_lenz },
        Relation {
            name: "{Rs_i,Rs_j} = e_ijk M_k",
            a: Observable::ScaledR,
            b: Observable::ScaledR,
            rhs: |s| Ok(angular_momentum(s)),
        },
        Relation {
            name: "{G+_i,G+_j} = e_ijk G+_k",
            a: Observable::GPlus,
            b: Observable::GPlus,
            rhs: |s| Ok(g_vectors(s)?.0),
        },
        Relation {
            name: "{G-_i,G-_j} = e_ijk G-_k",
            a: Observable::GMinus,
            b: Observable::GMinus,
            rhs: |s| Ok(g_vectors(s)?.1),
        },
        Relation { name: "{G+_i,G-_j} = 0", a: Observable::GPlus, b: Observable::GMinus, rhs: |_| Ok([0.0; 3]) },
    ]
}

/// Closure of the M, R, 𝓡 and G± algebras at `count` random bound states.
pub fn bracket_suite(seed: u64, count: usize) -> Result<SuiteReport, ClassicalError> {
    let states = sample_states(seed, count, true);
    let mut checks = Vec::new();
    for rel in relations() {
        let mut worst = 0.0f64;
        for s in &states {
            let v = (rel.rhs)(s)?;
            let denom = norm(&v).max(1.0);
            for i in 0..3 {
                for j in 0..3 {
                    let lhs = poisson_bracket(&(rel.a)(i), &(rel.b)(j), s)?;
                    let want: f64 = (0..3).map(|k| levi_civita(i, j, k) * v[k]).sum();
                    worst = worst.max((lhs - want).abs() / denom);
                }
            }
        }
        checks.push(Check { name: rel.name.into(), max_error: worst, tolerance: BRACKET_TOL });
    }
    Ok(SuiteReport { suite: "brackets".into(), checks })
}

/// M·R = 0 and R² = (2/μ)M²H + α² at random states.
pub fn identity_suite(seed: u64, count: usize) -> Result<SuiteReport, ClassicalError> {
    let mut orth = 0.0f64;
    let mut norm_rel = 0.0f64;
    for s in sample_states(seed, count, false) {
        let m = angular_momentum(&s);
        let r = runge_lenz(&s)?;
        let h = kepler_energy(&s)?;
        orth = orth.max(dot(&m, &r).abs() / (norm(&m) * norm(&r)).max(1.0));
        let lhs = dot(&r, &r);
        let rhs = 2.0 / s.mu * dot(&m, &m) * h + s.alpha * s.alpha;
        norm_rel = norm_rel.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok(SuiteReport {
        suite: "identities".into(),
        checks: vec![
            Check { name: "M.R = 0".into(), max_error: orth, tolerance: IDENTITY_TOL },
            Check { name: "R^2 = (2/mu) M^2 H + alpha^2".into(), max_error: norm_rel, tolerance: IDENTITY_TOL },
        ],
    })
}

/// Perihelion of an a = 1, e = 0.6 orbit (period 2π).
pub fn eccentric_orbit() -> PhaseState {
    let e = 0.6f64;
    PhaseState::unit([1.0 - e, 0.0, 0.0], [0.0, ((1.0 + e) / (1.0 - e)).sqrt(), 0.0])
}

pub fn stark_reference() -> PhaseState {
    PhaseState::unit([0.9, 0.1, 0.4], [0.1, 0.8, -0.2])
}

pub fn two_center_reference() -> PhaseState {
    PhaseState::unit([0.6, 0.2, 1.0], [0.3, 0.5, 0.1])
}

fn drift_check(
    name: &str,
    traj: &super::Trajectory,
    monitors: &[Monitor],
    cfg: &FieldConfig,
) -> Result<Check, ClassicalError> {
    let mut worst = 0.0f64;
    for m in monitors {
        worst = worst.max(conservation_drift(traj, m, cfg)?);
    }
    Ok(Check { name: name.into(), max_error: worst, tolerance: DRIFT_TOL })
}

/// Ten periods of the e = 0.6 Kepler orbit.
pub fn kepler_drift_suite(tol: f64) -> Result<SuiteReport, ClassicalError> {
    let cfg = FieldConfig::Kepler;
    let traj = integrate(&cfg, &eccentric_orbit(), 10.0 * TAU, tol)?;
    let comps = |f: fn(usize) -> Observable| [0, 1, 2].map(|i| Monitor::Observable(f(i)));
    Ok(SuiteReport {
        suite: "kepler-drift".into(),
        checks: vec![
            drift_check("M drift", &traj, &comps(Observable::M), &cfg)?,
            drift_check("R drift", &traj, &comps(Observable::R), &cfg)?,
            drift_check("H drift", &traj, &[Monitor::Energy], &cfg)?,
        ],
    })
}

pub fn stark_drift_suite(tol: f64) -> Result<SuiteReport, ClassicalError> {
    let cfg = FieldConfig::stark([0.0, 0.0, STARK_FIELD])?;
    let traj = integrate(&cfg, &stark_reference(), HORIZON, tol)?;
    Ok(SuiteReport {
        suite: "stark-drift".into(),
        checks: vec![
            drift_check("Stark constant drift", &traj, &[Monitor::FieldConstant], &cfg)?,
            drift_check("M.E/|E| drift", &traj, &[Monitor::AxialMomentum], &cfg)?,
            drift_check("H drift", &traj, &[Monitor::Energy], &cfg)?,
        ],
    })
}

pub fn two_center_drift_suite(tol: f64) -> Result<SuiteReport, ClassicalError> {
    let cfg = FieldConfig::two_center([0.0, 0.0, 2.0], 1.0, 1.0)?;
    let traj = integrate(&cfg, &two_center_reference(), HORIZON, tol)?;
    Ok(SuiteReport {
        suite: "two-center-drift".into(),
        checks: vec![
            drift_check("two-center constant drift", &traj, &[Monitor::FieldConstant], &cfg)?,
            drift_check("M.r12/|r12| drift", &traj, &[Monitor::AxialMomentum], &cfg)?,
            drift_check("H drift", &traj, &[Monitor::Energy], &cfg)?,
        ],
    })
}

/// Distance from the Stark constant of the two-center constant with the
/// second nucleus at L ẑ carrying Z₂ = L²E, both compared through their
/// changes along one Stark trajectory: max_t |ΔC₂/L − ΔS/E|.
pub fn stark_limit_errors(lengths: &[f64], tol: f64) -> Result<Vec<f64>, ClassicalError> {
    let e = [0.0, 0.0, STARK_FIELD];
    let traj = integrate(&FieldConfig::stark(e)?, &stark_reference(), HORIZON, tol)?;
    let s0 = stark_constant(&traj.states[0], &e)?;
    lengths
        .iter()
        .map(|&l| {
            let r12 = [0.0, 0.0, l];
            let z2 = l * l * STARK_FIELD;
            let c0 = two_center_constant(&traj.states[0], &r12, 1.0, z2)?;
            let mut worst = 0.0f64;
            for s in &traj.states {
                let dc = (two_center_constant(s, &r12, 1.0, z2)? - c0) / l;
                let ds = (stark_constant(s, &e)? - s0) / STARK_FIELD;
                worst = worst.max((dc - ds).abs());
            }
            Ok(worst)
        })
        .collect()
}

pub fn stark_limit_suite(tol: f64) -> Result<SuiteReport, ClassicalError> {
    let lengths = [1e2, 1e3, 1e4];
    let errs = stark_limit_errors(&lengths, tol)?;
    let checks = (1..lengths.len())
        .map(|k| Check {
            name: format!("|r12| = {:.0e} closer than {:.0e}", lengths[k], lengths[k - 1]),
            max_error: errs[k],
            tolerance: errs[k - 1],
        })
        .collect();
    Ok(SuiteReport { suite: "stark-limit".into(), checks })
}

/// Run one named suite. Random suites draw 100 states from `seed`.
pub fn run_suite(name: &str, seed: u64, tol: f64) -> Result<SuiteReport, ClassicalError> {
    match name {
        "brackets" => bracket_suite(seed, 100),
        "identities" => identity_suite(seed, 100),
        "kepler-drift" => kepler_drift_suite(tol),
        "stark-drift" => stark_drift_suite(tol),
        "two-center-drift" => two_center_drift_suite(tol),
        "stark-limit" => stark_limit_suite(tol),
        other => Err(ClassicalError::Argument(format!("unknown suite `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_is_antisymmetric() {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(levi_civita(i, j, k), -levi_civita(j, i, k));
                    assert_eq!(levi_civita(i, j, k), levi_civita(j, k, i));
                }
            }
        }
    }

    #[test]
    fn random_suites_pass() {
        for r in [bracket_suite(7, 100).unwrap(), identity_suite(7, 100).unwrap()] {
            for c in &r.checks {
                assert!(c.passed(), "{c}");
            }
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 0, 1e-12).is_err());
    }
}
