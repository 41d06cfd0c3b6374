//! Adaptive Dormand–Prince 5(4) integration of Hamilton's equations.

use super::{
    dot, hamiltonian, norm, stark_constant, sub, two_center_constant, ClassicalError, FieldConfig, Observable,
    PhaseState,
};

/// Closest approach to either center that a step may land on.
const MIN_RADIUS: f64 = 1e-8;
const MAX_STEPS: usize = 50_000_000;
const SIZING: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub tol: f64,
}

type Y = [f64; 6];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn force(cfg: &FieldConfig, s: &PhaseState) -> [f64; 3] {
    let r = norm(&s.r);
    match cfg {
        FieldConfig::Kepler => {
            let k = -s.alpha / (r * r * r);
            std::array::from_fn(|i| k * s.r[i])
        }
        FieldConfig::Stark { e_field } => {
            let k = -s.alpha / (r * r * r);
            std::array::from_fn(|i| k * s.r[i] + e_field[i])
        }
        FieldConfig::TwoCenter { r12, z1, z2 } => {
            let d = sub(&s.r, r12);
            let dn = norm(&d);
            let k1 = -z1 / (r * r * r);
            let k2 = -z2 / (dn * dn * dn);
            std::array::from_fn(|i| k1 * s.r[i] + k2 * d[i])
        }
    }
}

fn rhs(cfg: &FieldConfig, s0: &PhaseState, y: &Y) -> Y {
    let s = PhaseState { r: [y[0], y[1], y[2]], p: [y[3], y[4], y[5]], ..*s0 };
    let f = force(cfg, &s);
    [y[3] / s.mu, y[4] / s.mu, y[5] / s.mu, f[0], f[1], f[2]]
}

fn too_close(cfg: &FieldConfig, y: &Y) -> bool {
    let r = [y[0], y[1], y[2]];
    if !y.iter().all(|v| v.is_finite()) || norm(&r) < MIN_RADIUS {
        return true;
    }
    match cfg {
        FieldConfig::TwoCenter { r12, .. } => norm(&sub(&r, r12)) < MIN_RADIUS,
        _ => false,
    }
}

fn to_state(s0: &PhaseState, y: &Y) -> PhaseState {
    PhaseState { r: [y[0], y[1], y[2]], p: [y[3], y[4], y[5]], ..*s0 }
}

/// Integrate from t = 0 to `t_end`, recording every accepted step. The
/// local error of each step is held below `tol` relative to |r| and |p|.
pub fn integrate(cfg: &FieldConfig, state0: &PhaseState, t_end: f64, tol: f64) -> Result<Trajectory, ClassicalError> {
    cfg.validate()?;
    integrate_unchecked(cfg, state0, t_end, tol)
}

pub(crate) fn integrate_unchecked(
    cfg: &FieldConfig,
    state0: &PhaseState,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory, ClassicalError> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(ClassicalError::Argument(format!("t_end must be positive, got {t_end}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ClassicalError::Argument(format!("tol must be positive, got {tol}")));
    }
    let mut y: Y = [state0.r[0], state0.r[1], state0.r[2], state0.p[0], state0.p[1], state0.p[2]];
    if too_close(cfg, &y) {
        return Err(ClassicalError::Singularity("initial state on a center"));
    }
    hamiltonian(state0, cfg)?;

    let mut times = vec![0.0];
    let mut states = vec![*state0];
    let mut t = 0.0;
    let rn = norm(&state0.r);
    let vn = norm(&state0.p) / state0.mu;
    let mut h = (1e-3 * rn / vn.max(1e-12)).min(t_end);
    let mut k = [[0.0; 6]; 7];
    k[0] = rhs(cfg, state0, &y);
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(ClassicalError::Argument(format!("step budget exhausted at t = {t}")));
        }
        if h < 1e-14 * t.max(1.0) {
            return Err(ClassicalError::Collision { t, last: Box::new(to_state(state0, &y)) });
        }
        let h_try = h.min(t_end - t);
        let mut stage = y;
        for s in 1..7 {
            for (j, v) in stage.iter_mut().enumerate() {
                *v = y[j] + h_try * (0..s).map(|q| A[s][q] * k[q][j]).sum::<f64>();
            }
            if too_close(cfg, &stage) {
                break;
            }
            k[s] = rhs(cfg, state0, &stage);
        }
        if too_close(cfg, &stage) {
            h = h_try / 4.0;
            continue;
        }
        // Last stage is the fifth-order solution (first same as last).
        let y_new = stage;
        let err: Y = std::array::from_fn(|j| h_try * (0..7).map(|q| E[q] * k[q][j]).sum::<f64>());
        let sr = tol * norm(&[y[0], y[1], y[2]]).max(norm(&[y_new[0], y_new[1], y_new[2]]));
        let sp = tol * norm(&[y[3], y[4], y[5]]).max(norm(&[y_new[3], y_new[4], y_new[5]])).max(1e-3);
        let ratio = (0..6).map(|j| err[j].abs() / if j < 3 { sr } else { sp }).fold(0.0f64, f64::max);
        // Steps are sized for a tenth of the tolerance so that errors
        // accumulated over many periods stay near tol.
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * (SIZING * ratio).powf(-0.2)).clamp(0.2, 5.0) };
        if ratio <= 1.0 {
            t = if h_try == t_end - t { t_end } else { t + h_try };
            y = y_new;
            k[0] = k[6];
            times.push(t);
            states.push(to_state(state0, &y));
            h = h_try * factor;
        } else {
            h = h_try * factor.min(1.0);
        }
    }
    Ok(Trajectory { times, states, tol })
}

/// Quantities whose conservation can be measured along a trajectory.
#[derive(Debug, Clone, Copy)]
pub enum Monitor {
    Observable(Observable),
    /// The configuration's own Hamiltonian.
    Energy,
    /// M projected on the field direction or the internuclear axis.
    AxialMomentum,
    /// The Stark or two-center Runge-Lenz constant.
    FieldConstant,
}

impl Monitor {
    pub fn value(&self, s: &PhaseState, cfg: &FieldConfig) -> Result<f64, ClassicalError> {
        match (self, cfg) {
            (Monitor::Observable(o), _) => o.value(s),
            (Monitor::Energy, _) => hamiltonian(s, cfg),
            (Monitor::AxialMomentum, FieldConfig::Stark { e_field: axis })
            | (Monitor::AxialMomentum, FieldConfig::TwoCenter { r12: axis, .. }) => {
                Ok(dot(&super::angular_momentum(s), axis) / norm(axis))
            }
            (Monitor::FieldConstant, FieldConfig::Stark { e_field }) => stark_constant(s, e_field),
            (Monitor::FieldConstant, FieldConfig::TwoCenter { r12, z1, z2 }) => two_center_constant(s, r12, *z1, *z2),
            (_, FieldConfig::Kepler) => Err(ClassicalError::Config("no field axis in the Kepler problem".into())),
        }
    }
}

/// max_t |q(t) − q(0)| / max(|q(0)|, 1).
pub fn conservation_drift(traj: &Trajectory, monitor: &Monitor, cfg: &FieldConfig) -> Result<f64, ClassicalError> {
    let first = traj.states.first().ok_or_else(|| ClassicalError::Argument("empty trajectory".into()))?;
    let q0 = monitor.value(first, cfg)?;
    let denom = q0.abs().max(1.0);
    let mut worst = 0.0f64;
    for s in &traj.states {
        worst = worst.max((monitor.value(s, cfg)? - q0).abs() / denom);
    }
    Ok(worst)
}
