//! Poisson brackets of Kepler observables from closed-form gradients.

use super::{angular_momentum, dot, kepler_energy, norm, runge_lenz, ClassicalError, PhaseState, Vec3};

/// Components are indexed 0..3 for x, y, z.
#[derive(Debug, Clone, Copy)]
pub enum Observable {
    M(usize),
    R(usize),
    ScaledR(usize),
    GPlus(usize),
    GMinus(usize),
    /// Kepler Hamiltonian.
    H,
    /// Any scalar function of the state; only finite differences apply.
    Custom {
        name: &'static str,
        f: fn(&PhaseState) -> f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub dr: Vec3,
    pub dp: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub value: f64,
    /// Set when a finite-difference gradient was used.
    pub approximate: bool,
}

type Jacobian = [[f64; 3]; 3];

fn component(i: usize) -> Result<usize, ClassicalError> {
    if i < 3 {
        Ok(i)
    } else {
        Err(ClassicalError::Argument(format!("component index {i} out of range")))
    }
}

fn m_jacobian(s: &PhaseState) -> (Jacobian, Jacobian) {
    let [x, y, z] = s.r;
    let [px, py, pz] = s.p;
    // M = r × p: ∂M_i/∂r_j = ε_ijk p_k, ∂M_i/∂p_j = −ε_ijk r_k.
    let dr = [[0.0, pz, -py], [-pz, 0.0, px], [py, -px, 0.0]];
    let dp = [[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]];
    (dr, dp)
}

fn r_jacobian(s: &PhaseState) -> Result<(Jacobian, Jacobian), ClassicalError> {
    let r = norm(&s.r);
    if r == 0.0 {
        return Err(ClassicalError::Singularity("r = 0"));
    }
    let p2 = dot(&s.p, &s.p);
    let rp = dot(&s.r, &s.p);
    let (mu, a) = (s.mu, s.alpha);
    let mut dr = [[0.0; 3]; 3];
    let mut dp = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let d = if i == j { 1.0 } else { 0.0 };
            dr[i][j] = (d * p2 - s.p[i] * s.p[j]) / mu - a * (d / r - s.r[i] * s.r[j] / (r * r * r));
            dp[i][j] = (2.0 * s.r[i] * s.p[j] - d * rp - s.p[i] * s.r[j]) / mu;
        }
    }
    Ok((dr, dp))
}

fn h_gradient(s: &PhaseState) -> Result<Gradient, ClassicalError> {
    let r = norm(&s.r);
    if r == 0.0 {
        return Err(ClassicalError::Singularity("r = 0"));
    }
    let k = s.alpha / (r * r * r);
    Ok(Gradient { dr: std::array::from_fn(|i| k * s.r[i]), dp: std::array::from_fn(|i| s.p[i] / s.mu) })
}

fn scaled_gradient(s: &PhaseState, i: usize) -> Result<Gradient, ClassicalError> {
    let h = kepler_energy(s)?;
    if h >= 0.0 {
        return Err(ClassicalError::Unbound { energy: h });
    }
    // 𝓡 = σR with σ = (−2μH)^{-1/2}, ∂σ = μσ³ ∂H.
    let sigma = 1.0 / (-2.0 * s.mu * h).sqrt();
    let (jr, jp) = r_jacobian(s)?;
    let ri = runge_lenz(s)?[i];
    let gh = h_gradient(s)?;
    let k = ri * s.mu * sigma.powi(3);
    Ok(Gradient {
        dr: std::array::from_fn(|j| sigma * jr[i][j] + k * gh.dr[j]),
        dp: std::array::from_fn(|j| sigma * jp[i][j] + k * gh.dp[j]),
    })
}

impl Observable {
    pub fn name(&self) -> String {
        const AXES: [&str; 3] = ["x", "y", "z"];
        let ax = |i: &usize| AXES.get(*i).copied().unwrap_or("?");
        match self {
            Observable::M(i) => format!("M_{}", ax(i)),
            Observable::R(i) => format!("R_{}", ax(i)),
            Observable::ScaledR(i) => format!("Rs_{}", ax(i)),
            Observable::GPlus(i) => format!("G+_{}", ax(i)),
            Observable::GMinus(i) => format!("G-_{}", ax(i)),
            Observable::H => "H".into(),
            Observable::Custom { name, .. } => (*name).into(),
        }
    }

    pub fn value(&self, s: &PhaseState) -> Result<f64, ClassicalError> {
        Ok(match *self {
            Observable::M(i) => angular_momentum(s)[component(i)?],
            Observable::R(i) => runge_lenz(s)?[component(i)?],
            Observable::ScaledR(i) => super::scaled_runge_lenz(s)?[component(i)?],
            Observable::GPlus(i) => super::g_vectors(s)?.0[component(i)?],
            Observable::GMinus(i) => super::g_vectors(s)?.1[component(i)?],
            Observable::H => kepler_energy(s)?,
            Observable::Custom { f, .. } => f(s),
        })
    }

    /// Closed-form gradient; `Custom` observables have none.
    pub fn gradient(&self, s: &PhaseState) -> Result<Gradient, ClassicalError> {
        let pick = |(jr, jp): (Jacobian, Jacobian), i: usize| Gradient { dr: jr[i], dp: jp[i] };
        match *self {
            Observable::M(i) => Ok(pick(m_jacobian(s), component(i)?)),
            Observable::R(i) => Ok(pick(r_jacobian(s)?, component(i)?)),
            Observable::ScaledR(i) => scaled_gradient(s, component(i)?),
            Observable::GPlus(i) | Observable::GMinus(i) => {
                let i = component(i)?;
                let sign = if matches!(self, Observable::GPlus(_)) { 0.5 } else { -0.5 };
                let m = pick(m_jacobian(s), i);
                let sr = scaled_gradient(s, i)?;
                Ok(Gradient {
                    dr: std::array::from_fn(|j| 0.5 * m.dr[j] + sign * sr.dr[j]),
                    dp: std::array::from_fn(|j| 0.5 * m.dp[j] + sign * sr.dp[j]),
                })
            }
            Observable::H => h_gradient(s),
            Observable::Custom { name, .. } => Err(ClassicalError::GradientUnavailable(name)),
        }
    }

    /// Central differences with step 10⁻⁶ times the magnitude of r or p.
    pub fn finite_difference_gradient(&self, s: &PhaseState) -> Result<Gradient, ClassicalError> {
        let hr = 1e-6 * norm(&s.r).max(1e-3);
        let hp = 1e-6 * norm(&s.p).max(1e-3);
        let mut g = Gradient { dr: [0.0; 3], dp: [0.0; 3] };
        for k in 0..3 {
            let mut a = *s;
            let mut b = *s;
            a.r[k] += hr;
            b.r[k] -= hr;
            g.dr[k] = (self.value(&a)? - self.value(&b)?) / (2.0 * hr);
            let mut a = *s;
            let mut b = *s;
            a.p[k] += hp;
            b.p[k] -= hp;
            g.dp[k] = (self.value(&a)? - self.value(&b)?) / (2.0 * hp);
        }
        Ok(g)
    }
}

fn bracket_of(a: &Gradient, b: &Gradient) -> f64 {
    (0..3).map(|k| a.dr[k] * b.dp[k] - a.dp[k] * b.dr[k]).sum()
}

/// {A, B} = Σ_k ∂A/∂r_k ∂B/∂p_k − ∂A/∂p_k ∂B/∂r_k from analytic gradients.
pub fn poisson_bracket(a: &Observable, b: &Observable, s: &PhaseState) -> Result<f64, ClassicalError> {
    Ok(bracket_of(&a.gradient(s)?, &b.gradient(s)?))
}

/// Like [`poisson_bracket`], falling back to finite differences for
/// observables without a closed-form gradient.
pub fn poisson_bracket_approx(a: &Observable, b: &Observable, s: &PhaseState) -> Result<Bracket, ClassicalError> {
    let mut approximate = false;
    let mut grad = |o: &Observable| match o.gradient(s) {
        Err(ClassicalError::GradientUnavailable(_)) => {
            approximate = true;
            o.finite_difference_gradient(s)
        }
        other => other,
    };
    let ga = grad(a)?;
    let gb = grad(b)?;
    Ok(Bracket { value: bracket_of(&ga, &gb), approximate })
}
