//! Conjugate variables and the Legendre potential of the total energy.
//!
//! The total energy density `E = eps(rho, eta) + |j|^2/(2 rho) + c |w|^2 / 2`
//! has gradient `(q, theta, u, r)` with respect to `(rho, eta, j, w)`:
//!
//! ```text
//! q = mu - |u|^2 / 2,   theta = d eps/d eta,   u = j / rho,   r = c w.
//! ```
//!
//! Its Legendre transform `Pi(q, theta, u, r) = rho q + eta theta + j.u + w.r - E`
//! generates the symmetric form: `grad Pi = (rho, eta, j, w)` and `Hess Pi`
//! is the positive-definite coefficient matrix of the time derivative
//! wherever the bulk energy is convex. Both are assembled in closed form via
//! the implicit-function theorem; finite differences appear only as a test
//! oracle.

use nalgebra::{Matrix2, SMatrix, SVector, Vector3};

use crate::thermo::{self, EosModel, ThermoState};
use crate::{Error, Result};

/// Dimension of the conjugate state vector `(q, theta, u1..u3, r1..r3)`.
pub const DIM: usize = 8;

/// State in conserved/physical variables, plus the capillarity coefficient.
///
/// `c` travels inside the state so that a transform and its inverse can
/// never disagree about the coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalState {
    /// Mass density, > 0.
    pub rho: f64,
    /// Entropy per unit volume.
    pub eta: f64,
    /// Momentum density `j = rho u`.
    pub momentum: Vector3<f64>,
    /// Density gradient carried as an independent field.
    pub grad_rho: Vector3<f64>,
    /// Capillarity coefficient, > 0.
    pub capillarity: f64,
}

impl PhysicalState {
    pub fn rest(rho: f64, eta: f64, capillarity: f64) -> Self {
        Self {
            rho,
            eta,
            momentum: Vector3::zeros(),
            grad_rho: Vector3::zeros(),
            capillarity,
        }
    }

    pub fn thermo(&self) -> ThermoState {
        ThermoState::new(self.rho, self.eta)
    }

    /// Total energy density `E`.
    pub fn total_energy(&self, eos: &EosModel) -> Result<f64> {
        let ev = thermo::evaluate(eos, self.thermo())?;
        Ok(ev.energy
            + self.momentum.norm_squared() / (2.0 * self.rho)
            + 0.5 * self.capillarity * self.grad_rho.norm_squared())
    }
}

/// State in conjugate (entropy-dual) variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateState {
    /// `q = mu - |u|^2/2`.
    pub potential: f64,
    /// Temperature.
    pub temperature: f64,
    /// Velocity `u = j / rho`.
    pub velocity: Vector3<f64>,
    /// Dual of the density gradient, `r = c w`.
    pub grad_dual: Vector3<f64>,
    /// Capillarity coefficient, carried for invertibility.
    pub capillarity: f64,
}

impl ConjugateState {
    /// Pack into the canonical ordering `(q, theta, u, r)`.
    pub fn as_vector(&self) -> SVector<f64, DIM> {
        let mut v = SVector::<f64, DIM>::zeros();
        v[0] = self.potential;
        v[1] = self.temperature;
        for i in 0..3 {
            v[2 + i] = self.velocity[i];
            v[5 + i] = self.grad_dual[i];
        }
        v
    }

    pub fn from_vector(v: &SVector<f64, DIM>, capillarity: f64) -> Self {
        Self {
            potential: v[0],
            temperature: v[1],
            velocity: Vector3::new(v[2], v[3], v[4]),
            grad_dual: Vector3::new(v[5], v[6], v[7]),
            capillarity,
        }
    }
}

/// The Legendre potential with its analytic derivatives in the ordering
/// `(q, theta, u, r)`.
#[derive(Debug, Clone)]
pub struct PiEval {
    pub value: f64,
    /// `(rho, eta, j, w)` — the physical state read back from the gradient.
    pub grad: SVector<f64, DIM>,
    pub hess: SMatrix<f64, DIM, DIM>,
}

/// Physical -> conjugate transform.
pub fn to_conjugate(p: &PhysicalState, eos: &EosModel) -> Result<ConjugateState> {
    let ev = thermo::evaluate(eos, p.thermo())?;
    let u = p.momentum / p.rho;
    Ok(ConjugateState {
        potential: ev.chemical_potential - 0.5 * u.norm_squared(),
        temperature: ev.temperature,
        velocity: u,
        grad_dual: p.capillarity * p.grad_rho,
        capillarity: p.capillarity,
    })
}

/// Newton solve of `mu(rho, eta) = target_mu`, `theta(rho, eta) = target_theta`.
///
/// The Jacobian is the energy Hessian, so the iteration is locally quadratic
/// exactly where the energy is convex. Steps are halved until the residual
/// decreases. A singular Hessian at an iterate is reported distinctly from
/// plain non-convergence.
fn invert_mu_theta(
    eos: &EosModel,
    target_mu: f64,
    target_theta: f64,
    guess: ThermoState,
) -> Result<ThermoState> {
    const MAX_ITER: usize = 50;
    const TOL: f64 = 1e-12;
    let scale_mu = 1.0 + target_mu.abs();
    let scale_theta = 1.0 + target_theta.abs();
    let residual = |ev: &thermo::ThermoEval| -> (f64, f64, f64) {
        let fr = ev.chemical_potential - target_mu;
        let fe = ev.temperature - target_theta;
        let n = (fr / scale_mu).abs().max((fe / scale_theta).abs());
        (fr, fe, n)
    };

    let mut state = guess;
    let mut ev = thermo::evaluate(eos, state)?;
    let (mut fr, mut fe, mut rnorm) = residual(&ev);
    for it in 0..MAX_ITER {
        if rnorm <= TOL {
            return Ok(state);
        }
        let h = ev.hessian;
        let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(0, 1)];
        let hscale = h.amax().max(f64::MIN_POSITIVE);
        if det.abs() <= 1e-14 * hscale * hscale {
            return Err(Error::SingularJacobian { det });
        }
        let drho = -(h[(1, 1)] * fr - h[(0, 1)] * fe) / det;
        let deta = -(-h[(0, 1)] * fr + h[(0, 0)] * fe) / det;

        let mut step = 1.0;
        let mut advanced = false;
        for _ in 0..40 {
            let trial = ThermoState::new(state.rho + step * drho, state.eta + step * deta);
            if trial.rho > 0.0 {
                if let Ok(trial_ev) = thermo::evaluate(eos, trial) {
                    let (tfr, tfe, tnorm) = residual(&trial_ev);
                    if tnorm < rnorm {
                        state = trial;
                        ev = trial_ev;
                        (fr, fe, rnorm) = (tfr, tfe, tnorm);
                        advanced = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !advanced {
            return Err(Error::NewtonNoConvergence {
                iterations: it + 1,
                residual: rnorm,
            });
        }
    }
    if rnorm <= TOL {
        Ok(state)
    } else {
        Err(Error::NewtonNoConvergence {
            iterations: MAX_ITER,
            residual: rnorm,
        })
    }
}

/// Conjugate -> physical inverse. `guess` anchors the Newton iteration to a
/// branch of the (possibly multivalued) inverse; callers working near an
/// equilibrium always have one.
pub fn from_conjugate(
    v: &ConjugateState,
    eos: &EosModel,
    guess: ThermoState,
) -> Result<PhysicalState> {
    if !(v.temperature > 0.0) {
        return Err(Error::TemperatureOutOfRange {
            theta: v.temperature,
        });
    }
    let target_mu = v.potential + 0.5 * v.velocity.norm_squared();
    let state = invert_mu_theta(eos, target_mu, v.temperature, guess)?;
    Ok(PhysicalState {
        rho: state.rho,
        eta: state.eta,
        momentum: state.rho * v.velocity,
        grad_rho: v.grad_dual / v.capillarity,
        capillarity: v.capillarity,
    })
}

/// Evaluate `Pi`, its gradient and its Hessian at a conjugate state.
///
/// The Hessian follows from implicit differentiation of the inverse map:
/// with `M` the inverse of the energy Hessian and `u` the velocity,
///
/// ```text
///          [ M11    M12    M11 u^T         0      ]
///  Hess =  [ M12    M22    M12 u^T         0      ]
///          [ M11 u  M12 u  rho I + M11 uu^T  0    ]
///          [ 0      0      0               I / c  ]
/// ```
///
/// symmetric by construction, and positive definite exactly when the energy
/// Hessian is positive definite and `rho > 0`.
pub fn pi_eval(v: &ConjugateState, eos: &EosModel, guess: ThermoState) -> Result<PiEval> {
    let p = from_conjugate(v, eos, guess)?;
    let ev = thermo::evaluate(eos, p.thermo())?;
    let e_total = ev.energy
        + p.momentum.norm_squared() / (2.0 * p.rho)
        + 0.5 * p.capillarity * p.grad_rho.norm_squared();
    let value = p.rho * v.potential
        + p.eta * v.temperature
        + p.momentum.dot(&v.velocity)
        + p.grad_rho.dot(&v.grad_dual)
        - e_total;

    let mut grad = SVector::<f64, DIM>::zeros();
    grad[0] = p.rho;
    grad[1] = p.eta;
    for i in 0..3 {
        grad[2 + i] = p.momentum[i];
        grad[5 + i] = p.grad_rho[i];
    }

    let h = ev.hessian;
    let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(0, 1)];
    let hscale = h.amax().max(f64::MIN_POSITIVE);
    if det.abs() <= 1e-14 * hscale * hscale {
        return Err(Error::SingularJacobian { det });
    }
    let m = Matrix2::new(h[(1, 1)], -h[(0, 1)], -h[(0, 1)], h[(0, 0)]) / det;

    let u = v.velocity;
    let mut hess = SMatrix::<f64, DIM, DIM>::zeros();
    hess[(0, 0)] = m[(0, 0)];
    hess[(0, 1)] = m[(0, 1)];
    hess[(1, 0)] = m[(0, 1)];
    hess[(1, 1)] = m[(1, 1)];
    for i in 0..3 {
        hess[(0, 2 + i)] = m[(0, 0)] * u[i];
        hess[(2 + i, 0)] = m[(0, 0)] * u[i];
        hess[(1, 2 + i)] = m[(0, 1)] * u[i];
        hess[(2 + i, 1)] = m[(0, 1)] * u[i];
        for j in 0..3 {
            // u[i]*u[j] grouped first so the entry is bitwise symmetric.
            hess[(2 + i, 2 + j)] = m[(0, 0)] * (u[i] * u[j]) + if i == j { p.rho } else { 0.0 };
        }
        hess[(5 + i, 5 + i)] = 1.0 / v.capillarity;
    }
    Ok(PiEval { value, grad, hess })
}
