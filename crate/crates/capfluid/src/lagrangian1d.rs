//! One-dimensional barotropic dynamics in mass-Lagrangian coordinates.
//!
//! The augmented system evolves the specific volume `v`, its gradient
//! variable `w` (initialized as `D v` and then carried independently) and the
//! velocity `u`:
//!
//! ```text
//! v_t = u_z,    w_t = u_zz,    u_t = -p_z,
//! p = -(de/dv - (de/dw)_z),    e = e(v, w).
//! ```
//!
//! In the conjugate variables `(sigma, r) = (de/dv, de/dw)` the system takes
//! a symmetric 3x3 form whose time-derivative coefficient is the Hessian of
//! the Legendre transform `pi(sigma, r) = sigma v + r w - e`, with constant
//! flux and capillary matrices. `dispersion_1d` evaluates the resulting
//! Hermitian pencil `k B1 + i k^2 C1 - lambda A`.
//!
//! The nonlinear solver discretizes on a periodic uniform grid with one
//! shared derivative stencil and classical RK4. With that operator choice
//! the semi-discrete energy `sum (u^2/2 + e) dz` is conserved exactly and
//! the constraint `w - D v` is preserved to roundoff, so the audit columns
//! measure the time integrator and nothing else.

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::grid::{max_abs_diff, PeriodicDeriv, StencilOrder};
use crate::linalg;
use crate::{Error, Result};

/// Energy density `e(v, w) = eps(v) + c_L w^2 / 2` with a selectable convex
/// bulk part. Analytic first and second partials; `d2e/dw2 = c_L > 0` keeps
/// the Legendre transform well defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Energy1D {
    /// `eps(v) = v^(1-gamma) / (gamma - 1)`, so `-eps'(v) = v^-gamma` is a
    /// gamma-law pressure in Lagrangian form. Convex for `v > 0`.
    PowerLaw { gamma: f64, capillarity: f64 },
    /// `eps(v) = stiffness * v^2 / 2`; globally convex, handy for closed
    /// forms.
    Quadratic { stiffness: f64, capillarity: f64 },
}

impl Energy1D {
    pub fn capillarity(&self) -> f64 {
        match *self {
            Energy1D::PowerLaw { capillarity, .. } => capillarity,
            Energy1D::Quadratic { capillarity, .. } => capillarity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Energy1D::PowerLaw { gamma, capillarity } => gamma > 1.0 && capillarity > 0.0,
            Energy1D::Quadratic {
                stiffness,
                capillarity,
            } => stiffness > 0.0 && capillarity > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "invalid 1-D energy parameters: {self:?}"
            )))
        }
    }

    fn bulk(&self, v: f64) -> Result<(f64, f64, f64)> {
        match *self {
            Energy1D::PowerLaw { gamma, .. } => {
                if !(v > 0.0) {
                    return Err(Error::PositivityLoss {
                        what: "specific volume",
                        value: v,
                    });
                }
                let eps = v.powf(1.0 - gamma) / (gamma - 1.0);
                let d1 = -v.powf(-gamma);
                let d2 = gamma * v.powf(-gamma - 1.0);
                Ok((eps, d1, d2))
            }
            Energy1D::Quadratic { stiffness, .. } => {
                Ok((0.5 * stiffness * v * v, stiffness * v, stiffness))
            }
        }
    }

    pub fn e(&self, v: f64, w: f64) -> Result<f64> {
        Ok(self.bulk(v)?.0 + 0.5 * self.capillarity() * w * w)
    }

    /// `sigma = de/dv`.
    pub fn de_dv(&self, v: f64, _w: f64) -> Result<f64> {
        Ok(self.bulk(v)?.1)
    }

    /// `r = de/dw`.
    pub fn de_dw(&self, _v: f64, w: f64) -> Result<f64> {
        Ok(self.capillarity() * w)
    }

    /// 2x2 Hessian of `e` in `(v, w)`.
    pub fn hessian(&self, v: f64, _w: f64) -> Result<Matrix2<f64>> {
        let d2 = self.bulk(v)?.2;
        Ok(Matrix2::new(d2, 0.0, 0.0, self.capillarity()))
    }
}

/// The Legendre transform of `e` at one conjugate point.
#[derive(Debug, Clone, Copy)]
pub struct LegendreEval1D {
    /// `pi = sigma v + r w - e(v, w)`.
    pub value: f64,
    /// Recovered primal coordinates.
    pub v: f64,
    pub w: f64,
    /// Hessian of `pi` in `(sigma, r)`: the inverse of the `e`-Hessian.
    pub hess: Matrix2<f64>,
}

/// Newton-invert `(de/dv, de/dw) = (sigma, r)` from a primal guess and
/// evaluate `pi` with its Hessian.
pub fn legendre_pi(
    sigma: f64,
    r: f64,
    efun: &Energy1D,
    guess_v: f64,
    guess_w: f64,
) -> Result<LegendreEval1D> {
    const MAX_ITER: usize = 50;
    const TOL: f64 = 1e-12;
    let scale_s = 1.0 + sigma.abs();
    let scale_r = 1.0 + r.abs();

    let mut v = guess_v;
    let mut w = guess_w;
    let mut fv = efun.de_dv(v, w)? - sigma;
    let mut fw = efun.de_dw(v, w)? - r;
    let mut rnorm = (fv / scale_s).abs().max((fw / scale_r).abs());
    for it in 0..MAX_ITER {
        if rnorm <= TOL {
            break;
        }
        let h = efun.hessian(v, w)?;
        let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(0, 1)];
        let hscale = h.amax().max(f64::MIN_POSITIVE);
        if det.abs() <= 1e-14 * hscale * hscale {
            return Err(Error::SingularJacobian { det });
        }
        let dv = -(h[(1, 1)] * fv - h[(0, 1)] * fw) / det;
        let dw = -(-h[(0, 1)] * fv + h[(0, 0)] * fw) / det;
        let mut step = 1.0;
        let mut advanced = false;
        for _ in 0..40 {
            let (tv, tw) = (v + step * dv, w + step * dw);
            if let (Ok(tfv), Ok(tfw)) = (efun.de_dv(tv, tw), efun.de_dw(tv, tw)) {
                let tnorm = ((tfv - sigma) / scale_s)
                    .abs()
                    .max(((tfw - r) / scale_r).abs());
                if tnorm < rnorm {
                    (v, w) = (tv, tw);
                    (fv, fw) = (tfv - sigma, tfw - r);
                    rnorm = tnorm;
                    advanced = true;
                    break;
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
    if rnorm > TOL {
        return Err(Error::NewtonNoConvergence {
            iterations: MAX_ITER,
            residual: rnorm,
        });
    }

    let h = efun.hessian(v, w)?;
    let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(0, 1)];
    if det == 0.0 {
        return Err(Error::SingularJacobian { det });
    }
    let hess = Matrix2::new(h[(1, 1)], -h[(0, 1)], -h[(0, 1)], h[(0, 0)]) / det;
    Ok(LegendreEval1D {
        value: sigma * v + r * w - efun.e(v, w)?,
        v,
        w,
        hess,
    })
}

/// The symmetric 3x3 system in the ordering `(sigma, r, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianMatrices {
    /// `[[pi_ss, pi_sr, 0], [pi_sr, pi_rr, 0], [0, 0, 1]]`.
    pub mass: Matrix3<f64>,
    /// Constant symmetric flux matrix.
    pub flux: Matrix3<f64>,
    /// Constant antisymmetric capillary matrix.
    pub capillary: Matrix3<f64>,
}

/// The state-independent flux matrix `B1`.
pub fn flux_matrix_1d() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0)
}

/// The state-independent capillary matrix `C1`.
pub fn capillary_matrix_1d() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0)
}

pub fn assemble_matrices_1d(
    sigma: f64,
    r: f64,
    efun: &Energy1D,
    guess_v: f64,
    guess_w: f64,
) -> Result<LagrangianMatrices> {
    let pi = legendre_pi(sigma, r, efun, guess_v, guess_w)?;
    let mut mass = Matrix3::zeros();
    mass[(0, 0)] = pi.hess[(0, 0)];
    mass[(0, 1)] = pi.hess[(0, 1)];
    mass[(1, 0)] = pi.hess[(0, 1)];
    mass[(1, 1)] = pi.hess[(1, 1)];
    mass[(2, 2)] = 1.0;
    Ok(LagrangianMatrices {
        mass,
        flux: flux_matrix_1d(),
        capillary: capillary_matrix_1d(),
    })
}

/// Solve `det(k B1 + i k^2 C1 - lambda A) = 0`: three real frequencies in
/// ascending order, by the same Cholesky-reduction Hermitian path as the
/// Eulerian pencil.
pub fn dispersion_1d(
    sigma: f64,
    r: f64,
    k: f64,
    efun: &Energy1D,
    guess_v: f64,
    guess_w: f64,
) -> Result<[f64; 3]> {
    let mats = assemble_matrices_1d(sigma, r, efun, guess_v, guess_w)?;
    let b: linalg::RMatrix<3> = mats.flux * k;
    let c: linalg::RMatrix<3> = mats.capillary * (k * k);
    let eigs = linalg::hermitian_pencil_eigs(&b, &c, &mats.mass)?;
    Ok([
        eigs.modes[0].lambda,
        eigs.modes[1].lambda,
        eigs.modes[2].lambda,
    ])
}

/// Periodic field of the augmented system on the mass coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianField {
    pub deriv: PeriodicDeriv,
    /// Specific volume per node, > 0.
    pub v: Vec<f64>,
    /// Gradient variable per node (initialized as `D v`, then independent).
    pub w: Vec<f64>,
    /// Velocity per node.
    pub u: Vec<f64>,
    pub time: f64,
}

impl LagrangianField {
    pub fn n(&self) -> usize {
        self.deriv.n
    }

    pub fn dz(&self) -> f64 {
        self.deriv.h
    }

    pub fn uniform(n: usize, length: f64, v0: f64, order: StencilOrder) -> Result<Self> {
        let deriv = PeriodicDeriv::new(n, length / n as f64, order)?;
        Ok(Self {
            deriv,
            v: vec![v0; n],
            w: vec![0.0; n],
            u: vec![0.0; n],
            time: 0.0,
        })
    }

    /// `v = v0 (1 + amplitude sin(2 pi mode z / L))`, `w = D v` (compatible),
    /// `u = 0`.
    pub fn standing_wave(
        n: usize,
        length: f64,
        v0: f64,
        amplitude: f64,
        mode: usize,
        order: StencilOrder,
    ) -> Result<Self> {
        let mut field = Self::uniform(n, length, v0, order)?;
        for i in 0..n {
            let z = length * i as f64 / n as f64;
            field.v[i] =
                v0 * (1.0 + amplitude * (std::f64::consts::TAU * mode as f64 * z / length).sin());
        }
        field.w = field.deriv.d(&field.v);
        Ok(field)
    }

    /// `max_i |w_i - (D v)_i|`.
    pub fn constraint_norm(&self) -> f64 {
        max_abs_diff(&self.w, &self.deriv.d(&self.v))
    }

    pub fn min_v(&self) -> f64 {
        self.v.iter().fold(f64::INFINITY, |m, &x| m.min(x))
    }
}

/// Per-node variational pressure `p = -(de/dv - D[de/dw])`.
pub fn variational_pressure(field: &LagrangianField, efun: &Energy1D) -> Result<Vec<f64>> {
    let n = field.n();
    let r = (0..n)
        .map(|i| efun.de_dw(field.v[i], field.w[i]))
        .collect::<Result<Vec<f64>>>()?;
    let dr = field.deriv.d(&r);
    let mut p = vec![0.0; n];
    for i in 0..n {
        p[i] = dr[i] - efun.de_dv(field.v[i], field.w[i])?;
    }
    Ok(p)
}

/// Semi-discrete right-hand side; every derivative is the field's own `D`.
pub struct LagrangianRhs {
    pub v_dot: Vec<f64>,
    pub w_dot: Vec<f64>,
    pub u_dot: Vec<f64>,
}

pub fn rhs(field: &LagrangianField, efun: &Energy1D) -> Result<LagrangianRhs> {
    let p = variational_pressure(field, efun)?;
    let du = field.deriv.d(&field.u);
    let v_dot = du.clone();
    let w_dot = field.deriv.d(&du);
    let mut u_dot = field.deriv.d(&p);
    for x in u_dot.iter_mut() {
        *x = -*x;
    }
    Ok(LagrangianRhs {
        v_dot,
        w_dot,
        u_dot,
    })
}

/// Total energy `sum (u^2/2 + e(v, w)) dz`; periodic fluxes cancel, so this
/// is the conserved audit quantity.
pub fn total_energy(field: &LagrangianField, efun: &Energy1D) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..field.n() {
        sum += 0.5 * field.u[i] * field.u[i] + efun.e(field.v[i], field.w[i])?;
    }
    Ok(sum * field.dz())
}

/// Largest stable explicit step: `cfl * min(dz / a, dz^2 / (2 sqrt(c_L)))`
/// with `a = sqrt(max e_vv)`. The quadratic spacing term reflects the `k^2`
/// growth of the capillary branch frequency.
pub fn stable_dt(field: &LagrangianField, efun: &Energy1D, cfl: f64) -> Result<f64> {
    let mut max_evv = 0.0_f64;
    for i in 0..field.n() {
        max_evv = max_evv.max(efun.hessian(field.v[i], field.w[i])?[(0, 0)]);
    }
    let dz = field.dz();
    let acoustic = if max_evv > 0.0 {
        dz / max_evv.sqrt()
    } else {
        f64::INFINITY
    };
    let capillary = dz * dz / (2.0 * efun.capillarity().sqrt());
    Ok(cfl * acoustic.min(capillary))
}

/// Classical four-stage explicit Runge-Kutta step.
pub fn step_rk4(field: &mut LagrangianField, efun: &Energy1D, dt: f64) -> Result<()> {
    let n = field.n();
    let stage = |base: &LagrangianField, k: &LagrangianRhs, h: f64| -> LagrangianField {
        let mut out = base.clone();
        for i in 0..n {
            out.v[i] = base.v[i] + h * k.v_dot[i];
            out.w[i] = base.w[i] + h * k.w_dot[i];
            out.u[i] = base.u[i] + h * k.u_dot[i];
        }
        out
    };
    let k1 = rhs(field, efun)?;
    let y2 = stage(field, &k1, 0.5 * dt);
    let k2 = rhs(&y2, efun)?;
    let y3 = stage(field, &k2, 0.5 * dt);
    let k3 = rhs(&y3, efun)?;
    let y4 = stage(field, &k3, dt);
    let k4 = rhs(&y4, efun)?;
    let w = dt / 6.0;
    for i in 0..n {
        field.v[i] += w * (k1.v_dot[i] + 2.0 * k2.v_dot[i] + 2.0 * k3.v_dot[i] + k4.v_dot[i]);
        field.w[i] += w * (k1.w_dot[i] + 2.0 * k2.w_dot[i] + 2.0 * k3.w_dot[i] + k4.w_dot[i]);
        field.u[i] += w * (k1.u_dot[i] + 2.0 * k2.u_dot[i] + 2.0 * k3.u_dot[i] + k4.u_dot[i]);
    }
    field.time += dt;
    Ok(())
}

/// One audit record of a Lagrangian run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianAudit {
    pub t: f64,
    pub energy: f64,
    pub constraint_norm: f64,
    pub min_v: f64,
}

pub use crate::sim::{RunOptions, RunOutcome};

/// A completed (or aborted) run: audit series, optional snapshots, outcome.
#[derive(Debug, Clone)]
pub struct LagrangianRun {
    pub audits: Vec<LagrangianAudit>,
    pub snapshots: Vec<LagrangianField>,
    pub outcome: RunOutcome,
}

fn field_finite(field: &LagrangianField) -> bool {
    field
        .v
        .iter()
        .chain(&field.w)
        .chain(&field.u)
        .all(|x| x.is_finite())
}

/// March to `opts.t_final`, recording audits every `audit_every` steps. Any
/// non-finite node (or positivity loss inside the energy) aborts the run,
/// restores the last good state and reports [`RunOutcome::BlowUp`].
pub fn run(
    field: &mut LagrangianField,
    efun: &Energy1D,
    opts: &RunOptions,
) -> Result<LagrangianRun> {
    let n_steps = opts.n_steps(field.time)?;
    let audit = |f: &LagrangianField| -> Result<LagrangianAudit> {
        Ok(LagrangianAudit {
            t: f.time,
            energy: total_energy(f, efun)?,
            constraint_norm: f.constraint_norm(),
            min_v: f.min_v(),
        })
    };
    let mut audits = vec![audit(field)?];
    let mut snapshots = Vec::new();
    if opts.snapshot_every.is_some() {
        snapshots.push(field.clone());
    }
    for step in 1..=n_steps {
        let last_good = field.clone();
        let ok = step_rk4(field, efun, opts.dt).is_ok() && field_finite(field);
        if !ok {
            *field = last_good;
            return Ok(LagrangianRun {
                audits,
                snapshots,
                outcome: RunOutcome::BlowUp {
                    t_last_good: field.time,
                },
            });
        }
        if step % opts.audit_every == 0 || step == n_steps {
            audits.push(audit(field)?);
        }
        if let Some(every) = opts.snapshot_every {
            if step % every == 0 || step == n_steps {
                snapshots.push(field.clone());
            }
        }
    }
    Ok(LagrangianRun {
        audits,
        snapshots,
        outcome: RunOutcome::Completed,
    })
}
