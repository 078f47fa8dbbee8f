//! Nonlinear 1-D Eulerian dynamics of the augmented capillary system.
//!
//! The non-divergence form is discretized directly, with one shared periodic
//! stencil `D` for every spatial derivative:
//!
//! ```text
//! rho_t = -D j
//! eta_t = -D (eta j / rho)
//! j_t   = -D (j^2 / rho + P) + c rho D(D w)
//! w_t   = -D (D j)
//! ```
//!
//! where `P` is the Gibbs-Duhem-consistent pressure (see
//! [`crate::thermo::ThermoEval::mechanical_pressure`]); with it the periodic
//! energy sum `sum (eps + j^2/(2 rho) + c w^2/2) dx` is conserved to spatial
//! truncation error and the energy audit isolates the time integrator.
//! Because `w_t` and `rho_t` are built from the same `D`, the constraint
//! `w - D rho` is a semi-discrete invariant: compatible data stays
//! compatible, incompatible data is transported, never amplified.
//!
//! Momentum is conserved exactly by the flux terms; the non-divergence
//! capillary term contributes `c * rho . D(D w) dx`, which vanishes when
//! `w = D rho` because `rho . D^3 rho = 0` for an antisymmetric stencil, so
//! the momentum audit tracks the constraint norm.

use crate::grid::{max_abs_diff, PeriodicDeriv, StencilOrder};
use crate::sim::{RunOptions, RunOutcome};
use crate::thermo::{self, EosModel, ThermoState};
use crate::{Error, Result};

/// Periodic field of the 1-D augmented Eulerian system.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianField {
    pub deriv: PeriodicDeriv,
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
    /// Momentum density `j = rho u`.
    pub j: Vec<f64>,
    /// Density-gradient variable, evolved independently.
    pub w: Vec<f64>,
    /// Capillarity coefficient (>= 0; zero reduces to gas dynamics).
    pub capillarity: f64,
    pub time: f64,
}

impl EulerianField {
    pub fn n(&self) -> usize {
        self.deriv.n
    }

    pub fn dx(&self) -> f64 {
        self.deriv.h
    }

    pub fn uniform(
        n: usize,
        length: f64,
        rho0: f64,
        eta0: f64,
        u0: f64,
        capillarity: f64,
        order: StencilOrder,
    ) -> Result<Self> {
        let deriv = PeriodicDeriv::new(n, length / n as f64, order)?;
        Ok(Self {
            deriv,
            rho: vec![rho0; n],
            eta: vec![eta0; n],
            j: vec![rho0 * u0; n],
            w: vec![0.0; n],
            capillarity,
            time: 0.0,
        })
    }

    /// Density perturbation `rho = rho0 (1 + amplitude sin(2 pi mode x / L))`
    /// at uniform specific entropy `eta0 / rho0` and uniform velocity, with
    /// `w = D rho` (compatible initialization).
    #[allow(clippy::too_many_arguments)]
    pub fn standing_wave(
        n: usize,
        length: f64,
        rho0: f64,
        eta0: f64,
        u0: f64,
        amplitude: f64,
        mode: usize,
        capillarity: f64,
        order: StencilOrder,
    ) -> Result<Self> {
        let mut field = Self::uniform(n, length, rho0, eta0, u0, capillarity, order)?;
        let s0 = eta0 / rho0;
        for i in 0..n {
            let x = length * i as f64 / n as f64;
            let rho =
                rho0 * (1.0 + amplitude * (std::f64::consts::TAU * mode as f64 * x / length).sin());
            field.rho[i] = rho;
            field.eta[i] = s0 * rho;
            field.j[i] = rho * u0;
        }
        field.w = field.deriv.d(&field.rho);
        Ok(field)
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().fold(f64::INFINITY, |m, &x| m.min(x))
    }
}

/// Semi-discrete right-hand side of the augmented system.
pub struct EulerianRhs {
    pub rho_dot: Vec<f64>,
    pub eta_dot: Vec<f64>,
    pub j_dot: Vec<f64>,
    pub w_dot: Vec<f64>,
}

pub fn rhs_eulerian(field: &EulerianField, eos: &EosModel) -> Result<EulerianRhs> {
    let n = field.n();
    let mut eta_flux = vec![0.0; n];
    let mut mom_flux = vec![0.0; n];
    for i in 0..n {
        let rho = field.rho[i];
        if !(rho > 0.0) {
            return Err(Error::PositivityLoss {
                what: "density",
                value: rho,
            });
        }
        let ev = thermo::evaluate(eos, ThermoState::new(rho, field.eta[i]))?;
        eta_flux[i] = field.eta[i] * field.j[i] / rho;
        mom_flux[i] = field.j[i] * field.j[i] / rho + ev.mechanical_pressure();
    }

    let dj = field.deriv.d(&field.j);
    let rho_dot: Vec<f64> = dj.iter().map(|x| -x).collect();
    let eta_dot: Vec<f64> = field.deriv.d(&eta_flux).iter().map(|x| -x).collect();
    let ddw = field.deriv.d(&field.deriv.d(&field.w));
    let dmf = field.deriv.d(&mom_flux);
    let j_dot: Vec<f64> = (0..n)
        .map(|i| -dmf[i] + field.capillarity * field.rho[i] * ddw[i])
        .collect();
    let w_dot: Vec<f64> = field.deriv.d(&dj).iter().map(|x| -x).collect();
    Ok(EulerianRhs {
        rho_dot,
        eta_dot,
        j_dot,
        w_dot,
    })
}

/// Periodic sum of the energy density `eps + j^2/(2 rho) + c w^2/2`; the
/// flux terms of the energy law, including the capillary flux
/// `c (w div j - j div w)`, cancel around the ring.
pub fn energy_audit(field: &EulerianField, eos: &EosModel) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..field.n() {
        let ev = thermo::evaluate(eos, ThermoState::new(field.rho[i], field.eta[i]))?;
        sum += ev.energy
            + field.j[i] * field.j[i] / (2.0 * field.rho[i])
            + 0.5 * field.capillarity * field.w[i] * field.w[i];
    }
    Ok(sum * field.dx())
}

/// `max_i |w_i - (D rho)_i|`.
pub fn constraint_audit(field: &EulerianField) -> f64 {
    max_abs_diff(&field.w, &field.deriv.d(&field.rho))
}

/// Total momentum `sum j dx`.
pub fn momentum_audit(field: &EulerianField) -> f64 {
    field.j.iter().sum::<f64>() * field.dx()
}

/// Largest stable explicit step:
/// `cfl * min(dx / max(|u| + a), dx^2 / (2 sqrt(c rho_max)))`.
pub fn stable_dt(field: &EulerianField, eos: &EosModel, cfl: f64) -> Result<f64> {
    let mut wave = 0.0_f64;
    let mut rho_max = 0.0_f64;
    for i in 0..field.n() {
        let rho = field.rho[i];
        if !(rho > 0.0) {
            return Err(Error::PositivityLoss {
                what: "density",
                value: rho,
            });
        }
        let a2 = thermo::sound_speed_sq(eos, ThermoState::new(rho, field.eta[i]))?;
        wave = wave.max(field.j[i].abs() / rho + a2.max(0.0).sqrt());
        rho_max = rho_max.max(rho);
    }
    let dx = field.dx();
    let acoustic = if wave > 0.0 { dx / wave } else { f64::INFINITY };
    let cap = field.capillarity * rho_max;
    let capillary = if cap > 0.0 {
        dx * dx / (2.0 * cap.sqrt())
    } else {
        f64::INFINITY
    };
    Ok(cfl * acoustic.min(capillary))
}

/// Classical four-stage explicit Runge-Kutta step.
pub fn step_rk4(field: &mut EulerianField, eos: &EosModel, dt: f64) -> Result<()> {
    let n = field.n();
    let stage = |base: &EulerianField, k: &EulerianRhs, h: f64| -> EulerianField {
        let mut out = base.clone();
        for i in 0..n {
            out.rho[i] = base.rho[i] + h * k.rho_dot[i];
            out.eta[i] = base.eta[i] + h * k.eta_dot[i];
            out.j[i] = base.j[i] + h * k.j_dot[i];
            out.w[i] = base.w[i] + h * k.w_dot[i];
        }
        out
    };
    let k1 = rhs_eulerian(field, eos)?;
    let y2 = stage(field, &k1, 0.5 * dt);
    let k2 = rhs_eulerian(&y2, eos)?;
    let y3 = stage(field, &k2, 0.5 * dt);
    let k3 = rhs_eulerian(&y3, eos)?;
    let y4 = stage(field, &k3, dt);
    let k4 = rhs_eulerian(&y4, eos)?;
    let w = dt / 6.0;
    for i in 0..n {
        field.rho[i] +=
            w * (k1.rho_dot[i] + 2.0 * k2.rho_dot[i] + 2.0 * k3.rho_dot[i] + k4.rho_dot[i]);
        field.eta[i] +=
            w * (k1.eta_dot[i] + 2.0 * k2.eta_dot[i] + 2.0 * k3.eta_dot[i] + k4.eta_dot[i]);
        field.j[i] += w * (k1.j_dot[i] + 2.0 * k2.j_dot[i] + 2.0 * k3.j_dot[i] + k4.j_dot[i]);
        field.w[i] += w * (k1.w_dot[i] + 2.0 * k2.w_dot[i] + 2.0 * k3.w_dot[i] + k4.w_dot[i]);
    }
    field.time += dt;
    Ok(())
}

/// One audit record of an Eulerian run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerianAudit {
    pub t: f64,
    pub energy: f64,
    pub momentum: f64,
    pub constraint_norm: f64,
    pub min_rho: f64,
}

/// A completed (or aborted) run.
#[derive(Debug, Clone)]
pub struct EulerianRun {
    pub audits: Vec<EulerianAudit>,
    pub snapshots: Vec<EulerianField>,
    pub outcome: RunOutcome,
}

fn field_finite(field: &EulerianField) -> bool {
    field
        .rho
        .iter()
        .chain(&field.eta)
        .chain(&field.j)
        .chain(&field.w)
        .all(|x| x.is_finite())
}

/// March to `opts.t_final` with audits and optional snapshots; positivity
/// loss or non-finite nodes abort with the last good state restored.
pub fn run(field: &mut EulerianField, eos: &EosModel, opts: &RunOptions) -> Result<EulerianRun> {
    let n_steps = opts.n_steps(field.time)?;
    let audit = |f: &EulerianField| -> Result<EulerianAudit> {
        Ok(EulerianAudit {
            t: f.time,
            energy: energy_audit(f, eos)?,
            momentum: momentum_audit(f),
            constraint_norm: constraint_audit(f),
            min_rho: f.min_rho(),
        })
    };
    let mut audits = vec![audit(field)?];
    let mut snapshots = Vec::new();
    if opts.snapshot_every.is_some() {
        snapshots.push(field.clone());
    }
    for step in 1..=n_steps {
        let last_good = field.clone();
        let ok =
            step_rk4(field, eos, opts.dt).is_ok() && field_finite(field) && field.min_rho() > 0.0;
        if !ok {
            *field = last_good;
            return Ok(EulerianRun {
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
    Ok(EulerianRun {
        audits,
        snapshots,
        outcome: RunOutcome::Completed,
    })
}
