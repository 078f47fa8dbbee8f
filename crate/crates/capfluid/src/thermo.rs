//! Equation-of-state layer.
//!
//! The bulk energy density `eps(rho, eta)` is a function of the mass density
//! and the entropy *per unit volume* (not specific entropy). Its gradient
//! gives the chemical potential and temperature via the Gibbs identity
//! `d eps = mu d rho + theta d eta`; its 2x2 Hessian decides local convexity,
//! which is the hypothesis behind every spectral-stability statement in this
//! crate. All derivatives are closed form; finite differences appear only in
//! tests.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point in the `(rho, eta)` thermodynamic plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    /// Mass density, > 0.
    pub rho: f64,
    /// Entropy per unit volume.
    pub eta: f64,
}

impl ThermoState {
    pub fn new(rho: f64, eta: f64) -> Self {
        Self { rho, eta }
    }
}

/// Bulk equation of state.
///
/// The polytropic form `eps = K/(gamma-1) * rho^gamma * exp((gamma-1)*eta/rho)`
/// is smooth and globally convex for `gamma > 1`, so it is the workhorse for
/// everything that needs a positive-definite Hessian. The van der Waals form
/// (constant specific heat, unit reference temperature) loses convexity in a
/// spinodal region and exists to exercise exactly that failure mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EosModel {
    Polytropic {
        /// Pressure scale, > 0.
        k: f64,
        /// Adiabatic exponent, > 1.
        gamma: f64,
    },
    VanDerWaals {
        /// Attraction parameter, > 0.
        a: f64,
        /// Covolume, > 0; states must satisfy `rho * b < 1`.
        b: f64,
        /// Gas constant, > 0.
        r: f64,
        /// Specific heat at constant volume, > 0. The gamma-like exponent of
        /// the ideal part is `1 + r/cv`.
        cv: f64,
    },
}

impl EosModel {
    /// Parameter sanity check; state-dependent checks live in [`evaluate`].
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EosModel::Polytropic { k, gamma } => k > 0.0 && gamma > 1.0,
            EosModel::VanDerWaals { a, b, r, cv } => a > 0.0 && b > 0.0 && r > 0.0 && cv > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "invalid EOS parameters: {self:?}"
            )))
        }
    }
}

/// Full pointwise evaluation of the equation of state.
#[derive(Debug, Clone, Copy)]
pub struct ThermoEval {
    /// The evaluated state, echoed for convenience.
    pub rho: f64,
    pub eta: f64,
    /// Energy per unit volume, `eps(rho, eta)`.
    pub energy: f64,
    /// `d eps / d rho` (chemical potential in the Gibbs identity).
    pub chemical_potential: f64,
    /// `d eps / d eta` (temperature).
    pub temperature: f64,
    /// `rho * chemical_potential - energy`.
    pub pressure: f64,
    /// 2x2 Hessian of `eps` in `(rho, eta)`.
    pub hessian: Matrix2<f64>,
    /// True iff the Hessian is positive definite (leading-minor test).
    pub convex: bool,
}

impl ThermoEval {
    /// Pressure satisfying the Gibbs-Duhem relation `dP = rho dmu + eta dtheta`,
    /// i.e. `rho*mu + eta*theta - eps`. This is the pressure that enters the
    /// momentum flux and the Legendre potential; it exceeds [`pressure`] by
    /// `temperature * eta`, and the two coincide on zero-entropy states.
    ///
    /// [`pressure`]: Self::pressure
    pub fn mechanical_pressure(&self) -> f64 {
        self.pressure + self.temperature * self.eta
    }

    /// Partials of the mechanical pressure in `(rho, eta)`.
    pub fn mechanical_pressure_grad(&self) -> (f64, f64) {
        let h = &self.hessian;
        (
            self.rho * h[(0, 0)] + self.eta * h[(0, 1)],
            self.rho * h[(0, 1)] + self.eta * h[(1, 1)],
        )
    }
}

/// Evaluate the EOS: energy, first derivatives, Hessian, convexity flag.
///
/// Errors on `rho <= 0`, on a violated covolume bound, and on non-finite
/// output (which also covers states outside the EOS domain).
pub fn evaluate(eos: &EosModel, s: ThermoState) -> Result<ThermoEval> {
    if !(s.rho > 0.0) {
        return Err(Error::NonPositiveDensity { rho: s.rho });
    }
    let (energy, e_r, e_e, e_rr, e_re, e_ee) = match *eos {
        EosModel::Polytropic { k, gamma } => {
            let g1 = gamma - 1.0;
            let f = (g1 * s.eta / s.rho).exp();
            let a = k / g1;
            let energy = a * s.rho.powf(gamma) * f;
            let e_r = a * s.rho.powf(gamma - 2.0) * f * (gamma * s.rho - g1 * s.eta);
            let e_e = k * s.rho.powf(g1) * f;
            let e_rr =
                k * f * s.rho.powf(gamma - 4.0) * (g1 * (s.eta - s.rho).powi(2) + s.rho * s.rho);
            let e_re = k * g1 * f * s.rho.powf(gamma - 3.0) * (s.rho - s.eta);
            let e_ee = k * g1 * s.rho.powf(gamma - 2.0) * f;
            (energy, e_r, e_e, e_rr, e_re, e_ee)
        }
        EosModel::VanDerWaals { a, b, r, cv } => {
            let rho_b = s.rho * b;
            if rho_b >= 1.0 {
                return Err(Error::CovolumeExceeded { rho_b });
            }
            // eps = phi(rho) * G - a*rho^2 with
            // phi = cv * rho^(1+m) * (1 - b*rho)^(-m),  m = r/cv,
            // G = exp(eta / (cv * rho)).
            let m = r / cv;
            let one_b = 1.0 - rho_b;
            let g = (s.eta / (cv * s.rho)).exp();
            let phi = cv * s.rho.powf(1.0 + m) * one_b.powf(-m);
            let phi_p = cv * s.rho.powf(m) * one_b.powf(-m - 1.0) * (1.0 + m - rho_b);
            let phi_pp = cv
                * s.rho.powf(m - 1.0)
                * one_b.powf(-m - 2.0)
                * (m * one_b * (1.0 + m - rho_b) + (m + 1.0) * rho_b * (1.0 + m - rho_b)
                    - rho_b * one_b);
            let cr = cv * s.rho;
            let energy = phi * g - a * s.rho * s.rho;
            let e_r = g * (phi_p - phi * s.eta / (cr * s.rho)) - 2.0 * a * s.rho;
            let e_e = phi * g / cr;
            let e_rr = g
                * (phi_pp - 2.0 * phi_p * s.eta / (cr * s.rho)
                    + phi * s.eta * s.eta / (cr * cr * s.rho * s.rho)
                    + 2.0 * phi * s.eta / (cr * s.rho * s.rho))
                - 2.0 * a;
            let e_re = g * (phi_p / cr - phi / (cr * s.rho) - phi * s.eta / (cr * cr * s.rho));
            let e_ee = phi * g / (cr * cr);
            (energy, e_r, e_e, e_rr, e_re, e_ee)
        }
    };
    let pressure = s.rho * e_r - energy;
    let hessian = Matrix2::new(e_rr, e_re, e_re, e_ee);
    let convex = e_rr > 0.0 && (e_rr * e_ee - e_re * e_re) > 0.0;
    let eval = ThermoEval {
        rho: s.rho,
        eta: s.eta,
        energy,
        chemical_potential: e_r,
        temperature: e_e,
        pressure,
        hessian,
        convex,
    };
    let finite = energy.is_finite()
        && e_r.is_finite()
        && e_e.is_finite()
        && e_rr.is_finite()
        && e_re.is_finite()
        && e_ee.is_finite();
    if !finite {
        return Err(Error::NonFinite {
            context: "thermo::evaluate",
        });
    }
    Ok(eval)
}

/// Squared adiabatic sound speed: the derivative of the mechanical pressure
/// along a path of constant specific entropy `eta/rho`. In terms of the
/// energy Hessian `H` this is the quadratic form `z^T H z / rho` with
/// `z = (rho, eta)`, so it is positive whenever the state is convex; inside
/// a spinodal region it may legitimately be negative and is reported as such.
pub fn sound_speed_sq(eos: &EosModel, s: ThermoState) -> Result<f64> {
    let ev = evaluate(eos, s)?;
    let h = &ev.hessian;
    let z =
        (s.rho * s.rho * h[(0, 0)] + 2.0 * s.rho * s.eta * h[(0, 1)] + s.eta * s.eta * h[(1, 1)])
            / s.rho;
    Ok(z)
}

/// Entropy per unit volume that realizes temperature `t` at density `rho`.
/// Useful for placing van der Waals states relative to the spinodal, where
/// the natural coordinates are `(rho, T)`.
pub fn eta_for_temperature(eos: &EosModel, rho: f64, t: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::NonPositiveDensity { rho });
    }
    if !(t > 0.0) {
        return Err(Error::TemperatureOutOfRange { theta: t });
    }
    match *eos {
        EosModel::Polytropic { k, gamma } => {
            let g1 = gamma - 1.0;
            Ok(rho * (t / (k * rho.powf(g1))).ln() / g1)
        }
        EosModel::VanDerWaals { b, r, cv, .. } => {
            let v_hat = 1.0 / rho;
            if v_hat <= b {
                return Err(Error::CovolumeExceeded { rho_b: rho * b });
            }
            let m = r / cv;
            Ok(rho * cv * (t.ln() + m * (v_hat - b).ln()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) const POLY_REF: EosModel = EosModel::Polytropic { k: 1.0, gamma: 2.0 };
    const VDW_REF: EosModel = EosModel::VanDerWaals {
        a: 1.0,
        b: 1.0 / 3.0,
        r: 1.0,
        cv: 1.5,
    };

    fn fd_step(x: f64) -> f64 {
        1e-6 * (1.0 + x.abs())
    }

    /// Central finite differences of the energy; the independent oracle for
    /// every analytic derivative in this module.
    fn fd_gradient(eos: &EosModel, s: ThermoState) -> (f64, f64) {
        let hr = fd_step(s.rho);
        let he = fd_step(s.eta);
        let ep = |rho, eta| evaluate(eos, ThermoState::new(rho, eta)).unwrap().energy;
        (
            (ep(s.rho + hr, s.eta) - ep(s.rho - hr, s.eta)) / (2.0 * hr),
            (ep(s.rho, s.eta + he) - ep(s.rho, s.eta - he)) / (2.0 * he),
        )
    }

    fn fd_hessian(eos: &EosModel, s: ThermoState) -> Matrix2<f64> {
        let hr = fd_step(s.rho);
        let he = fd_step(s.eta);
        let grad = |rho, eta| {
            let ev = evaluate(eos, ThermoState::new(rho, eta)).unwrap();
            (ev.chemical_potential, ev.temperature)
        };
        let (mu_rp, th_rp) = grad(s.rho + hr, s.eta);
        let (mu_rm, th_rm) = grad(s.rho - hr, s.eta);
        let (mu_ep, th_ep) = grad(s.rho, s.eta + he);
        let (mu_em, th_em) = grad(s.rho, s.eta - he);
        Matrix2::new(
            (mu_rp - mu_rm) / (2.0 * hr),
            (mu_ep - mu_em) / (2.0 * he),
            (th_rp - th_rm) / (2.0 * hr),
            (th_ep - th_em) / (2.0 * he),
        )
    }

    fn sample_states(n: usize, seed: u64) -> Vec<ThermoState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let rho = rng.random_range(0.5..1.8);
                let eta = rng.random_range(-0.4..0.4);
                ThermoState::new(rho, eta)
            })
            .collect()
    }

    #[test]
    fn polytropic_reference_point_closed_form() {
        // K=1, gamma=2 at (rho, eta) = (1, 0): worked by hand from the
        // closed form eps = K/(gamma-1) rho^gamma exp((gamma-1) eta/rho).
        let ev = evaluate(&POLY_REF, ThermoState::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(ev.energy, 1.0, max_relative = 1e-14);
        assert_relative_eq!(ev.chemical_potential, 2.0, max_relative = 1e-14);
        assert_relative_eq!(ev.temperature, 1.0, max_relative = 1e-14);
        assert_relative_eq!(ev.pressure, 1.0, max_relative = 1e-14);
        assert_relative_eq!(ev.hessian[(0, 0)], 2.0, max_relative = 1e-14);
        assert_relative_eq!(ev.hessian[(0, 1)], 1.0, max_relative = 1e-14);
        assert_relative_eq!(ev.hessian[(1, 1)], 1.0, max_relative = 1e-14);
        assert!(ev.convex);

        // Cross-check the gradient against finite differences of eps.
        let (mu_fd, th_fd) = fd_gradient(&POLY_REF, ThermoState::new(1.0, 0.0));
        assert_relative_eq!(ev.chemical_potential, mu_fd, max_relative = 1e-6);
        assert_relative_eq!(ev.temperature, th_fd, max_relative = 1e-6);
    }

    #[test]
    fn derivatives_match_finite_differences_both_eos() {
        for (eos, seed) in [(POLY_REF, 1u64), (VDW_REF, 2u64)] {
            for s in sample_states(40, seed) {
                if let EosModel::VanDerWaals { b, .. } = eos {
                    if s.rho * b >= 0.95 {
                        continue;
                    }
                }
                let ev = evaluate(&eos, s).unwrap();
                let (mu_fd, th_fd) = fd_gradient(&eos, s);
                assert_relative_eq!(ev.chemical_potential, mu_fd, max_relative = 1e-6);
                assert_relative_eq!(ev.temperature, th_fd, max_relative = 1e-6);
                let h_fd = fd_hessian(&eos, s);
                for i in 0..2 {
                    for j in 0..2 {
                        let scale = 1.0 + ev.hessian[(i, j)].abs();
                        assert!(
                            (ev.hessian[(i, j)] - h_fd[(i, j)]).abs() / scale < 1e-5,
                            "hessian ({i},{j}) mismatch at {s:?}: {} vs {}",
                            ev.hessian[(i, j)],
                            h_fd[(i, j)]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pressure_identity_100_random_states() {
        for (eos, seed) in [(POLY_REF, 3u64), (VDW_REF, 4u64)] {
            for s in sample_states(100, seed) {
                let ev = evaluate(&eos, s).unwrap();
                let resid = (ev.pressure - (s.rho * ev.chemical_potential - ev.energy)).abs();
                assert!(resid <= 1e-12 * (1.0 + ev.pressure.abs()));
            }
        }
    }

    #[test]
    fn gibbs_loop_integral_is_exact() {
        // Closed ellipse in (rho, eta); the line integral of mu drho + theta deta
        // must vanish because (mu, theta) is a gradient field. Trapezoid rule on
        // a periodic integrand is spectrally accurate, so quadrature error is
        // far below the 1e-10 bound.
        let n = 4096;
        let (rho0, eta0, ar, ae) = (1.2, 0.1, 0.3, 0.25);
        for eos in [POLY_REF, VDW_REF] {
            let mut integral = 0.0;
            for i in 0..n {
                let t = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
                let rho = rho0 + ar * t.cos();
                let eta = eta0 + ae * t.sin();
                let ev = evaluate(&eos, ThermoState::new(rho, eta)).unwrap();
                let drho = -ar * t.sin();
                let deta = ae * t.cos();
                integral += (ev.chemical_potential * drho + ev.temperature * deta)
                    * (2.0 * std::f64::consts::PI / n as f64);
            }
            assert!(
                integral.abs() <= 1e-10,
                "loop integral {integral} for {eos:?}"
            );
        }
    }

    #[test]
    fn sound_speed_matches_gamma_law_and_fd() {
        let s = ThermoState::new(1.0, 0.0);
        let a2 = sound_speed_sq(&POLY_REF, s).unwrap();
        assert_relative_eq!(a2, 2.0, max_relative = 1e-14); // gamma * P / rho

        // Finite differences of the mechanical pressure along constant
        // specific entropy, at a state with eta != 0.
        let st = ThermoState::new(1.3, 0.2);
        let spec = st.eta / st.rho;
        let h = 1e-6 * (1.0 + st.rho);
        let p_at = |rho: f64| {
            evaluate(&POLY_REF, ThermoState::new(rho, spec * rho))
                .unwrap()
                .mechanical_pressure()
        };
        let fd = (p_at(st.rho + h) - p_at(st.rho - h)) / (2.0 * h);
        assert_relative_eq!(
            sound_speed_sq(&POLY_REF, st).unwrap(),
            fd,
            max_relative = 1e-6
        );

        // gamma-law pattern a^2 = gamma * P_mech / rho holds at all states.
        let ev = evaluate(&POLY_REF, st).unwrap();
        assert_relative_eq!(
            sound_speed_sq(&POLY_REF, st).unwrap(),
            2.0 * ev.mechanical_pressure() / st.rho,
            max_relative = 1e-12
        );
    }

    #[test]
    fn van_der_waals_spinodal_convexity_and_sound_speed() {
        // Critical temperature for (a=1, b=1/3, R=1) is 8/9. The state at
        // (rho=1, T=0.4) sits deep inside the spinodal: the Hessian loses
        // positive definiteness and the adiabatic sound speed squared is
        // negative (closed form: a'^2 = dP/drho|_T + T/(rho^2 cv) (dP/dT|_rho)^2
        // = 2.25*T - 2 + T*1.5 = 3.75*T - 2, negative for T < 8/15).
        let eta_in = eta_for_temperature(&VDW_REF, 1.0, 0.4).unwrap();
        let inside = evaluate(&VDW_REF, ThermoState::new(1.0, eta_in)).unwrap();
        assert!(!inside.convex, "expected non-convex state, got {inside:?}");
        assert_relative_eq!(inside.temperature, 0.4, max_relative = 1e-12);
        let a2_in = sound_speed_sq(&VDW_REF, ThermoState::new(1.0, eta_in)).unwrap();
        assert!(a2_in < 0.0, "a^2 = {a2_in}");
        assert_relative_eq!(a2_in, 3.75 * 0.4 - 2.0, max_relative = 1e-10);

        // Outside (T > T_c): convex, positive sound speed.
        let eta_out = eta_for_temperature(&VDW_REF, 1.0, 1.2).unwrap();
        let outside = evaluate(&VDW_REF, ThermoState::new(1.0, eta_out)).unwrap();
        assert!(outside.convex);
        assert!(sound_speed_sq(&VDW_REF, ThermoState::new(1.0, eta_out)).unwrap() > 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            evaluate(&POLY_REF, ThermoState::new(-1.0, 0.0)),
            Err(Error::NonPositiveDensity { .. })
        ));
        assert!(matches!(
            evaluate(&VDW_REF, ThermoState::new(3.5, 0.0)),
            Err(Error::CovolumeExceeded { .. })
        ));
        assert!(VDW_REF.validate().is_ok());
        assert!(EosModel::Polytropic { k: 1.0, gamma: 0.9 }
            .validate()
            .is_err());
    }

    #[test]
    fn convex_flag_equals_minor_test() {
        // The flag must agree with positive definiteness decided by leading
        // minors for a grid of van der Waals states straddling the spinodal.
        for &t in &[0.3, 0.5, 0.7, 0.95, 1.5] {
            for &rho in &[0.4, 0.8, 1.0, 1.4, 2.0] {
                let eta = eta_for_temperature(&VDW_REF, rho, t).unwrap();
                let ev = evaluate(&VDW_REF, ThermoState::new(rho, eta)).unwrap();
                let h = ev.hessian;
                let pd = h[(0, 0)] > 0.0 && h.determinant() > 0.0;
                assert_eq!(ev.convex, pd);
            }
        }
    }
}
