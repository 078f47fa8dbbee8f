//! Batch dispersion evaluation over many wave vectors.
//!
//! Assembly of the mass matrix is hoisted out of the loop (it does not
//! depend on `k`); each wave vector then costs one flux/capillary assembly
//! and one Hermitian pencil solve, which is embarrassingly parallel. With
//! the `parallel` feature (default) the batch runs on rayon; the sequential
//! path is always available and is what the feature-less build uses.
//! Results are collected in input order either way, so output is identical
//! across thread counts.

use nalgebra::Vector3;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::conjugate::{self, ConjugateState, PiEval};
use crate::spectral::{self, WaveVector};
use crate::thermo::{EosModel, ThermoState};
use crate::Result;

/// One row of a dispersion sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub k: Vector3<f64>,
    pub k_abs: f64,
    pub lambdas: [f64; 8],
    pub max_imag: f64,
    pub max_residual: f64,
}

/// Precomputed per-state context for a sweep.
#[derive(Debug, Clone)]
pub struct SweepContext {
    pi: PiEval,
    velocity: Vector3<f64>,
    rho_e: f64,
}

impl SweepContext {
    pub fn new(v: &ConjugateState, eos: &EosModel, guess: ThermoState) -> Result<Self> {
        let pi = conjugate::pi_eval(v, eos, guess)?;
        let rho_e = pi.grad[0];
        Ok(Self {
            pi,
            velocity: v.velocity,
            rho_e,
        })
    }

    pub fn eval(&self, k: &WaveVector) -> Result<SweepRow> {
        let sys = spectral::SystemMatrices {
            mass: self.pi.hess,
            flux: spectral::flux_from_pi(&self.pi, &self.velocity, k),
            capillary: spectral::capillary_matrix(k, self.rho_e),
        };
        let res = spectral::dispersion_from_matrices(&sys, k)?;
        let max_residual = res.residuals.iter().fold(0.0_f64, |m, r| m.max(*r));
        Ok(SweepRow {
            k: k.0,
            k_abs: k.norm(),
            lambdas: res.lambdas,
            max_imag: res.max_imag,
            max_residual,
        })
    }
}

/// Sequential sweep; the baseline the benchmarks compare against.
pub fn dispersion_sweep_seq(ctx: &SweepContext, ks: &[WaveVector]) -> Result<Vec<SweepRow>> {
    ks.iter().map(|k| ctx.eval(k)).collect()
}

/// Rayon-parallel sweep over the wave vectors, order-preserving.
#[cfg(feature = "parallel")]
pub fn dispersion_sweep_par(ctx: &SweepContext, ks: &[WaveVector]) -> Result<Vec<SweepRow>> {
    ks.par_iter().map(|k| ctx.eval(k)).collect()
}

/// Sweep with the best available backend.
pub fn dispersion_sweep(ctx: &SweepContext, ks: &[WaveVector]) -> Result<Vec<SweepRow>> {
    #[cfg(feature = "parallel")]
    {
        dispersion_sweep_par(ctx, ks)
    }
    #[cfg(not(feature = "parallel"))]
    {
        dispersion_sweep_seq(ctx, ks)
    }
}

/// Evenly spaced wave vectors `k_min..=k_max` along a direction.
pub fn linspace_ks(k_min: f64, k_max: f64, n_k: usize, direction: Vector3<f64>) -> Vec<WaveVector> {
    let dir = if direction.norm() > 0.0 {
        direction.normalize()
    } else {
        Vector3::x()
    };
    (0..n_k)
        .map(|i| {
            let t = if n_k == 1 {
                0.0
            } else {
                i as f64 / (n_k - 1) as f64
            };
            WaveVector(dir * (k_min + t * (k_max - k_min)))
        })
        .collect()
}
