//! System matrices of the Eulerian symmetric form and the Hermitian
//! dispersion relation.
//!
//! In the conjugate ordering `v = (q, theta, u1, u2, u3, r1, r2, r3)` the
//! linearized equations about a constant state read, in Fourier space,
//! `(B(k) + iC(k)) x = lambda A x` with
//!
//! * `A` — the Hessian of the Legendre potential `Pi` (symmetric, positive
//!   definite on the convex region);
//! * `B(k) = sum_i k_i B^i`, `B^i` the Hessian of `Pi u^i` (symmetric, linear
//!   in `k`);
//! * `C(k)` — the antisymmetric capillary coupling with `-rho_e k k^T` in the
//!   velocity rows / gradient-dual columns and `+rho_e k k^T` transposed.
//!
//! `B + iC` is Hermitian, so the frequencies are real whenever `A` is
//! positive definite. [`dispersion_eigs`] encodes that hypothesis
//! structurally: it reduces by Cholesky (failing with a typed error when `A`
//! is not SPD) and diagonalizes a Hermitian matrix, returning exactly real
//! frequencies plus residual diagnostics. [`oracle`] reaches the same
//! spectrum by a route that shares none of this assembly.

pub mod oracle;

use nalgebra::{SVector, Vector3};

use crate::conjugate::{self, ConjugateState, PiEval, DIM};
use crate::linalg::{self, RMatrix};
use crate::thermo::{EosModel, ThermoState};
use crate::Result;

pub use oracle::oracle_dispersion;

/// Real wave vector (1/length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector(pub Vector3<f64>);

impl WaveVector {
    pub fn new(k1: f64, k2: f64, k3: f64) -> Self {
        Self(Vector3::new(k1, k2, k3))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// The assembled triple `(A, B(k), C(k))`.
#[derive(Debug, Clone)]
pub struct SystemMatrices {
    /// Coefficient of the time derivative (`Hess Pi`), symmetric.
    pub mass: RMatrix<DIM>,
    /// Symmetric flux matrix, linear in `k`.
    pub flux: RMatrix<DIM>,
    /// Antisymmetric capillary matrix, quadratic in `k`.
    pub capillary: RMatrix<DIM>,
}

/// One dispersion solve: the eight real frequencies with diagnostics.
#[derive(Debug, Clone)]
pub struct DispersionResult {
    pub k: WaveVector,
    /// Frequencies in ascending order.
    pub lambdas: [f64; DIM],
    /// Worst imaginary part of the per-mode Rayleigh quotients (scaled); a
    /// diagnostic of how Hermitian the assembled pencil actually was.
    pub max_imag: f64,
    /// Per-mode scaled residuals `norm((B+iC-lambda A) x)/norm(x)`, in the
    /// same order as `lambdas`.
    pub residuals: [f64; DIM],
    /// Unit eigenvectors (conjugate-variable components), phase-fixed so the
    /// first component above threshold is real positive.
    pub modes: [[num_complex::Complex64; DIM]; DIM],
}

/// `A = Hess Pi` at the state. Positive definite exactly when the bulk
/// energy is convex there and `rho > 0`.
pub fn mass_matrix(v: &ConjugateState, eos: &EosModel, guess: ThermoState) -> Result<RMatrix<DIM>> {
    Ok(conjugate::pi_eval(v, eos, guess)?.hess)
}

/// `B(k) = sum_i k_i Hess(Pi u^i)`.
///
/// Because `u^i` is itself a coordinate of `v`, the product rule collapses
/// the Hessian of `Pi u^i` to `u^i Hess(Pi) + e_i g^T + g e_i^T` with
/// `g = grad Pi`; summing against `k` gives
/// `(u.k) A + e_k g^T + g e_k^T` where `e_k` carries `k` in the velocity
/// slots. Assembly is exact; finite differences of `grad(Pi u^i)` survive
/// only as a test oracle.
pub fn flux_matrix(
    v: &ConjugateState,
    k: &WaveVector,
    eos: &EosModel,
    guess: ThermoState,
) -> Result<RMatrix<DIM>> {
    let pi = conjugate::pi_eval(v, eos, guess)?;
    Ok(flux_from_pi(&pi, &v.velocity, k))
}

pub(crate) fn flux_from_pi(pi: &PiEval, velocity: &Vector3<f64>, k: &WaveVector) -> RMatrix<DIM> {
    let uk = velocity.dot(&k.0);
    let mut e_k = SVector::<f64, DIM>::zeros();
    for i in 0..3 {
        e_k[2 + i] = k.0[i];
    }
    let mut b = pi.hess * uk;
    for i in 0..DIM {
        for j in 0..DIM {
            b[(i, j)] += e_k[i] * pi.grad[j] + pi.grad[i] * e_k[j];
        }
    }
    b
}

/// The antisymmetric capillary matrix: zero in the scalar rows/columns,
/// `-rho_e k k^T` coupling velocity rows to gradient-dual columns and
/// `+rho_e k k^T` the transpose block.
pub fn capillary_matrix(k: &WaveVector, rho_e: f64) -> RMatrix<DIM> {
    let mut c = RMatrix::<DIM>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let kk = rho_e * k.0[i] * k.0[j];
            c[(2 + i, 5 + j)] = -kk;
            c[(5 + i, 2 + j)] = kk;
        }
    }
    c
}

/// Assemble the full triple at a state.
pub fn system_matrices(
    v: &ConjugateState,
    k: &WaveVector,
    eos: &EosModel,
    guess: ThermoState,
) -> Result<SystemMatrices> {
    let pi = conjugate::pi_eval(v, eos, guess)?;
    let rho_e = pi.grad[0];
    Ok(SystemMatrices {
        mass: pi.hess,
        flux: flux_from_pi(&pi, &v.velocity, k),
        capillary: capillary_matrix(k, rho_e),
    })
}

/// Solve `det(B + iC - lambda A) = 0` at a state.
///
/// Cholesky reduction followed by a Hermitian eigensolve; `A` not positive
/// definite surfaces as [`crate::Error::NotPositiveDefinite`] with the
/// failing pivot, the structural signal that local convexity was lost.
pub fn dispersion_eigs(
    v: &ConjugateState,
    k: &WaveVector,
    eos: &EosModel,
    guess: ThermoState,
) -> Result<DispersionResult> {
    let sys = system_matrices(v, k, eos, guess)?;
    dispersion_from_matrices(&sys, k)
}

pub(crate) fn dispersion_from_matrices(
    sys: &SystemMatrices,
    k: &WaveVector,
) -> Result<DispersionResult> {
    let eigs = linalg::hermitian_pencil_eigs(&sys.flux, &sys.capillary, &sys.mass)?;
    let mut lambdas = [0.0; DIM];
    let mut residuals = [0.0; DIM];
    let mut modes = [[num_complex::Complex64::new(0.0, 0.0); DIM]; DIM];
    for (i, m) in eigs.modes.iter().enumerate() {
        lambdas[i] = m.lambda;
        residuals[i] = m.residual;
        modes[i] = m.vector;
    }
    Ok(DispersionResult {
        k: *k,
        lambdas,
        max_imag: eigs.max_imag,
        residuals,
        modes,
    })
}
