//! Spectral analysis and nonlinear simulation of capillary fluids in
//! Godunov-type symmetric form.
//!
//! A capillary (Korteweg-type) fluid carries an internal energy that depends
//! on the density gradient in addition to density and entropy. The governing
//! equations are dispersive rather than hyperbolic, and the classical
//! symmetrization theory does not apply directly. This crate implements the
//! symmetric formulation in conjugate variables, in which the plane-wave
//! pencil `B + iC - lambda*A` is Hermitian with `A` symmetric positive
//! definite wherever the energy is locally convex, so all frequencies are
//! real and constant states are spectrally stable.
//!
//! The pieces:
//!
//! * [`thermo`] — equation-of-state layer: `eps(rho, eta)`, analytic
//!   derivatives, convexity certification.
//! * [`conjugate`] — conjugate variables `(q, theta, u, r)`, the potential
//!   `Pi` obtained by Legendre transform of the total energy, its analytic
//!   gradient and Hessian, and the Newton inverse map.
//! * [`spectral`] — assembly of the 8x8 system matrices, the Hermitian
//!   dispersion solve, and an independent linearization oracle.
//! * [`lagrangian1d`] — the 1-D mass-Lagrangian augmented system with a
//!   general energy `e(v, v_z)`: 3x3 matrices, dispersion, and a nonlinear
//!   RK4 solver with energy/constraint audits.
//! * [`eulerian1d`] — the nonlinear 1-D Eulerian reduction with the same
//!   audit machinery.
//! * [`verify`] — the seeded invariant suite behind the `verify` CLI
//!   subcommand, reporting one pass/fail record per check.
//! * [`sweep`] — batch dispersion evaluation over many wave vectors,
//!   data-parallel when the `parallel` feature (default) is enabled.

// Comparisons are written as `!(x > 0.0)` on purpose: the negation also
// catches NaN, which `x <= 0.0` would silently pass.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conjugate;
pub mod eulerian1d;
pub mod grid;
pub mod lagrangian1d;
pub mod linalg;
pub mod sim;
pub mod spectral;
pub mod sweep;
pub mod thermo;
pub mod verify;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
