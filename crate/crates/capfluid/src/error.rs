use thiserror::Error;

/// Errors surfaced by state evaluation, inversion and eigensolves.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Density must be strictly positive.
    #[error("non-positive density rho = {rho}")]
    NonPositiveDensity { rho: f64 },

    /// Van der Waals covolume bound `rho * b < 1` violated.
    #[error("covolume bound violated: rho*b = {rho_b} >= 1")]
    CovolumeExceeded { rho_b: f64 },

    /// An evaluation produced a NaN or infinity.
    #[error("non-finite result in {context}")]
    NonFinite { context: &'static str },

    /// Temperature outside the validity range of the equation of state.
    #[error("temperature {theta} outside EOS range (must be > 0)")]
    TemperatureOutOfRange { theta: f64 },

    /// Newton iteration failed to reach the residual tolerance.
    #[error("Newton did not converge after {iterations} iterations (residual {residual:.3e})")]
    NewtonNoConvergence { iterations: usize, residual: f64 },

    /// The Newton Jacobian (an energy Hessian) is singular, which signals
    /// loss of convexity at the iterate.
    #[error("singular Jacobian (det = {det:.3e}); state is outside the convex region")]
    SingularJacobian { det: f64 },

    /// Cholesky factorization hit a non-positive pivot: the matrix is not
    /// positive definite. Carries the failing pivot index.
    #[error("matrix not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    /// The eigenvalue iteration did not converge.
    #[error("eigensolver failed: {0}")]
    EigenFailure(&'static str),

    /// A field that must stay positive (density, specific volume) crossed
    /// zero during a simulation.
    #[error("positivity lost: {what} = {value}")]
    PositivityLoss { what: &'static str, value: f64 },

    /// Invalid parameter or field configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
