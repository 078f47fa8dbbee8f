//! Shared time-marching plumbing for the two 1-D solvers.

use crate::{Error, Result};

/// Options for [`crate::lagrangian1d::run`] / [`crate::eulerian1d::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Explicit step size; callers are expected to respect the solver's
    /// stability bound (the CLI clamps and warns).
    pub dt: f64,
    pub t_final: f64,
    /// Record an audit row every this many steps (plus step 0 and the end).
    pub audit_every: usize,
    /// Keep a field snapshot every this many steps, if given.
    pub snapshot_every: Option<usize>,
}

impl RunOptions {
    pub fn n_steps(&self, t0: f64) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidInput(format!("invalid dt {}", self.dt)));
        }
        if !(self.t_final > t0) {
            return Err(Error::InvalidInput(format!(
                "t_final {} must exceed start time {t0}",
                self.t_final
            )));
        }
        if self.audit_every == 0 {
            return Err(Error::InvalidInput("audit_every must be >= 1".into()));
        }
        Ok(((self.t_final - t0) / self.dt).ceil() as usize)
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunOutcome {
    Completed,
    /// A non-finite node or positivity loss was detected; the field was
    /// restored to the last good state at this time.
    BlowUp {
        t_last_good: f64,
    },
}
