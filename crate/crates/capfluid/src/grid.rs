//! Periodic central-difference operators on uniform 1-D grids.
//!
//! Both nonlinear solvers build every spatial derivative from one shared
//! stencil object, applied possibly twice for second derivatives. That
//! single-operator discipline is what makes the discrete gradient constraint
//! propagate exactly: `d/dt (w - D f) = D D u - D (D u) = 0` term by term.
//!
//! Stencils are evaluated as paired differences `f[i+m] - f[i-m]`, so a
//! constant field maps to exact floating-point zero.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Formal order of accuracy of the central stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum StencilOrder {
    Second,
    Fourth,
    Sixth,
}

impl StencilOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
            StencilOrder::Sixth => 6,
        }
    }

    /// Largest modified wavenumber `max_theta |D^(theta)| * h` of the
    /// stencil; enters explicit stability bounds.
    pub fn max_symbol(self) -> f64 {
        match self {
            StencilOrder::Second => 1.0,
            StencilOrder::Fourth => 1.3722,
            StencilOrder::Sixth => 1.5860,
        }
    }
}

impl TryFrom<u8> for StencilOrder {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            6 => Ok(StencilOrder::Sixth),
            other => Err(Error::InvalidInput(format!(
                "unsupported derivative order {other} (use 2, 4 or 6)"
            ))),
        }
    }
}

impl From<StencilOrder> for u8 {
    fn from(v: StencilOrder) -> u8 {
        v.as_u8()
    }
}

/// Periodic first-derivative operator `D` on `n` nodes with spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicDeriv {
    pub n: usize,
    pub h: f64,
    pub order: StencilOrder,
}

impl PeriodicDeriv {
    pub fn new(n: usize, h: f64, order: StencilOrder) -> Result<Self> {
        let width = match order {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
            StencilOrder::Sixth => 3,
        };
        if n < 2 * width + 2 {
            return Err(Error::InvalidInput(format!(
                "grid of {n} nodes too small for an order-{} stencil",
                order.as_u8()
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput(format!("invalid grid spacing {h}")));
        }
        Ok(Self { n, h, order })
    }

    /// `out[i] = (D f)[i]`.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        debug_assert_eq!(f.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        let n = self.n;
        let wrap = |i: isize| -> usize { i.rem_euclid(n as isize) as usize };
        match self.order {
            StencilOrder::Second => {
                let c1 = 1.0 / (2.0 * self.h);
                for i in 0..n {
                    let i = i as isize;
                    out[i as usize] = c1 * (f[wrap(i + 1)] - f[wrap(i - 1)]);
                }
            }
            StencilOrder::Fourth => {
                let c1 = 8.0 / (12.0 * self.h);
                let c2 = 1.0 / (12.0 * self.h);
                for i in 0..n {
                    let i = i as isize;
                    out[i as usize] = c1 * (f[wrap(i + 1)] - f[wrap(i - 1)])
                        - c2 * (f[wrap(i + 2)] - f[wrap(i - 2)]);
                }
            }
            StencilOrder::Sixth => {
                let c1 = 45.0 / (60.0 * self.h);
                let c2 = 9.0 / (60.0 * self.h);
                let c3 = 1.0 / (60.0 * self.h);
                for i in 0..n {
                    let i = i as isize;
                    out[i as usize] = c1 * (f[wrap(i + 1)] - f[wrap(i - 1)])
                        - c2 * (f[wrap(i + 2)] - f[wrap(i - 2)])
                        + c3 * (f[wrap(i + 3)] - f[wrap(i - 3)]);
                }
            }
        }
    }

    /// Allocating convenience wrapper around [`apply`](Self::apply).
    pub fn d(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply(f, &mut out);
        out
    }

    /// Second derivative as `D(D f)`: the same operator applied twice, never
    /// a separate stencil.
    pub fn dd(&self, f: &[f64]) -> Vec<f64> {
        self.d(&self.d(f))
    }
}

/// `max_i |a[i] - b[i]|`.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
