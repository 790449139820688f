//! Quadrature and root-finding kernels shared by the oracles and the
//! threshold solver.

mod quadrature;
mod roots;

pub use quadrature::{integrate_interval, integrate_semi_infinite, integrate_semi_infinite_scaled};
pub use roots::{find_root_monotone, RootResult};

use thiserror::Error;

/// Convergence targets for the kernels in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: usize,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_evaluations: 1_000_000,
        }
    }
}

impl ToleranceSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_evaluations: usize) -> Result<Self, NumericsError> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_evaluations == 0 {
            return Err(NumericsError::InvalidTolerance {
                rel_tol,
                abs_tol,
                max_evaluations,
            });
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_evaluations,
        })
    }

    /// Relative-only target: the absolute floor is pushed to the smallest
    /// normal double. Used where the integral itself may be far below 1e-14.
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: f64::MIN_POSITIVE,
            ..Self::default()
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn target(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge after {evaluations} evaluations (best {best:e}, error estimate {error_estimate:e})")]
    NonConvergence {
        best: f64,
        error_estimate: f64,
        evaluations: usize,
    },
    #[error("integrand returned a non-finite value ({value}) at x = {at:e}")]
    NonFiniteIntegrand { at: f64, value: f64 },
    #[error("no sign change on bracket [{lo:e}, {hi:e}]: g = ({g_lo:e}, {g_hi:e})")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("root finder hit {iterations} iterations without meeting tolerance (best {best:e})")]
    MaxIterations { best: f64, iterations: usize },
    #[error("invalid tolerance: rel {rel_tol:e}, abs {abs_tol:e}, max evaluations {max_evaluations}")]
    InvalidTolerance {
        rel_tol: f64,
        abs_tol: f64,
        max_evaluations: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
