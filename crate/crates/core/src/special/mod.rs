//! Gamma family, error function, modified Bessel K and the Meijer-G evaluator.

mod bessel;
mod erf;
mod gamma;
pub mod meijer;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k};
pub use erf::{erf, erfc};
pub use gamma::{digamma, gamma_signed, ln_gamma, ln_gamma_complex, recip_gamma};
pub use meijer::{meijer_g, meijer_g_contour, meijer_g_remainder, MeijerGSpec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{function}: argument {value} outside the domain ({requirement})")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("Meijer-G shape (m,n,p,q) = {0:?} is not supported")]
    UnsupportedShape((usize, usize, usize, usize)),
    #[error("invalid Meijer-G specification: {0}")]
    InvalidSpec(String),
    #[error("Meijer-G contour cannot separate the pole families: {0}")]
    Inseparable(String),
    #[error("{function} failed to converge: {detail}")]
    NoConvergence { function: &'static str, detail: String },
}

pub(crate) fn domain(function: &'static str, value: f64, requirement: &'static str) -> SpecialError {
    SpecialError::Domain {
        function,
        value,
        requirement,
    }
}
