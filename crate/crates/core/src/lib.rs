//! Ergodic capacity of free-space optical links with waterfilling power
//! adaptation over Gamma-Gamma turbulence, with and without pointing error.
//!
//! Modules, bottom up:
//! * [`numerics`]: double-exponential quadrature and a bracketing root finder;
//! * [`special`]: gamma family, erf, Bessel K and the Meijer-G evaluator;
//! * [`linkmodel`]: link geometry to `(a, b)`, `A₀` and `ξ`;
//! * [`channel`]: densities, tail probability, moments and sampling of the channel gain;
//! * [`capacity`]: threshold solver, closed-form, quadrature, asymptotic and Monte-Carlo capacities.

pub mod capacity;
pub mod channel;
pub mod linkmodel;
pub mod numerics;
pub mod special;

pub use capacity::{CapacityError, CapacityPoint, DetectionKind, DetectionScheme, Method, Regime};
pub use channel::{ChannelError, ChannelKind, ChannelModel};
pub use linkmodel::{LinkGeometry, LinkModelError, PointingState, TurbulenceRegime, TurbulenceState};
