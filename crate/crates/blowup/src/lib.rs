//! Finite-time blow-up analysis for integral equations of the form
//!
//! ```text
//! X_t = x0 + ∫₀ᵗ a(s) b(X_s) ds + g(t)
//! ```
//!
//! with positive intensity `a`, positive drift `b`, nonnegative noise `g`
//! and positive initial value `x0`. The crate decides whether solutions
//! explode in finite time, computes or brackets the explosion time, and
//! estimates explosion-time probabilities when the noise is the absolute
//! value of a Brownian motion.
//!
//! Module map:
//!
//! * [`funcat`] — closed-form function catalog plus the quadrature and
//!   monotone-inversion kernels everything else is built on.
//! * [`transforms`] — the integral transforms `A`, `B_r`, `B̃`, `β` of a
//!   problem instance and their inverses.
//! * [`osgood`] — the generalized Osgood explosion test, the noiseless
//!   closed-form solution and a comparison check between trajectories.
//! * [`dynamics`] — adaptive integration of the noisy differential form
//!   with blow-up detection and the trajectory-based explosion-time
//!   identity.
//! * [`bounds`] — deterministic two-sided explosion-time bounds.
//! * [`stochastic`] — reflected Brownian sample paths, probability bounds
//!   on the explosion time and Monte Carlo estimation.

// `!(x >= lo)` guards double as NaN rejection; quadrature tables keep the
// published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod funcat;
pub mod osgood;
pub mod stochastic;
pub mod transforms;

pub use error::{Error, Result};
