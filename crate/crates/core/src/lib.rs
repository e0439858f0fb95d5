//! Squeezed Gaussian wave packets under time-dependent quadratic Hamiltonians.
//!
//! The crate propagates mode functions (closed form for the free particle,
//! the harmonic oscillator and the Caldirola-Kanai damped oscillator, and by
//! adaptive integration for any [`QuadraticModel`]), turns them into position
//! and momentum widths, and evaluates the joint (Leipnik) entropy and its
//! average over the squeeze angle.
//!
//! ```
//! use packet_entropy::{entropy, models, mode};
//!
//! let sq = mode::SqueezeParams::new(0.5, 1.5 * std::f64::consts::PI).unwrap();
//! let t_star = entropy::entropy_minimum_time(&sq, 1.0).unwrap();
//! let s = entropy::free_entropy_closed(&sq, t_star);
//! assert!((s - entropy::entropy_floor()).abs() < 1e-12);
//! # let _ = models::free_mode(1.0, 0.0);
//! ```

// `!(x < tol)` is deliberate throughout: NaN must fail a check, not pass it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod hamparse;
pub mod mode;
pub mod model;
pub mod models;
pub mod randomphase;

pub use error::{Error, Result};
pub use mode::{
    bogoliubov_coeffs, squeeze_mode, variances, wronskian, CentroidState, GaussianPacket,
    ModeState, PhysicalConstants, SqueezeParams, VariancePair, MAX_SQUEEZE,
};
pub use model::{Coefficient, ModelKind, QuadraticModel};
