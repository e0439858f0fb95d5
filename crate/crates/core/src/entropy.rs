//! Joint (Leipnik) entropy of Gaussian packets.
//!
//! For a Gaussian packet the position and momentum differential entropies add
//! up to `S = ln(e/2) + ln(2 Δx Δp / ħ)`, so `S ≥ ln(e/2)` with equality for
//! minimum-uncertainty states. All entropies are in nats.

use std::f64::consts::{LN_2, PI};

use crate::dynamics::{DensityGrid, DensityKind};
use crate::error::{Error, Result};
use crate::mode::{PhysicalConstants, SqueezeParams, VariancePair};

/// Largest deviation from unit mass tolerated by [`leipnik_numeric`].
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// `ln(e/2)`, the entropy of a minimum-uncertainty packet.
pub fn entropy_floor() -> f64 {
    1.0 - LN_2
}

/// One row of an entropy scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRecord {
    pub t: f64,
    pub dx: f64,
    pub dp: f64,
    pub s: f64,
    pub s_floor: f64,
}

impl EntropyRecord {
    pub fn new(t: f64, v: VariancePair, consts: &PhysicalConstants) -> Self {
        EntropyRecord {
            t,
            dx: v.dx,
            dp: v.dp,
            s: joint_entropy(&v, consts),
            s_floor: entropy_floor(),
        }
    }

    pub fn excess(&self) -> f64 {
        self.s - self.s_floor
    }
}

pub fn joint_entropy(v: &VariancePair, consts: &PhysicalConstants) -> f64 {
    entropy_floor() + (2.0 * v.dx * v.dp / consts.hbar()).ln()
}

/// `−∫ρ ln ρ` by trapezoid on the grid, with `0 ln 0 = 0`.
fn differential_entropy(grid: &DensityGrid) -> Result<f64> {
    let integral = grid.integral();
    if !((integral - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::UnnormalizedDensity { integral });
    }
    if grid.density.iter().any(|&d| d < 0.0 || !d.is_finite()) {
        return Err(Error::InvalidParameter(
            "density must be finite and nonnegative".into(),
        ));
    }
    Ok(grid.trapezoid(|_, d| if d > 0.0 { -d * d.ln() } else { 0.0 }))
}

/// Joint entropy from sampled densities, independent of the closed form.
pub fn leipnik_numeric(
    pos: &DensityGrid,
    mom: &DensityGrid,
    consts: &PhysicalConstants,
) -> Result<f64> {
    if pos.kind != DensityKind::Position || mom.kind != DensityKind::Momentum {
        return Err(Error::InvalidParameter(
            "expected a position grid and a momentum grid".into(),
        ));
    }
    Ok(differential_entropy(pos)? + differential_entropy(mom)? - (2.0 * PI * consts.hbar()).ln())
}

/// Free-particle entropy of the squeezed packet at dimensionless time
/// `T = t/m0`.
pub fn free_entropy_closed(sq: &SqueezeParams, big_t: f64) -> f64 {
    let (s, c) = (0.5 * sq.theta()).sin_cos();
    let (up, down) = ((4.0 * sq.r()).exp(), (-4.0 * sq.r()).exp());
    let first = c * c + up * s * s;
    let second = (c + big_t * s).powi(2) + down * (s - big_t * c).powi(2);
    entropy_floor() + 0.5 * first.ln() + 0.5 * second.ln()
}

/// Entropy at `t = 0`; equal to the floor iff `r = 0` or `θ ∈ {0, π}`.
pub fn initial_entropy(sq: &SqueezeParams) -> f64 {
    let s = sq.theta().sin() * (2.0 * sq.r()).sinh();
    entropy_floor() + 0.5 * (s * s).ln_1p()
}

/// Time at which the free-particle entropy touches the floor.
///
/// Only squeeze angles in `(π, 2π)` with `r > 0` reach it at a positive time;
/// otherwise the entropy is nondecreasing from `t = 0` and `None` is returned.
pub fn entropy_minimum_time(sq: &SqueezeParams, m0: f64) -> Option<f64> {
    let theta = sq.theta();
    if sq.r() == 0.0 || theta <= PI {
        return None;
    }
    let down = (-4.0 * sq.r()).exp();
    let (s, c) = (0.5 * theta).sin_cos();
    let t_star = -m0 * (1.0 - down) * theta.sin() / (2.0 * (s * s + down * c * c));
    (t_star > 0.0).then_some(t_star)
}

/// Oscillator entropy of the squeezed ground-state packet.
pub fn oscillator_entropy_closed(sq: &SqueezeParams, omega0: f64, t: f64) -> f64 {
    let s = (2.0 * sq.r()).sinh() * (2.0 * omega0 * t - sq.theta()).sin();
    entropy_floor() + 0.5 * (s * s).ln_1p()
}

/// Upper envelope of [`oscillator_entropy_closed`].
pub fn oscillator_entropy_max(r: f64) -> f64 {
    entropy_floor() + (2.0 * r).cosh().ln()
}
