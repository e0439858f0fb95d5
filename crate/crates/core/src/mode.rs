//! Mode functions, squeeze parameters and the variances they determine.
//!
//! A mode `u(t)` is a complex solution of `ü + (ṁ/m) u̇ + ω² u = 0` normalized
//! by the Wronskian `m (u u̇* − u̇ u*) = i`. It fixes both widths of the
//! Gaussian packet; the squeeze pair `(r, θ)` selects one mode out of the
//! family generated by a reference mode and its conjugate.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest accepted squeeze magnitude.
pub const MAX_SQUEEZE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        Ok(PhysicalConstants { hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { hbar: 1.0 }
    }
}

/// A mode `u` and its time derivative at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub t: f64,
    pub u: Complex64,
    pub du: Complex64,
}

impl ModeState {
    pub fn new(t: f64, u: Complex64, du: Complex64) -> Self {
        ModeState { t, u, du }
    }

    /// `m (u du* − du u*)`, equal to `i` for a normalized mode.
    pub fn wronskian(&self, m: f64) -> Complex64 {
        wronskian(self, m)
    }

    /// Distance of the Wronskian from `i`.
    pub fn wronskian_drift(&self, m: f64) -> f64 {
        (wronskian(self, m) - Complex64::i()).norm()
    }

    /// Multiplies both `u` and `du` by `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        ModeState::new(self.t, p * self.u, p * self.du)
    }
}

/// Squeeze magnitude `r` and angle `θ`, the latter reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    r: f64,
    theta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "squeeze magnitude must be finite and nonnegative, got {r}"
            )));
        }
        if r > MAX_SQUEEZE {
            return Err(Error::InvalidParameter(format!(
                "squeeze magnitude {r} exceeds the supported maximum {MAX_SQUEEZE}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeeze angle must be finite, got {theta}"
            )));
        }
        let mut reduced = theta.rem_euclid(TAU);
        if reduced >= TAU {
            reduced = 0.0;
        }
        Ok(SqueezeParams { r, theta: reduced })
    }

    pub fn vacuum() -> Self {
        SqueezeParams { r: 0.0, theta: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePair {
    pub dx: f64,
    pub dp: f64,
}

impl VariancePair {
    /// `2 Δx Δp / ħ`, at least one for any normalized mode.
    pub fn uncertainty_ratio(&self, consts: &PhysicalConstants) -> f64 {
        2.0 * self.dx * self.dp / consts.hbar()
    }
}

/// Centroid position, momentum and accumulated classical action at a time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentroidState {
    pub t: f64,
    pub x: f64,
    pub p: f64,
    pub action: f64,
}

/// Gaussian packet: mode plus classical centroid and action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub mode: ModeState,
    pub x_c: f64,
    pub p_c: f64,
    pub s_c: f64,
}

impl GaussianPacket {
    /// Centroid-free packet (`x_c = p_c = 0`).
    pub fn centered(mode: ModeState) -> Self {
        GaussianPacket {
            mode,
            x_c: 0.0,
            p_c: 0.0,
            s_c: 0.0,
        }
    }

    /// Pairs a mode with a centroid; both must refer to the same time.
    pub fn assemble(mode: ModeState, centroid: CentroidState) -> Result<Self> {
        if mode.t != centroid.t {
            return Err(Error::TimeMismatch {
                expected: mode.t,
                found: centroid.t,
            });
        }
        Ok(GaussianPacket {
            mode,
            x_c: centroid.x,
            p_c: centroid.p,
            s_c: centroid.action,
        })
    }

    pub fn t(&self) -> f64 {
        self.mode.t
    }
}

pub fn wronskian(mode: &ModeState, m: f64) -> Complex64 {
    m * (mode.u * mode.du.conj() - mode.du * mode.u.conj())
}

/// Position and momentum standard deviations of the packet built on `mode`.
pub fn variances(mode: &ModeState, m: f64, consts: &PhysicalConstants) -> Result<VariancePair> {
    let (u_abs, du_abs) = (mode.u.norm(), mode.du.norm());
    if u_abs == 0.0 || du_abs == 0.0 || !u_abs.is_finite() || !du_abs.is_finite() {
        return Err(Error::ZeroAmplitude { u_abs, du_abs });
    }
    let sqrt_hbar = consts.hbar().sqrt();
    Ok(VariancePair {
        dx: sqrt_hbar * u_abs,
        dp: m * sqrt_hbar * du_abs,
    })
}

/// `u = cosh r · u₀ + e^{−iθ} sinh r · u₀*`, and likewise for the derivative.
pub fn squeeze_mode(reference: &ModeState, sq: &SqueezeParams) -> ModeState {
    let (alpha, beta) = bogoliubov_coeffs(sq);
    let beta_c = beta.conj();
    ModeState::new(
        reference.t,
        alpha * reference.u + beta_c * reference.u.conj(),
        alpha * reference.du + beta_c * reference.du.conj(),
    )
}

/// `(cosh r, e^{iθ} sinh r)`, with `|α|² − |β|² = 1`.
pub fn bogoliubov_coeffs(sq: &SqueezeParams) -> (Complex64, Complex64) {
    (
        Complex64::new(sq.r.cosh(), 0.0),
        Complex64::from_polar(sq.r.sinh(), sq.theta),
    )
}
