//! Numerical propagation of the mode, the centroid and the classical action.
//!
//! The mode equation `ü + (ṁ/m) u̇ + ω² u = 0` is integrated in canonical
//! form on the pair `(u, π = m u̇)`:
//!
//! ```text
//! u' = π / m,    π' = −m ω² u
//! ```
//!
//! so only `m(t)` is ever evaluated, never its derivative, and the Wronskian
//! `u π* − π u* = i` is a bilinear form of the state. It is checked at every
//! output time and reported, not corrected.

mod dopri;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mode::{CentroidState, GaussianPacket, ModeState, PhysicalConstants};
use crate::model::QuadraticModel;

use dopri::{solve_dense, StepSettings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub wronskian_alarm: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            wronskian_alarm: 1e-8,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && !v.is_nan();
        if ok(self.rel_tol) && ok(self.abs_tol) && ok(self.max_step) && ok(self.wronskian_alarm) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "integrator tolerances must be positive: {self:?}"
            )))
        }
    }

    fn step_settings(&self) -> StepSettings {
        StepSettings {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
        }
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "time grid has non-finite entries".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Propagates `init` to every time in `times`; `times[0]` must equal `init.t`.
pub fn integrate_mode(
    model: &QuadraticModel,
    init: &ModeState,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<ModeState>> {
    cfg.validate()?;
    check_grid(times)?;
    if times[0] != init.t {
        return Err(Error::TimeMismatch {
            expected: times[0],
            found: init.t,
        });
    }
    let m0 = model.mass(init.t)?;
    let drift = init.wronskian_drift(m0);
    if !(drift < cfg.wronskian_alarm) {
        return Err(Error::WronskianDriftExceeded {
            t: init.t,
            drift,
            alarm: cfg.wronskian_alarm,
        });
    }
    if times.len() == 1 {
        return Ok(vec![*init]);
    }

    let pi0 = m0 * init.du;
    let y0 = [init.u.re, init.u.im, pi0.re, pi0.im];
    let states = solve_dense(
        |t, y: &[f64; 4]| {
            let m = model.mass(t)?;
            let k = m * model.omega_sq(t)?;
            Ok([y[2] / m, y[3] / m, -k * y[0], -k * y[1]])
        },
        y0,
        times,
        &cfg.step_settings(),
    )?;

    let mut modes = Vec::with_capacity(times.len());
    modes.push(*init);
    for (&t, y) in times.iter().zip(&states).skip(1) {
        let m = model.mass(t)?;
        let mode = ModeState::new(
            t,
            Complex64::new(y[0], y[1]),
            Complex64::new(y[2], y[3]) / m,
        );
        let drift = mode.wronskian_drift(m);
        if !(drift < cfg.wronskian_alarm) {
            return Err(Error::WronskianDriftExceeded {
                t,
                drift,
                alarm: cfg.wronskian_alarm,
            });
        }
        modes.push(mode);
    }
    Ok(modes)
}

/// Solves `ẍ + (ṁ/m) ẋ + ω² x = f` with `p = m ẋ`, accumulating the action
/// `∫ (p²/2m − m ω² x²/2 + f x) dt` from `times[0]`.
pub fn integrate_centroid(
    model: &QuadraticModel,
    x0: f64,
    p0: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<CentroidState>> {
    cfg.validate()?;
    check_grid(times)?;
    let states = solve_dense(
        |t, y: &[f64; 3]| {
            let m = model.mass(t)?;
            let w2 = model.omega_sq(t)?;
            let f = model.force(t)?;
            let (x, p) = (y[0], y[1]);
            Ok([
                p / m,
                -m * w2 * x + f,
                0.5 * p * p / m - 0.5 * m * w2 * x * x + f * x,
            ])
        },
        [x0, p0, 0.0],
        times,
        &cfg.step_settings(),
    )?;
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, y)| CentroidState {
            t,
            x: y[0],
            p: y[1],
            action: y[2],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub modes: Vec<ModeState>,
    pub centroids: Vec<(f64, f64)>,
    pub actions: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn packet(&self, index: usize) -> GaussianPacket {
        let (x_c, p_c) = self.centroids[index];
        GaussianPacket {
            mode: self.modes[index],
            x_c,
            p_c,
            s_c: self.actions[index],
        }
    }
}

/// Mode and centroid propagated together over the same grid.
pub fn propagate(
    model: &QuadraticModel,
    init: &ModeState,
    x0: f64,
    p0: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let modes = integrate_mode(model, init, times, cfg)?;
    let centroids = integrate_centroid(model, x0, p0, times, cfg)?;
    Ok(Trajectory {
        times: times.to_vec(),
        modes,
        centroids: centroids.iter().map(|c| (c.x, c.p)).collect(),
        actions: centroids.iter().map(|c| c.action).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    Position,
    Momentum,
}

/// A probability density sampled on a uniform axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub kind: DensityKind,
    pub axis: Vec<f64>,
    pub density: Vec<f64>,
}

impl DensityGrid {
    pub fn spacing(&self) -> f64 {
        self.axis[1] - self.axis[0]
    }

    /// Trapezoid rule of `g(axis, density)` over the grid.
    pub fn trapezoid(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.axis.len();
        let inner: f64 = self
            .axis
            .iter()
            .zip(&self.density)
            .map(|(&a, &d)| g(a, d))
            .sum();
        let ends =
            0.5 * (g(self.axis[0], self.density[0]) + g(self.axis[n - 1], self.density[n - 1]));
        self.spacing() * (inner - ends)
    }

    pub fn integral(&self) -> f64 {
        self.trapezoid(|_, d| d)
    }

    pub fn mean(&self) -> f64 {
        self.trapezoid(|a, d| a * d) / self.integral()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.trapezoid(|a, d| (a - mu).powi(2) * d) / self.integral()
    }
}

/// Samples `|Ψ|²` (position) or `|Ψ̃|²` (momentum) of `packet`.
///
/// Position: Gaussian centred at `x_c` with variance `ħ|u|²`.
/// Momentum: Gaussian centred at `p_c` with variance `ħ m² |u̇|²`.
pub fn evaluate_density(
    packet: &GaussianPacket,
    m: f64,
    consts: &PhysicalConstants,
    kind: DensityKind,
    half_width_sigmas: f64,
    n_points: usize,
) -> Result<DensityGrid> {
    if n_points < 32 {
        return Err(Error::InvalidParameter(format!(
            "density grid needs at least 32 points, got {n_points}"
        )));
    }
    if !(half_width_sigmas >= 6.0) {
        return Err(Error::InvalidParameter(format!(
            "density grid must span at least 6 sigma, got {half_width_sigmas}"
        )));
    }
    let (u_abs, du_abs) = (packet.mode.u.norm(), packet.mode.du.norm());
    if u_abs == 0.0 || du_abs == 0.0 {
        return Err(Error::ZeroAmplitude { u_abs, du_abs });
    }
    let hbar = consts.hbar();
    let (center, var) = match kind {
        DensityKind::Position => (packet.x_c, hbar * u_abs * u_abs),
        DensityKind::Momentum => (packet.p_c, hbar * m * m * du_abs * du_abs),
    };
    let sigma = var.sqrt();
    let lo = center - half_width_sigmas * sigma;
    let step = 2.0 * half_width_sigmas * sigma / (n_points - 1) as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
    let axis: Vec<f64> = (0..n_points).map(|k| lo + k as f64 * step).collect();
    let density = axis
        .iter()
        .map(|&a| norm * (-(a - center).powi(2) / (2.0 * var)).exp())
        .collect();
    Ok(DensityGrid {
        kind,
        axis,
        density,
    })
}
