//! Random-phase entropy: the joint entropy averaged over the squeeze angle.
//!
//! Averaging `ln(2m|u||u̇|)` over `θ` uniform on `[0, 2π)` with the squeezed
//! mode `u = cosh r u₀ + e^{−iθ} sinh r u₀*` gives
//!
//! ```text
//! S̄(t) = ln(e/2) + ln((cosh 2r + 1)/2) + ln(2 m |u₀ u̇₀|)
//! ```
//!
//! where `2m|u₀u̇₀| = √(1 + (m d|u₀|²/dt)²) ≥ 1`. The bounds below follow from
//! that identity and from `⟨H⟩ ≥ ħω m |u₀ u̇₀|`.

use std::f64::consts::{LN_2, TAU};

use crate::entropy::{entropy_floor, joint_entropy};
use crate::error::{Error, Result};
use crate::mode::{squeeze_mode, variances, ModeState, PhysicalConstants, SqueezeParams};
use crate::model::QuadraticModel;
use crate::models::damped_frequency;

/// Tolerance on `2m Im(u₀ u̇₀*) = 1` accepted by [`minimal_uncertainty_identity`].
pub const WRONSKIAN_TOL: f64 = 1e-8;

/// `ln((cosh 2r + 1)/2)`, written as `2 ln cosh r`.
pub fn squeeze_term(r: f64) -> f64 {
    2.0 * r.cosh().ln()
}

fn uncertainty_product(mode: &ModeState, m: f64) -> Result<f64> {
    let (u_abs, du_abs) = (mode.u.norm(), mode.du.norm());
    if u_abs == 0.0 || du_abs == 0.0 {
        return Err(Error::ZeroAmplitude { u_abs, du_abs });
    }
    Ok(2.0 * m * u_abs * du_abs)
}

/// Closed-form random-phase entropy from the reference mode.
pub fn random_phase_closed(r: f64, reference: &ModeState, m: f64) -> Result<f64> {
    Ok(entropy_floor() + squeeze_term(r) + uncertainty_product(reference, m)?.ln())
}

/// Random-phase entropy by `n`-node trapezoid quadrature over `θ`.
pub fn random_phase_quadrature(r: f64, reference: &ModeState, m: f64, n: usize) -> Result<f64> {
    if n < 64 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "quadrature needs an even node count of at least 64, got {n}"
        )));
    }
    // ln(2 Δx Δp / ħ) does not depend on ħ
    let consts = PhysicalConstants::default();
    let mut sum = 0.0;
    for k in 0..n {
        let sq = SqueezeParams::new(r, TAU * k as f64 / n as f64)?;
        let mode = squeeze_mode(reference, &sq);
        sum += joint_entropy(&variances(&mode, m, &consts)?, &consts);
    }
    Ok(sum / n as f64)
}

/// `∫₀^{2π} ln(a + b cos x + c sin x) dx = 2π ln((a + √(a² − b² − c²))/2)`.
pub fn log_integral_identity(a: f64, b: f64, c: f64) -> Result<f64> {
    let norm = b.hypot(c);
    if !(a > norm) {
        return Err(Error::DomainError { a, norm });
    }
    Ok(TAU * (0.5 * (a + ((a - norm) * (a + norm)).sqrt())).ln())
}

/// Evaluates `½ ln(1 + (m d|u₀|²/dt)²)`, which equals `ln(2m|u₀u̇₀|)` for any
/// mode satisfying the Wronskian condition.
pub fn minimal_uncertainty_identity(reference: &ModeState, m: f64) -> Result<f64> {
    let cross = reference.u * reference.du.conj();
    let normalization = 2.0 * m * cross.im;
    if !((normalization - 1.0).abs() <= WRONSKIAN_TOL) {
        return Err(Error::WronskianViolation {
            value: normalization,
        });
    }
    let m_d_abs_sq = 2.0 * m * cross.re;
    Ok(0.5 * (m_d_abs_sq * m_d_abs_sq).ln_1p())
}

/// `⟨H⟩ = (ħm/2)(|u̇₀|² + ω²|u₀|²)` of the centred packet built on `reference`.
pub fn energy_expectation(
    reference: &ModeState,
    model: &QuadraticModel,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<f64> {
    if reference.t != t {
        return Err(Error::TimeMismatch {
            expected: t,
            found: reference.t,
        });
    }
    let m = model.mass(t)?;
    let w2 = model.omega_sq(t)?;
    Ok(0.5 * consts.hbar() * m * (reference.du.norm_sqr() + w2 * reference.u.norm_sqr()))
}

/// Lower bound `ln(e/2) + ln((cosh 2r + 1)/2)`, valid for every model.
pub fn random_phase_lower_bound(r: f64) -> f64 {
    entropy_floor() + squeeze_term(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomPhaseBounds {
    pub lower: f64,
    pub upper: f64,
    /// `⟨H⟩_{Ψ₀} / (ħω)`.
    pub energy_over_hbar_omega: f64,
    /// `ln(e/2) + ln(cosh 2r + 1)`, as commonly quoted without the `/2`.
    pub printed_lower: f64,
    /// `ln(e/2) + ln(cosh 2r + 1) + ½ ln(⟨H⟩/(ħω/2))`.
    pub printed_upper: f64,
}

impl RandomPhaseBounds {
    pub fn sandwiches(&self, s_bar: f64, tol: f64) -> bool {
        self.lower <= s_bar + tol && s_bar <= self.upper + tol
    }

    pub fn printed_lower_violated(&self, s_bar: f64, tol: f64) -> bool {
        self.printed_lower > s_bar + tol
    }

    pub fn printed_upper_violated(&self, s_bar: f64, tol: f64) -> bool {
        s_bar > self.printed_upper + tol
    }
}

/// Lower and upper bounds on `S̄(t)`; the upper needs `ω²(t) > 0`.
pub fn random_phase_bounds(
    r: f64,
    reference: &ModeState,
    model: &QuadraticModel,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<RandomPhaseBounds> {
    let w2 = model.omega_sq(t)?;
    if !(w2 > 0.0) {
        return Err(Error::FrequencyZero { t, omega_sq: w2 });
    }
    let energy = energy_expectation(reference, model, t, consts)?;
    let ratio = energy / (0.5 * consts.hbar() * w2.sqrt());
    let lower = random_phase_lower_bound(r);
    let printed_lower = lower + LN_2;
    Ok(RandomPhaseBounds {
        lower,
        upper: lower + ratio.ln(),
        energy_over_hbar_omega: 0.5 * ratio,
        printed_lower,
        printed_upper: printed_lower + 0.5 * ratio.ln(),
    })
}

/// Free particle: `ln(e/2) + ln((cosh 2r + 1)/2) + ½ ln(1 + T²)` with `T = t/m0`.
pub fn random_phase_free(r: f64, big_t: f64) -> f64 {
    entropy_floor() + squeeze_term(r) + 0.5 * (big_t * big_t).ln_1p()
}

/// Harmonic oscillator: time independent.
pub fn random_phase_oscillator(r: f64) -> f64 {
    entropy_floor() + squeeze_term(r)
}

/// Caldirola-Kanai: `ln(e/2) + ln((cosh 2r + 1)/2) + ½ ln(1 + γ²/4ω²)`.
pub fn random_phase_caldirola_kanai(r: f64, omega0: f64, gamma: f64) -> Result<f64> {
    let omega = damped_frequency(omega0, gamma)?;
    let x = gamma / (2.0 * omega);
    Ok(entropy_floor() + squeeze_term(r) + 0.5 * (x * x).ln_1p())
}

/// All random-phase quantities of one time sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomPhaseRecord {
    pub t: f64,
    pub s_bar_closed: f64,
    pub s_bar_quadrature: f64,
    pub lower_bound: f64,
    /// `None` where `ω(t) = 0`.
    pub upper_bound: Option<f64>,
    pub energy_expectation: Option<f64>,
}

impl RandomPhaseRecord {
    pub fn evaluate(
        r: f64,
        reference: &ModeState,
        model: &QuadraticModel,
        consts: &PhysicalConstants,
        nodes: usize,
    ) -> Result<Self> {
        let t = reference.t;
        let m = model.mass(t)?;
        let bounds = match random_phase_bounds(r, reference, model, t, consts) {
            Ok(b) => Some(b),
            Err(Error::FrequencyZero { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(RandomPhaseRecord {
            t,
            s_bar_closed: random_phase_closed(r, reference, m)?,
            s_bar_quadrature: random_phase_quadrature(r, reference, m, nodes)?,
            lower_bound: random_phase_lower_bound(r),
            upper_bound: bounds.map(|b| b.upper),
            energy_expectation: bounds.map(|b| b.energy_over_hbar_omega),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{caldirola_kanai_mode, free_mode, oscillator_mode};
    use proptest::prelude::*;

    const FLOOR: f64 = 0.306_852_819_440_054_7;

    /// Plain trapezoid over one period, independent of the closed form.
    fn periodic_trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        (0..n).map(|k| f(TAU * k as f64 / n as f64)).sum::<f64>() * TAU / n as f64
    }

    #[test]
    fn log_integral_examples() {
        let oracle = periodic_trapezoid(|x| (2.0 + x.cos()).ln(), 256);
        let v = log_integral_identity(2.0, 1.0, 0.0).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 3.919_518_327_524_932).abs() < 1e-12);

        assert!((log_integral_identity(3.0, 0.0, 0.0).unwrap() - TAU * 3f64.ln()).abs() < 1e-14);
        let rotated = log_integral_identity(2.0, 0.6, 0.8).unwrap();
        assert!((rotated - v).abs() < 1e-14);
        let oracle = periodic_trapezoid(|x| (2.0 + 0.6 * x.cos() + 0.8 * x.sin()).ln(), 256);
        assert!((rotated - oracle).abs() < 1e-12);

        assert!(matches!(
            log_integral_identity(1.0, 1.0, 0.0),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn closed_examples() {
        for t in [0.0, 2.0, 13.0] {
            let v = random_phase_closed(0.0, &oscillator_mode(1.0, 1.0, t), 1.0).unwrap();
            assert!((v - FLOOR).abs() < 1e-15);
        }
        let v = random_phase_closed(0.0, &free_mode(1.0, 2.0), 1.0).unwrap();
        assert!((v - (FLOOR + 0.5 * 5f64.ln())).abs() < 1e-15);

        let t: f64 = 3.0;
        let m = (0.6 * t).exp();
        let v =
            random_phase_closed(0.0, &caldirola_kanai_mode(1.0, 1.0, 0.6, t).unwrap(), m).unwrap();
        assert!((v - (FLOOR + 0.047_155_339_735_620_71)).abs() < 1e-13);
    }

    #[test]
    fn quadrature_examples() {
        let reference = free_mode(1.0, 1.7);
        let q = random_phase_quadrature(0.0, &reference, 1.0, 64).unwrap();
        let c = PhysicalConstants::default();
        let direct = joint_entropy(&variances(&reference, 1.0, &c).unwrap(), &c);
        assert!((q - direct).abs() < 1e-14);

        let expected = FLOOR + 0.867_561_660_966_054_2;
        let q = random_phase_quadrature(1.0, &oscillator_mode(1.0, 1.0, 0.4), 1.0, 512).unwrap();
        assert!((q - expected).abs() < 1e-10);
        let q = random_phase_quadrature(1.0, &free_mode(1.0, 0.0), 1.0, 512).unwrap();
        assert!((q - expected).abs() < 1e-10);

        assert!(random_phase_quadrature(1.0, &free_mode(1.0, 0.0), 1.0, 63).is_err());
        assert!(random_phase_quadrature(1.0, &free_mode(1.0, 0.0), 1.0, 66).is_ok());
    }

    #[test]
    fn quadrature_settles_free_particle_exponent() {
        // half the logarithm, not the full one
        let q = random_phase_quadrature(0.0, &free_mode(1.0, 2.0), 1.0, 512).unwrap();
        assert!((q - (FLOOR + 0.5 * 5f64.ln())).abs() < 1e-12);
        assert!((q - (FLOOR + 5f64.ln())).abs() > 0.5);
        let q = random_phase_quadrature(0.8, &free_mode(2.0, 3.0), 2.0, 512).unwrap();
        assert!((q - random_phase_free(0.8, 1.5)).abs() < 1e-12);
    }

    #[test]
    fn identity_examples() {
        let v = minimal_uncertainty_identity(&oscillator_mode(1.0, 1.0, 2.3), 1.0).unwrap();
        assert!(v.abs() < 1e-15);
        let v = minimal_uncertainty_identity(&free_mode(1.0, 2.0), 1.0).unwrap();
        assert!((v - 0.5 * 5f64.ln()).abs() < 1e-15);
        for t in [0.0f64, 1.0, 6.0] {
            let m = (0.6 * t).exp();
            let mode = caldirola_kanai_mode(1.0, 1.0, 0.6, t).unwrap();
            let v = minimal_uncertainty_identity(&mode, m).unwrap();
            assert!((v - 0.5 * (0.09f64 / 0.91).ln_1p()).abs() < 1e-13);
        }
        let mut bad = free_mode(1.0, 0.0);
        bad.u *= 1.01;
        assert!(matches!(
            minimal_uncertainty_identity(&bad, 1.0),
            Err(Error::WronskianViolation { .. })
        ));
    }

    #[test]
    fn energy_examples() {
        let c = PhysicalConstants::default();
        let osc = QuadraticModel::oscillator(1.0, 2.0).unwrap();
        let e = energy_expectation(&oscillator_mode(1.0, 2.0, 0.9), &osc, 0.9, &c).unwrap();
        assert!((e - 1.0).abs() < 1e-15);

        let free = QuadraticModel::free_particle(1.0).unwrap();
        let e = energy_expectation(&free_mode(1.0, 0.0), &free, 0.0, &c).unwrap();
        assert!((e - 0.25).abs() < 1e-15);

        assert!(energy_expectation(&free_mode(1.0, 0.0), &free, 1.0, &c).is_err());
    }

    #[test]
    fn bounds_examples() {
        let c = PhysicalConstants::default();
        let osc = QuadraticModel::oscillator(1.0, 1.0).unwrap();
        for r in [0.0, 0.7, 2.0] {
            let reference = oscillator_mode(1.0, 1.0, 0.3);
            let s_bar = random_phase_closed(r, &reference, 1.0).unwrap();
            let b = random_phase_bounds(r, &reference, &osc, 0.3, &c).unwrap();
            assert!((b.lower - s_bar).abs() < 1e-14);
            assert!((b.upper - s_bar).abs() < 1e-14);
        }

        let ck = QuadraticModel::caldirola_kanai(1.0, 1.0, 0.6).unwrap();
        let t = 2.0;
        let reference = caldirola_kanai_mode(1.0, 1.0, 0.6, t).unwrap();
        let s_bar = random_phase_closed(0.0, &reference, ck.mass(t).unwrap()).unwrap();
        let b = random_phase_bounds(0.0, &reference, &ck, t, &c).unwrap();
        assert!((b.lower - FLOOR).abs() < 1e-15);
        assert!(b.sandwiches(s_bar, 1e-10));

        let free = QuadraticModel::free_particle(1.0).unwrap();
        assert!(matches!(
            random_phase_bounds(0.0, &free_mode(1.0, 0.0), &free, 0.0, &c),
            Err(Error::FrequencyZero { .. })
        ));
    }

    #[test]
    fn printed_lower_bound_fails_for_oscillator() {
        let c = PhysicalConstants::default();
        let osc = QuadraticModel::oscillator(1.0, 1.0).unwrap();
        let reference = oscillator_mode(1.0, 1.0, 0.0);
        let s_bar = random_phase_closed(1.0, &reference, 1.0).unwrap();
        let b = random_phase_bounds(1.0, &reference, &osc, 0.0, &c).unwrap();
        assert!(b.printed_lower_violated(s_bar, 1e-10));
        assert!((b.printed_lower - s_bar - LN_2).abs() < 1e-14);
    }

    #[test]
    fn record_collects_everything() {
        let c = PhysicalConstants::default();
        let free = QuadraticModel::free_particle(1.0).unwrap();
        let rec = RandomPhaseRecord::evaluate(0.5, &free_mode(1.0, 1.0), &free, &c, 128).unwrap();
        assert!(rec.upper_bound.is_none());
        assert!((rec.s_bar_closed - rec.s_bar_quadrature).abs() < 1e-12);
        assert!(rec.lower_bound <= rec.s_bar_closed);
    }

    #[test]
    fn special_cases_agree_with_general_form() {
        let v = random_phase_caldirola_kanai(0.4, 1.0, 0.6).unwrap();
        let reference = caldirola_kanai_mode(1.0, 1.0, 0.6, 1.0).unwrap();
        let g = random_phase_closed(0.4, &reference, 0.6f64.exp()).unwrap();
        assert!((v - g).abs() < 1e-13);
        assert!((random_phase_oscillator(0.4) - random_phase_lower_bound(0.4)).abs() < 1e-16);
        assert!(random_phase_caldirola_kanai(0.4, 1.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn identity_matches_log_product(t in 0.0..10.0f64, r in 0.0..2.0f64, theta in 0.0..TAU) {
            // any normalized mode, including squeezed ones
            let mode = squeeze_mode(&free_mode(1.0, t), &SqueezeParams::new(r, theta).unwrap());
            let lhs = (2.0 * (mode.u * mode.du).norm()).ln();
            prop_assert!((minimal_uncertainty_identity(&mode, 1.0).unwrap() - lhs).abs() < 1e-10);
        }

        #[test]
        fn energy_dominates_geometric_mean(t in 0.0..10.0f64, r in 0.0..2.0f64, theta in 0.0..TAU) {
            let c = PhysicalConstants::default();
            let ck = QuadraticModel::caldirola_kanai(1.0, 1.0, 0.6).unwrap();
            let mode = squeeze_mode(
                &caldirola_kanai_mode(1.0, 1.0, 0.6, t).unwrap(),
                &SqueezeParams::new(r, theta).unwrap(),
            );
            let e = energy_expectation(&mode, &ck, t, &c).unwrap();
            let gm = ck.mass(t).unwrap() * (mode.u * mode.du).norm();
            prop_assert!(e >= gm * (1.0 - 1e-12));
        }

        #[test]
        fn phase_of_reference_is_irrelevant(phi in 0.0..TAU, r in 0.0..1.0f64) {
            let a = free_mode(1.0, 0.8);
            let b = a.with_phase(phi);
            let qa = random_phase_quadrature(r, &a, 1.0, 256).unwrap();
            let qb = random_phase_quadrature(r, &b, 1.0, 256).unwrap();
            prop_assert!((qa - qb).abs() < 1e-10);
        }
    }
}
