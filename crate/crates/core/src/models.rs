//! Closed-form reference modes, and the frozen-coefficient mode used as a
//! reference for models without one.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mode::ModeState;
use crate::model::{ModelKind, QuadraticModel};

/// `u = (1 − i t/m0)/√2`.
pub fn free_mode(m0: f64, t: f64) -> ModeState {
    ModeState::new(
        t,
        Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2 * t / m0),
        Complex64::new(0.0, -FRAC_1_SQRT_2 / m0),
    )
}

/// `u = e^{−iω0 t}/√(2 m0 ω0)`.
pub fn oscillator_mode(m0: f64, omega0: f64, t: f64) -> ModeState {
    let u = Complex64::from_polar(1.0 / (2.0 * m0 * omega0).sqrt(), -omega0 * t);
    ModeState::new(t, u, Complex64::new(0.0, -omega0) * u)
}

/// Reduced frequency `√(ω0² − γ²/4)` of the damped oscillator.
pub fn damped_frequency(omega0: f64, gamma: f64) -> Result<f64> {
    if omega0 <= 0.5 * gamma {
        return Err(Error::OverdampedUnsupported {
            omega0,
            half_gamma: 0.5 * gamma,
        });
    }
    Ok((omega0 * omega0 - 0.25 * gamma * gamma).sqrt())
}

/// `u = e^{−γt/2} e^{−iωt}/√(2 m0 ω)`, normalized against `m(t) = m0 e^{γt}`.
pub fn caldirola_kanai_mode(m0: f64, omega0: f64, gamma: f64, t: f64) -> Result<ModeState> {
    let omega = damped_frequency(omega0, gamma)?;
    let u = Complex64::from_polar(
        (-0.5 * gamma * t).exp() / (2.0 * m0 * omega).sqrt(),
        -omega * t,
    );
    Ok(ModeState::new(
        t,
        u,
        Complex64::new(-0.5 * gamma, -omega) * u,
    ))
}

/// Reference mode at `t0` for an arbitrary model.
///
/// With the coefficients of `ü + (ṁ/m)u̇ + ω²u = 0` frozen at `t0`, the
/// solution `e^{λ(t−t0)}` with `λ = −ṁ/2m − iΩ`, `Ω² = ω² − (ṁ/2m)²`, is
/// taken and normalized to the Wronskian. This is exactly the closed-form
/// mode at `t0 = 0` for the oscillator and Caldirola-Kanai models. When
/// `Ω² ≤ 0` the free-particle mode `u = 1/√2`, `u̇ = −i/(√2 m)` is used.
pub fn frozen_mode(model: &QuadraticModel, t0: f64) -> Result<ModeState> {
    let m = model.mass(t0)?;
    let half_rate = 0.5 * model.mass_rate(t0)? / m;
    let big_omega_sq = model.omega_sq(t0)? - half_rate * half_rate;
    if big_omega_sq > 0.0 {
        let big_omega = big_omega_sq.sqrt();
        let u = Complex64::new(1.0 / (2.0 * m * big_omega).sqrt(), 0.0);
        Ok(ModeState::new(
            t0,
            u,
            Complex64::new(-half_rate, -big_omega) * u,
        ))
    } else {
        Ok(ModeState::new(
            t0,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, -FRAC_1_SQRT_2 / m),
        ))
    }
}

/// Closed-form reference mode of a named model. `None` for custom models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormMode {
    kind: ModelKind,
}

impl ClosedFormMode {
    pub fn for_model(model: &QuadraticModel) -> Option<Self> {
        match model.kind() {
            ModelKind::Custom => None,
            kind => Some(ClosedFormMode { kind }),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn at(&self, t: f64) -> Result<ModeState> {
        match self.kind {
            ModelKind::FreeParticle { m0 } => Ok(free_mode(m0, t)),
            ModelKind::Oscillator { m0, omega0 } => Ok(oscillator_mode(m0, omega0, t)),
            ModelKind::CaldirolaKanai { m0, omega0, gamma } => {
                caldirola_kanai_mode(m0, omega0, gamma, t)
            }
            ModelKind::Custom => unreachable!("ClosedFormMode is never built for custom models"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::wronskian;

    fn i() -> Complex64 {
        Complex64::i()
    }

    #[test]
    fn free_mode_values() {
        let m = free_mode(1.0, 0.0);
        assert!((m.u - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert!((m.du - Complex64::new(0.0, -FRAC_1_SQRT_2)).norm() < 1e-16);
        let m = free_mode(2.0, 2.0);
        assert!((m.u - Complex64::new(1.0, -1.0) * FRAC_1_SQRT_2).norm() < 1e-16);
        assert!((wronskian(&free_mode(1.0, 10.0), 1.0) - i()).norm() < 1e-14);
    }

    #[test]
    fn oscillator_mode_values() {
        let m = oscillator_mode(1.0, 1.0, 0.0);
        assert!((m.u - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((m.du - Complex64::new(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
        for t in [0.3, 1.7, 42.0] {
            let m = oscillator_mode(1.5, 2.0, t);
            assert!((m.u.norm() - 1.0 / 6f64.sqrt()).abs() < 1e-15);
            assert!((wronskian(&m, 1.5) - i()).norm() < 1e-14);
        }
    }

    #[test]
    fn caldirola_kanai_values() {
        assert!((damped_frequency(1.0, 0.6).unwrap() - 0.953_939_201_416_945_6).abs() < 1e-15);
        assert!(matches!(
            caldirola_kanai_mode(1.0, 1.0, 3.0, 0.0),
            Err(Error::OverdampedUnsupported { .. })
        ));
        for t in [0.0, 0.9, 4.0, 17.0] {
            let a = caldirola_kanai_mode(1.0, 1.3, 0.0, t).unwrap();
            let b = oscillator_mode(1.0, 1.3, t);
            assert!((a.u - b.u).norm() < 1e-15 && (a.du - b.du).norm() < 1e-15);

            let m = caldirola_kanai_mode(1.2, 1.0, 0.6, t).unwrap();
            let mass = 1.2 * (0.6 * t).exp();
            assert!((wronskian(&m, mass) - i()).norm() < 1e-13);
        }
    }

    #[test]
    fn small_damping_limit() {
        for t in [0.0, 1.0, 5.0, 9.0] {
            let a = caldirola_kanai_mode(1.0, 1.0, 1e-8, t).unwrap();
            let b = oscillator_mode(1.0, 1.0, t);
            assert!((a.u - b.u).norm() < 1e-7);
            assert!((a.du - b.du).norm() < 1e-7);
        }
    }

    /// Central-difference residual of `ü + (ṁ/m) u̇ + ω² u`.
    fn residual(
        mode: impl Fn(f64) -> ModeState,
        mass: impl Fn(f64) -> f64,
        omega_sq: f64,
        t: f64,
        h: f64,
    ) -> f64 {
        let (prev, mid, next) = (mode(t - h), mode(t), mode(t + h));
        let udd = (next.u - 2.0 * mid.u + prev.u) / (h * h);
        let ud = (next.u - prev.u) / (2.0 * h);
        let mdot = (mass(t + h) - mass(t - h)) / (2.0 * h);
        // derivative carried by the mode agrees with the finite difference
        assert!((ud - mid.du).norm() < 1e-6);
        (udd + mdot / mass(t) * ud + omega_sq * mid.u).norm()
    }

    #[test]
    fn closed_forms_solve_mode_equation() {
        let h = 1e-4;
        for t in [0.5, 2.0, 7.5] {
            assert!(residual(|s| free_mode(1.3, s), |_| 1.3, 0.0, t, h) < 1e-6);
            assert!(residual(|s| oscillator_mode(1.0, 2.0, s), |_| 1.0, 4.0, t, h) < 1e-6);
            assert!(
                residual(
                    |s| caldirola_kanai_mode(1.0, 1.0, 0.6, s).unwrap(),
                    |s| (0.6 * s).exp(),
                    1.0,
                    t,
                    h
                ) < 1e-6
            );
        }
    }

    #[test]
    fn uncertainty_product_profiles() {
        for t in [0.0, 0.7, 3.0, 11.0] {
            let m = oscillator_mode(1.0, 1.0, t);
            assert!((2.0 * (m.u * m.du).norm() - 1.0).abs() < 1e-14);

            let m = caldirola_kanai_mode(1.0, 1.0, 0.6, t).unwrap();
            let mass = (0.6 * t).exp();
            let omega_sq: f64 = 0.91;
            let expected = (1.0 + 0.36 / (4.0 * omega_sq)).sqrt();
            assert!((2.0 * mass * (m.u * m.du).norm() - expected).abs() < 1e-13);

            let m = free_mode(2.0, t);
            let expected = (1.0 + t * t / 4.0).sqrt();
            assert!((2.0 * 2.0 * (m.u * m.du).norm() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn frozen_mode_reproduces_closed_forms() {
        let cases: Vec<(QuadraticModel, ModeState)> = vec![
            (
                QuadraticModel::free_particle(1.7).unwrap(),
                free_mode(1.7, 0.0),
            ),
            (
                QuadraticModel::oscillator(1.2, 2.0).unwrap(),
                oscillator_mode(1.2, 2.0, 0.0),
            ),
            (
                QuadraticModel::caldirola_kanai(0.8, 1.0, 0.6).unwrap(),
                caldirola_kanai_mode(0.8, 1.0, 0.6, 0.0).unwrap(),
            ),
        ];
        for (model, expected) in cases {
            let m = frozen_mode(&model, 0.0).unwrap();
            assert!((m.u - expected.u).norm() < 1e-15, "{:?}", model.kind());
            assert!((m.du - expected.du).norm() < 1e-15, "{:?}", model.kind());
        }
        // CK at a later time: same modulus, wronskian holds
        let ck = QuadraticModel::caldirola_kanai(1.0, 1.0, 0.6).unwrap();
        let m = frozen_mode(&ck, 2.0).unwrap();
        let closed = caldirola_kanai_mode(1.0, 1.0, 0.6, 2.0).unwrap();
        assert!((m.u.norm() - closed.u.norm()).abs() < 1e-15);
        assert!(m.wronskian_drift(ck.mass(2.0).unwrap()) < 1e-14);
    }
}
