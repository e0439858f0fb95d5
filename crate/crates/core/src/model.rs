//! Quadratic Hamiltonians `H = p²/2m(t) + m(t)ω²(t)x²/2 − f(t)x`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hamparse::BoundExpr;

/// A scalar function of time: a constant, a parsed expression, or a closure.
#[derive(Clone)]
pub enum Coefficient {
    Const(f64),
    Expr(BoundExpr),
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Coefficient {
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Coefficient::Const(c) => Ok(*c),
            Coefficient::Expr(e) => Ok(e.eval(t)?),
            Coefficient::Func(f) => {
                let v = f(t);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "coefficient function returned {v} at t = {t}"
                    )))
                }
            }
        }
    }

    /// `d/dt` of the coefficient: exact for constants and expressions, a
    /// five-point difference for closures.
    pub fn rate(&self, t: f64) -> Result<f64> {
        match self {
            Coefficient::Const(_) => Ok(0.0),
            Coefficient::Expr(e) => Ok(e.derivative().eval(t)?),
            Coefficient::Func(_) => {
                let h = 1e-3 * t.abs().max(1.0);
                let f = |k: f64| self.eval(t + k * h);
                Ok((f(-2.0)? - 8.0 * f(-1.0)? + 8.0 * f(1.0)? - f(2.0)?) / (12.0 * h))
            }
        }
    }

    pub fn func(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Func(Arc::new(f))
    }

    fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Const(c) if *c == 0.0)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "Const({c})"),
            Coefficient::Expr(e) => write!(f, "Expr({e})"),
            Coefficient::Func(_) => write!(f, "Func(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    FreeParticle { m0: f64 },
    Oscillator { m0: f64, omega0: f64 },
    CaldirolaKanai { m0: f64, omega0: f64, gamma: f64 },
    Custom,
}

impl ModelKind {
    /// Natural time unit: `m0` for the free particle, one period otherwise.
    pub fn characteristic_time(&self) -> Option<f64> {
        match *self {
            ModelKind::FreeParticle { m0 } => Some(m0),
            ModelKind::Oscillator { omega0, .. } => Some(std::f64::consts::TAU / omega0),
            ModelKind::CaldirolaKanai { omega0, gamma, .. } => {
                let omega = (omega0 * omega0 - 0.25 * gamma * gamma).sqrt();
                Some(std::f64::consts::TAU / omega)
            }
            ModelKind::Custom => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticModel {
    kind: ModelKind,
    mass: Coefficient,
    omega_sq: Coefficient,
    force: Coefficient,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl QuadraticModel {
    pub fn free_particle(m0: f64) -> Result<Self> {
        positive("m0", m0)?;
        Ok(QuadraticModel {
            kind: ModelKind::FreeParticle { m0 },
            mass: Coefficient::Const(m0),
            omega_sq: Coefficient::Const(0.0),
            force: Coefficient::Const(0.0),
        })
    }

    pub fn oscillator(m0: f64, omega0: f64) -> Result<Self> {
        positive("m0", m0)?;
        positive("omega0", omega0)?;
        Ok(QuadraticModel {
            kind: ModelKind::Oscillator { m0, omega0 },
            mass: Coefficient::Const(m0),
            omega_sq: Coefficient::Const(omega0 * omega0),
            force: Coefficient::Const(0.0),
        })
    }

    /// `m(t) = m0 e^{γt}` with constant `ω0`; only the underdamped branch
    /// `ω0 > γ/2` is accepted.
    pub fn caldirola_kanai(m0: f64, omega0: f64, gamma: f64) -> Result<Self> {
        positive("m0", m0)?;
        positive("omega0", omega0)?;
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        if omega0 <= 0.5 * gamma {
            return Err(Error::OverdampedUnsupported {
                omega0,
                half_gamma: 0.5 * gamma,
            });
        }
        Ok(QuadraticModel {
            kind: ModelKind::CaldirolaKanai { m0, omega0, gamma },
            mass: Coefficient::func(move |t| m0 * (gamma * t).exp()),
            omega_sq: Coefficient::Const(omega0 * omega0),
            force: Coefficient::Const(0.0),
        })
    }

    pub fn custom(mass: Coefficient, omega_sq: Coefficient, force: Coefficient) -> Self {
        QuadraticModel {
            kind: ModelKind::Custom,
            mass,
            omega_sq,
            force,
        }
    }

    pub fn with_force(mut self, force: Coefficient) -> Self {
        self.force = force;
        self
    }

    pub fn without_force(&self) -> Self {
        self.clone().with_force(Coefficient::Const(0.0))
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn has_force(&self) -> bool {
        !self.force.is_zero()
    }

    /// `m(t)`; errors if the mass is not strictly positive.
    pub fn mass(&self, t: f64) -> Result<f64> {
        let m = self.mass.eval(t)?;
        if m > 0.0 {
            Ok(m)
        } else {
            Err(Error::NonPositiveMass { t, mass: m })
        }
    }

    /// `ṁ(t)`.
    pub fn mass_rate(&self, t: f64) -> Result<f64> {
        match self.kind {
            ModelKind::CaldirolaKanai { m0, gamma, .. } => Ok(gamma * m0 * (gamma * t).exp()),
            _ => self.mass.rate(t),
        }
    }

    pub fn omega_sq(&self, t: f64) -> Result<f64> {
        self.omega_sq.eval(t)
    }

    pub fn force(&self, t: f64) -> Result<f64> {
        self.force.eval(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamparse::parse;
    use std::collections::HashMap;

    #[test]
    fn named_constructors_validate() {
        assert!(QuadraticModel::free_particle(0.0).is_err());
        assert!(QuadraticModel::oscillator(1.0, -1.0).is_err());
        assert!(matches!(
            QuadraticModel::caldirola_kanai(1.0, 1.0, 2.5),
            Err(Error::OverdampedUnsupported { .. })
        ));
        assert!(matches!(
            QuadraticModel::caldirola_kanai(1.0, 1.0, 2.0),
            Err(Error::OverdampedUnsupported { .. })
        ));
        let ck = QuadraticModel::caldirola_kanai(2.0, 1.0, 0.6).unwrap();
        assert!((ck.mass(1.0).unwrap() - 2.0 * 0.6f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn custom_mass_must_stay_positive() {
        let mass = parse("1 - t").unwrap().bind(&HashMap::new()).unwrap();
        let m = QuadraticModel::custom(
            Coefficient::Expr(mass),
            Coefficient::Const(1.0),
            Coefficient::Const(0.0),
        );
        assert!(m.mass(0.5).is_ok());
        assert!(matches!(m.mass(2.0), Err(Error::NonPositiveMass { .. })));
    }

    #[test]
    fn force_tracking() {
        let m = QuadraticModel::oscillator(1.0, 1.0).unwrap();
        assert!(!m.has_force());
        let driven = m.with_force(Coefficient::func(|t| (2.0 * t).cos()));
        assert!(driven.has_force());
        assert!(!driven.without_force().has_force());
        assert_eq!(driven.force(0.0).unwrap(), 1.0);
    }

    #[test]
    fn mass_rates() {
        let ck = QuadraticModel::caldirola_kanai(2.0, 1.0, 0.6).unwrap();
        assert!((ck.mass_rate(1.0).unwrap() - 1.2 * 0.6f64.exp()).abs() < 1e-15);
        assert_eq!(
            QuadraticModel::oscillator(1.0, 1.0)
                .unwrap()
                .mass_rate(3.0)
                .unwrap(),
            0.0
        );
        let closure = QuadraticModel::custom(
            Coefficient::func(|t| 1.0 + t * t),
            Coefficient::Const(1.0),
            Coefficient::Const(0.0),
        );
        assert!((closure.mass_rate(1.5).unwrap() - 3.0).abs() < 1e-12);
        let params: HashMap<String, f64> = HashMap::new();
        let expr = QuadraticModel::custom(
            Coefficient::Expr(parse("1 + sin(t)").unwrap().bind(&params).unwrap()),
            Coefficient::Const(1.0),
            Coefficient::Const(0.0),
        );
        assert!((expr.mass_rate(0.4).unwrap() - 0.4f64.cos()).abs() < 1e-15);
    }
}
