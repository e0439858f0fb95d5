//! JSON scenario files and their resolution into a runnable [`Plan`].

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use packet_entropy::hamparse::parse;
use packet_entropy::models::{frozen_mode, ClosedFormMode};
use packet_entropy::{
    Coefficient, ModeState, ModelKind, PhysicalConstants, QuadraticModel, MAX_SQUEEZE,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: ModelSpec,
    pub squeeze: SqueezeSpec,
    pub time: Axis,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default)]
    pub outputs: Vec<Output>,
    /// Defaults to closed form for named models and ODE for custom ones.
    #[serde(default)]
    pub propagation: Option<Propagation>,
    /// Multiplies the ODE initial state; anything but 1 breaks the Wronskian.
    #[serde(default)]
    pub init_scale: Option<f64>,
}

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    FreeParticle {
        m0: f64,
    },
    Oscillator {
        m0: f64,
        omega0: f64,
    },
    CaldirolaKanai {
        m0: f64,
        omega0: f64,
        gamma: f64,
    },
    Custom {
        mass: String,
        omega_sq: String,
        #[serde(default = "zero_force")]
        force: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

fn zero_force() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeSpec {
    pub r: Axis,
    pub theta: Axis,
}

/// A single value or an evenly spaced grid.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    Grid(Grid),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Include `stop` itself; false gives a periodic grid.
    #[serde(default = "yes")]
    pub endpoint: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Output {
    #[serde(rename = "dx")]
    Dx,
    #[serde(rename = "dp")]
    Dp,
    #[serde(rename = "S")]
    S,
    #[serde(rename = "S_bar")]
    SBar,
    #[serde(rename = "bounds")]
    Bounds,
    #[serde(rename = "t_star")]
    TStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagation {
    ClosedForm,
    Ode,
}

impl Axis {
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        let bad = |msg: &str| CliError::Config(format!("{name}: {msg}"));
        match *self {
            Axis::Value(v) if v.is_finite() => Ok(vec![v]),
            Axis::Value(_) => Err(bad("value must be finite")),
            Axis::Grid(Grid {
                start,
                stop,
                count,
                endpoint,
            }) => {
                if !start.is_finite() || !stop.is_finite() {
                    return Err(bad("start and stop must be finite"));
                }
                if count == 0 {
                    return Err(bad("count must be at least 1"));
                }
                if start > stop {
                    return Err(bad("start must not exceed stop"));
                }
                if count == 1 {
                    return Ok(vec![start]);
                }
                let intervals = if endpoint { count - 1 } else { count } as f64;
                let span = stop - start;
                Ok((0..count)
                    .map(|k| start + span * k as f64 / intervals)
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutputSet {
    pub s_bar: bool,
    pub bounds: bool,
    pub t_star: bool,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub model: QuadraticModel,
    pub consts: PhysicalConstants,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub times: Vec<f64>,
    pub outputs: OutputSet,
    pub propagation: Propagation,
    pub init_scale: f64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn plan(&self) -> Result<Plan> {
        let consts = PhysicalConstants::new(self.hbar)?;
        let model = self.model.build()?;

        let r = self.squeeze.r.values("squeeze.r")?;
        if let Some(bad) = r.iter().find(|&&r| !(0.0..=MAX_SQUEEZE).contains(&r)) {
            return Err(CliError::Config(format!(
                "squeeze.r: {bad} outside [0, {MAX_SQUEEZE}]"
            )));
        }
        let theta = self.squeeze.theta.values("squeeze.theta")?;
        let times = self.time.values("time")?;
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(
                "time: grid must be strictly increasing".into(),
            ));
        }

        let mut outputs = OutputSet::default();
        for o in &self.outputs {
            match o {
                Output::Dx | Output::Dp | Output::S => {}
                Output::SBar => outputs.s_bar = true,
                Output::Bounds => outputs.bounds = true,
                Output::TStar => outputs.t_star = true,
            }
        }
        let is_free = matches!(model.kind(), ModelKind::FreeParticle { .. });
        if outputs.t_star && !is_free {
            return Err(CliError::Config(
                "outputs: t_star is only defined for the free particle".into(),
            ));
        }
        if outputs.bounds && is_free {
            return Err(CliError::Config(
                "outputs: bounds need a nonzero frequency; the free particle has none".into(),
            ));
        }

        let propagation = match (self.propagation, model.kind()) {
            (Some(Propagation::ClosedForm), ModelKind::Custom) => {
                return Err(CliError::Config(
                    "propagation: custom models have no closed form; use \"ode\"".into(),
                ))
            }
            (Some(p), _) => p,
            (None, ModelKind::Custom) => Propagation::Ode,
            (None, _) => Propagation::ClosedForm,
        };

        let init_scale = self.init_scale.unwrap_or(1.0);
        if !(init_scale.is_finite() && init_scale > 0.0) {
            return Err(CliError::Config(
                "init_scale must be positive and finite".into(),
            ));
        }

        Ok(Plan {
            model,
            consts,
            r,
            theta,
            times,
            outputs,
            propagation,
            init_scale,
        })
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<QuadraticModel> {
        Ok(match self {
            ModelSpec::FreeParticle { m0 } => QuadraticModel::free_particle(*m0)?,
            ModelSpec::Oscillator { m0, omega0 } => QuadraticModel::oscillator(*m0, *omega0)?,
            ModelSpec::CaldirolaKanai { m0, omega0, gamma } => {
                QuadraticModel::caldirola_kanai(*m0, *omega0, *gamma)?
            }
            ModelSpec::Custom {
                mass,
                omega_sq,
                force,
                params,
            } => {
                let params: HashMap<String, f64> =
                    params.iter().map(|(k, v)| (k.clone(), *v)).collect();
                let coefficient = |field: &str, src: &str| -> Result<Coefficient> {
                    let expr = parse(src)
                        .map_err(|e| CliError::Config(format!("model.{field}: {e} in {src:?}")))?;
                    let bound = expr
                        .bind(&params)
                        .map_err(|e| CliError::Config(format!("model.{field}: {e}")))?;
                    Ok(Coefficient::Expr(bound))
                };
                QuadraticModel::custom(
                    coefficient("mass", mass)?,
                    coefficient("omega_sq", omega_sq)?,
                    coefficient("force", force)?,
                )
            }
        })
    }
}

impl Plan {
    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    /// Reference mode at `t0`: the closed form for named models, the
    /// frozen-coefficient mode otherwise.
    pub fn reference_init(&self) -> packet_entropy::Result<ModeState> {
        let t0 = self.t0();
        match ClosedFormMode::for_model(&self.model) {
            Some(cf) => cf.at(t0),
            None => frozen_mode(&self.model, t0),
        }
    }

    pub fn m0(&self) -> Option<f64> {
        match self.model.kind() {
            ModelKind::FreeParticle { m0 }
            | ModelKind::Oscillator { m0, .. }
            | ModelKind::CaldirolaKanai { m0, .. } => Some(m0),
            ModelKind::Custom => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = r#"{
        "model": {"kind": "free_particle", "m0": 1.0},
        "squeeze": {"r": {"start": 0, "stop": 1, "count": 3}, "theta": 1.5},
        "time": {"start": 0, "stop": 5, "count": 6}
    }"#;

    #[test]
    fn parses_minimal_scenario() {
        let s = Scenario::from_json(FREE).unwrap();
        assert_eq!(s.hbar, 1.0);
        let plan = s.plan().unwrap();
        assert_eq!(plan.r, vec![0.0, 0.5, 1.0]);
        assert_eq!(plan.theta, vec![1.5]);
        assert_eq!(plan.times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(plan.propagation, Propagation::ClosedForm);
    }

    #[test]
    fn periodic_grid_leaves_out_stop() {
        let axis = Axis::Grid(Grid {
            start: 0.0,
            stop: 4.0,
            count: 4,
            endpoint: false,
        });
        assert_eq!(axis.values("x").unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let typo = FREE.replace("\"hbar\"", "").replace("\"time\"", "\"tme\"");
        assert!(matches!(
            Scenario::from_json(&typo),
            Err(CliError::Config(_))
        ));
        let extra = FREE.replace("\"m0\": 1.0", "\"m0\": 1.0, \"omega0\": 2.0");
        assert!(Scenario::from_json(&extra).is_err());
        let grid = FREE.replace("\"count\": 3", "\"count\": 3, \"step\": 0.5");
        assert!(Scenario::from_json(&grid).is_err());
        let output = FREE.replace("\"time\"", "\"outputs\": [\"entropy\"], \"time\"");
        assert!(Scenario::from_json(&output).is_err());
    }

    #[test]
    fn grid_preconditions() {
        for bad in [
            r#""time": {"start": 5, "stop": 0, "count": 6}"#,
            r#""time": {"start": 0, "stop": 5, "count": 0}"#,
            r#""time": {"start": 1, "stop": 1, "count": 3}"#,
        ] {
            let s = FREE.replace(r#""time": {"start": 0, "stop": 5, "count": 6}"#, bad);
            let err = Scenario::from_json(&s).unwrap().plan().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn model_specific_outputs() {
        let s = FREE.replace("\"time\"", "\"outputs\": [\"bounds\"], \"time\"");
        assert!(Scenario::from_json(&s).unwrap().plan().is_err());
        let s = FREE
            .replace(
                "\"free_particle\", \"m0\": 1.0",
                "\"oscillator\", \"m0\": 1.0, \"omega0\": 1.0",
            )
            .replace("\"time\"", "\"outputs\": [\"t_star\"], \"time\"");
        assert!(Scenario::from_json(&s).unwrap().plan().is_err());
    }

    #[test]
    fn custom_model_expressions() {
        let s = FREE.replace(
            r#"{"kind": "free_particle", "m0": 1.0}"#,
            r#"{"kind": "custom", "mass": "m0*exp(gamma*t)", "omega_sq": "w0^2",
                "params": {"m0": 1, "gamma": 0.6, "w0": 1}}"#,
        );
        let plan = Scenario::from_json(&s).unwrap().plan().unwrap();
        assert_eq!(plan.propagation, Propagation::Ode);
        assert!((plan.model.mass(1.0).unwrap() - 0.6f64.exp()).abs() < 1e-15);
        let init = plan.reference_init().unwrap();
        assert!(init.wronskian_drift(1.0) < 1e-15);

        let unbound = s.replace("\"w0\": 1", "\"w1\": 1");
        let err = Scenario::from_json(&unbound).unwrap().plan().unwrap_err();
        assert!(err.to_string().contains("w0"), "{err}");
        let syntax = s.replace("w0^2", "w0^");
        let err = Scenario::from_json(&syntax).unwrap().plan().unwrap_err();
        assert!(err.to_string().contains("at byte"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn free_custom_reference_is_normalized() {
        let s = FREE.replace(
            r#"{"kind": "free_particle", "m0": 1.0}"#,
            r#"{"kind": "custom", "mass": "2", "omega_sq": "0"}"#,
        );
        let plan = Scenario::from_json(&s).unwrap().plan().unwrap();
        assert!(plan.reference_init().unwrap().wronskian_drift(2.0) < 1e-15);
    }

    #[test]
    fn overdamped_is_a_config_error() {
        let s = FREE.replace(
            r#"{"kind": "free_particle", "m0": 1.0}"#,
            r#"{"kind": "caldirola_kanai", "m0": 1.0, "omega0": 1.0, "gamma": 3.0}"#,
        );
        let err = Scenario::from_json(&s).unwrap().plan().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
