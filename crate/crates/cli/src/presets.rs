//! Bundled scenarios behind `figure <1|2|3|4>`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{CliError, Result};
use crate::scenario::{Axis, Grid, ModelSpec, Output, Scenario, SqueezeSpec};

fn grid(start: f64, stop: f64, count: usize) -> Axis {
    Axis::Grid(Grid {
        start,
        stop,
        count,
        endpoint: true,
    })
}

fn free(r: Axis, theta: Axis, time: Axis, outputs: Vec<Output>) -> Scenario {
    Scenario {
        model: ModelSpec::FreeParticle { m0: 1.0 },
        squeeze: SqueezeSpec { r, theta },
        time,
        hbar: 1.0,
        outputs,
        propagation: None,
        init_scale: None,
    }
}

/// Initial entropy over the `(r, θ)` plane.
pub fn figure1() -> Scenario {
    let theta = Axis::Grid(Grid {
        start: 0.0,
        stop: TAU,
        count: 120,
        endpoint: false,
    });
    free(grid(0.0, 1.0, 60), theta, Axis::Value(0.0), vec![])
}

/// Free particle at `θ = π/2`: entropy grows monotonically.
pub fn figure2() -> Scenario {
    free(
        grid(0.0, 1.0, 11),
        Axis::Value(FRAC_PI_2),
        grid(0.0, 5.0, 101),
        vec![],
    )
}

/// Free particle at `θ = 3π/2`: entropy dips to the floor at `t*`.
pub fn figure3() -> Scenario {
    free(
        grid(0.0, 1.0, 11),
        Axis::Value(1.5 * PI),
        grid(0.0, 5.0, 101),
        vec![Output::TStar],
    )
}

/// Harmonic oscillator at `θ = 0`: entropy oscillates with period `π/ω0`.
pub fn figure4() -> Scenario {
    Scenario {
        model: ModelSpec::Oscillator {
            m0: 1.0,
            omega0: 1.0,
        },
        squeeze: SqueezeSpec {
            r: grid(0.0, 1.0, 11),
            theta: Axis::Value(0.0),
        },
        time: grid(0.0, TAU, 201),
        hbar: 1.0,
        outputs: vec![Output::SBar, Output::Bounds],
        propagation: None,
        init_scale: None,
    }
}

pub fn figure(n: u8) -> Result<Scenario> {
    match n {
        1 => Ok(figure1()),
        2 => Ok(figure2()),
        3 => Ok(figure3()),
        4 => Ok(figure4()),
        _ => Err(CliError::Config(format!(
            "no figure {n}; choose 1, 2, 3 or 4"
        ))),
    }
}
