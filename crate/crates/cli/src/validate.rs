//! Cross-checks of a scenario against independent numerical oracles.

use std::fmt;

use packet_entropy::dynamics::{evaluate_density, integrate_mode, DensityKind, IntegratorConfig};
use packet_entropy::entropy::{
    entropy_floor, free_entropy_closed, joint_entropy, leipnik_numeric, oscillator_entropy_closed,
};
use packet_entropy::randomphase::{
    random_phase_bounds, random_phase_closed, random_phase_quadrature,
};
use packet_entropy::{
    squeeze_mode, variances, Coefficient, Error as CoreError, GaussianPacket, ModeState, ModelKind,
    SqueezeParams,
};

use crate::error::Result;
use crate::scan::{at_point, map_slices, reference_modes, RunOptions};
use crate::scenario::{Plan, Propagation};

pub const TOL_WRONSKIAN: f64 = 1e-8;
pub const TOL_ODE: f64 = 1e-8;
pub const TOL_FORMULA: f64 = 1e-10;
pub const TOL_DENSITY: f64 = 1e-5;
pub const TOL_RANDOM_PHASE: f64 = 1e-9;
pub const TOL_BOUNDS: f64 = 1e-10;
pub const TOL_FLOOR: f64 = 1e-12;

const DENSITY_POINTS: usize = 2001;
const DENSITY_HALF_WIDTH: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub tol: f64,
    /// Worst residual seen; `None` when the check could not run.
    pub residual: Option<f64>,
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &'static str, tol: f64) -> Self {
        Check {
            name,
            tol,
            residual: Some(0.0),
            detail: None,
        }
    }

    fn record(&mut self, residual: f64) {
        if let Some(worst) = self.residual.as_mut() {
            // NaN must fail, so it sticks
            if residual.is_nan() || residual > *worst {
                *worst = residual;
            }
        }
    }

    fn fail(&mut self, why: String) {
        self.residual = None;
        self.detail.get_or_insert(why);
    }

    fn merge(&mut self, other: &Check) {
        match other.residual {
            Some(r) => self.record(r),
            None => self.fail(other.detail.clone().unwrap_or_default()),
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self.residual, Some(r) if r <= self.tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            match c.residual {
                Some(r) => write!(
                    f,
                    "{status} {:<22} residual={r:.3e} tol={:.0e}",
                    c.name, c.tol
                )?,
                None => write!(f, "{status} {:<22} residual=n/a tol={:.0e}", c.name, c.tol)?,
            }
            if let Some(d) = &c.detail {
                write!(f, "  ({d})")?;
            }
            writeln!(f)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        writeln!(
            f,
            "{} of {} checks passed",
            self.checks.len() - self.failures(),
            self.checks.len()
        )
    }
}

/// Checks of one `(r, θ)` slice.
#[derive(Debug, Clone)]
struct SliceChecks {
    wronskian: Check,
    ode: Check,
    density: Check,
    formula: Option<Check>,
    random_phase: Check,
    bounds: Option<Check>,
    floor: Check,
    printed_lower_gap: f64,
    printed_upper_excess: f64,
}

fn closed_formula(plan: &Plan, sq: &SqueezeParams, t: f64) -> Option<f64> {
    match plan.model.kind() {
        ModelKind::FreeParticle { m0 } => Some(free_entropy_closed(sq, t / m0)),
        ModelKind::Oscillator { omega0, .. } => Some(oscillator_entropy_closed(sq, omega0, t)),
        _ => None,
    }
}

fn check_slice(
    plan: &Plan,
    refs: &[ModeState],
    with_bounds: bool,
    quad_nodes: usize,
    r: f64,
    theta: f64,
) -> packet_entropy::Result<SliceChecks> {
    let consts = &plan.consts;
    let sq = SqueezeParams::new(r, theta)?;
    let mut c = SliceChecks {
        wronskian: Check::new("wronskian_drift", TOL_WRONSKIAN),
        ode: Check::new("entropy_closed_vs_ode", TOL_ODE),
        density: Check::new("entropy_vs_density", TOL_DENSITY),
        formula: closed_formula(plan, &sq, plan.t0())
            .map(|_| Check::new("entropy_vs_formula", TOL_FORMULA)),
        random_phase: Check::new("s_bar_vs_quadrature", TOL_RANDOM_PHASE),
        bounds: with_bounds.then(|| Check::new("s_bar_bounds", TOL_BOUNDS)),
        floor: Check::new("entropy_floor", TOL_FLOOR),
        printed_lower_gap: f64::NEG_INFINITY,
        printed_upper_excess: f64::NEG_INFINITY,
    };

    // the squeezed state itself goes through the integrator, whatever the
    // plan's propagation route
    let mut init = squeeze_mode(&refs[0], &sq);
    init.u *= plan.init_scale;
    init.du *= plan.init_scale;
    let ode = match integrate_mode(
        &plan.model,
        &init,
        &plan.times,
        &IntegratorConfig::default(),
    ) {
        Ok(modes) => Some(modes),
        Err(e @ CoreError::WronskianDriftExceeded { .. }) => {
            c.wronskian.fail(e.to_string());
            c.ode.fail("integration aborted".into());
            None
        }
        Err(e) => return Err(e),
    };

    for (i, reference) in refs.iter().enumerate() {
        let t = reference.t;
        let m = plan.model.mass(t)?;
        let closed_mode = squeeze_mode(reference, &sq);
        let s_closed = joint_entropy(&variances(&closed_mode, m, consts)?, consts);
        c.floor.record(entropy_floor() - s_closed);

        if let Some(modes) = &ode {
            c.wronskian.record(modes[i].wronskian_drift(m));
            let s_ode = joint_entropy(&variances(&modes[i], m, consts)?, consts);
            c.ode.record((s_closed - s_ode).abs());
        }
        if let (Some(check), Some(s)) = (c.formula.as_mut(), closed_formula(plan, &sq, t)) {
            check.record((s_closed - s).abs());
        }

        let packet = GaussianPacket::centered(closed_mode);
        let pos = evaluate_density(
            &packet,
            m,
            consts,
            DensityKind::Position,
            DENSITY_HALF_WIDTH,
            DENSITY_POINTS,
        )?;
        let mom = evaluate_density(
            &packet,
            m,
            consts,
            DensityKind::Momentum,
            DENSITY_HALF_WIDTH,
            DENSITY_POINTS,
        )?;
        c.density
            .record((s_closed - leipnik_numeric(&pos, &mom, consts)?).abs());

        let s_bar = random_phase_closed(r, reference, m)?;
        let s_bar_q = random_phase_quadrature(r, reference, m, quad_nodes)?;
        c.random_phase.record((s_bar - s_bar_q).abs());

        if let Some(check) = c.bounds.as_mut() {
            let b = random_phase_bounds(r, reference, &plan.model, t, consts)?;
            check.record((b.lower - s_bar).max(s_bar - b.upper).max(0.0));
            c.printed_lower_gap = c.printed_lower_gap.max(b.printed_lower - s_bar);
            c.printed_upper_excess = c.printed_upper_excess.max(s_bar - b.printed_upper);
        }
    }
    Ok(c)
}

/// Mode evolution must not see the external force at all.
fn force_independence(plan: &Plan, init: &ModeState) -> packet_entropy::Result<Check> {
    let mut check = Check::new("force_independence", 0.0);
    let cfg = IntegratorConfig::default();
    let bare = integrate_mode(&plan.model.without_force(), init, &plan.times, &cfg)?;
    let driven = plan
        .model
        .clone()
        .with_force(Coefficient::func(|t| 1.0 + (3.0 * t).cos()));
    let pushed = integrate_mode(&driven, init, &plan.times, &cfg)?;
    for (a, b) in bare.iter().zip(&pushed) {
        check.record((a.u - b.u).norm().max((a.du - b.du).norm()));
    }
    Ok(check)
}

pub fn run_validate(plan: &Plan, opts: &RunOptions) -> Result<Report> {
    // named models use their closed form as the reference; custom ones the ODE
    let mut reference_plan = plan.clone();
    reference_plan.init_scale = 1.0;
    if !matches!(plan.model.kind(), ModelKind::Custom) {
        reference_plan.propagation = Propagation::ClosedForm;
    }
    let refs = reference_modes(&reference_plan, &plan.times)?;
    let mut with_bounds = true;
    for &t in &plan.times {
        if !(plan.model.omega_sq(t)? > 0.0) {
            with_bounds = false;
        }
    }

    let per_slice = map_slices(plan, opts, |r, th| {
        check_slice(plan, &refs, with_bounds, opts.quad_nodes, r, th).map_err(at_point(r, th))
    })?;

    let mut merged = per_slice[0].clone();
    for s in &per_slice[1..] {
        merged.wronskian.merge(&s.wronskian);
        merged.ode.merge(&s.ode);
        merged.density.merge(&s.density);
        if let (Some(a), Some(b)) = (merged.formula.as_mut(), s.formula.as_ref()) {
            a.merge(b);
        }
        merged.random_phase.merge(&s.random_phase);
        if let (Some(a), Some(b)) = (merged.bounds.as_mut(), s.bounds.as_ref()) {
            a.merge(b);
        }
        merged.floor.merge(&s.floor);
        merged.printed_lower_gap = merged.printed_lower_gap.max(s.printed_lower_gap);
        merged.printed_upper_excess = merged.printed_upper_excess.max(s.printed_upper_excess);
    }

    let mut checks = vec![merged.wronskian, merged.ode, merged.density];
    checks.extend(merged.formula);
    checks.push(merged.random_phase);
    checks.extend(merged.bounds);
    checks.push(merged.floor);
    checks.push(force_independence(plan, &refs[0])?);

    let mut notes = vec![
        "centroid integrated as dx/dt = p/m, dp/dt = -m w^2 x + f(t)".to_string(),
        "<H> in the upper bound is taken for the centred packet".to_string(),
    ];
    if !with_bounds {
        notes.push("bounds skipped: w^2 <= 0 somewhere on the time grid".into());
    } else {
        if merged.printed_lower_gap > TOL_BOUNDS {
            notes.push(format!(
                "the quoted lower bound ln(e/2)+ln(cosh 2r+1) exceeds S_bar by up to {:.6}",
                merged.printed_lower_gap
            ));
        }
        if merged.printed_upper_excess > TOL_BOUNDS {
            notes.push(format!(
                "S_bar exceeds the quoted upper bound by up to {:.6}",
                merged.printed_upper_excess
            ));
        }
    }
    Ok(Report { checks, notes })
}
