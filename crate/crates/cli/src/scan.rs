//! Grid scans over `(r, θ, t)` and the per-slice entropy-minimum table.

use std::io::Write;

use packet_entropy::dynamics::{integrate_mode, IntegratorConfig};
use packet_entropy::entropy::{
    entropy_floor, entropy_minimum_time, free_entropy_closed, joint_entropy,
};
use packet_entropy::models::ClosedFormMode;
use packet_entropy::randomphase::{random_phase_bounds, random_phase_closed};
use packet_entropy::{squeeze_mode, variances, ModeState, SqueezeParams};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::scenario::{OutputSet, Plan, Propagation};

pub const DEFAULT_QUAD_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` lets rayon decide. Never changes the output.
    pub jobs: Option<usize>,
    pub quad_nodes: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            jobs: None,
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

impl RunOptions {
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Config(format!("jobs: {e}")))?;
        Ok(pool.install(f))
    }
}

/// The `(r, θ)` slices of a plan, in output order.
pub(crate) fn slices(plan: &Plan) -> Vec<(f64, f64)> {
    plan.r
        .iter()
        .flat_map(|&r| plan.theta.iter().map(move |&th| (r, th)))
        .collect()
}

/// Runs `f` on every slice in parallel and returns the results in slice
/// order. The first failing slice (in that order) decides the error.
pub(crate) fn map_slices<T: Send>(
    plan: &Plan,
    opts: &RunOptions,
    f: impl Fn(f64, f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let work = slices(plan);
    let results: Vec<Result<T>> =
        opts.install(|| work.par_iter().map(|&(r, th)| f(r, th)).collect())?;
    results.into_iter().collect()
}

pub(crate) fn at_point(r: f64, theta: f64) -> impl Fn(packet_entropy::Error) -> CliError {
    move |source| CliError::AtPoint { r, theta, source }
}

/// Squeezed modes on `times` by the plan's propagation route.
pub(crate) fn squeezed_modes(
    plan: &Plan,
    sq: &SqueezeParams,
    times: &[f64],
) -> packet_entropy::Result<Vec<ModeState>> {
    match plan.propagation {
        Propagation::ClosedForm => {
            let cf = ClosedFormMode::for_model(&plan.model)
                .expect("closed-form propagation is only planned for named models");
            times
                .iter()
                .map(|&t| Ok(squeeze_mode(&cf.at(t)?, sq)))
                .collect()
        }
        Propagation::Ode => {
            let mut init = squeeze_mode(&plan.reference_init()?, sq);
            init.u *= plan.init_scale;
            init.du *= plan.init_scale;
            integrate_mode(&plan.model, &init, times, &IntegratorConfig::default())
        }
    }
}

/// Unsqueezed reference modes on `times`.
pub(crate) fn reference_modes(
    plan: &Plan,
    times: &[f64],
) -> packet_entropy::Result<Vec<ModeState>> {
    squeezed_modes(plan, &SqueezeParams::vacuum(), times)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub r: f64,
    pub theta: f64,
    pub t: f64,
    pub dx: f64,
    pub dp: f64,
    pub s: f64,
    pub s_minus_floor: f64,
    pub s_bar: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Analytic entropy-minimum time of the slice, when requested and it exists.
    pub t_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub outputs: OutputSet,
    pub rows: Vec<ScanRow>,
}

/// The time grid of one slice, with `t*` spliced in when it falls inside.
fn slice_times(plan: &Plan, sq: &SqueezeParams) -> (Vec<f64>, Option<f64>) {
    let mut times = plan.times.clone();
    if !plan.outputs.t_star {
        return (times, None);
    }
    let t_star = plan.m0().and_then(|m0| entropy_minimum_time(sq, m0));
    if let Some(ts) = t_star {
        let (first, last) = (times[0], times[times.len() - 1]);
        if ts > first && ts < last {
            if let Err(at) = times.binary_search_by(|t| t.total_cmp(&ts)) {
                times.insert(at, ts);
            }
        }
    }
    (times, t_star)
}

fn scan_slice(plan: &Plan, r: f64, theta: f64) -> packet_entropy::Result<Vec<ScanRow>> {
    let sq = SqueezeParams::new(r, theta)?;
    let (times, t_star) = slice_times(plan, &sq);
    let modes = squeezed_modes(plan, &sq, &times)?;
    let refs = if plan.outputs.s_bar || plan.outputs.bounds {
        Some(reference_modes(plan, &times)?)
    } else {
        None
    };
    let floor = entropy_floor();
    let mut rows = Vec::with_capacity(times.len());
    for (i, mode) in modes.iter().enumerate() {
        let t = mode.t;
        let m = plan.model.mass(t)?;
        let v = variances(mode, m, &plan.consts)?;
        let s = joint_entropy(&v, &plan.consts);
        let mut row = ScanRow {
            r,
            theta,
            t,
            dx: v.dx,
            dp: v.dp,
            s,
            s_minus_floor: s - floor,
            s_bar: None,
            lower: None,
            upper: None,
            t_star,
        };
        if let Some(refs) = &refs {
            if plan.outputs.s_bar {
                row.s_bar = Some(random_phase_closed(r, &refs[i], m)?);
            }
            if plan.outputs.bounds {
                let b = random_phase_bounds(r, &refs[i], &plan.model, t, &plan.consts)?;
                row.lower = Some(b.lower);
                row.upper = Some(b.upper);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_scan(plan: &Plan, opts: &RunOptions) -> Result<ScanTable> {
    let slices = map_slices(plan, opts, |r, th| {
        scan_slice(plan, r, th).map_err(at_point(r, th))
    })?;
    Ok(ScanTable {
        outputs: plan.outputs,
        rows: slices.into_iter().flatten().collect(),
    })
}

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn finite(column: &'static str, row: &ScanRow, v: f64) -> Result<String> {
    if v.is_finite() {
        Ok(format_value(v))
    } else {
        Err(CliError::NonFinite {
            column,
            r: row.r,
            theta: row.theta,
            t: row.t,
        })
    }
}

impl ScanTable {
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["r", "theta", "t", "dx", "dp", "S", "S_minus_floor"];
        if self.outputs.s_bar {
            h.push("S_bar");
        }
        if self.outputs.bounds {
            h.extend(["lower", "upper"]);
        }
        if self.outputs.t_star {
            h.push("t_star");
        }
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec = vec![
                finite("r", row, row.r)?,
                finite("theta", row, row.theta)?,
                finite("t", row, row.t)?,
                finite("dx", row, row.dx)?,
                finite("dp", row, row.dp)?,
                finite("S", row, row.s)?,
                finite("S_minus_floor", row, row.s_minus_floor)?,
            ];
            if self.outputs.s_bar {
                rec.push(finite("S_bar", row, row.s_bar.unwrap_or(f64::NAN))?);
            }
            if self.outputs.bounds {
                rec.push(finite("lower", row, row.lower.unwrap_or(f64::NAN))?);
                rec.push(finite("upper", row, row.upper.unwrap_or(f64::NAN))?);
            }
            if self.outputs.t_star {
                // absent means "no interior minimum", not a failed computation
                rec.push(match row.t_star {
                    Some(ts) => finite("t_star", row, ts)?,
                    None => String::new(),
                });
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TStarRow {
    pub r: f64,
    pub theta: f64,
    pub t_star: Option<f64>,
    pub s_t_star: Option<f64>,
    pub t_grid_min: f64,
    pub s_grid_min: f64,
}

/// Analytic entropy minimum versus the minimum over the time grid, per slice.
pub fn run_tstar(plan: &Plan, opts: &RunOptions) -> Result<Vec<TStarRow>> {
    let packet_entropy::ModelKind::FreeParticle { m0 } = plan.model.kind() else {
        return Err(CliError::Config(
            "tstar: only the free particle has an analytic entropy minimum".into(),
        ));
    };
    map_slices(plan, opts, |r, theta| {
        let point = at_point(r, theta);
        let sq = SqueezeParams::new(r, theta).map_err(&point)?;
        let modes = squeezed_modes(plan, &sq, &plan.times).map_err(&point)?;
        let mut best = (f64::NAN, f64::INFINITY);
        for mode in &modes {
            let m = plan.model.mass(mode.t).map_err(&point)?;
            let s = joint_entropy(
                &variances(mode, m, &plan.consts).map_err(&point)?,
                &plan.consts,
            );
            if s < best.1 {
                best = (mode.t, s);
            }
        }
        let t_star = entropy_minimum_time(&sq, m0);
        Ok(TStarRow {
            r,
            theta,
            t_star,
            s_t_star: t_star.map(|ts| free_entropy_closed(&sq, ts / m0)),
            t_grid_min: best.0,
            s_grid_min: best.1,
        })
    })
}

pub fn write_tstar_csv<W: Write>(rows: &[TStarRow], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "r",
        "theta",
        "t_star",
        "S_t_star",
        "t_grid_min",
        "S_grid_min",
    ])?;
    for row in rows {
        let check = |column, v: f64| -> Result<String> {
            if v.is_finite() {
                Ok(format_value(v))
            } else {
                Err(CliError::NonFinite {
                    column,
                    r: row.r,
                    theta: row.theta,
                    t: row.t_grid_min,
                })
            }
        };
        let opt = |column, v: Option<f64>| v.map_or(Ok(String::new()), |v| check(column, v));
        w.write_record([
            check("r", row.r)?,
            check("theta", row.theta)?,
            opt("t_star", row.t_star)?,
            opt("S_t_star", row.s_t_star)?,
            check("t_grid_min", row.t_grid_min)?,
            check("S_grid_min", row.s_grid_min)?,
        ])?;
    }
    w.flush()?;
    Ok(())
}
