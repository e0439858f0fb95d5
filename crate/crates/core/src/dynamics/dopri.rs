//! Dormand-Prince 5(4) with the Hairer continuous extension.
//!
//! Steps adaptively across the span and interpolates the requested output
//! times from the dense polynomial of the step that brackets them.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
const MAX_STEPS: usize = 5_000_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += c * k[i];
            }
        }
    }
    out
}

fn error_norm<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    s: &StepSettings,
) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let scale = s.abs_tol + s.rel_tol * y0[i].abs().max(y1[i].abs());
        sum += (err[i] / scale).powi(2);
    }
    (sum / N as f64).sqrt()
}

/// Integrates `y' = rhs(t, y)` from `times[0]` and returns the state at every
/// entry of `times`, which must be strictly increasing.
pub(crate) fn solve_dense<const N: usize, F>(
    mut rhs: F,
    y0: [f64; N],
    times: &[f64],
    settings: &StepSettings,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut out = Vec::with_capacity(times.len());
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    out.push(y0);
    if times.len() == 1 {
        return Ok(out);
    }
    let t_end = *times.last().unwrap();

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y)?;
    let mut h = initial_step(&y, &k1, t_end - t0, settings);
    let mut next_out = 1;
    let mut steps = 0;

    while next_out < times.len() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepControl {
                t,
                reason: format!("more than {MAX_STEPS} steps"),
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, &[(h * A21, &k1)]))?;
        let k3 = rhs(t + C3 * h, &axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]))?;
        let k4 = rhs(
            t + C4 * h,
            &axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]),
        )?;
        let k5 = rhs(
            t + C5 * h,
            &axpy(
                &y,
                &[
                    (h * A51, &k1),
                    (h * A52, &k2),
                    (h * A53, &k3),
                    (h * A54, &k4),
                ],
            ),
        )?;
        let t_new = if last { t_end } else { t + h };
        let k6 = rhs(
            t_new,
            &axpy(
                &y,
                &[
                    (h * A61, &k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ],
            ),
        )?;
        let y_new = axpy(
            &y,
            &[
                (h * A71, &k1),
                (h * A73, &k3),
                (h * A74, &k4),
                (h * A75, &k5),
                (h * A76, &k6),
            ],
        );
        let k7 = rhs(t_new, &y_new)?;

        let zero = [0.0; N];
        let err = axpy(
            &zero,
            &[
                (h * E1, &k1),
                (h * E3, &k3),
                (h * E4, &k4),
                (h * E5, &k5),
                (h * E6, &k6),
                (h * E7, &k7),
            ],
        );
        let err_norm = error_norm(&err, &y, &y_new, settings);
        if !err_norm.is_finite() {
            return Err(Error::StepControl {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        if err_norm <= 1.0 {
            // dense output coefficients for this step
            let mut r2 = [0.0; N];
            let mut r3 = [0.0; N];
            let mut r4 = [0.0; N];
            let mut r5 = [0.0; N];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                r2[i] = ydiff;
                r3[i] = bspl;
                r4[i] = ydiff - h * k7[i] - bspl;
                r5[i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            while next_out < times.len() && times[next_out] <= t_new {
                let target = times[next_out];
                let state = if target == t_new {
                    y_new
                } else {
                    let s = (target - t) / h;
                    let s1 = 1.0 - s;
                    let mut v = [0.0; N];
                    for i in 0..N {
                        v[i] = y[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
                    }
                    v
                };
                out.push(state);
                next_out += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
        }

        let fac = if err_norm == 0.0 {
            FAC_MAX
        } else {
            (SAFETY * err_norm.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
        };
        let fac = if err_norm > 1.0 { fac.min(1.0) } else { fac };
        h = (h * fac).min(settings.max_step);
        if h <= f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepControl {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }
    }
    Ok(out)
}

fn initial_step<const N: usize>(y: &[f64; N], f: &[f64; N], span: f64, s: &StepSettings) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let scale = s.abs_tol + s.rel_tol * y[i].abs();
        d0 += (y[i] / scale).powi(2);
        d1 += (f[i] / scale).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span).min(s.max_step).max(1e-12 * span)
}
