//! Dormand-Prince 5(4) with Hairer's continuous extension, specialised to a
//! two-dimensional linear system that may need power-of-two rescaling.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

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

/// Values above this trigger a rescale by a power of two.
pub(crate) const RESCALE_THRESHOLD: f64 = 1e150;

/// One accepted step's interpolant; values are multiplied by `exp(log_scale)`.
#[derive(Clone, Debug)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub log_scale: f64,
    rcont: [[f64; 5]; 2],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Scaled state at `t`.
    pub fn eval(&self, t: f64) -> State {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let f = |r: &[f64; 5]| r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
        [f(&self.rcont[0]), f(&self.rcont[1])]
    }

    /// Time derivative of the interpolant at `t`.
    pub fn eval_derivative(&self, t: f64) -> State {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        // d/dθ of r0 + θ(r1 + θ1(r2 + θ(r3 + θ1 r4)))
        let f = |r: &[f64; 5]| {
            let inner3 = r[3] + th1 * r[4];
            let d_inner3 = -r[4];
            let inner2 = r[2] + th * inner3;
            let d_inner2 = inner3 + th * d_inner3;
            let inner1 = r[1] + th1 * inner2;
            let d_inner1 = -inner2 + th1 * d_inner2;
            (inner1 + th * d_inner1) / self.h
        };
        [f(&self.rcont[0]), f(&self.rcont[1])]
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub rescales: usize,
    /// Largest accepted local error, in units of the mixed tolerance.
    pub max_local_error: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

pub(crate) struct Settings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Output produced by [`run`].
pub(crate) struct RunOutput {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub scales: Vec<f64>,
    pub dense: Vec<DenseStep>,
    pub stats: IntegrationStats,
}

fn err_norm(y0: &State, y1: &State, e: &State, s: &Settings) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = s.abs_tol + s.rel_tol * y0[i].abs().max(y1[i].abs());
        acc += (e[i] / sc).powi(2);
    }
    (acc / 2.0).sqrt()
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `outputs` must be sorted in the direction of integration; `None` records
/// every accepted step. `coef` is only used for diagnostics.
pub(crate) fn run(
    f: impl Fn(f64, &State) -> State,
    coef: impl Fn(f64) -> f64,
    t0: f64,
    t1: f64,
    y0: State,
    outputs: Option<&[f64]>,
    keep_dense: bool,
    s: &Settings,
) -> Result<RunOutput> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut stats = IntegrationStats { rel_tol: s.rel_tol, abs_tol: s.abs_tol, ..Default::default() };
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut scales = Vec::new();
    let mut dense = Vec::new();
    let mut next_out = 0usize;

    let mut t = t0;
    let mut y = y0;
    let mut log_scale = 0.0;
    let emit = |tt: f64, yy: State, sc: f64, times: &mut Vec<f64>, states: &mut Vec<State>, scales: &mut Vec<f64>| {
        times.push(tt);
        states.push(yy);
        scales.push(sc);
    };

    match outputs {
        None => emit(t, y, 0.0, &mut times, &mut states, &mut scales),
        Some(out) => {
            while next_out < out.len() && (out[next_out] - t0) * dir <= 0.0 {
                emit(out[next_out], y, 0.0, &mut times, &mut states, &mut scales);
                next_out += 1;
            }
        }
    }
    if span == 0.0 {
        return Ok(RunOutput { times, states, scales, dense, stats });
    }

    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    // a tiny guess (e.g. from a vanishing component with a minute abs_tol) is
    // left to the controller rather than treated as underflow
    let h_floor = 16.0 * f64::EPSILON * t.abs().max(span);
    let mut h = initial_step(&f, t, &y, &k1, dir, s).max(h_floor).min(s.max_step).min(span);
    let mut last_rejected = false;

    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let last = h >= remaining * (1.0 - 1e-12) || h >= remaining - 1e-15 * span;
        if last {
            h = remaining;
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(span);
        if h < h_min && !last {
            return Err(Error::StepSizeUnderflow { t, coefficient: coef(t), step: h });
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y_new);
        stats.evaluations += 6;
        let e = axpy(&[0.0, 0.0], hs, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
        let err = err_norm(&y, &y_new, &e, s);
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            stats.accepted += 1;
            stats.max_local_error = stats.max_local_error.max(err);
            let mut rcont = [[0.0; 5]; 2];
            for i in 0..2 {
                let ydiff = y_new[i] - y[i];
                let bspl = hs * k1[i] - ydiff;
                rcont[i] = [
                    y[i],
                    ydiff,
                    bspl,
                    ydiff - hs * k7[i] - bspl,
                    hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]),
                ];
            }
            let step = DenseStep { t0: t, h: hs, log_scale, rcont };
            match outputs {
                None => emit(t_new, y_new, log_scale, &mut times, &mut states, &mut scales),
                Some(out) => {
                    while next_out < out.len() && (out[next_out] - t_new) * dir <= 0.0 {
                        let to = out[next_out];
                        let yo = if to == t_new { y_new } else { step.eval(to) };
                        emit(to, yo, log_scale, &mut times, &mut states, &mut scales);
                        next_out += 1;
                    }
                }
            }
            if keep_dense {
                dense.push(step);
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            let m = y[0].abs().max(y[1].abs());
            if m > RESCALE_THRESHOLD || (m > 0.0 && m < 1.0 / RESCALE_THRESHOLD) {
                let e = m.log2().floor() as i32;
                let factor = 2f64.powi(-e);
                for i in 0..2 {
                    y[i] *= factor;
                    k1[i] *= factor;
                }
                log_scale += e as f64 * LN_2;
                stats.rescales += 1;
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, if last_rejected { 1.0 } else { 10.0 });
            h = (h * fac).min(s.max_step);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    Ok(RunOutput { times, states, scales, dense, stats })
}

fn initial_step(f: &impl Fn(f64, &State) -> State, t: f64, y: &State, k1: &State, dir: f64, s: &Settings) -> f64 {
    let norm = |v: &State| {
        let mut acc = 0.0;
        for i in 0..2 {
            let sc = s.abs_tol + s.rel_tol * y[i].abs();
            acc += (v[i] / sc).powi(2);
        }
        (acc / 2.0).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(k1);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(s.max_step);
    let y1 = axpy(y, dir * h0, &[(1.0, k1)]);
    let k2 = f(t + dir * h0, &y1);
    let d2 = norm(&[k2[0] - k1[0], k2[1] - k1[1]]) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
    (100.0 * h0).min(h1)
}
