//! The single-mode equation `u'' + 2δλ^{2σ}u' + λ²c(t)u = 0`.

pub mod closed_form;
mod dopri;

use std::io::Write;

use serde::Serialize;

use crate::coefficients::Coefficient;
use crate::error::{invalid, Result};

pub use closed_form::{block_gamma, counterexample_block_solution, zero_speed_solution, BlockSolution};
pub use dopri::{DenseStep, IntegrationStats};

/// Which end of the span carries the initial data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

/// One mode of the abstract equation.
#[derive(Clone, Debug)]
pub struct ModalProblem {
    pub lambda: f64,
    pub delta: f64,
    pub sigma: f64,
    pub coefficient: Coefficient,
    /// `(u, u')` at the start of the span, or at its end for backward runs.
    pub initial: (f64, f64),
    pub span: (f64, f64),
    pub direction: Direction,
}

impl ModalProblem {
    pub fn new(
        lambda: f64,
        delta: f64,
        sigma: f64,
        coefficient: Coefficient,
        initial: (f64, f64),
        span: (f64, f64),
    ) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", format!("{lambda} must be finite and nonnegative")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(invalid("delta", format!("{delta} must be finite and nonnegative")));
        }
        if !(0.0..=0.5).contains(&sigma) {
            return Err(invalid("sigma", format!("{sigma} is outside [0, 1/2]")));
        }
        if !(initial.0.is_finite() && initial.1.is_finite()) {
            return Err(invalid("initial", "initial data must be finite"));
        }
        let (a, b) = span;
        if !(a >= 0.0 && a < b && b <= coefficient.horizon() * (1.0 + 1e-12)) {
            return Err(invalid(
                "span",
                format!("need 0 <= t_start < t_end <= T = {}, got ({a}, {b})", coefficient.horizon()),
            ));
        }
        Ok(ModalProblem { lambda, delta, sigma, coefficient, initial, span, direction: Direction::Forward })
    }

    /// Same problem with the data prescribed at `span.1`.
    pub fn backward(mut self) -> Self {
        self.direction = Direction::Backward;
        self
    }

    /// `κ = δλ^{2σ}`; the damping term is `2κu'`.
    pub fn damping(&self) -> f64 {
        self.delta * self.lambda.powf(2.0 * self.sigma)
    }

    /// Right-hand side of the first-order system.
    pub fn rhs(&self, t: f64, u: f64, du: f64) -> (f64, f64) {
        let k = self.damping();
        let l2 = self.lambda * self.lambda;
        (du, -2.0 * k * du - l2 * self.coefficient.value(t) * u)
    }

    /// `(2π / (λ√c* + 1)) / 8`, with `c*` the largest sampled `c` on the span.
    pub fn max_step(&self) -> f64 {
        let (a, b) = self.span;
        let n = 1024;
        let c_max = (0..=n).map(|i| self.coefficient.value(a + (b - a) * i as f64 / n as f64)).fold(0.0, f64::max);
        2.0 * std::f64::consts::PI / (self.lambda * c_max.sqrt() + 1.0) / 8.0
    }
}

/// Requested output times.
#[derive(Clone, Debug, Default)]
pub enum OutputGrid {
    /// Every accepted step.
    #[default]
    Steps,
    /// Caller-supplied increasing times inside the span.
    Times(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct IntegrationOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Further cap on the step, on top of the oscillation cap.
    pub max_step: Option<f64>,
    pub output: OutputGrid,
    pub keep_dense: bool,
}

impl IntegrationOptions {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        IntegrationOptions { rel_tol, abs_tol, max_step: None, output: OutputGrid::Steps, keep_dense: false }
    }

    pub fn times(mut self, times: Vec<f64>) -> Self {
        self.output = OutputGrid::Times(times);
        self
    }

    pub fn dense(mut self) -> Self {
        self.keep_dense = true;
        self
    }
}

/// `u` and `u'` on an increasing time grid. Stored values are multiplied by
/// `exp(log_scale[i])` to give the true solution.
#[derive(Clone, Debug)]
pub struct ModalTrajectory {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub log_scale: Vec<f64>,
    pub stats: IntegrationStats,
    /// Dense interpolants in order of increasing time, when requested.
    pub dense: Option<Vec<DenseStep>>,
}

impl ModalTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// True `u(t_i)`; may overflow to infinity.
    pub fn u_value(&self, i: usize) -> f64 {
        self.u[i] * self.log_scale[i].exp()
    }

    pub fn du_value(&self, i: usize) -> f64 {
        self.du[i] * self.log_scale[i].exp()
    }

    /// `(ln|u|, sign u)`.
    pub fn log_u(&self, i: usize) -> (f64, i8) {
        log_pair(self.u[i], self.log_scale[i])
    }

    pub fn log_du(&self, i: usize) -> (f64, i8) {
        log_pair(self.du[i], self.log_scale[i])
    }

    pub fn rescaled(&self) -> bool {
        self.log_scale.iter().any(|&s| s != 0.0)
    }

    /// Writes `t,u,du,log_abs_u,sign_u`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "u", "du", "log_abs_u", "sign_u"])?;
        for i in 0..self.len() {
            let (lu, su) = self.log_u(i);
            wr.serialize((self.times[i], self.u_value(i), self.du_value(i), lu, su))?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn log_pair(x: f64, scale: f64) -> (f64, i8) {
    if x == 0.0 {
        (f64::NEG_INFINITY, 0)
    } else {
        (x.abs().ln() + scale, if x > 0.0 { 1 } else { -1 })
    }
}

/// Integrates with output at every accepted step.
pub fn integrate(problem: &ModalProblem, rel_tol: f64, abs_tol: f64) -> Result<ModalTrajectory> {
    integrate_with(problem, &IntegrationOptions::new(rel_tol, abs_tol))
}

pub fn integrate_with(problem: &ModalProblem, opts: &IntegrationOptions) -> Result<ModalTrajectory> {
    for (name, tol) in [("rel_tol", opts.rel_tol), ("abs_tol", opts.abs_tol)] {
        if !(tol > 0.0 && tol <= 1e-4) {
            return Err(invalid(name, format!("{tol} is outside (0, 1e-4]")));
        }
    }
    let (a, b) = problem.span;
    let (t0, t1) = match problem.direction {
        Direction::Forward => (a, b),
        Direction::Backward => (b, a),
    };
    let outputs: Option<Vec<f64>> = match &opts.output {
        OutputGrid::Steps => None,
        OutputGrid::Times(ts) => {
            let lo = a - 1e-12 * (b - a);
            let hi = b + 1e-12 * (b - a);
            if ts.iter().any(|t| !(*t >= lo && *t <= hi)) || ts.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(invalid("times", "output times must be increasing and inside the span"));
            }
            let mut ts = ts.clone();
            if problem.direction == Direction::Backward {
                ts.reverse();
            }
            Some(ts)
        }
    };

    if problem.lambda == 0.0 || problem.coefficient.family() == "zero" {
        return closed_zero_speed(problem, outputs.as_deref(), t0, t1, opts);
    }

    let kappa2 = 2.0 * problem.damping();
    let l2 = problem.lambda * problem.lambda;
    let coef = &problem.coefficient;
    let rhs = |t: f64, y: &[f64; 2]| [y[1], -kappa2 * y[1] - l2 * coef.value(t) * y[0]];
    let max_step = opts.max_step.map_or(problem.max_step(), |m| m.min(problem.max_step()));
    let settings = dopri::Settings { rel_tol: opts.rel_tol, abs_tol: opts.abs_tol, max_step };
    let y0 = [problem.initial.0, problem.initial.1];
    let mut out = dopri::run(rhs, |t| coef.value(t), t0, t1, y0, outputs.as_deref(), opts.keep_dense, &settings)?;
    if problem.direction == Direction::Backward {
        out.times.reverse();
        out.states.reverse();
        out.scales.reverse();
        out.dense.reverse();
    }
    Ok(ModalTrajectory {
        u: out.states.iter().map(|y| y[0]).collect(),
        du: out.states.iter().map(|y| y[1]).collect(),
        times: out.times,
        log_scale: out.scales,
        stats: out.stats,
        dense: opts.keep_dense.then_some(out.dense),
    })
}

/// `λ = 0` or `c ≡ 0`: the exact damped drift.
fn closed_zero_speed(
    problem: &ModalProblem,
    outputs: Option<&[f64]>,
    t0: f64,
    t1: f64,
    opts: &IntegrationOptions,
) -> Result<ModalTrajectory> {
    let times: Vec<f64> = match outputs {
        Some(ts) => ts.to_vec(),
        None => {
            let n = 257;
            (0..n).map(|i| if i + 1 == n { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 }).collect()
        }
    };
    let (u0, u1) = problem.initial;
    let mut pairs: Vec<(f64, f64, f64)> = times
        .iter()
        .map(|&t| {
            let (u, du) = zero_speed_solution(problem.delta, problem.sigma, problem.lambda, u0, u1, t - t0);
            (t, u, du)
        })
        .collect();
    if problem.direction == Direction::Backward {
        pairs.reverse();
    }
    let stats = IntegrationStats { rel_tol: opts.rel_tol, abs_tol: opts.abs_tol, ..Default::default() };
    Ok(ModalTrajectory {
        times: pairs.iter().map(|p| p.0).collect(),
        u: pairs.iter().map(|p| p.1).collect(),
        du: pairs.iter().map(|p| p.2).collect(),
        log_scale: vec![0.0; pairs.len()],
        stats,
        dense: None,
    })
}

/// Largest relative residual of the ODE evaluated on the dense interpolants at
/// step midpoints, `|v̇ + 2κv + λ²cu| / (|v̇| + |2κv| + |λ²cu|)` together with
/// the kinematic mismatch `|u̇ - v| / (|u̇| + |v|)`.
pub fn dense_residual(problem: &ModalProblem, trajectory: &ModalTrajectory) -> Option<f64> {
    let steps = trajectory.dense.as_ref()?;
    let k2 = 2.0 * problem.damping();
    let l2 = problem.lambda * problem.lambda;
    let mut worst: f64 = 0.0;
    for st in steps {
        let tm = st.t0 + 0.5 * st.h;
        let y = st.eval(tm);
        let dy = st.eval_derivative(tm);
        let c = problem.coefficient.value(tm);
        let terms = [dy[1].abs(), (k2 * y[1]).abs(), (l2 * c * y[0]).abs()];
        let denom: f64 = terms.iter().sum();
        if denom > 0.0 {
            worst = worst.max((dy[1] + k2 * y[1] + l2 * c * y[0]).abs() / denom);
        }
        let kin = dy[0].abs() + y[1].abs();
        if kin > 0.0 {
            worst = worst.max((dy[0] - y[1]).abs() / kin);
        }
    }
    Some(worst)
}
