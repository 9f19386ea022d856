//! Log-domain evaluation of the two series that witness derivative loss,
//! plus direct integration of the modes small enough to integrate.

use std::f64::consts::PI;

use serde::Serialize;

use super::coefficient::{build_coefficient, BlockShape};
use super::regularity::BLOCK_GRID;
use super::CounterexampleBundle;
use crate::energy::{fit_growth_exponent, GrowthExponent, GrowthFit};
use crate::error::{invalid, Result};
use crate::logspace::SignedLog;
use crate::modal::{integrate_with, IntegrationOptions, ModalProblem};

/// Modes up to this `λ_n` are also integrated numerically.
pub const INTEGRABLE_LAMBDA: f64 = 1e4;

#[derive(Clone, Debug, Serialize)]
pub struct PathologyOptions {
    /// `R` of the ultradistribution weight.
    pub big_r: f64,
    /// `S` of the ultradistribution weight.
    pub big_s: f64,
    pub s_gevrey: f64,
    pub r_gevrey: f64,
    pub t_eval: f64,
    pub rel_tol: f64,
}

impl PathologyOptions {
    /// `(s, r) = (S, R) = (1 + (k+α)/2 + 0.1, 1)`, evaluated at `t = s_0`.
    pub fn standard(bundle: &CounterexampleBundle) -> Self {
        let p = &bundle.params;
        let s = 1.0 + (p.k as f64 + p.alpha) / 2.0 + 0.1;
        PathologyOptions {
            big_r: 1.0,
            big_s: s,
            s_gevrey: s,
            r_gevrey: 1.0,
            t_eval: bundle.blocks[0].log_s.exp(),
            rel_tol: 1e-11,
        }
    }
}

/// Direct integration of one mode around its growth window.
#[derive(Clone, Debug, Serialize)]
pub struct ModeIntegration {
    /// `|u_n'(s_n)|` from the integrator and the closed form.
    pub du_numeric: f64,
    pub du_closed: f64,
    pub du_relative_error: f64,
    /// `|u_n(s_n)| / |u_n'(s_n)|`, zero up to integration error.
    pub u_relative: f64,
    /// `E_n(0)` from backward integration, `E = u'² + m_n²λ_n²u²`.
    pub energy_zero: f64,
    pub energy_start: f64,
    /// `ln(λ_n^{2θ} e^{5π}) - ln E_n(0)`.
    pub initial_margin: f64,
    /// `ln(E_n(t_n) e^{π/2 + 4π}) - ln E_n(0)`.
    pub backward_margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModePathology {
    pub n: usize,
    /// `ln` of the initial-side series term.
    pub initial_term: SignedLog,
    /// `ln F_n(s_n) = 2θ ln λ_n + 2(2ελ_n^θ - δλ_n^{2σ}) s_n`.
    pub log_energy_at_s: SignedLog,
    /// `ln F_n(s_n) - 2θ ln λ_n - 2ελ_n^θ s_n`, nonnegative.
    pub closed_form_margin: SignedLog,
    /// `ln` of the divergent-side series term at `t_eval`, or `None` when
    /// `s_n > t_eval`.
    pub divergent_term: Option<SignedLog>,
    /// `"integrated"` or `"analytic-only"`.
    pub verification: &'static str,
    pub integration: Option<ModeIntegration>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathologyReport {
    pub options: PathologyOptions,
    pub gamma1: f64,
    pub modes: Vec<ModePathology>,
    /// Usable modes `n` with `s_n <= t_eval`.
    pub usable: (usize, usize),
    /// First `n` from which each initial term is below half the previous one.
    pub initial_onset: Option<usize>,
    /// First `n` from which divergent terms exceed `n - 2 ln(n+1)`.
    pub divergent_onset: Option<usize>,
    pub growth: GrowthFit,
}

impl PathologyReport {
    /// Both series behave as claimed from some `n₀ <= max_onset`, and every
    /// integrated mode agrees with the closed form to `tol`.
    pub fn passed(&self, max_onset: usize, tol: f64) -> bool {
        let onset_ok = |o: Option<usize>| o.is_some_and(|n| n <= max_onset);
        onset_ok(self.initial_onset)
            && onset_ok(self.divergent_onset)
            && self.modes.iter().all(|m| m.closed_form_margin.sign() >= 0)
            && self.modes.iter().filter_map(|m| m.integration.as_ref()).all(|i| {
                i.du_relative_error <= tol && i.initial_margin >= 0.0 && i.backward_margin >= 0.0
            })
    }
}

fn sl(x: f64) -> SignedLog {
    SignedLog::from_f64(x)
}

/// `Γ₁ = sup |G'|` over all block shapes.
fn gamma1(bundle: &CounterexampleBundle) -> f64 {
    (0..bundle.blocks.len())
        .map(|n| {
            let shape = BlockShape::new(bundle, n, false);
            shape
                .pieces(true)
                .into_iter()
                .flat_map(|(piece, a, b)| {
                    let count = BLOCK_GRID / 4;
                    (0..=count).map(move |i| (piece, (b - a) * i as f64 / count as f64))
                })
                .map(|(piece, local)| shape.jet(piece, local, 1)[1].abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// `2(2ελ^θ - δλ^{2σ}) · π·count/λ^θ` as a signed log.
fn growth_over(bundle: &CounterexampleBundle, n: usize, log_count: f64) -> SignedLog {
    let p = &bundle.params;
    let b = &bundle.blocks[n];
    let rate = 2.0 * bundle.epsilon - p.delta * ((2.0 * p.sigma - bundle.theta) * b.log_lambda).exp();
    SignedLog::from_parts(1, (2.0 * PI).ln() + log_count) * sl(rate)
}

fn integrate_mode(bundle: &CounterexampleBundle, rel_tol: f64) -> Result<ModeIntegration> {
    let p = &bundle.params;
    let b = &bundle.blocks[0];
    let lambda = b.lambda().expect("integrable mode");
    let c = build_coefficient(bundle)?;
    let m = b.log_m.exp();
    let omega = m * lambda;
    let damp = p.delta * lambda.powf(2.0 * p.sigma);
    let t0 = 4.0 * PI / omega;
    let s0 = PI * b.periods.exact.expect("integrable mode") / omega;
    let du0 = omega * ((2.0 * bundle.epsilon * omega - damp) * t0).exp();
    let opts = IntegrationOptions::new(rel_tol, 1e-300);

    let fwd = ModalProblem::new(lambda, p.delta, p.sigma, c.clone(), (0.0, du0), (t0, s0))?;
    let traj = integrate_with(&fwd, &opts)?;
    let last = traj.len() - 1;
    let (ln_du, _) = traj.log_du(last);
    let (ln_u, _) = traj.log_u(last);
    let ln_closed = omega.ln() + (2.0 * bundle.epsilon * omega - damp) * s0;
    let du_relative_error = (ln_du - ln_closed).exp_m1().abs();

    let bwd = ModalProblem::new(lambda, p.delta, p.sigma, c, (0.0, du0), (0.0, t0))?.backward();
    let traj = integrate_with(&bwd, &opts)?;
    let i0 = (0..traj.len()).min_by(|&i, &j| traj.times[i].total_cmp(&traj.times[j])).unwrap();
    let u = traj.u_value(i0);
    let du = traj.du_value(i0);
    let energy_zero = du * du + omega * omega * u * u;
    let energy_start = du0 * du0;
    Ok(ModeIntegration {
        du_numeric: ln_du.exp(),
        du_closed: ln_closed.exp(),
        du_relative_error,
        u_relative: (ln_u - ln_du).exp(),
        energy_zero,
        energy_start,
        initial_margin: 2.0 * bundle.theta * b.log_lambda + 5.0 * PI - energy_zero.ln(),
        backward_margin: energy_start.ln() + 4.5 * PI - energy_zero.ln(),
    })
}

/// First index from which `pred(n)` holds for every later mode.
fn onset(values: &[bool]) -> Option<usize> {
    let mut first = None;
    for (n, ok) in values.iter().enumerate().rev() {
        if *ok {
            first = Some(n);
        } else {
            break;
        }
    }
    first
}

/// Evaluates both series term by term in log form at `t_eval` and fits the
/// bundle growth exponent `ln G_n` against `ln λ_n`.
pub fn pathology_demo(bundle: &CounterexampleBundle, opts: &PathologyOptions) -> Result<PathologyReport> {
    let p = &bundle.params;
    let order = p.k as f64 + p.alpha;
    let threshold = 1.0 + order / 2.0;
    if !(opts.s_gevrey > threshold && opts.big_s > threshold) {
        return Err(invalid("s_gevrey", format!("Gevrey orders must exceed {threshold}")));
    }
    if !(opts.t_eval > 0.0 && opts.r_gevrey > 0.0 && opts.big_r > 0.0) {
        return Err(invalid("t_eval", "t_eval, r and R must be positive"));
    }
    let theta = bundle.theta;
    let eps = bundle.epsilon;
    let g1 = gamma1(bundle);
    let log_t_eval = opts.t_eval.ln();
    let mut modes = Vec::with_capacity(bundle.blocks.len());
    for b in &bundle.blocks {
        let n = b.n;
        let l = b.log_lambda;
        let ln_n1 = ((n + 1) as f64).ln();
        let initial_term = sl(5.0 * PI - 2.0 * ln_n1) - SignedLog::exp(b.theta_n * l).scale(2.0)
            + SignedLog::exp(l / opts.s_gevrey).scale(2.0 * opts.r_gevrey);

        let log_energy_at_s = sl(2.0 * theta * l) + growth_over(bundle, n, b.periods.ln);
        let lower = sl(2.0 * theta * l) + SignedLog::from_parts(1, (2.0 * eps * PI).ln() + b.periods.ln);
        let closed_form_margin = log_energy_at_s - lower;

        let divergent_term = (b.log_s <= log_t_eval).then(|| {
            let t = SignedLog::from_parts(1, log_t_eval);
            let rate = SignedLog::exp(2.0 * p.sigma * l).scale(4.0 * p.delta)
                + SignedLog::exp(2.0 * bundle.log_prev(n)).scale(2.0 * g1);
            b.log_amplitude.scale(2.0) + sl(2.0 * theta * l)
                + SignedLog::from_parts(1, (2.0 * eps * PI).ln() + b.periods.ln)
                - rate * t
                - sl(2.0 * PI * g1 + 2.0 * (1.0 - theta) * l)
                - SignedLog::exp(l / opts.big_s).scale(2.0 * opts.big_r)
        });

        let integrate = n == 0 && b.lambda().is_some_and(|v| v <= INTEGRABLE_LAMBDA);
        let integration = if integrate { Some(integrate_mode(bundle, opts.rel_tol)?) } else { None };
        modes.push(ModePathology {
            n,
            initial_term,
            log_energy_at_s,
            closed_form_margin,
            divergent_term,
            verification: if integration.is_some() { "integrated" } else { "analytic-only" },
            integration,
        });
    }

    let halving: Vec<bool> = (0..modes.len())
        .map(|n| n > 0 && modes[n].initial_term <= modes[n - 1].initial_term - sl(std::f64::consts::LN_2))
        .collect();
    let exceeding: Vec<bool> = modes
        .iter()
        .map(|m| m.divergent_term.is_some_and(|d| d >= sl(m.n as f64 - 2.0 * ((m.n + 1) as f64).ln())))
        .collect();
    let usable_modes: Vec<usize> = modes.iter().filter(|m| m.divergent_term.is_some()).map(|m| m.n).collect();
    if usable_modes.is_empty() {
        return Err(invalid("t_eval", format!("no mode has s_n <= {}", opts.t_eval)));
    }
    let usable = (*usable_modes.first().unwrap(), *usable_modes.last().unwrap());

    let growth = bundle_growth_fit(bundle)?;

    Ok(PathologyReport {
        options: opts.clone(),
        gamma1: g1,
        modes,
        usable,
        initial_onset: onset(&halving),
        divergent_onset: onset(&exceeding),
        growth,
    })
}

/// Fit of `ln G_n` against `ln λ_n`; bundles with fewer than four blocks
/// report the fit as insufficient.
fn bundle_growth_fit(bundle: &CounterexampleBundle) -> Result<GrowthFit> {
    let log_lambdas: Vec<f64> = bundle.blocks.iter().map(|b| b.log_lambda).collect();
    let growth: Vec<SignedLog> = bundle.blocks.iter().map(|b| growth_over(bundle, b.n, b.periods.ln_plus(-4.0))).collect();
    if growth.len() < 4 {
        let positive = growth.iter().filter(|g| g.is_positive()).count();
        return Ok(GrowthFit { log_lambdas, growth, exponent: GrowthExponent::Insufficient { positive } });
    }
    fit_growth_exponent(&log_lambdas, &growth, 0.0)
}

/// The bundle growth exponent `p` in `ln G_n ≈ p ln λ_n + b`.
pub fn bundle_growth_exponent(bundle: &CounterexampleBundle) -> Result<Option<f64>> {
    Ok(bundle_growth_fit(bundle)?.exponent.slope())
}
