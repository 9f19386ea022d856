use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use strongdamp::coefficients::{estimate_glaeser, GlaeserEstimate};
use strongdamp::energy::{choose_constants, decay_horizon, verify_decay_estimate, HyperbolicEnergyParams, Verdict};
use strongdamp::spectral::{norm, phase_space_norm, solve_system, NormRecord, NormSpec, SpectralOperator, SpectralVector};
use strongdamp::{integrate_with, CoefficientSpec, Error, IntegrationOptions, ModalProblem};

use crate::failure::{Failure, Outcome};
use crate::{io, Context};

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum OperatorSpec {
    Explicit { lambdas: Vec<f64> },
    /// `λ_n = first + n·step`.
    Arithmetic { count: usize, #[serde(default = "one")] first: f64, #[serde(default = "one")] step: f64 },
    /// `λ_n = first·ratio^n`.
    Geometric { count: usize, #[serde(default = "one")] first: f64, ratio: f64 },
}

impl OperatorSpec {
    fn lambdas(&self) -> Vec<f64> {
        match self {
            OperatorSpec::Explicit { lambdas } => lambdas.clone(),
            OperatorSpec::Arithmetic { count, first, step } => (0..*count).map(|n| first + step * n as f64).collect(),
            OperatorSpec::Geometric { count, first, ratio } => (0..*count).map(|n| first * ratio.powi(n as i32)).collect(),
        }
    }
}

/// One component sequence of the initial data.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum DataSpec {
    Zero,
    Explicit { values: Vec<f64> },
    /// `amplitude·(1+λ)^{-exponent}`.
    Power { #[serde(default = "one")] amplitude: f64, exponent: f64 },
    /// `amplitude·exp(-radius·λ^{1/order})`.
    Gevrey { #[serde(default = "one")] amplitude: f64, order: f64, radius: f64 },
    /// Uniform on `[-amplitude, amplitude]`, drawn from `--seed`.
    Random { #[serde(default = "one")] amplitude: f64 },
}

impl DataSpec {
    fn components(&self, lambdas: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            DataSpec::Zero => vec![0.0; lambdas.len()],
            DataSpec::Explicit { values } => values.clone(),
            DataSpec::Power { amplitude, exponent } => lambdas.iter().map(|l| amplitude * (1.0 + l).powf(-exponent)).collect(),
            DataSpec::Gevrey { amplitude, order, radius } => {
                lambdas.iter().map(|l| amplitude * (-radius * l.powf(1.0 / order)).exp()).collect()
            }
            DataSpec::Random { amplitude } => lambdas.iter().map(|_| rng.gen_range(-1.0..=1.0) * amplitude).collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSpec {
    u0: DataSpec,
    u1: DataSpec,
}

/// `points + 1` uniform times on `[0, horizon]`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeGrid {
    horizon: f64,
    points: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Tolerances {
    #[serde(default = "rel_tol")]
    rel_tol: f64,
    #[serde(default = "abs_tol")]
    abs_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel_tol: rel_tol(), abs_tol: abs_tol() }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergySpec {
    #[serde(default = "yes")]
    enabled: bool,
    /// Phase `∫λ√c` covered by each per-mode check.
    #[serde(default = "phase_budget")]
    phase_budget: f64,
    #[serde(default = "glaeser_grid")]
    glaeser_grid: usize,
}

impl Default for EnergySpec {
    fn default() -> Self {
        EnergySpec { enabled: true, phase_budget: phase_budget(), glaeser_grid: glaeser_grid() }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    operator: OperatorSpec,
    coefficient: CoefficientSpec,
    delta: f64,
    sigma: f64,
    initial: InitialSpec,
    times: TimeGrid,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default = "default_norms")]
    norms: Vec<NormSpec>,
    #[serde(default)]
    energy: EnergySpec,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn rel_tol() -> f64 {
    1e-10
}

fn abs_tol() -> f64 {
    1e-40
}

fn phase_budget() -> f64 {
    1000.0
}

fn glaeser_grid() -> usize {
    2000
}

fn default_norms() -> Vec<NormSpec> {
    vec![NormSpec::Sobolev { alpha: 0.0 }]
}

#[derive(Serialize)]
struct NormSample {
    t: f64,
    /// `ln(‖u‖²_{D(A^σ)} + ‖u'‖²)`.
    log_phase_space_sq: f64,
    u: Vec<NormRecord>,
    du: Vec<NormRecord>,
}

#[derive(Serialize)]
struct ModeEnergy {
    mode: usize,
    lambda: f64,
    horizon: f64,
    points: usize,
    min_log_margin: f64,
    verdict: Verdict,
    csv: String,
}

#[derive(Serialize)]
struct EnergySummary {
    asserted: bool,
    note: Option<String>,
    constants: Option<HyperbolicEnergyParams>,
    modes: Vec<ModeEnergy>,
}

pub fn run(ctx: &Context) -> Outcome {
    let cfg: SolveConfig = io::load(&ctx.config)?;
    let base = io::base_dir(&ctx.config);
    let coefficient = cfg.coefficient.build(&base).map_err(Failure::config)?;
    let op = SpectralOperator::new(cfg.operator.lambdas()).map_err(Failure::config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let u0 = SpectralVector::from_linear(&cfg.initial.u0.components(op.lambdas(), &mut rng)).map_err(Failure::config)?;
    let u1 = SpectralVector::from_linear(&cfg.initial.u1.components(op.lambdas(), &mut rng)).map_err(Failure::config)?;
    for spec in &cfg.norms {
        spec.validate().map_err(Failure::config)?;
    }
    let TimeGrid { horizon, points } = cfg.times;
    if !(horizon > 0.0 && horizon.is_finite()) || points == 0 {
        return Err(Failure::Config("at `times`: horizon must be positive and points at least 1".into()));
    }
    let times: Vec<f64> = (0..=points).map(|i| horizon * i as f64 / points as f64).collect();
    let opts = IntegrationOptions::new(cfg.tolerances.rel_tol, cfg.tolerances.abs_tol);

    let snaps = solve_system(&op, &coefficient, cfg.delta, cfg.sigma, (&u0, &u1), &times, &opts)?;

    for (n, &lambda) in op.lambdas().iter().enumerate() {
        let mut w = csv::Writer::from_writer(ctx.out.file(&format!("trajectory/mode_{n:04}.csv"))?);
        w.write_record(["t", "lambda", "u", "du", "log_abs_u", "log_abs_du"])?;
        for s in &snaps {
            let (u, du) = (s.u.log_component(n), s.du.log_component(n));
            let lg = |x: strongdamp::SignedLog| (!x.is_zero()).then_some(x.ln_abs());
            w.serialize((s.t, lambda, s.u.component(n), s.du.component(n), lg(u), lg(du)))?;
        }
        w.flush()?;
    }

    let series = snaps
        .iter()
        .map(|s| {
            let records = |v: &SpectralVector| -> Result<Vec<NormRecord>, Error> {
                cfg.norms.iter().map(|spec| Ok(NormRecord::new(spec, &norm(&op, v, spec)?))).collect()
            };
            Ok(NormSample {
                t: s.t,
                log_phase_space_sq: phase_space_norm(&op, s, cfg.sigma)?,
                u: records(&s.u)?,
                du: records(&s.du)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    ctx.out.json("norms.json", &series)?;

    if !cfg.energy.enabled {
        return Ok(());
    }
    let glaeser = if coefficient.regularity().k >= 1 && coefficient.has_derivative() {
        Some(estimate_glaeser(&coefficient, cfg.energy.glaeser_grid)).transpose().map_err(Failure::config)?
    } else {
        None
    };
    let summary = match choose_constants(cfg.delta, cfg.sigma, &coefficient, glaeser.as_ref()) {
        Err(e) => EnergySummary { asserted: false, note: Some(e.to_string()), constants: None, modes: vec![] },
        Ok(params) => {
            let modes = energy_reports(ctx, &cfg, &coefficient, &params, glaeser.as_ref(), &op, &u0, &u1, horizon)?;
            EnergySummary { asserted: true, note: None, constants: Some(params), modes }
        }
    };
    ctx.out.json("energy.json", &summary)?;
    let failed: Vec<usize> = summary.modes.iter().filter(|m| matches!(m.verdict, Verdict::Fail { .. })).map(|m| m.mode).collect();
    if !failed.is_empty() {
        return Err(Failure::Verification(format!("decay bound violated for modes {failed:?}")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn energy_reports(
    ctx: &Context,
    cfg: &SolveConfig,
    coefficient: &strongdamp::Coefficient,
    params: &HyperbolicEnergyParams,
    glaeser: Option<&GlaeserEstimate>,
    op: &SpectralOperator,
    u0: &SpectralVector,
    u1: &SpectralVector,
    horizon: f64,
) -> Result<Vec<ModeEnergy>, Failure> {
    let opts = IntegrationOptions::new(cfg.tolerances.rel_tol, cfg.tolerances.abs_tol);
    let above: Vec<(usize, f64)> = op.lambdas().iter().copied().enumerate().filter(|&(_, l)| l >= params.nu).collect();
    let reports = above
        .par_iter()
        .map(|&(n, lambda)| {
            let wrap = |e: Error| Error::Mode { mode: n, source: Box::new(e) };
            let t_end = decay_horizon(coefficient, lambda, cfg.energy.phase_budget).min(horizon);
            let data = (u0.component(n), u1.component(n));
            let p = ModalProblem::new(lambda, cfg.delta, cfg.sigma, coefficient.clone(), data, (0.0, t_end)).map_err(wrap)?;
            let traj = integrate_with(&p, &opts).map_err(wrap)?;
            let report = verify_decay_estimate(&p, params, &traj, glaeser).map_err(wrap)?;
            Ok((n, t_end, report))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    reports
        .into_iter()
        .map(|(n, t_end, report)| {
            let name = format!("energy/mode_{n:04}.csv");
            report.write_csv(ctx.out.file(&name)?)?;
            Ok(ModeEnergy {
                mode: n,
                lambda: report.lambda,
                horizon: t_end,
                points: report.points,
                min_log_margin: report.min_log_margin,
                verdict: report.verdict,
                csv: name,
            })
        })
        .collect()
}
