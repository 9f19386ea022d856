use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::logspace::SignedLog;
use crate::modal::{integrate_with, IntegrationOptions, ModalProblem, ModalTrajectory};

/// Growth at or below this level counts as no growth.
pub const NOISE_FLOOR: f64 = 1e-6;

const REFINE_POINTS: usize = 32;

#[derive(Clone, Debug)]
pub struct GrowthOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub noise_floor: f64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { rel_tol: 1e-9, abs_tol: 1e-12, noise_floor: NOISE_FLOOR }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthExponent {
    /// Every `G(λ)` is at or below the noise floor.
    Dissipative,
    /// Fewer than two positive samples.
    Insufficient { positive: usize },
    /// `ln G ≈ p ln λ + b` over the positive samples.
    Fitted { slope: f64, intercept: f64, residuals: Vec<f64>, r_squared: f64, used: usize },
}

impl GrowthExponent {
    pub fn slope(&self) -> Option<f64> {
        match self {
            GrowthExponent::Fitted { slope, .. } => Some(*slope),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            GrowthExponent::Dissipative => "none (dissipative)".into(),
            GrowthExponent::Insufficient { positive } => format!("insufficient ({positive} positive)"),
            GrowthExponent::Fitted { slope, .. } => format!("{slope:.6}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub log_lambdas: Vec<f64>,
    pub growth: Vec<SignedLog>,
    pub exponent: GrowthExponent,
}

fn ln_energy(lambda: f64, u: f64, du: f64, log_scale: f64) -> f64 {
    let e = du * du + lambda * lambda * u * u;
    if e == 0.0 {
        f64::NEG_INFINITY
    } else {
        e.ln() + 2.0 * log_scale
    }
}

/// `sup_t ln(𝓔(t)/𝓔(0))` over the trajectory grid, refined on the dense
/// interpolants around the largest grid value.
pub fn growth_sup(problem: &ModalProblem, trajectory: &ModalTrajectory) -> Result<f64> {
    let lambda = problem.lambda;
    if trajectory.is_empty() {
        return Err(invalid("trajectory", "empty trajectory"));
    }
    let logs: Vec<f64> = (0..trajectory.len())
        .map(|i| ln_energy(lambda, trajectory.u[i], trajectory.du[i], trajectory.log_scale[i]))
        .collect();
    let e0 = logs[0];
    if !e0.is_finite() {
        return Err(invalid("initial", "zero initial energy"));
    }
    let (imax, mut best) = logs.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, v)| if v > a.1 { (i, v) } else { a });
    if let Some(steps) = trajectory.dense.as_ref() {
        let lo = trajectory.times[imax.saturating_sub(1)];
        let hi = trajectory.times[(imax + 1).min(trajectory.len() - 1)];
        for st in steps {
            let (a, b) = if st.h >= 0.0 { (st.t0, st.t1()) } else { (st.t1(), st.t0) };
            if b < lo || a > hi {
                continue;
            }
            for j in 1..REFINE_POINTS {
                let t = a + (b - a) * j as f64 / REFINE_POINTS as f64;
                let y = st.eval(t);
                best = best.max(ln_energy(lambda, y[0], y[1], st.log_scale));
            }
        }
    }
    Ok(best - e0)
}

/// Least-squares fit of `ln G` against `ln λ` over samples with `G > noise_floor`.
pub fn fit_growth_exponent(log_lambdas: &[f64], growth: &[SignedLog], noise_floor: f64) -> Result<GrowthFit> {
    if log_lambdas.len() != growth.len() {
        return Err(crate::Error::DimensionMismatch { expected: log_lambdas.len(), found: growth.len() });
    }
    if log_lambdas.len() < 4 || log_lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("lambdas", "need at least 4 increasing frequencies"));
    }
    let floor = SignedLog::from_f64(noise_floor);
    let pts: Vec<(f64, f64)> = log_lambdas
        .iter()
        .zip(growth)
        .filter(|(_, g)| g.is_positive() && **g > floor)
        .map(|(x, g)| (*x, g.ln_abs()))
        .collect();
    let exponent = match pts.len() {
        0 => GrowthExponent::Dissipative,
        1 => GrowthExponent::Insufficient { positive: 1 },
        n => {
            let nf = n as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
            let slope = sxy / sxx;
            let intercept = my - slope * mx;
            let residuals: Vec<f64> = pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
            let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
            let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
            GrowthExponent::Fitted { slope, intercept, residuals, r_squared, used: n }
        }
    };
    Ok(GrowthFit { log_lambdas: log_lambdas.to_vec(), growth: growth.to_vec(), exponent })
}

/// Integrates `family(λ)` for each `λ` in parallel and fits the growth exponent.
pub fn measure_growth_exponent<F>(family: F, lambdas: &[f64], opts: &GrowthOptions) -> Result<GrowthFit>
where
    F: Fn(f64) -> Result<ModalProblem> + Sync,
{
    if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(invalid("lambdas", "frequencies must be positive"));
    }
    let iopts = IntegrationOptions::new(opts.rel_tol, opts.abs_tol).dense();
    let growth: Vec<SignedLog> = lambdas
        .par_iter()
        .map(|&l| {
            let p = family(l)?;
            let traj = integrate_with(&p, &iopts)?;
            let g = growth_sup(&p, &traj)?;
            Ok(if g.abs() <= opts.noise_floor { SignedLog::ZERO } else { SignedLog::from_f64(g) })
        })
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    fit_growth_exponent(&logs, &growth, opts.noise_floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{Coefficient, Regularity};

    fn constant_family(delta: f64, sigma: f64) -> impl Fn(f64) -> Result<ModalProblem> + Sync {
        move |l| {
            let c = Coefficient::constant(1.0, 5.0, Regularity::new(0, 1.0)?)?;
            ModalProblem::new(l, delta, sigma, c, (1.0, 0.0), (0.0, 5.0))
        }
    }

    #[test]
    fn damped_constant_speed_is_dissipative() {
        let fit = measure_growth_exponent(constant_family(1.0, 0.5), &[2.0, 4.0, 8.0, 16.0], &GrowthOptions::default()).unwrap();
        assert_eq!(fit.exponent, GrowthExponent::Dissipative);
        assert_eq!(fit.exponent.label(), "none (dissipative)");
    }

    #[test]
    fn undamped_constant_speed_is_conservative() {
        let fit = measure_growth_exponent(constant_family(0.0, 0.5), &[2.0, 4.0, 8.0, 16.0], &GrowthOptions::default()).unwrap();
        assert!(fit.growth.iter().all(|g| g.is_zero()));
    }

    #[test]
    fn fit_recovers_power() {
        let ls: Vec<f64> = [1.0f64, 2.0, 3.0, 4.0, 5.0].to_vec();
        let g: Vec<SignedLog> = ls.iter().map(|x| SignedLog::from_parts(1, 0.7 * x + 0.1)).collect();
        let fit = fit_growth_exponent(&ls, &g, NOISE_FLOOR).unwrap();
        match fit.exponent {
            GrowthExponent::Fitted { slope, intercept, r_squared, .. } => {
                assert!((slope - 0.7).abs() < 1e-12 && (intercept - 0.1).abs() < 1e-12 && r_squared > 0.999999);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn needs_four_increasing() {
        let g = vec![SignedLog::ONE; 3];
        assert!(fit_growth_exponent(&[1.0, 2.0, 3.0], &g, NOISE_FLOOR).is_err());
        let g = vec![SignedLog::ONE; 4];
        assert!(fit_growth_exponent(&[1.0, 3.0, 2.0, 4.0], &g, NOISE_FLOOR).is_err());
    }
}
