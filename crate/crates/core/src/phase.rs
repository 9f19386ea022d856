//! Classification of the `(k+α, σ)` plane, analytic and measured.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{theta_exponent, Regularity};
use crate::counterexample::MatchedBlock;
use crate::energy::{measure_growth_exponent, GrowthExponent, GrowthOptions, NOISE_FLOOR};
use crate::error::{invalid, Result};
use crate::modal::ModalProblem;

/// `|σ - 1/(2+k+α)|` below this counts as the threshold itself.
pub const BORDERLINE_TOLERANCE: f64 = 1e-12;

/// Fitted exponents at or below this are read as bounded growth.
pub const BOUNDED_EXPONENT: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticClass {
    SobolevWellposed,
    GevreyWellposed,
    Pathological,
    Borderline,
}

impl AnalyticClass {
    pub fn label(self) -> &'static str {
        match self {
            AnalyticClass::SobolevWellposed => "sobolev-wellposed",
            AnalyticClass::GevreyWellposed => "gevrey-wellposed",
            AnalyticClass::Pathological => "pathological",
            AnalyticClass::Borderline => "borderline",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmpiricalClass {
    Bounded,
    Intermediate,
    Growing,
}

impl EmpiricalClass {
    pub fn label(self) -> &'static str {
        match self {
            EmpiricalClass::Bounded => "bounded",
            EmpiricalClass::Intermediate => "intermediate",
            EmpiricalClass::Growing => "growing",
        }
    }
}

/// Splits `k+α > 0` into `k = ⌈k+α⌉ - 1` and `α ∈ (0, 1]`.
pub fn split_order(k_plus_alpha: f64) -> Result<(u32, f64)> {
    if !(k_plus_alpha > 0.0 && k_plus_alpha.is_finite()) {
        return Err(invalid("k_plus_alpha", format!("{k_plus_alpha} must be positive")));
    }
    let k = k_plus_alpha.ceil() - 1.0;
    Ok((k as u32, k_plus_alpha - k))
}

/// Class of `(k+α, σ)` from the threshold `σ ⋛ 1/(2+k+α)`. Below the
/// threshold, data of Gevrey order `s < 1 + (k+α)/2` are still well posed.
pub fn classify(k_plus_alpha: f64, sigma: f64, data_order: Option<f64>) -> Result<AnalyticClass> {
    split_order(k_plus_alpha)?;
    if !(0.0..=0.5).contains(&sigma) {
        return Err(invalid("sigma", format!("{sigma} is outside [0, 1/2]")));
    }
    let threshold = 1.0 / (2.0 + k_plus_alpha);
    Ok(if (sigma - threshold).abs() <= BORDERLINE_TOLERANCE {
        AnalyticClass::Borderline
    } else if sigma > threshold {
        AnalyticClass::SobolevWellposed
    } else if data_order.is_some_and(|s| s < 1.0 + k_plus_alpha / 2.0) {
        AnalyticClass::GevreyWellposed
    } else {
        AnalyticClass::Pathological
    })
}

/// Reads a growth exponent against `θ/2`.
pub fn classify_growth(exponent: &GrowthExponent, theta: f64) -> EmpiricalClass {
    match exponent.slope() {
        None => EmpiricalClass::Bounded,
        Some(p) if p <= BOUNDED_EXPONENT => EmpiricalClass::Bounded,
        Some(p) if p >= theta / 2.0 => EmpiricalClass::Growing,
        Some(_) => EmpiricalClass::Intermediate,
    }
}

fn default_lambdas() -> Vec<f64> {
    vec![1e2, 1e3, 1e4, 1e5]
}

fn default_delta() -> f64 {
    1.0 / 16.0
}

fn default_horizon() -> f64 {
    2.0 * PI
}

fn default_rel_tol() -> f64 {
    1e-9
}

/// Sweep over a rectangular grid of `(k+α, σ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub k_plus_alpha: Vec<f64>,
    pub sigma: Vec<f64>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    /// Damping of the probe; small enough that growth is visible at desk scale.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Gevrey order of the data, if the analytic label should account for it.
    #[serde(default)]
    pub data_order: Option<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

impl PhaseConfig {
    /// `n×n` grid over `k+α ∈ [0.5, 3]`, `σ ∈ [0.05, 0.5]`.
    pub fn standard(n: usize) -> Self {
        let lin = |a: f64, b: f64| (0..n).map(|i| a + (b - a) * i as f64 / (n - 1).max(1) as f64).collect();
        PhaseConfig {
            k_plus_alpha: lin(0.5, 3.0),
            sigma: lin(0.05, 0.5),
            lambdas: default_lambdas(),
            delta: default_delta(),
            horizon: default_horizon(),
            data_order: None,
            rel_tol: default_rel_tol(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_plus_alpha.is_empty() || self.sigma.is_empty() {
            return Err(invalid("k_plus_alpha", "grid must be nonempty"));
        }
        for &ka in &self.k_plus_alpha {
            split_order(ka)?;
        }
        if self.sigma.iter().any(|s| !(0.0..=0.5).contains(s)) {
            return Err(invalid("sigma", "values must lie in [0, 1/2]"));
        }
        if self.lambdas.len() < 4 || self.lambdas.windows(2).any(|w| !(w[1] > w[0])) || self.lambdas[0] <= 0.0 {
            return Err(invalid("lambdas", "need at least 4 increasing positive frequencies"));
        }
        if !(self.delta > 0.0 && self.horizon > 0.0) {
            return Err(invalid("delta", "delta and horizon must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseCell {
    pub k_plus_alpha: f64,
    pub sigma: f64,
    pub k: u32,
    pub alpha: f64,
    pub theta: f64,
    pub analytic: AnalyticClass,
    pub empirical: EmpiricalClass,
    pub exponent: GrowthExponent,
}

impl PhaseCell {
    pub fn fitted_exponent(&self) -> Option<f64> {
        self.exponent.slope()
    }
}

/// Measures one cell with the matched oscillating block at each `λ`.
pub fn probe_cell(cfg: &PhaseConfig, k_plus_alpha: f64, sigma: f64) -> Result<PhaseCell> {
    let (k, alpha) = split_order(k_plus_alpha)?;
    let theta = theta_exponent(k, alpha)?;
    let analytic = classify(k_plus_alpha, sigma, cfg.data_order)?;
    let reg = Regularity::new(k, alpha)?;
    let (delta, horizon) = (cfg.delta, cfg.horizon);
    let family = |lambda: f64| {
        let c = MatchedBlock::new(k, alpha, lambda, delta, sigma)?.coefficient(horizon, reg)?;
        ModalProblem::new(lambda, delta, sigma, c, (1.0, 0.0), (0.0, horizon))
    };
    let opts = GrowthOptions { rel_tol: cfg.rel_tol, abs_tol: 1e-12, noise_floor: NOISE_FLOOR };
    let fit = measure_growth_exponent(family, &cfg.lambdas, &opts)?;
    Ok(PhaseCell {
        k_plus_alpha,
        sigma,
        k,
        alpha,
        theta,
        analytic,
        empirical: classify_growth(&fit.exponent, theta),
        exponent: fit.exponent,
    })
}

/// All cells, `k+α` major, in input order.
pub fn phase_diagram(cfg: &PhaseConfig) -> Result<Vec<PhaseCell>> {
    cfg.validate()?;
    let cells: Vec<(f64, f64)> =
        cfg.k_plus_alpha.iter().flat_map(|&ka| cfg.sigma.iter().map(move |&s| (ka, s))).collect();
    cells.par_iter().map(|&(ka, s)| probe_cell(cfg, ka, s)).collect()
}

/// `k_plus_alpha,sigma,analytic,empirical,fitted_exponent`; the exponent is
/// empty when no fit was possible.
pub fn write_phase_csv<W: Write>(cells: &[PhaseCell], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["k_plus_alpha", "sigma", "analytic", "empirical", "fitted_exponent"])?;
    for c in cells {
        wr.serialize((c.k_plus_alpha, c.sigma, c.analytic.label(), c.empirical.label(), c.fitted_exponent()))?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(classify(2.0, 0.4, None).unwrap(), AnalyticClass::SobolevWellposed);
        assert_eq!(classify(1.0, 0.2, None).unwrap(), AnalyticClass::Pathological);
        assert_eq!(classify(2.0, 0.25, None).unwrap(), AnalyticClass::Borderline);
        assert_eq!(classify(1.0, 0.2, Some(1.4)).unwrap(), AnalyticClass::GevreyWellposed);
        assert_eq!(classify(1.0, 0.2, Some(1.6)).unwrap(), AnalyticClass::Pathological);
        assert!(classify(1.0, 0.6, None).is_err());
    }

    #[test]
    fn order_split() {
        assert_eq!(split_order(3.0).unwrap(), (2, 1.0));
        assert_eq!(split_order(0.5).unwrap(), (0, 0.5));
        assert_eq!(split_order(1.75).unwrap(), (1, 0.75));
        assert!(split_order(0.0).is_err());
    }

    #[test]
    fn growth_reading() {
        assert_eq!(classify_growth(&GrowthExponent::Dissipative, 0.5), EmpiricalClass::Bounded);
        let fit = |p| GrowthExponent::Fitted { slope: p, intercept: 0.0, residuals: vec![], r_squared: 1.0, used: 4 };
        assert_eq!(classify_growth(&fit(0.04), 0.5), EmpiricalClass::Bounded);
        assert_eq!(classify_growth(&fit(0.1), 0.5), EmpiricalClass::Intermediate);
        assert_eq!(classify_growth(&fit(0.3), 0.5), EmpiricalClass::Growing);
    }

    #[test]
    fn small_probe_separates_regimes() {
        let cfg = PhaseConfig { lambdas: vec![1e2, 3e2, 1e3, 3e3], ..PhaseConfig::standard(2) };
        let wellposed = probe_cell(&cfg, 1.0, 0.5).unwrap();
        assert_eq!(wellposed.empirical, EmpiricalClass::Bounded, "{:?}", wellposed.exponent);
        let bad = probe_cell(&cfg, 1.0, 0.05).unwrap();
        assert_eq!(bad.empirical, EmpiricalClass::Growing, "{:?}", bad.exponent);
    }
}
