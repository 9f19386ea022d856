//! Energy functionals along modal trajectories and the decay estimate above
//! the frequency threshold `ν`.

mod growth;

use std::io::Write;

use serde::Serialize;

use crate::coefficients::{approximate_coefficient, theta_exponent, ApproximatedCoefficient, Coefficient, GlaeserEstimate};
use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::modal::{Direction, ModalProblem, ModalTrajectory};

pub use growth::{
    fit_growth_exponent, growth_sup, measure_growth_exponent, GrowthExponent, GrowthFit, GrowthOptions, NOISE_FLOOR,
};

/// Multiplicative slack on the decay bound.
pub const BOUND_SLACK: f64 = 1e-6;

/// Constraint that fixes `ν` beyond the base condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum FrequencyCondition {
    /// `ν^{2σ-θ} >= (2/δ)(25H)^{1/α}`
    Holder { holder: f64 },
    /// `ν^{2σ-θ} >= 8K/δ`
    GlaeserConstant { k_const: f64 },
    /// `ν^{2σ-θ} >= √2/δ`
    GlaeserWeight,
}

/// The constants `r` and `ν` of the decay estimate.
#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicEnergyParams {
    pub r: f64,
    pub nu: f64,
    pub delta: f64,
    pub sigma: f64,
    pub mu: f64,
    pub k: u32,
    pub alpha: f64,
    pub theta: f64,
    pub condition: FrequencyCondition,
    /// Which of `2rμ <= δ`, `16r(δ²+μ) <= δ`, `64r²μ <= 1` is tight.
    pub r_active: &'static str,
    /// Which lower bound on `ν` is attained.
    pub nu_active: &'static str,
}

/// Largest `r` and smallest `ν` allowed for `σ ∈ (1/(2+k+α), 1/2]`.
pub fn choose_constants(
    delta: f64,
    sigma: f64,
    coefficient: &Coefficient,
    glaeser: Option<&GlaeserEstimate>,
) -> Result<HyperbolicEnergyParams> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("{delta} must be positive")));
    }
    let reg = coefficient.regularity();
    let theta = theta_exponent(reg.k, reg.alpha)?;
    let lower = theta / 2.0;
    if !(sigma > lower && sigma <= 0.5) {
        return Err(Error::OutsideDecayRegime { sigma, lower });
    }
    let mu = coefficient.bound();
    let (r, r_active) = optimal_r(delta, mu);
    let condition = match reg.k {
        0 => FrequencyCondition::Holder { holder: coefficient.holder_constant().ok_or(Error::MissingHolderConstant)? },
        1 => FrequencyCondition::GlaeserConstant {
            k_const: glaeser
                .and_then(GlaeserEstimate::k_constant)
                .ok_or_else(|| invalid("glaeser", "k = 1 needs the Glaeser constant K"))?,
        },
        _ => FrequencyCondition::GlaeserWeight,
    };
    let extra = match condition {
        FrequencyCondition::Holder { holder } => 2.0 / delta * (25.0 * holder).powf(1.0 / reg.alpha),
        FrequencyCondition::GlaeserConstant { k_const } => 8.0 * k_const / delta,
        FrequencyCondition::GlaeserWeight => std::f64::consts::SQRT_2 / delta,
    };
    let p = 1.0 / (2.0 * sigma - theta);
    let candidates = [(1.0, "nu >= 1"), ((4.0 / delta).powf(p), "delta nu^(2 sigma - theta) >= 4"), (extra.powf(p), "k-condition")];
    let (nu, nu_active) = candidates.iter().fold((0.0, ""), |acc, &(v, name)| if v > acc.0 { (v, name) } else { acc });
    Ok(HyperbolicEnergyParams {
        r,
        nu,
        delta,
        sigma,
        mu,
        k: reg.k,
        alpha: reg.alpha,
        theta,
        condition,
        r_active,
        nu_active,
    })
}

/// `min(δ/(2μ), δ/(16(δ²+μ)), 1/(8√μ))` with the active constraint.
pub fn optimal_r(delta: f64, mu: f64) -> (f64, &'static str) {
    let c = [
        (delta / (2.0 * mu), "2 r mu <= delta"),
        (delta / (16.0 * (delta * delta + mu)), "16 r (delta^2 + mu) <= delta"),
        (1.0 / (8.0 * mu.sqrt()), "64 r^2 mu <= 1"),
    ];
    c.iter().fold((f64::INFINITY, ""), |acc, &(v, name)| if v < acc.0 { (v, name) } else { acc })
}

/// `ν` from `δν^{2σ-θ} >= 4` and `ν >= 1` only.
pub fn base_nu(delta: f64, sigma: f64, theta: f64) -> f64 {
    (4.0 / delta).powf(1.0 / (2.0 * sigma - theta)).max(1.0)
}

/// Coefficients of `Q₁ = X u'² + Y u² + Z u u'`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadraticForm {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub positive: bool,
}

impl QuadraticForm {
    /// `4XY - Z²` in relative form: `(4XY - Z²) / max(4XY, Z²)`.
    pub fn relative_discriminant(&self) -> f64 {
        let a = 4.0 * self.x * self.y;
        let b = self.z * self.z;
        let m = a.max(b);
        if m == 0.0 {
            0.0
        } else {
            (a - b) / m
        }
    }
}

pub fn quadratic_form_check(params: &HyperbolicEnergyParams, c_val: f64, gamma_val: f64, lambda: f64) -> QuadraticForm {
    let (d, s, r) = (params.delta, params.sigma, params.r);
    let l2s = lambda.powf(2.0 * s);
    let x = l2s * (3.0 * d - 4.0 * r * c_val);
    let y = c_val * lambda * lambda * l2s * (d / 2.0 - 4.0 * r * d * d * lambda.powf(4.0 * s - 2.0) - 4.0 * r * gamma_val);
    let z = 2.0 * (c_val - gamma_val) * lambda * lambda - 4.0 * r * d * c_val * lambda.powf(4.0 * s);
    let positive = x >= 0.0 && y >= 0.0 && 4.0 * x * y >= z * z;
    QuadraticForm { x, y, z, positive }
}

/// `Q₂ / u² = -(δ/2) c λ^{2+2σ} + γ' λ²`.
pub fn q2_coefficient(params: &HyperbolicEnergyParams, c_val: f64, gamma_derivative: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    -0.5 * params.delta * c_val * l2 * lambda.powf(2.0 * params.sigma) + gamma_derivative * l2
}

/// `E_γ = u'² + δ²λ^{4σ}u² + δλ^{2σ}uu' + γλ²u²`.
pub fn energy_gamma(delta: f64, sigma: f64, lambda: f64, gamma: f64, u: f64, du: f64) -> f64 {
    let k = delta * lambda.powf(2.0 * sigma);
    du * du + k * k * u * u + k * u * du + gamma * lambda * lambda * u * u
}

/// `𝓔 = u'² + λ²u²`.
pub fn classic_energy(lambda: f64, u: f64, du: f64) -> f64 {
    du * du + lambda * lambda * u * u
}

/// `F = u'² + λ²c u²`.
pub fn hyperbolic_energy(lambda: f64, c: f64, u: f64, du: f64) -> f64 {
    du * du + lambda * lambda * c * u * u
}

/// Left side of the decay estimate, `u'² + δ²λ^{4σ}u²`.
pub fn decay_energy(delta: f64, sigma: f64, lambda: f64, u: f64, du: f64) -> f64 {
    let k = delta * lambda.powf(2.0 * sigma);
    du * du + k * k * u * u
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail { first_violation: f64 },
    NotAsserted { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Energies and the decay bound along one trajectory, in log form.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub lambda: f64,
    pub constants: HyperbolicEnergyParams,
    #[serde(skip)]
    pub times: Vec<f64>,
    /// `ln 𝓔`, `ln E_γ`, `ln F` and `ln(u'² + δ²λ^{4σ}u²)` per time.
    #[serde(skip)]
    pub log_classic: Vec<f64>,
    #[serde(skip)]
    pub log_gamma: Option<Vec<f64>>,
    #[serde(skip)]
    pub log_hyperbolic: Vec<f64>,
    #[serde(skip)]
    pub log_energy: Vec<f64>,
    #[serde(skip)]
    pub log_bound: Vec<f64>,
    /// Smallest `ln bound - ln energy` over the grid.
    pub min_log_margin: f64,
    pub points: usize,
    pub verdict: Verdict,
}

impl EnergyReport {
    /// `ln bound - ln energy` per time.
    pub fn log_margin(&self) -> Vec<f64> {
        self.log_bound.iter().zip(&self.log_energy).map(|(b, e)| log_margin(*b, *e)).collect()
    }

    /// Writes `t,energy,bound,margin,log_energy,log_bound,log_margin,log_energy_gamma,log_energy_hyperbolic`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "t",
            "energy",
            "bound",
            "margin",
            "log_energy",
            "log_bound",
            "log_margin",
            "log_energy_gamma",
            "log_energy_hyperbolic",
        ])?;
        for i in 0..self.times.len() {
            let (e, b) = (self.log_energy[i].exp(), self.log_bound[i].exp());
            let lg = self.log_gamma.as_ref().map(|g| g[i]);
            wr.serialize((
                self.times[i],
                e,
                b,
                b - e,
                self.log_energy[i],
                self.log_bound[i],
                log_margin(self.log_bound[i], self.log_energy[i]),
                lg,
                self.log_hyperbolic[i],
            ))?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn log_margin(b: f64, e: f64) -> f64 {
    if e == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        b - e
    }
}

fn ln_scaled(x: f64, log_scale: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln() + 2.0 * log_scale
    }
}

/// Checks `u'² + δ²λ^{4σ}u² <= 3(u₁² + δ²λ^{4σ}u₀²) exp(-4rλ^{2σ}C(t) [+ 4λ^θΦ(t)])`
/// at every trajectory point, with multiplicative slack [`BOUND_SLACK`].
pub fn verify_decay_estimate(
    problem: &ModalProblem,
    params: &HyperbolicEnergyParams,
    trajectory: &ModalTrajectory,
    glaeser: Option<&GlaeserEstimate>,
) -> Result<EnergyReport> {
    let (delta, sigma, lambda) = (problem.delta, problem.sigma, problem.lambda);
    if problem.direction != Direction::Forward || problem.span.0 != 0.0 {
        return Err(invalid("problem", "the decay estimate needs forward data at t = 0"));
    }
    if params.k >= 2 && !matches!(glaeser, Some(GlaeserEstimate::Function { .. })) {
        return Err(invalid("glaeser", "k >= 2 needs the Glaeser weight Φ"));
    }
    let c = &problem.coefficient;
    let approx = approximate_coefficient(c, lambda).ok();
    let (u0, u1) = problem.initial;
    let ln_initial = decay_energy(delta, sigma, lambda, u0, u1).ln() + 3f64.ln();
    let rate = 4.0 * params.r * lambda.powf(2.0 * sigma);
    let lt = lambda.powf(params.theta);

    let n = trajectory.len();
    let mut log_classic = Vec::with_capacity(n);
    let mut log_gamma = approx.as_ref().map(|_| Vec::with_capacity(n));
    let mut log_hyperbolic = Vec::with_capacity(n);
    let mut log_energy = Vec::with_capacity(n);
    let mut log_bound = Vec::with_capacity(n);
    let mut first_violation = None;
    let slack = BOUND_SLACK.ln_1p();
    for i in 0..n {
        let t = trajectory.times[i];
        let (u, du, s) = (trajectory.u[i], trajectory.du[i], trajectory.log_scale[i]);
        let cv = c.value(t);
        log_classic.push(ln_scaled(classic_energy(lambda, u, du), s));
        log_hyperbolic.push(ln_scaled(hyperbolic_energy(lambda, cv, u, du), s));
        if let (Some(a), Some(g)) = (approx.as_ref(), log_gamma.as_mut()) {
            g.push(ln_scaled(energy_gamma(delta, sigma, lambda, a.gamma(t), u, du), s));
        }
        let le = ln_scaled(decay_energy(delta, sigma, lambda, u, du), s);
        let mut lb = ln_initial - rate * c.antiderivative(t);
        if params.k >= 2 {
            lb += 4.0 * lt * glaeser.map_or(0.0, |g| g.big_phi(t));
        }
        if le > lb + slack && first_violation.is_none() {
            first_violation = Some(t);
        }
        log_energy.push(le);
        log_bound.push(lb);
    }
    let min_log_margin = log_bound.iter().zip(&log_energy).map(|(b, e)| log_margin(*b, *e)).fold(f64::INFINITY, f64::min);
    let verdict = if lambda < params.nu {
        Verdict::NotAsserted { reason: format!("below frequency threshold nu = {}, estimate not asserted", params.nu) }
    } else if c.value(0.0) != 0.0 {
        Verdict::NotAsserted { reason: "c(0) != 0".into() }
    } else {
        match first_violation {
            None => Verdict::Pass,
            Some(t) => Verdict::Fail { first_violation: t },
        }
    };
    Ok(EnergyReport {
        lambda,
        constants: params.clone(),
        times: trajectory.times.clone(),
        log_classic,
        log_gamma,
        log_hyperbolic,
        log_energy,
        log_bound,
        min_log_margin,
        points: n,
        verdict,
    })
}

/// Counts of quadratic-form conditions that fail along a trajectory.
#[derive(Clone, Debug, Default, Serialize)]
pub struct QuadraticFormReport {
    pub points: usize,
    pub x_negative: usize,
    pub y_negative: usize,
    pub discriminant_negative: usize,
    pub q2_positive: usize,
    pub min_x: f64,
    pub min_y: f64,
    /// Smallest `(4XY - Z²) / max(4XY, Z²)`.
    pub min_relative_discriminant: f64,
    /// Largest `Q₂ / (u² (δ/2) c λ^{2+2σ})`, where `c > 0`.
    pub max_relative_q2: f64,
    pub first_violation: Option<f64>,
}

impl QuadraticFormReport {
    pub fn violations(&self, include_q2: bool) -> usize {
        self.x_negative + self.y_negative + self.discriminant_negative + if include_q2 { self.q2_positive } else { 0 }
    }
}

/// Evaluates `X, Y, Z` and `Q₂` at every trajectory time with `γ = γ_λ`.
pub fn check_quadratic_forms(
    params: &HyperbolicEnergyParams,
    approx: &ApproximatedCoefficient,
    times: &[f64],
) -> QuadraticFormReport {
    let lambda = approx.lambda();
    let c = approx.coefficient();
    let mut rep = QuadraticFormReport {
        points: times.len(),
        min_x: f64::INFINITY,
        min_y: f64::INFINITY,
        min_relative_discriminant: f64::INFINITY,
        max_relative_q2: f64::NEG_INFINITY,
        ..Default::default()
    };
    for &t in times {
        let cv = c.value(t);
        let (g, dg) = approx.evaluate(t);
        let q = quadratic_form_check(params, cv, g, lambda);
        let q2 = q2_coefficient(params, cv, dg, lambda);
        let mut bad = false;
        if q.x < 0.0 {
            rep.x_negative += 1;
            bad = true;
        }
        if q.y < 0.0 {
            rep.y_negative += 1;
            bad = true;
        }
        if 4.0 * q.x * q.y < q.z * q.z {
            rep.discriminant_negative += 1;
            bad = true;
        }
        if q2 > 0.0 {
            rep.q2_positive += 1;
            bad = true;
        }
        if bad && rep.first_violation.is_none() {
            rep.first_violation = Some(t);
        }
        rep.min_x = rep.min_x.min(q.x);
        rep.min_y = rep.min_y.min(q.y);
        rep.min_relative_discriminant = rep.min_relative_discriminant.min(q.relative_discriminant());
        let scale = 0.5 * params.delta * cv * lambda * lambda * lambda.powf(2.0 * params.sigma);
        if scale > 0.0 {
            rep.max_relative_q2 = rep.max_relative_q2.max(q2 / scale);
        }
    }
    rep
}

/// Largest relative increase of `E_γ(t) exp(4rλ^{2σ}C(t))` between consecutive
/// trajectory points (zero or negative when the product is nonincreasing).
pub fn monotonicity_defect(
    problem: &ModalProblem,
    params: &HyperbolicEnergyParams,
    approx: &ApproximatedCoefficient,
    trajectory: &ModalTrajectory,
) -> f64 {
    let rate = 4.0 * params.r * problem.lambda.powf(2.0 * problem.sigma);
    let c = &problem.coefficient;
    let logs: Vec<f64> = (0..trajectory.len())
        .map(|i| {
            let t = trajectory.times[i];
            let e = energy_gamma(problem.delta, problem.sigma, problem.lambda, approx.gamma(t), trajectory.u[i], trajectory.du[i]);
            ln_scaled(e, trajectory.log_scale[i]) + rate * c.antiderivative(t)
        })
        .collect();
    logs.windows(2)
        .filter(|w| w[0].is_finite())
        .map(|w| (w[1] - w[0]).exp_m1())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// End of the verification window for one frequency: the first time at which
/// `∫_0^t λ√c` reaches `phase_budget`, capped by the coefficient horizon.
pub fn decay_horizon(coefficient: &Coefficient, lambda: f64, phase_budget: f64) -> f64 {
    let gl = GaussLegendre::new(16);
    let phase = |a: f64, b: f64| lambda * gl.integrate(|t| coefficient.value(t).sqrt(), a, b, 1);
    let t_max = coefficient.horizon();
    let n = 4096;
    let h = t_max / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let a = h * i as f64;
        let step = phase(a, a + h);
        if acc + step >= phase_budget {
            let target = phase_budget - acc;
            // geometric refinement first, since the crossing may sit many
            // orders of magnitude inside the cell
            let mut hi = a + h;
            while hi - a > 1e-300 && phase(a, a + 0.5 * (hi - a)) >= target {
                hi = a + 0.5 * (hi - a);
            }
            let mut lo = a + 0.5 * (hi - a);
            if phase(a, lo) >= target {
                lo = a;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if phase(a, mid) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi;
        }
        acc += step;
    }
    t_max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{estimate_glaeser, Regularity};

    fn square() -> Coefficient {
        Coefficient::power(1.0, 2.0, 1.0, Regularity::new(1, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn r_examples() {
        assert_eq!(optimal_r(1.0, 1.0).0, 1.0 / 32.0);
        assert_eq!(optimal_r(2.0, 1.0).0, 1.0 / 40.0);
    }

    #[test]
    fn nu_example() {
        assert!((base_nu(1.0, 0.5, 2.0 / 3.0) - 64.0).abs() < 1e-9);
    }

    #[test]
    fn constants_satisfy_their_inequalities() {
        let c = square();
        let g = estimate_glaeser(&c, 1000).unwrap();
        for (d, s) in [(1.0, 0.3), (1.0, 0.5), (2.0, 0.26), (0.3, 0.45)] {
            let p = choose_constants(d, s, &c, Some(&g)).unwrap();
            let mu = p.mu;
            assert!(2.0 * p.r * mu <= d * (1.0 + 1e-15));
            assert!(16.0 * p.r * (d * d + mu) <= d * (1.0 + 1e-15));
            assert!(64.0 * p.r * p.r * mu <= 1.0 + 1e-15);
            let e = p.nu.powf(2.0 * s - p.theta);
            assert!(p.nu >= 1.0 && d * e >= 4.0 * (1.0 - 1e-12));
            assert!(e >= 8.0 * 2.0 / d * (1.0 - 1e-12));
        }
    }

    #[test]
    fn regime_is_enforced() {
        let c = square();
        let g = estimate_glaeser(&c, 100).unwrap();
        assert!(matches!(choose_constants(1.0, 0.25, &c, Some(&g)), Err(Error::OutsideDecayRegime { .. })));
        assert!(choose_constants(1.0, 0.2501, &c, Some(&g)).is_ok());
    }

    #[test]
    fn degenerate_point_is_positive() {
        let c = square();
        let g = estimate_glaeser(&c, 100).unwrap();
        let p = choose_constants(1.0, 0.5, &c, Some(&g)).unwrap();
        let q = quadratic_form_check(&p, 0.0, 0.0, p.nu);
        assert_eq!((q.y, q.z), (0.0, 0.0));
        assert!(q.x > 0.0 && q.positive);
    }

    #[test]
    fn overshooting_gamma_breaks_positivity() {
        let c = Coefficient::power(1.0, 2.0, 1.0, Regularity::new(1, 1.0).unwrap()).unwrap();
        let g = estimate_glaeser(&c, 100).unwrap();
        let p = choose_constants(0.05, 0.5, &c, Some(&g)).unwrap();
        let q = quadratic_form_check(&p, 0.5, 1.5, p.nu);
        assert!(!q.positive);
    }

    #[test]
    fn horizon_follows_phase_budget() {
        let c = square();
        // ∫ λ t dt = λ T²/2
        let t = decay_horizon(&c, 1e6, 500.0);
        assert!((t - (1000.0f64 / 1e6).sqrt()).abs() < 1e-4 * t);
        assert_eq!(decay_horizon(&c, 10.0, 500.0), 1.0);
    }
}
