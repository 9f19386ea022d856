use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

use super::{glaeser_ratio, Coefficient, GlaeserEstimate};

/// `θ = 2 / (2 + k + α)`.
pub fn theta_exponent(k: u32, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("{alpha} is outside (0, 1]")));
    }
    Ok(2.0 / (2.0 + k as f64 + alpha))
}

/// `ψ_ε(x) = x - (2ε/π) atan(πx / 2ε)` for `x > 0`, zero otherwise.
pub fn psi_smoother(epsilon: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = PI * x / (2.0 * epsilon);
    if z < 1e-4 {
        // x - (2ε/π)(z - z³/3 + z⁵/5) without cancellation
        let z2 = z * z;
        return (2.0 * epsilon / PI) * z * z2 * (1.0 / 3.0 - z2 / 5.0);
    }
    x - (2.0 * epsilon / PI) * z.atan()
}

/// `ψ_ε'(x) = z² / (1 + z²)` with `z = πx / 2ε`.
pub fn psi_smoother_derivative(epsilon: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = PI * x / (2.0 * epsilon);
    if z > 1e150 {
        return 1.0;
    }
    z * z / (1.0 + z * z)
}

/// How `γ_λ` is built from `c`.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum Scheme {
    /// `k >= 1`: `γ = ψ_ε(c - ε)` with `4ε = λ^{-2(1-θ)}`.
    Truncated { epsilon: f64 },
    /// `k = 0`: `γ = ψ_{2η}(ĉ_ε - 2η)` with `η = Hε^α = λ^{-2(1-θ)}/25`.
    /// `epsilon` is absent when `H = 0`, where `ĉ_ε = c`.
    Mollified { epsilon: Option<f64>, eta: f64, holder: f64 },
}

/// The family `γ_λ` approximating `c`.
#[derive(Clone, Debug)]
pub struct ApproximatedCoefficient {
    coefficient: Coefficient,
    lambda: f64,
    theta: f64,
    accuracy: f64,
    scheme: Scheme,
}

/// Builds `γ_λ` for the declared regularity of `c`.
pub fn approximate_coefficient(c: &Coefficient, lambda: f64) -> Result<ApproximatedCoefficient> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("{lambda} must be positive")));
    }
    let reg = c.regularity();
    let theta = theta_exponent(reg.k, reg.alpha)?;
    let accuracy = lambda.powf(-2.0 * (1.0 - theta));
    let scheme = if reg.k >= 1 {
        if !c.has_derivative() {
            return Err(Error::MissingDerivative { operation: "approximate_coefficient" });
        }
        Scheme::Truncated { epsilon: accuracy / 4.0 }
    } else {
        let holder = c.holder_constant().ok_or(Error::MissingHolderConstant)?;
        let eta = accuracy / 25.0;
        let epsilon = (holder > 0.0).then(|| (eta / holder).powf(1.0 / reg.alpha));
        Scheme::Mollified { epsilon, eta, holder }
    };
    Ok(ApproximatedCoefficient { coefficient: c.clone(), lambda, theta, accuracy, scheme })
}

impl ApproximatedCoefficient {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `λ^{-2(1-θ)}`.
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn coefficient(&self) -> &Coefficient {
        &self.coefficient
    }

    /// `ĉ_ε(t)`; only for `k = 0`.
    pub fn mollified(&self, t: f64) -> Option<f64> {
        match self.scheme {
            Scheme::Mollified { epsilon: Some(eps), .. } => Some(self.coefficient.integral(t, t + eps) / eps),
            Scheme::Mollified { epsilon: None, .. } => Some(self.coefficient.value(t)),
            Scheme::Truncated { .. } => None,
        }
    }

    /// `ĉ_ε'(t) = (c(t+ε) - c(t)) / ε`; only for `k = 0`.
    pub fn mollified_derivative(&self, t: f64) -> Option<f64> {
        match self.scheme {
            Scheme::Mollified { epsilon: Some(eps), .. } => {
                Some((self.coefficient.value(t + eps) - self.coefficient.value(t)) / eps)
            }
            Scheme::Mollified { epsilon: None, .. } => Some(0.0),
            Scheme::Truncated { .. } => None,
        }
    }

    /// `(γ_λ(t), γ_λ'(t))`.
    pub fn evaluate(&self, t: f64) -> (f64, f64) {
        match self.scheme {
            Scheme::Truncated { epsilon } => {
                let d = self.coefficient.derivatives(t, 1).expect("derivative checked at construction");
                let dc = if t > self.coefficient.horizon() { 0.0 } else { d[1] };
                let x = d[0] - epsilon;
                (psi_smoother(epsilon, x), psi_smoother_derivative(epsilon, x) * dc)
            }
            Scheme::Mollified { eta, .. } => {
                let x = self.mollified(t).unwrap() - 2.0 * eta;
                let dx = self.mollified_derivative(t).unwrap();
                (psi_smoother(2.0 * eta, x), psi_smoother_derivative(2.0 * eta, x) * dx)
            }
        }
    }

    pub fn gamma(&self, t: f64) -> f64 {
        self.evaluate(t).0
    }

    pub fn gamma_derivative(&self, t: f64) -> f64 {
        self.evaluate(t).1
    }

    /// Right-hand side of the derivative bound on `|γ_λ'(t)|`.
    pub fn derivative_bound(&self, t: f64, glaeser: Option<&GlaeserEstimate>) -> Result<f64> {
        let c = self.coefficient.value(t);
        let lt = self.lambda.powf(self.theta);
        let reg = self.coefficient.regularity();
        match (reg.k, self.scheme) {
            (0, Scheme::Mollified { holder, .. }) => Ok((25.0 * holder).powf(1.0 / reg.alpha) * c * lt),
            (1, _) => {
                let k_const = glaeser
                    .and_then(GlaeserEstimate::k_constant)
                    .ok_or_else(|| invalid("glaeser", "k = 1 needs the Glaeser constant K"))?;
                Ok(4.0 * k_const * c * lt)
            }
            _ => {
                let d = self.coefficient.derivatives(t, 1).ok_or(Error::MissingDerivative { operation: "derivative_bound" })?;
                let phi = glaeser_ratio(t, d[0], d[1], 1.0 - 1.0 / reg.order())?;
                Ok(4.0 * phi * c * lt)
            }
        }
    }

    /// Which derivative bound applies, for reports.
    pub fn derivative_bound_kind(&self) -> DerivativeBound {
        match self.coefficient.regularity().k {
            0 => DerivativeBound::Holder,
            1 => DerivativeBound::GlaeserConstant,
            _ => DerivativeBound::GlaeserWeight,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeBound {
    /// `(25H)^{1/α} c λ^θ`
    Holder,
    /// `4K c λ^θ`
    GlaeserConstant,
    /// `4φ(t) c λ^θ`
    GlaeserWeight,
}

/// Pointwise values and margins (bound minus value) of the approximation inequalities.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximationSample {
    pub t: f64,
    pub c: f64,
    pub gamma: f64,
    pub gamma_derivative: f64,
    pub margin_error: f64,
    pub margin_error_squared: f64,
    pub margin_derivative: Option<f64>,
    pub margin_mollifier: Option<f64>,
    pub margin_mollifier_derivative: Option<f64>,
}

/// Evaluates every inequality on a uniform grid. The string explains why the
/// derivative bound could not be evaluated, if so.
pub fn sample_approximation(
    approx: &ApproximatedCoefficient,
    glaeser: Option<&GlaeserEstimate>,
    grid_points: usize,
) -> (Vec<ApproximationSample>, Option<String>) {
    let c = &approx.coefficient;
    let acc = approx.accuracy;
    let mut note = None;
    let samples = c
        .grid(grid_points)
        .into_iter()
        .map(|t| {
            let cv = c.value(t);
            let (g, dg) = approx.evaluate(t);
            let err = (cv - g).abs();
            let margin_derivative = match approx.derivative_bound(t, glaeser) {
                Ok(b) => Some(b - dg.abs()),
                Err(e) => {
                    note.get_or_insert_with(|| e.to_string());
                    None
                }
            };
            let (margin_mollifier, margin_mollifier_derivative) = match approx.scheme {
                Scheme::Mollified { epsilon, eta, holder } => {
                    let alpha = c.regularity().alpha;
                    let m = approx.mollified(t).unwrap();
                    let dm = approx.mollified_derivative(t).unwrap();
                    let dbound = epsilon.map_or(0.0, |e| holder / e.powf(1.0 - alpha));
                    (Some(eta - (m - cv).abs()), Some(dbound - dm.abs()))
                }
                Scheme::Truncated { .. } => (None, None),
            };
            ApproximationSample {
                t,
                c: cv,
                gamma: g,
                gamma_derivative: dg,
                margin_error: acc - err,
                margin_error_squared: cv * acc - err * err,
                margin_derivative,
                margin_mollifier,
                margin_mollifier_derivative,
            }
        })
        .collect();
    (samples, note)
}

/// Summary of [`sample_approximation`] with additive slack.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximationCheck {
    pub lambda: f64,
    pub theta: f64,
    pub accuracy: f64,
    pub scheme: Scheme,
    pub derivative_bound: DerivativeBound,
    pub grid_points: usize,
    pub slack: f64,
    pub sup_error: f64,
    pub min_margin_error: f64,
    pub min_margin_error_squared: f64,
    pub min_margin_derivative: Option<f64>,
    pub derivative_note: Option<String>,
    pub min_margin_mollifier: Option<f64>,
    pub min_margin_mollifier_derivative: Option<f64>,
    pub gamma_at_zero: f64,
    pub violations: usize,
    pub first_violation: Option<(f64, &'static str)>,
}

impl ApproximationCheck {
    /// Every evaluated inequality holds, including `γ(0) = 0` when `c(0) = 0`.
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    /// The derivative bound was evaluated (Glaeser data available and consistent).
    pub fn derivative_checked(&self) -> bool {
        self.min_margin_derivative.is_some()
    }
}

pub fn check_approximation(
    approx: &ApproximatedCoefficient,
    glaeser: Option<&GlaeserEstimate>,
    grid_points: usize,
    slack: f64,
) -> ApproximationCheck {
    let (samples, note) = sample_approximation(approx, glaeser, grid_points);
    let min = |f: &dyn Fn(&ApproximationSample) -> f64| samples.iter().map(f).fold(f64::INFINITY, f64::min);
    let min_opt = |f: &dyn Fn(&ApproximationSample) -> Option<f64>| {
        let v: Option<Vec<f64>> = samples.iter().map(f).collect();
        v.map(|v| v.into_iter().fold(f64::INFINITY, f64::min))
    };
    let mut violations = 0;
    let mut first_violation = None;
    let mut flag = |t: f64, name: &'static str| {
        violations += 1;
        first_violation.get_or_insert((t, name));
    };
    for s in &samples {
        if s.margin_error < -slack {
            flag(s.t, "error");
        }
        if s.margin_error_squared < -slack {
            flag(s.t, "error-squared");
        }
        if note.is_none() && s.margin_derivative.is_some_and(|m| m < -slack) {
            flag(s.t, "derivative");
        }
        if s.margin_mollifier.is_some_and(|m| m < -slack) {
            flag(s.t, "mollifier");
        }
        if s.margin_mollifier_derivative.is_some_and(|m| m < -slack) {
            flag(s.t, "mollifier-derivative");
        }
    }
    let gamma_at_zero = approx.gamma(0.0);
    if approx.coefficient.value(0.0) == 0.0 && gamma_at_zero != 0.0 {
        flag(0.0, "gamma-at-zero");
    }
    ApproximationCheck {
        lambda: approx.lambda,
        theta: approx.theta,
        accuracy: approx.accuracy,
        scheme: approx.scheme,
        derivative_bound: approx.derivative_bound_kind(),
        grid_points,
        slack,
        sup_error: samples.iter().map(|s| (s.c - s.gamma).abs()).fold(0.0, f64::max),
        min_margin_error: min(&|s| s.margin_error),
        min_margin_error_squared: min(&|s| s.margin_error_squared),
        min_margin_derivative: if note.is_none() { min_opt(&|s| s.margin_derivative) } else { None },
        derivative_note: note,
        min_margin_mollifier: min_opt(&|s| s.margin_mollifier),
        min_margin_mollifier_derivative: min_opt(&|s| s.margin_mollifier_derivative),
        gamma_at_zero,
        violations,
        first_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{estimate_glaeser, Regularity};

    #[test]
    fn theta_values() {
        assert_eq!(theta_exponent(0, 1.0).unwrap(), 2.0 / 3.0);
        assert_eq!(theta_exponent(2, 1.0).unwrap(), 0.4);
        let th = theta_exponent(2, 1.0).unwrap();
        assert!((2.0 * (1.0 - th) / 3.0 - th).abs() < 1e-15);
        assert!(theta_exponent(0, 0.0).is_err());
        assert!(theta_exponent(0, 1.1).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_smoother(1.0, 0.0), 0.0);
        assert_eq!(psi_smoother(0.5, -3.0), 0.0);
        assert!((psi_smoother(1.0, 100.0) - 99.0).abs() < 0.013);
    }

    #[test]
    fn psi_series_branch_is_continuous() {
        let eps = 0.3;
        let x = 1e-4 * 2.0 * eps / PI;
        let a = psi_smoother(eps, x * (1.0 - 1e-9));
        let b = psi_smoother(eps, x * (1.0 + 1e-9));
        assert!((a - b).abs() <= 1e-20 + 1e-6 * a.abs());
    }

    #[test]
    fn square_lambda_100() {
        let c = Coefficient::power(1.0, 2.0, 1.0, Regularity::new(1, 1.0).unwrap()).unwrap();
        let a = approximate_coefficient(&c, 100.0).unwrap();
        assert!(matches!(a.scheme(), Scheme::Truncated { epsilon } if (epsilon - 0.0025).abs() < 1e-15));
        let g = estimate_glaeser(&c, 10_000).unwrap();
        let chk = check_approximation(&a, Some(&g), 10_000, 1e-12);
        assert!(chk.sup_error <= 0.01);
        assert!(chk.holds());
        assert!(chk.derivative_checked());
    }

    #[test]
    fn zero_coefficient_gives_zero() {
        let c = Coefficient::zero(1.0).unwrap();
        for lambda in [1.0, 10.0, 1e4] {
            let a = approximate_coefficient(&c, lambda).unwrap();
            for t in [0.0, 0.3, 1.0] {
                assert_eq!(a.evaluate(t), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn linear_coefficient_k0() {
        let c = Coefficient::power(1.0, 1.0, 1.0, Regularity::new(0, 1.0).unwrap()).unwrap();
        assert_eq!(c.holder_constant(), Some(1.0));
        let a = approximate_coefficient(&c, 10.0).unwrap();
        let chk = check_approximation(&a, None, 2000, 1e-12);
        assert!(chk.holds(), "{chk:?}");
        assert!(chk.derivative_checked());
        assert_eq!(chk.gamma_at_zero, 0.0);
    }

    #[test]
    fn missing_holder_is_an_error() {
        let c = Coefficient::power(1.0, 0.5, 1.0, Regularity::new(0, 1.0).unwrap()).unwrap();
        assert!(matches!(approximate_coefficient(&c, 10.0), Err(Error::MissingHolderConstant)));
    }

    #[test]
    fn table_needs_derivative_for_k1() {
        use crate::coefficients::Table;
        let t = Table::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let c = Coefficient::new(t, 1.0, Regularity::new(1, 1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(approximate_coefficient(&c, 10.0), Err(Error::MissingDerivative { .. })));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let c = Coefficient::sin_squared(1.0, 5.0, 1.0, Regularity::new(1, 1.0).unwrap()).unwrap();
        let a = approximate_coefficient(&c, 50.0).unwrap();
        for &t in &[0.11, 0.37, 0.8] {
            let h = 1e-6;
            let fd = (a.gamma(t + h) - a.gamma(t - h)) / (2.0 * h);
            assert!((fd - a.gamma_derivative(t)).abs() < 1e-6, "{t}");
        }
        let c0 = Coefficient::sin_squared(1.0, 5.0, 1.0, Regularity::new(0, 1.0).unwrap()).unwrap();
        let a0 = approximate_coefficient(&c0, 50.0).unwrap();
        for &t in &[0.11, 0.37, 0.8] {
            let h = 1e-7;
            let fd = (a0.gamma(t + h) - a0.gamma(t - h)) / (2.0 * h);
            assert!((fd - a0.gamma_derivative(t)).abs() < 1e-5, "{t}");
        }
    }
}
