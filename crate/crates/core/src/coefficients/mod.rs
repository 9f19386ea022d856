//! Time-dependent propagation speeds `c(t)`, Glaeser constants and the
//! `gamma_lambda` approximation family.

mod approximation;
mod families;
mod glaeser;
mod spec;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;

pub use approximation::{
    approximate_coefficient, check_approximation, psi_smoother, psi_smoother_derivative, sample_approximation,
    theta_exponent, ApproximatedCoefficient, ApproximationCheck, ApproximationSample, DerivativeBound, Scheme,
};
pub use families::{Constant, PowerLaw, SinSquared, Table};
pub use glaeser::{estimate_glaeser, glaeser_ratio, GlaeserEstimate};
pub use spec::CoefficientSpec;

/// Closed-form access to a coefficient on `[0, T]`.
pub trait Profile: Send + Sync + fmt::Debug {
    fn family(&self) -> &'static str;

    fn value(&self, t: f64) -> f64;

    /// `[c(t), c'(t), ..., c^(order)(t)]`, or `None` without a closed form.
    fn derivatives(&self, t: f64, order: usize) -> Option<Vec<f64>>;

    /// `C(t) = ∫_0^t c`.
    fn antiderivative(&self, t: f64) -> f64;

    /// `∫_a^b c` for `0 <= a <= b <= T`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        thread_local! {
            static RULE: GaussLegendre = GaussLegendre::new(16);
        }
        RULE.with(|gl| gl.integrate(|t| self.value(t), a, b, 4))
    }

    /// α-Hölder constant of `c^(k)` on `[0, horizon]`, when known.
    fn holder_constant(&self, _k: u32, _alpha: f64, _horizon: f64) -> Option<f64> {
        None
    }
}

/// Declared smoothness class `C^{k,α}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub k: u32,
    pub alpha: f64,
}

impl Regularity {
    pub fn new(k: u32, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid("alpha", format!("{alpha} is outside (0, 1]")));
        }
        Ok(Regularity { k, alpha })
    }

    /// `k + α`.
    pub fn order(&self) -> f64 {
        self.k as f64 + self.alpha
    }
}

/// A nonnegative coefficient `c(t)` on `[0, T]` with regularity metadata.
#[derive(Clone)]
pub struct Coefficient {
    profile: Arc<dyn Profile>,
    horizon: f64,
    regularity: Regularity,
    bound: f64,
    holder: Option<f64>,
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficient")
            .field("family", &self.profile.family())
            .field("horizon", &self.horizon)
            .field("regularity", &self.regularity)
            .field("bound", &self.bound)
            .field("holder", &self.holder)
            .finish()
    }
}

const VALIDATION_POINTS: usize = 2001;

impl Coefficient {
    /// Wraps `profile`, checking `0 <= c <= bound` on a validation grid.
    pub fn new(profile: impl Profile + 'static, horizon: f64, regularity: Regularity, bound: f64) -> Result<Self> {
        Self::from_arc(Arc::new(profile), horizon, regularity, bound)
    }

    pub fn from_arc(profile: Arc<dyn Profile>, horizon: f64, regularity: Regularity, bound: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid("horizon", format!("{horizon} must be positive and finite")));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(invalid("bound", format!("{bound} must be positive and finite")));
        }
        Regularity::new(regularity.k, regularity.alpha)?;
        for i in 0..VALIDATION_POINTS {
            let t = horizon * i as f64 / (VALIDATION_POINTS - 1) as f64;
            let v = profile.value(t);
            if !(v >= 0.0 && v <= bound * (1.0 + 1e-12)) {
                return Err(Error::CoefficientOutOfRange { t, value: v, bound });
            }
        }
        let c0 = profile.antiderivative(0.0);
        if c0.abs() > 1e-14 {
            return Err(invalid("antiderivative", format!("C(0) = {c0} is not zero")));
        }
        let holder = profile.holder_constant(regularity.k, regularity.alpha, horizon);
        Ok(Coefficient { profile, horizon, regularity, bound, holder })
    }

    pub fn power(scale: f64, exponent: f64, horizon: f64, regularity: Regularity) -> Result<Self> {
        let profile = PowerLaw::new(scale, exponent)?;
        let bound = profile.sup(horizon).max(f64::MIN_POSITIVE);
        Self::new(profile, horizon, regularity, bound)
    }

    pub fn constant(level: f64, horizon: f64, regularity: Regularity) -> Result<Self> {
        let bound = if level > 0.0 { level } else { 1.0 };
        Self::new(Constant::new(level)?, horizon, regularity, bound)
    }

    pub fn zero(horizon: f64) -> Result<Self> {
        Self::new(Constant::zero(), horizon, Regularity { k: 0, alpha: 1.0 }, 1.0)
    }

    pub fn sin_squared(amplitude: f64, frequency: f64, horizon: f64, regularity: Regularity) -> Result<Self> {
        Self::new(SinSquared::new(amplitude, frequency)?, horizon, regularity, amplitude.max(f64::MIN_POSITIVE))
    }

    /// Overrides the bound `μ`.
    pub fn with_bound(self, bound: f64) -> Result<Self> {
        let holder = self.holder;
        let mut c = Self::from_arc(self.profile, self.horizon, self.regularity, bound)?;
        c.holder = holder;
        Ok(c)
    }

    /// Declares the Hölder constant of `c^(k)`.
    pub fn with_holder(mut self, holder: f64) -> Result<Self> {
        if !(holder >= 0.0 && holder.is_finite()) {
            return Err(invalid("holder", format!("{holder} must be nonnegative")));
        }
        self.holder = Some(holder);
        Ok(self)
    }

    pub fn family(&self) -> &'static str {
        self.profile.family()
    }

    pub fn profile(&self) -> &dyn Profile {
        self.profile.as_ref()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    /// `μ`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn holder_constant(&self) -> Option<f64> {
        self.holder
    }

    /// `c(t)`, extended by `c(0)` to the left and `c(T)` to the right.
    pub fn value(&self, t: f64) -> f64 {
        self.profile.value(t.clamp(0.0, self.horizon))
    }

    pub fn has_derivative(&self) -> bool {
        self.profile.derivatives(0.5 * self.horizon, 1).is_some()
    }

    /// `c'(t)`; zero on the constant extension beyond `T`.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        if t > self.horizon {
            return self.has_derivative().then_some(0.0);
        }
        self.profile.derivatives(t.max(0.0), 1).map(|d| d[1])
    }

    pub fn derivatives(&self, t: f64, order: usize) -> Option<Vec<f64>> {
        self.profile.derivatives(t.clamp(0.0, self.horizon), order)
    }

    /// `C(t)`, continued linearly beyond `T`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        if t <= self.horizon {
            self.profile.antiderivative(t.max(0.0))
        } else {
            self.profile.antiderivative(self.horizon) + self.value(self.horizon) * (t - self.horizon)
        }
    }

    /// `∫_a^b c` for `a <= b`, using the extension beyond `T`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let t = self.horizon;
        let (a, b) = (a.max(0.0), b.max(0.0));
        if b <= t {
            self.profile.integral(a, b)
        } else if a >= t {
            self.value(t) * (b - a)
        } else {
            self.profile.integral(a, t) + self.value(t) * (b - t)
        }
    }

    /// Uniform grid of `points` nodes on `[0, T]`.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        uniform_grid(0.0, self.horizon, points)
    }
}

pub(crate) fn uniform_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![a],
        n => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
    }
}
