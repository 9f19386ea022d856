use crate::error::{invalid, Result};
use crate::quadrature::GaussLegendre;
use crate::taylor::{Real, Taylor};

use super::Profile;

/// `c(t) = a t^p`.
#[derive(Clone, Debug)]
pub struct PowerLaw {
    scale: f64,
    exponent: f64,
}

impl PowerLaw {
    pub fn new(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(invalid("scale", format!("{scale} must be nonnegative")));
        }
        if !(exponent >= 0.0 && exponent.is_finite()) {
            return Err(invalid("exponent", format!("{exponent} must be nonnegative")));
        }
        Ok(PowerLaw { scale, exponent })
    }

    pub fn sup(&self, horizon: f64) -> f64 {
        self.scale * horizon.powf(self.exponent)
    }

    /// Coefficient of `t^{p-j}` in `c^(j)`.
    fn falling(&self, j: usize) -> f64 {
        (0..j).map(|i| self.exponent - i as f64).product::<f64>() * self.scale
    }
}

impl Profile for PowerLaw {
    fn family(&self) -> &'static str {
        "power"
    }

    fn value(&self, t: f64) -> f64 {
        if self.exponent == 0.0 {
            self.scale
        } else {
            self.scale * t.powf(self.exponent)
        }
    }

    fn derivatives(&self, t: f64, order: usize) -> Option<Vec<f64>> {
        Some(
            (0..=order)
                .map(|j| {
                    let a = self.falling(j);
                    if a == 0.0 {
                        0.0
                    } else {
                        a * t.powf(self.exponent - j as f64)
                    }
                })
                .collect(),
        )
    }

    fn antiderivative(&self, t: f64) -> f64 {
        self.scale * t.powf(self.exponent + 1.0) / (self.exponent + 1.0)
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        thread_local! {
            static RULE: GaussLegendre = GaussLegendre::new(16);
        }
        if self.exponent.fract() == 0.0 && self.exponent <= 31.0 {
            RULE.with(|gl| gl.integrate(|t| self.value(t), a, b, 1))
        } else {
            self.antiderivative(b) - self.antiderivative(a)
        }
    }

    fn holder_constant(&self, k: u32, alpha: f64, horizon: f64) -> Option<f64> {
        let a = self.falling(k as usize).abs();
        let q = self.exponent - k as f64;
        if a == 0.0 || q == 0.0 {
            Some(0.0)
        } else if q >= 1.0 {
            Some(a * q * horizon.powf(q - alpha))
        } else if q >= alpha {
            Some(a * horizon.powf(q - alpha))
        } else {
            None
        }
    }
}

/// `c(t) = level`.
#[derive(Clone, Debug)]
pub struct Constant {
    level: f64,
    zero: bool,
}

impl Constant {
    pub fn new(level: f64) -> Result<Self> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(invalid("level", format!("{level} must be nonnegative")));
        }
        Ok(Constant { level, zero: false })
    }

    pub fn zero() -> Self {
        Constant { level: 0.0, zero: true }
    }
}

impl Profile for Constant {
    fn family(&self) -> &'static str {
        if self.zero {
            "zero"
        } else {
            "constant"
        }
    }

    fn value(&self, _t: f64) -> f64 {
        self.level
    }

    fn derivatives(&self, _t: f64, order: usize) -> Option<Vec<f64>> {
        let mut d = vec![0.0; order + 1];
        d[0] = self.level;
        Some(d)
    }

    fn antiderivative(&self, t: f64) -> f64 {
        self.level * t
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        self.level * (b - a)
    }

    fn holder_constant(&self, _k: u32, _alpha: f64, _horizon: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// `c(t) = a sin²(ωt)`.
#[derive(Clone, Debug)]
pub struct SinSquared {
    amplitude: f64,
    frequency: f64,
}

impl SinSquared {
    pub fn new(amplitude: f64, frequency: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(invalid("amplitude", format!("{amplitude} must be nonnegative")));
        }
        if !frequency.is_finite() {
            return Err(invalid("frequency", "must be finite"));
        }
        Ok(SinSquared { amplitude, frequency })
    }

    fn eval<T: Real>(&self, t: T) -> T {
        let s = (t * self.frequency).sin();
        s.clone() * s * self.amplitude
    }
}

impl Profile for SinSquared {
    fn family(&self) -> &'static str {
        "sin-squared"
    }

    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    fn derivatives(&self, t: f64, order: usize) -> Option<Vec<f64>> {
        Some(self.eval(Taylor::variable(t, order)).derivatives())
    }

    fn antiderivative(&self, t: f64) -> f64 {
        let w = self.frequency;
        if w == 0.0 {
            return 0.0;
        }
        self.amplitude * (0.5 * t - (2.0 * w * t).sin() / (4.0 * w))
    }

    fn holder_constant(&self, k: u32, alpha: f64, horizon: f64) -> Option<f64> {
        // |c^(k+1)| <= a (2ω)^(k+1) / 2
        let lip = 0.5 * self.amplitude * (2.0 * self.frequency.abs()).powi(k as i32 + 1);
        Some(lip * horizon.powf(1.0 - alpha))
    }
}

/// Piecewise-linear interpolation of `(t, c)` samples; no analytic derivative.
#[derive(Clone, Debug)]
pub struct Table {
    ts: Vec<f64>,
    cs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Table {
    pub fn new(ts: Vec<f64>, cs: Vec<f64>) -> Result<Self> {
        use crate::error::Error;
        if ts.len() != cs.len() || ts.len() < 2 {
            return Err(Error::Table("need at least two (t, c) rows".into()));
        }
        if ts[0] != 0.0 {
            return Err(Error::Table(format!("first t must be 0, found {}", ts[0])));
        }
        if let Some(i) = ts.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Table(format!("t is not strictly increasing at row {}", i + 1)));
        }
        if let Some(i) = cs.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::Table(format!("c must be finite and nonnegative (row {i})")));
        }
        let mut cumulative = vec![0.0; ts.len()];
        for i in 1..ts.len() {
            cumulative[i] = cumulative[i - 1] + 0.5 * (cs[i] + cs[i - 1]) * (ts[i] - ts[i - 1]);
        }
        Ok(Table { ts, cs, cumulative })
    }

    /// Reads a headered two-column CSV `t,c`.
    pub fn from_csv(path: &std::path::Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut ts = Vec::new();
        let mut cs = Vec::new();
        for row in rdr.deserialize() {
            let (t, c): (f64, f64) = row?;
            ts.push(t);
            cs.push(c);
        }
        Self::new(ts, cs)
    }

    pub fn horizon(&self) -> f64 {
        *self.ts.last().expect("nonempty table")
    }

    pub fn max_value(&self) -> f64 {
        self.cs.iter().copied().fold(0.0, f64::max)
    }

    fn segment(&self, t: f64) -> usize {
        let i = self.ts.partition_point(|&x| x <= t);
        i.clamp(1, self.ts.len() - 1) - 1
    }

    fn slope(&self, i: usize) -> f64 {
        (self.cs[i + 1] - self.cs[i]) / (self.ts[i + 1] - self.ts[i])
    }
}

impl Profile for Table {
    fn family(&self) -> &'static str {
        "table"
    }

    fn value(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let w = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i]);
        self.cs[i] + w * (self.cs[i + 1] - self.cs[i])
    }

    fn derivatives(&self, _t: f64, _order: usize) -> Option<Vec<f64>> {
        None
    }

    fn antiderivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let v = self.value(t);
        self.cumulative[i] + 0.5 * (self.cs[i] + v) * (t - self.ts[i])
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let (ia, ib) = (self.segment(a), self.segment(b));
        if ia == ib {
            return 0.5 * (self.value(a) + self.value(b)) * (b - a);
        }
        let mut s = 0.5 * (self.value(a) + self.cs[ia + 1]) * (self.ts[ia + 1] - a);
        for i in ia + 1..ib {
            s += 0.5 * (self.cs[i] + self.cs[i + 1]) * (self.ts[i + 1] - self.ts[i]);
        }
        s + 0.5 * (self.cs[ib] + self.value(b)) * (b - self.ts[ib])
    }

    fn holder_constant(&self, k: u32, alpha: f64, horizon: f64) -> Option<f64> {
        if k > 0 {
            return None;
        }
        let lip = (0..self.ts.len() - 1).map(|i| self.slope(i).abs()).fold(0.0, f64::max);
        Some(lip * horizon.powf(1.0 - alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn antiderivatives_match_quadrature() {
        let profiles: Vec<Box<dyn Profile>> = vec![
            Box::new(PowerLaw::new(1.0, 2.0).unwrap()),
            Box::new(PowerLaw::new(0.5, 30.0).unwrap()),
            Box::new(PowerLaw::new(2.0, 1.5).unwrap()),
            Box::new(SinSquared::new(1.0, 5.0).unwrap()),
            Box::new(Constant::new(0.7).unwrap()),
        ];
        for p in &profiles {
            for &t in &[0.1, 0.5, 0.93, 1.0] {
                let q = simpson(|x| p.value(x), 0.0, t, 20000);
                let c = p.antiderivative(t);
                assert!((c - q).abs() <= 1e-10 * q.abs().max(1e-300), "{} at {t}: {c} vs {q}", p.family());
                let gl = p.integral(0.0, t);
                assert!((gl - q).abs() <= 1e-10 * q.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn sin_squared_derivatives() {
        let p = SinSquared::new(1.0, 5.0).unwrap();
        let t = 0.3;
        let d = p.derivatives(t, 2).unwrap();
        assert!((d[1] - 5.0 * (10.0 * t).sin()).abs() < 1e-13);
        assert!((d[2] - 50.0 * (10.0 * t).cos()).abs() < 1e-12);
    }

    #[test]
    fn table_is_exact_on_linear_pieces() {
        let t = Table::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.5]).unwrap();
        assert_eq!(t.value(0.25), 0.5);
        assert!((t.antiderivative(1.0) - (0.25 + 0.375)).abs() < 1e-15);
        assert!((t.integral(0.25, 0.75) - (t.antiderivative(0.75) - t.antiderivative(0.25))).abs() < 1e-15);
        assert!(t.derivatives(0.3, 1).is_none());
        assert_eq!(t.holder_constant(0, 1.0, 1.0), Some(2.0));
    }

    #[test]
    fn table_rejects_unsorted() {
        assert!(Table::new(vec![0.0, 0.5, 0.5], vec![0.0, 1.0, 1.0]).is_err());
        assert!(Table::new(vec![0.1, 0.5], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn power_holder_constants() {
        let p = PowerLaw::new(1.0, 1.0).unwrap();
        assert_eq!(p.holder_constant(0, 1.0, 1.0), Some(1.0));
        let p = PowerLaw::new(1.0, 2.0).unwrap();
        assert_eq!(p.holder_constant(1, 1.0, 1.0), Some(2.0));
        let p = PowerLaw::new(1.0, 0.5).unwrap();
        assert_eq!(p.holder_constant(0, 0.5, 4.0), Some(1.0));
        assert_eq!(p.holder_constant(0, 1.0, 1.0), None);
    }
}
