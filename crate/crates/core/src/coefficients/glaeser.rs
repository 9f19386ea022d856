use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

use super::Coefficient;

/// Empirical Glaeser data: a constant `K` for `k = 1`, a weight `φ` with
/// running integral `Φ` for `k >= 2`.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GlaeserEstimate {
    #[serde(rename = "case-k1-constant")]
    Constant {
        k_const: f64,
        exponent: f64,
        argmax: f64,
    },
    #[serde(rename = "case-k2-function")]
    Function {
        exponent: f64,
        #[serde(skip)]
        grid: Vec<f64>,
        #[serde(skip)]
        phi: Vec<f64>,
        #[serde(skip)]
        big_phi: Vec<f64>,
        phi_max: f64,
        big_phi_total: f64,
    },
}

/// `|c'| / c^exponent`, with `0/0 = 0`.
pub fn glaeser_ratio(t: f64, c: f64, dc: f64, exponent: f64) -> Result<f64> {
    if dc == 0.0 {
        Ok(0.0)
    } else if c <= 0.0 {
        Err(Error::GlaeserViolation { t, derivative: dc })
    } else {
        Ok(dc.abs() / c.powf(exponent))
    }
}

/// Grid estimate of the Glaeser constant (`k = 1`) or weight (`k >= 2`).
pub fn estimate_glaeser(c: &Coefficient, grid_points: usize) -> Result<GlaeserEstimate> {
    let reg = c.regularity();
    if reg.k == 0 {
        return Err(crate::error::invalid("k", "Glaeser estimates need k >= 1"));
    }
    if !c.has_derivative() {
        return Err(Error::MissingDerivative { operation: "estimate_glaeser" });
    }
    if grid_points < 2 {
        return Err(crate::error::invalid("grid_points", "need at least two points"));
    }
    let exponent = 1.0 - 1.0 / reg.order();
    let ratio = |t: f64| -> Result<f64> {
        let d = c.derivatives(t, 1).expect("derivative checked above");
        glaeser_ratio(t, d[0], d[1], exponent)
    };
    let grid = c.grid(grid_points);
    let phi = grid.iter().map(|&t| ratio(t)).collect::<Result<Vec<_>>>()?;
    if reg.k == 1 {
        let (argmax, k_const) =
            grid.iter().zip(&phi).fold((0.0, 0.0), |acc, (&t, &p)| if p > acc.1 { (t, p) } else { acc });
        return Ok(GlaeserEstimate::Constant { k_const, exponent, argmax });
    }
    let gl = GaussLegendre::new(8);
    let mut big_phi = vec![0.0; grid.len()];
    for i in 1..grid.len() {
        // A singular φ at a node would poison the rule; the interior nodes avoid it.
        let cell = gl.integrate(|t| ratio(t).unwrap_or(0.0), grid[i - 1], grid[i], 1);
        big_phi[i] = big_phi[i - 1] + cell;
    }
    let phi_max = phi.iter().copied().fold(0.0, f64::max);
    let big_phi_total = *big_phi.last().unwrap();
    Ok(GlaeserEstimate::Function { exponent, grid, phi, big_phi, phi_max, big_phi_total })
}

impl GlaeserEstimate {
    pub fn exponent(&self) -> f64 {
        match self {
            GlaeserEstimate::Constant { exponent, .. } | GlaeserEstimate::Function { exponent, .. } => *exponent,
        }
    }

    /// `K` for the `k = 1` case.
    pub fn k_constant(&self) -> Option<f64> {
        match self {
            GlaeserEstimate::Constant { k_const, .. } => Some(*k_const),
            GlaeserEstimate::Function { .. } => None,
        }
    }

    /// `Φ(t)` by linear interpolation; zero for the `k = 1` case.
    pub fn big_phi(&self, t: f64) -> f64 {
        match self {
            GlaeserEstimate::Constant { .. } => 0.0,
            GlaeserEstimate::Function { grid, big_phi, .. } => interpolate(grid, big_phi, t),
        }
    }

    /// `φ(t)` by linear interpolation; zero for the `k = 1` case.
    pub fn phi(&self, t: f64) -> f64 {
        match self {
            GlaeserEstimate::Constant { .. } => 0.0,
            GlaeserEstimate::Function { grid, phi, .. } => interpolate(grid, phi, t),
        }
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = xs.partition_point(|&g| g <= x) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + w * (ys[i + 1] - ys[i])
}
