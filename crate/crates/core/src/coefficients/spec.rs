use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::counterexample::{build_coefficient, select_sequences, CounterexampleParams};
use crate::error::Result;

use super::{Coefficient, Constant, PowerLaw, Regularity, SinSquared, Table};

fn one() -> f64 {
    1.0
}

/// Structured description of a coefficient family, as found in run configs.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientSpec {
    /// `scale * t^exponent`.
    Power {
        #[serde(default = "one")]
        scale: f64,
        exponent: f64,
        #[serde(default = "one")]
        horizon: f64,
        k: u32,
        alpha: f64,
        bound: Option<f64>,
        holder: Option<f64>,
    },
    Constant {
        level: f64,
        #[serde(default = "one")]
        horizon: f64,
        #[serde(default)]
        k: u32,
        #[serde(default = "one")]
        alpha: f64,
        bound: Option<f64>,
    },
    Zero {
        #[serde(default = "one")]
        horizon: f64,
    },
    /// `amplitude * sin²(frequency * t)`.
    SinSquared {
        #[serde(default = "one")]
        amplitude: f64,
        frequency: f64,
        #[serde(default = "one")]
        horizon: f64,
        k: u32,
        alpha: f64,
        bound: Option<f64>,
        holder: Option<f64>,
    },
    /// Two-column CSV `t,c`; the path is relative to the config file.
    Table {
        path: PathBuf,
        #[serde(default)]
        k: u32,
        #[serde(default = "one")]
        alpha: f64,
        bound: Option<f64>,
        holder: Option<f64>,
    },
    Counterexample { params: CounterexampleParams },
}

impl CoefficientSpec {
    /// Builds the coefficient; relative table paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Coefficient> {
        let finish = |c: Coefficient, bound: Option<f64>, holder: Option<f64>| -> Result<Coefficient> {
            let c = match bound {
                Some(b) => c.with_bound(b)?,
                None => c,
            };
            match holder {
                Some(h) => c.with_holder(h),
                None => Ok(c),
            }
        };
        match self {
            CoefficientSpec::Power { scale, exponent, horizon, k, alpha, bound, holder } => {
                let reg = Regularity::new(*k, *alpha)?;
                let p = PowerLaw::new(*scale, *exponent)?;
                let sup = p.sup(*horizon).max(f64::MIN_POSITIVE);
                finish(Coefficient::new(p, *horizon, reg, sup)?, *bound, *holder)
            }
            CoefficientSpec::Constant { level, horizon, k, alpha, bound } => {
                let reg = Regularity::new(*k, *alpha)?;
                let c = Coefficient::new(Constant::new(*level)?, *horizon, reg, if *level > 0.0 { *level } else { 1.0 })?;
                finish(c, *bound, None)
            }
            CoefficientSpec::Zero { horizon } => Coefficient::zero(*horizon),
            CoefficientSpec::SinSquared { amplitude, frequency, horizon, k, alpha, bound, holder } => {
                let reg = Regularity::new(*k, *alpha)?;
                let c = Coefficient::new(SinSquared::new(*amplitude, *frequency)?, *horizon, reg, amplitude.max(f64::MIN_POSITIVE))?;
                finish(c, *bound, *holder)
            }
            CoefficientSpec::Table { path, k, alpha, bound, holder } => {
                let reg = Regularity::new(*k, *alpha)?;
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                let table = Table::from_csv(&full)?;
                let horizon = table.horizon();
                let sup = table.max_value();
                let c = Coefficient::new(table, horizon, reg, if sup > 0.0 { sup } else { 1.0 })?;
                finish(c, *bound, *holder)
            }
            CoefficientSpec::Counterexample { params } => build_coefficient(&select_sequences(params)?),
        }
    }
}
