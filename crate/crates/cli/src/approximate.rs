use serde::{Deserialize, Serialize};

use strongdamp::coefficients::{approximate_coefficient, check_approximation, estimate_glaeser, sample_approximation, ApproximationCheck};
use strongdamp::CoefficientSpec;

use crate::failure::{Failure, Outcome};
use crate::{io, Context};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproximateConfig {
    coefficient: CoefficientSpec,
    lambdas: Vec<f64>,
    #[serde(default = "grid_points")]
    grid_points: usize,
    #[serde(default = "slack")]
    slack: f64,
    #[serde(default = "glaeser_grid")]
    glaeser_grid: usize,
}

fn grid_points() -> usize {
    10_000
}

fn slack() -> f64 {
    1e-12
}

fn glaeser_grid() -> usize {
    2000
}

#[derive(Serialize)]
struct Output {
    /// Why the Glaeser data are missing, when `k >= 1`.
    glaeser_note: Option<String>,
    checks: Vec<ApproximationCheck>,
}

pub fn run(ctx: &Context) -> Outcome {
    let cfg: ApproximateConfig = io::load(&ctx.config)?;
    let c = cfg.coefficient.build(&io::base_dir(&ctx.config)).map_err(Failure::config)?;
    if cfg.lambdas.is_empty() {
        return Err(Failure::Config("at `lambdas`: need at least one frequency".into()));
    }
    let (glaeser, glaeser_note) = match c.regularity().k {
        0 => (None, None),
        _ => match estimate_glaeser(&c, cfg.glaeser_grid) {
            Ok(g) => (Some(g), None),
            Err(e) => (None, Some(e.to_string())),
        },
    };
    let mut checks = Vec::with_capacity(cfg.lambdas.len());
    for (i, &lambda) in cfg.lambdas.iter().enumerate() {
        let approx = approximate_coefficient(&c, lambda).map_err(Failure::config)?;
        let (samples, _) = sample_approximation(&approx, glaeser.as_ref(), cfg.grid_points);
        let mut w = csv::Writer::from_writer(ctx.out.file(&format!("gamma/lambda_{i:03}.csv"))?);
        for s in &samples {
            w.serialize(s)?;
        }
        w.flush()?;
        checks.push(check_approximation(&approx, glaeser.as_ref(), cfg.grid_points, cfg.slack));
    }
    let failing: Vec<f64> = checks.iter().filter(|c| !c.holds()).map(|c| c.lambda).collect();
    ctx.out.json("approximation.json", &Output { glaeser_note, checks })?;
    if !failing.is_empty() {
        return Err(Failure::Verification(format!("approximation inequalities fail for lambda in {failing:?}")));
    }
    Ok(())
}
