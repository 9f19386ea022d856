use serde::Serialize;

use strongdamp::phase::{phase_diagram, write_phase_csv, AnalyticClass, EmpiricalClass, PhaseCell, PhaseConfig};

use crate::failure::{Failure, Outcome};
use crate::{io, Context};

#[derive(Serialize)]
struct Output<'a> {
    config: &'a PhaseConfig,
    /// Cells whose measured growth contradicts the analytic label.
    inconsistent: Vec<(f64, f64)>,
    cells: &'a [PhaseCell],
}

/// A well-posed cell must stay bounded and a pathological one must grow.
fn consistent(cell: &PhaseCell) -> bool {
    match cell.analytic {
        AnalyticClass::SobolevWellposed => cell.empirical == EmpiricalClass::Bounded,
        AnalyticClass::Pathological => cell.empirical == EmpiricalClass::Growing,
        AnalyticClass::GevreyWellposed | AnalyticClass::Borderline => true,
    }
}

pub fn run(ctx: &Context) -> Outcome {
    let cfg: PhaseConfig = io::load(&ctx.config)?;
    cfg.validate().map_err(Failure::config)?;
    let cells = phase_diagram(&cfg)?;
    write_phase_csv(&cells, ctx.out.file("phase.csv")?)?;
    let inconsistent: Vec<(f64, f64)> =
        cells.iter().filter(|c| !consistent(c)).map(|c| (c.k_plus_alpha, c.sigma)).collect();
    ctx.out.json("phase.json", &Output { config: &cfg, inconsistent: inconsistent.clone(), cells: &cells })?;
    if !inconsistent.is_empty() {
        return Err(Failure::Verification(format!("measured growth contradicts the class at {inconsistent:?}")));
    }
    Ok(())
}
