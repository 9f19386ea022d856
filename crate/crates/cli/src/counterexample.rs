use serde::{Deserialize, Serialize};

use strongdamp::counterexample::{
    build_coefficient, check_conditions, check_gaps, pathology_demo, select_sequences, verify_regularity,
    write_coefficient_csv, ConditionCheck, CounterexampleParams, GapCheck, PathologyOptions,
};

use crate::failure::{Failure, Outcome};
use crate::{io, Context};

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct VerifyToggles {
    #[serde(default = "yes")]
    regularity: bool,
    #[serde(default = "yes")]
    pathology: bool,
    /// Highest derivative order whose bounds are checked.
    #[serde(default = "derivative_order")]
    derivative_order: usize,
    /// Coefficient samples written to `coefficient.csv`.
    #[serde(default = "samples")]
    samples: usize,
    /// Both series must behave from this index on.
    #[serde(default = "max_onset")]
    max_onset: usize,
    /// Relative agreement of integrated and closed-form `|u_n'(s_n)|`.
    #[serde(default = "integration_tolerance")]
    integration_tolerance: f64,
}

impl Default for VerifyToggles {
    fn default() -> Self {
        VerifyToggles {
            regularity: true,
            pathology: true,
            derivative_order: derivative_order(),
            samples: samples(),
            max_onset: max_onset(),
            integration_tolerance: integration_tolerance(),
        }
    }
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterexampleConfig {
    #[serde(default)]
    params: CounterexampleParams,
    #[serde(default)]
    verify: VerifyToggles,
}

fn yes() -> bool {
    true
}

fn derivative_order() -> usize {
    3
}

fn samples() -> usize {
    4000
}

fn max_onset() -> usize {
    4
}

fn integration_tolerance() -> f64 {
    1e-6
}

#[derive(Serialize)]
struct Sequences {
    conditions: Vec<ConditionCheck>,
    gaps: Vec<GapCheck>,
}

/// `None` when the check was switched off or is not meaningful at this depth.
#[derive(Serialize)]
struct Verdicts {
    conditions: bool,
    gaps: bool,
    regularity: Option<bool>,
    pathology: Option<bool>,
    pathology_note: Option<String>,
}

impl Verdicts {
    fn failures(&self) -> Vec<&'static str> {
        let mut out = vec![];
        if !self.conditions {
            out.push("conditions");
        }
        if !self.gaps {
            out.push("gaps");
        }
        if self.regularity == Some(false) {
            out.push("regularity");
        }
        if self.pathology == Some(false) {
            out.push("pathology");
        }
        out
    }
}

pub fn run(ctx: &Context) -> Outcome {
    let cfg: CounterexampleConfig =
        if ctx.config.as_os_str().is_empty() { CounterexampleConfig::default() } else { io::load(&ctx.config)? };
    let toggles = &cfg.verify;
    let bundle = select_sequences(&cfg.params)?;
    ctx.out.json("bundle.json", &bundle)?;

    let seq = Sequences { conditions: check_conditions(&bundle), gaps: check_gaps(&bundle) };
    ctx.out.json("sequences.json", &seq)?;

    let c = build_coefficient(&bundle)?;
    write_coefficient_csv(&c, toggles.samples.max(2), ctx.out.file("coefficient.csv")?)?;

    let regularity = toggles.regularity.then(|| verify_regularity(&bundle, toggles.derivative_order));
    if let Some(r) = &regularity {
        ctx.out.json("regularity.json", r)?;
    }

    let mut pathology_note = None;
    let pathology = if toggles.pathology {
        let report = pathology_demo(&bundle, &PathologyOptions::standard(&bundle))?;
        ctx.out.json("pathology.json", &report)?;
        if bundle.n_max() >= toggles.max_onset {
            Some(report.passed(toggles.max_onset, toggles.integration_tolerance))
        } else {
            pathology_note = Some(format!("depth {} is below the onset bound {}", bundle.n_max(), toggles.max_onset));
            None
        }
    } else {
        None
    };

    let verdicts = Verdicts {
        conditions: seq.conditions.iter().all(|c| c.holds),
        gaps: seq.gaps.iter().all(|g| g.holds),
        regularity: regularity.as_ref().map(|r| r.passed()),
        pathology,
        pathology_note,
    };
    ctx.out.json("verdicts.json", &verdicts)?;
    let failures = verdicts.failures();
    if !failures.is_empty() {
        return Err(Failure::Verification(failures.join(", ")));
    }
    Ok(())
}
