use std::fs::File;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use strongdamp::spectral::{norm, read_spectral_csv, NormRecord, NormSpec};

use crate::failure::{Failure, Outcome};
use crate::{io, Context};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormsConfig {
    /// CSV with `lambda,u[,log_abs_u,sign_u]`, relative to the config file.
    vector: PathBuf,
    norms: Vec<NormSpec>,
}

#[derive(Serialize)]
struct NormsOutput {
    modes: usize,
    norms: Vec<NormRecord>,
}

pub fn run(ctx: &Context) -> Outcome {
    let cfg: NormsConfig = io::load(&ctx.config)?;
    let path = io::resolve(&io::base_dir(&ctx.config), &cfg.vector);
    let file = File::open(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let (op, v) = read_spectral_csv(file).map_err(Failure::config)?;
    let norms = cfg
        .norms
        .iter()
        .map(|spec| Ok(NormRecord::new(spec, &norm(&op, &v, spec).map_err(Failure::config)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    ctx.out.json("norms.json", &NormsOutput { modes: op.len(), norms })
}
