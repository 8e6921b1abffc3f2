use std::path::Path;

use einlab_core::efld;
use einlab_core::generators::{bump_tensor, Bump};
use einlab_core::spectral::sobolev_norm;
use einlab_core::tensor_grid::TensorField;
use serde::Serialize;
use serde_json::json;

use super::CommandResult;
use crate::config::{GeneratorRole, GridSection, LoadedConfig};
use crate::data::{bumps, manufacture_e, rng};
use crate::error::{LabError, Outcome, Result};
use crate::report::{ensure_dir, out_path, write_json, Report, ReportHeader};

pub const REPORT_FILE: &str = "manufacture_report.json";
pub const E_FILE: &str = "e.efld";
pub const H_STAR_FILE: &str = "h_star.efld";

#[derive(Debug, Serialize)]
struct ManufactureBody {
    grid: GridSection,
    bumps: Vec<Bump>,
    /// `‖h*‖_{s,t}`.
    h_star_norm: f64,
    /// `‖e‖_{s,t}`.
    e_norm: f64,
    e_max_abs: f64,
    files: Vec<String>,
}

pub fn run(loaded: &LoadedConfig, out: &Path) -> Result<CommandResult> {
    loaded.require_hypotheses()?;
    let config = &loaded.config;
    if config.generator.role != GeneratorRole::Manufactured || config.generator.e_file.is_some() {
        return Err(LabError::Config(
            "manufacture needs generator.role = \"manufactured\" and no e_file".into(),
        ));
    }
    let grid = config.grid()?;
    let mut rng = rng(loaded);
    let bumps = bumps(loaded, &mut rng)?;
    let h_star = bump_tensor(&grid, &bumps)?;
    let e = manufacture_e(&h_star, loaded)?;

    ensure_dir(out)?;
    let provenance = |field: &str| {
        json!({
            "field": field,
            "command": "manufacture",
            "config_hash": loaded.hash,
            "seed": config.seed,
            "kappa": config.params.kappa,
            "lambda": config.params.lambda,
        })
    };
    efld::write(&out_path(out, E_FILE), &e, provenance("e"))?;
    efld::write(&out_path(out, H_STAR_FILE), &h_star, provenance("h_star"))?;
    let (s, t) = (config.sobolev.s, config.sobolev.t);
    let body = ManufactureBody {
        grid: config.grid,
        bumps,
        h_star_norm: sobolev_norm(&h_star, s, t),
        e_norm: sobolev_norm(&e, s, t),
        e_max_abs: e.max_abs(),
        files: vec![REPORT_FILE.into(), E_FILE.into(), H_STAR_FILE.into()],
    };
    let summary = format!("‖h*‖ = {:.3e}, ‖e‖ = {:.3e}", body.h_star_norm, body.e_norm);
    write_json(
        &out_path(out, REPORT_FILE),
        &Report {
            header: ReportHeader::new("manufacture", loaded),
            body,
        },
    )?;
    Ok(CommandResult {
        outcome: Outcome::Success,
        summary,
    })
}
