use std::path::Path;

use einlab_core::curvature::EinParams;
use einlab_core::efld;
use einlab_core::gauged_solver::{solve, SolveReport, SolveStatus};
use einlab_core::spectral::sobolev_norm;
use serde::Serialize;
use serde_json::json;

use super::CommandResult;
use crate::config::{GridSection, LoadedConfig};
use crate::data::{bumps, problem_data, rng};
use crate::error::{Outcome, Result};
use crate::report::{ensure_dir, out_path, write_json, Report, ReportHeader};

pub const REPORT_FILE: &str = "solve_report.json";
pub const H_FILE: &str = "h.efld";

#[derive(Debug, Serialize)]
struct SolveBody<'a> {
    grid: GridSection,
    params: EinParams,
    source: String,
    /// `‖e‖_{s,t}`.
    e_norm: f64,
    solve: &'a SolveReport,
    files: Vec<String>,
}

pub fn run(loaded: &LoadedConfig, out: &Path) -> Result<CommandResult> {
    loaded.require_hypotheses()?;
    let config = &loaded.config;
    let grid = config.grid()?;
    let mut rng = rng(loaded);
    let bumps = bumps(loaded, &mut rng)?;
    let data = problem_data(loaded, &grid, &bumps)?;
    let solve_config = config.solve_config();
    let report = solve(&data.e, &solve_config)?;

    ensure_dir(out)?;
    let mut files = vec![REPORT_FILE.to_string()];
    if config.output.dump_fields {
        efld::write(
            &out_path(out, H_FILE),
            &report.h,
            json!({
                "field": "h",
                "command": "solve",
                "config_hash": loaded.hash,
                "status": report.status,
            }),
        )?;
        files.push(H_FILE.into());
    }
    let body = SolveBody {
        grid: config.grid,
        params: solve_config.params,
        source: data.source,
        e_norm: sobolev_norm(&data.e, solve_config.s, solve_config.t),
        solve: &report,
        files,
    };
    write_json(
        &out_path(out, REPORT_FILE),
        &Report {
            header: ReportHeader::new("solve", loaded),
            body,
        },
    )?;

    let outcome = if report.status == SolveStatus::Converged {
        Outcome::Success
    } else {
        Outcome::SolverFailed
    };
    let summary = format!(
        "status {:?} after {} iterations; ‖F‖ = {:.3e}; ‖Ein(δ+h) − E‖ = {:.3e}; ‖ω‖ = {:.3e}",
        report.status,
        report.iterations,
        report.final_residual().unwrap_or(f64::NAN),
        report.einstein_residual.unwrap_or(f64::NAN),
        report.gauge_norm.unwrap_or(f64::NAN),
    );
    Ok(CommandResult { outcome, summary })
}
