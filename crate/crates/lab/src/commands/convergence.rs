use std::path::Path;

use einlab_core::gauged_solver::{solve, SolveStatus};
use einlab_core::spectral::sobolev_norm;
use serde::Serialize;

use super::CommandResult;
use crate::config::{GridSection, LoadedConfig};
use crate::data::{bumps, problem_data, rng};
use crate::error::{LabError, Outcome, Result};
use crate::probes::bianchi_residual;
use crate::report::{ensure_dir, out_path, write_json, Report, ReportHeader};

pub const CSV_FILE: &str = "convergence.csv";
pub const REPORT_FILE: &str = "convergence_report.json";

/// One resolution of a convergence study.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub points: usize,
    /// `‖𝓑_g Ein(g)‖/‖Ein(g)‖` at `g = δ + h*` for manufactured data, at the
    /// solved metric otherwise.
    pub bianchi_residual: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_residual: f64,
    pub einstein_residual: f64,
    /// `|einstein_residual − previous row's| / ‖e‖_{s,t}`; zero on the first row.
    pub einstein_change: f64,
    pub gauge_norm: f64,
    pub h_norm: f64,
    pub e_norm: f64,
}

#[derive(Debug, Serialize)]
struct ConvergenceBody<'a> {
    grid: GridSection,
    source: String,
    rows: &'a [ConvergenceRow],
    files: Vec<&'static str>,
}

pub fn study(loaded: &LoadedConfig) -> Result<(Vec<ConvergenceRow>, String)> {
    loaded.require_hypotheses()?;
    let config = &loaded.config;
    if config.generator.e_file.is_some() {
        return Err(LabError::Config(
            "convergence resamples the generator on each grid and cannot use e_file".into(),
        ));
    }
    let params = config.ein_params();
    let solve_config = config.solve_config();
    let (s, t) = (solve_config.s, solve_config.t);
    let mut rng = rng(loaded);
    let bumps = bumps(loaded, &mut rng)?;

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut source = String::new();
    for &points in &config.convergence.points {
        let grid = config.grid_with_points(points)?;
        let data = problem_data(loaded, &grid, &bumps)?;
        source = data.source.clone();
        let report = solve(&data.e, &solve_config)?;
        let probe_h = data.h_star.as_ref().unwrap_or(&report.h);
        let bianchi = bianchi_residual(probe_h, &params, false)?;
        let e_norm = sobolev_norm(&data.e, s, t);
        let einstein = report.einstein_residual.unwrap_or(f64::NAN);
        let einstein_change = match rows.last() {
            Some(prev) => {
                let diff = (einstein - prev.einstein_residual).abs();
                if e_norm > 0.0 {
                    diff / e_norm
                } else {
                    diff
                }
            }
            None => 0.0,
        };
        log::info!("N = {points}: {:?} in {} iterations", report.status, report.iterations);
        rows.push(ConvergenceRow {
            points,
            bianchi_residual: bianchi,
            status: report.status,
            iterations: report.iterations,
            final_residual: report.final_residual().unwrap_or(f64::NAN),
            einstein_residual: einstein,
            einstein_change,
            gauge_norm: report.gauge_norm.unwrap_or(f64::NAN),
            h_norm: report.h_norm,
            e_norm,
        });
    }
    Ok((rows, source))
}

pub fn write_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn run(loaded: &LoadedConfig, out: &Path) -> Result<CommandResult> {
    let (rows, source) = study(loaded)?;
    ensure_dir(out)?;
    write_csv(&out_path(out, CSV_FILE), &rows)?;
    write_json(
        &out_path(out, REPORT_FILE),
        &Report {
            header: ReportHeader::new("convergence", loaded),
            body: ConvergenceBody {
                grid: loaded.config.grid,
                source,
                rows: &rows,
                files: vec![CSV_FILE, REPORT_FILE],
            },
        },
    )?;
    let all_converged = rows.iter().all(|r| r.status == SolveStatus::Converged);
    let mut summary = String::from("    N  bianchi      iters  ‖F‖          einstein     gauge\n");
    for r in &rows {
        summary.push_str(&format!(
            "{:>5}  {:<11.3e}  {:>5}  {:<11.3e}  {:<11.3e}  {:.3e}\n",
            r.points, r.bianchi_residual, r.iterations, r.final_residual, r.einstein_residual, r.gauge_norm
        ));
    }
    let outcome = if all_converged {
        Outcome::Success
    } else {
        Outcome::SolverFailed
    };
    Ok(CommandResult { outcome, summary })
}
