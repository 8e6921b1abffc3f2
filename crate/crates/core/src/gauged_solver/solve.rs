use serde::{Deserialize, Serialize};

use crate::curvature::{ein, Connection, EinParams};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, L0Symbol};
use crate::tensor_grid::{SymTensorField, TensorField};

use super::operator::{assemble_f, gauge_residual, target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// `h ← h − damping · L₀⁻¹ F(h, e)` with the frozen linearization.
    Picard,
    /// Inexact Newton, matrix-free GMRES preconditioned by `L₀⁻¹`.
    NewtonKrylov,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub params: EinParams,
    pub s: f64,
    pub t: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub mode: SolveMode,
    /// `‖e‖_{s+2,t}` above `smallness · Λ` is flagged, not refused.
    pub smallness: f64,
}

impl SolveConfig {
    pub fn new(params: EinParams, s: f64, t: f64) -> Self {
        Self {
            params,
            s,
            t,
            tol_residual: 1e-10,
            max_iter: 50,
            damping: 1.0,
            mode: SolveMode::Picard,
            smallness: 0.1,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.params.dim != dim {
            return bad(format!(
                "parameters are for n = {} but the field lives in n = {dim}",
                self.params.dim
            ));
        }
        if !(self.s > dim as f64 / 2.0) {
            return bad(format!("s > n/2 is required (s = {}, n = {dim})", self.s));
        }
        if !(self.t >= 0.0) {
            return bad(format!("t >= 0 is required (t = {})", self.t));
        }
        if !(self.tol_residual > 0.0) {
            return bad(format!("tol_residual must be positive (got {})", self.tol_residual));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping must lie in (0, 1] (got {})", self.damping));
        }
        if !(self.smallness > 0.0) {
            return bad(format!("smallness must be positive (got {})", self.smallness));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    Diverged,
    MaxIter,
    SymbolDegenerate,
    NonRiemannian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Smallness {
    /// `‖e‖_{s+2,t}`.
    pub norm: f64,
    pub threshold: f64,
    pub exceeded: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub h: SymTensorField,
    pub status: SolveStatus,
    pub mode: SolveMode,
    /// Number of evaluations of `F` along the iteration.
    pub iterations: usize,
    /// Inner GMRES iterations (Newton–Krylov only).
    pub linear_iterations: usize,
    /// `‖F(h_k, e)‖_{s,t}`.
    pub residual_history: Vec<f64>,
    /// `‖F(h_k, e)‖_{L²}`.
    pub residual_history_l2: Vec<f64>,
    /// `‖h‖_{s,t}` of the returned iterate.
    pub h_norm: f64,
    /// `‖ω‖_{s+1,t}`.
    pub gauge_norm: Option<f64>,
    /// `‖P_{δ+h} ω‖_{s−1,t}`.
    pub gauge_p_norm: Option<f64>,
    /// `‖Ein(δ+h) − (Λδ + e)‖_{s,t}`, recomputed from the curvature operators.
    pub einstein_residual: Option<f64>,
    /// Both curvature and gauge residuals within `10 · tol_residual`.
    pub verified: bool,
    pub smallness: Smallness,
    pub failure: Option<String>,
}

impl SolveReport {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }
}

/// `‖Ein(δ+h) − (Λδ + e)‖_{s,t}`, using only the curvature operators.
pub fn einstein_residual(h: &SymTensorField, e: &SymTensorField, params: &EinParams, s: f64, t: f64) -> Result<f64> {
    let conn = Connection::from_perturbation(h)?;
    let defect = &ein(&conn, params) - &target(e, params);
    Ok(sobolev_norm(&defect, s, t))
}

/// Solves `F(h, e) = 0` starting from `h = 0`.
///
/// Hypothesis failures that make `F` undefined (`Λ ≤ 0`, `κ = −1/n`) and
/// invalid configurations are errors; everything that happens during the
/// iteration is reported through [`SolveStatus`].
pub fn solve(e: &SymTensorField, config: &SolveConfig) -> Result<SolveReport> {
    let grid = *e.grid();
    config.validate(grid.dim())?;
    let params = &config.params;
    params.require_gauged()?;
    let (s, t) = (config.s, config.t);

    let e_norm = sobolev_norm(e, s + 2.0, t);
    let threshold = config.smallness * params.lambda;
    let smallness = Smallness {
        norm: e_norm,
        threshold,
        exceeded: e_norm > threshold,
    };
    if smallness.exceeded {
        log::warn!("‖e‖_{{s+2,t}} = {e_norm:e} exceeds the smallness threshold {threshold:e}");
    }

    let mut report = SolveReport {
        h: SymTensorField::zeros(&grid),
        status: SolveStatus::MaxIter,
        mode: config.mode,
        iterations: 0,
        linear_iterations: 0,
        residual_history: Vec::new(),
        residual_history_l2: Vec::new(),
        h_norm: 0.0,
        gauge_norm: None,
        gauge_p_norm: None,
        einstein_residual: None,
        verified: false,
        smallness,
        failure: None,
    };

    let symbol = match L0Symbol::new(&grid, params.kappa, params.lambda) {
        Ok(symbol) => symbol,
        Err(err @ Error::SymbolDegenerate { .. }) => {
            report.status = SolveStatus::SymbolDegenerate;
            report.failure = Some(err.to_string());
            return Ok(report);
        }
        Err(err) => return Err(err),
    };

    let mut h = SymTensorField::zeros(&grid);
    let mut increases = 0;
    loop {
        let f = match assemble_f(&h, e, params) {
            Ok(f) => f,
            Err(err @ Error::NonRiemannian { .. }) => {
                report.status = SolveStatus::NonRiemannian;
                report.failure = Some(format!(
                    "{err}; iterate sup norm {:e}, ‖h‖_(s,t) {:e}",
                    h.max_abs(),
                    sobolev_norm(&h, s, t)
                ));
                break;
            }
            Err(err) => return Err(err),
        };
        report.iterations += 1;
        let r = sobolev_norm(&f, s, t);
        let previous = report.residual_history.last().copied();
        report.residual_history.push(r);
        report.residual_history_l2.push(f.l2_norm());
        log::debug!("iteration {}: ‖F‖ = {r:e}", report.iterations);

        if !r.is_finite() {
            report.status = SolveStatus::Diverged;
            report.failure = Some("residual is not finite".into());
            break;
        }
        if r <= config.tol_residual {
            report.status = SolveStatus::Converged;
            break;
        }
        match previous {
            Some(prev) if r > prev => increases += 1,
            _ => increases = 0,
        }
        if increases >= 3 {
            report.status = SolveStatus::Diverged;
            report.failure = Some("residual increased on three consecutive steps".into());
            break;
        }
        if report.iterations >= config.max_iter {
            report.status = SolveStatus::MaxIter;
            break;
        }

        let step = match config.mode {
            SolveMode::Picard => symbol.solve(&f),
            SolveMode::NewtonKrylov => {
                let forcing = (0.1 * r).min(1e-2).max(1e-8);
                let outcome = newton_step(&h, e, params, &symbol, &f, forcing);
                match outcome {
                    Ok((step, inner)) => {
                        report.linear_iterations += inner;
                        step
                    }
                    Err(err @ Error::NonRiemannian { .. }) => {
                        // finite-difference probe left the cone; fall back to the frozen step
                        log::warn!("Jacobian probe failed ({err}); taking a Picard step");
                        symbol.solve(&f)
                    }
                    Err(err) => return Err(err),
                }
            }
        };
        h = h.axpy(-config.damping, &step);
    }

    if report.status != SolveStatus::NonRiemannian {
        report.einstein_residual = Some(einstein_residual(&h, e, params, s, t)?);
        let gauge = gauge_residual(&h, e, params, s, t)?;
        report.gauge_norm = Some(gauge.omega_norm);
        report.gauge_p_norm = Some(gauge.p_omega_norm);
        let bound = 10.0 * config.tol_residual;
        report.verified = report.status == SolveStatus::Converged
            && report.einstein_residual.is_some_and(|v| v <= bound)
            && gauge.omega_norm <= bound;
    }
    report.h_norm = sobolev_norm(&h, s, t);
    report.h = h;
    Ok(report)
}

const GMRES_RESTART: usize = 30;
const GMRES_MAX_INNER: usize = 120;

/// Solves `DF(h) d = F` approximately. The Jacobian acts through central
/// differences of `F`; the Krylov space is built on `DF(h) L₀⁻¹`.
fn newton_step(
    h: &SymTensorField,
    e: &SymTensorField,
    params: &EinParams,
    symbol: &L0Symbol,
    f: &SymTensorField,
    rel_tol: f64,
) -> Result<(SymTensorField, usize)> {
    let h_scale = 1.0 + h.l2_norm();
    let jacobian = |v: &SymTensorField| -> Result<SymTensorField> {
        let norm = v.l2_norm();
        if norm == 0.0 {
            return Ok(SymTensorField::zeros(v.grid()));
        }
        let eps = 1e-5 * h_scale / norm;
        let plus = assemble_f(&h.axpy(eps, v), e, params)?;
        let minus = assemble_f(&h.axpy(-eps, v), e, params)?;
        Ok((&plus - &minus).scaled(0.5 / eps))
    };
    let operator = |y: &SymTensorField| jacobian(&symbol.solve(y));
    let (y, inner) = gmres(operator, f, rel_tol, GMRES_RESTART, GMRES_MAX_INNER)?;
    Ok((symbol.solve(&y), inner))
}

/// Restarted GMRES for `A x = b` from `x = 0`, in the `L²` inner product.
fn gmres(
    apply: impl Fn(&SymTensorField) -> Result<SymTensorField>,
    b: &SymTensorField,
    rel_tol: f64,
    restart: usize,
    max_inner: usize,
) -> Result<(SymTensorField, usize)> {
    let grid = *b.grid();
    let b_norm = b.l2_norm();
    let mut x = SymTensorField::zeros(&grid);
    if b_norm == 0.0 {
        return Ok((x, 0));
    }
    let target = rel_tol * b_norm;
    let mut total = 0;
    loop {
        let r = b - &apply(&x)?;
        let beta = r.l2_norm();
        if beta <= target || total >= max_inner {
            return Ok((x, total));
        }
        let mut basis = vec![r.scaled(1.0 / beta)];
        // Hessenberg columns, rotated in place
        let mut hess: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<(f64, f64)> = Vec::new();
        let mut g = vec![beta];
        for j in 0..restart {
            total += 1;
            let mut w = apply(&basis[j])?;
            let mut col = Vec::with_capacity(j + 2);
            for v in &basis {
                let hij = w.l2_dot(v);
                w = w.axpy(-hij, v);
                col.push(hij);
            }
            let w_norm = w.l2_norm();
            col.push(w_norm);
            for (i, &(c, s)) in cs.iter().enumerate() {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = c * a + s * bb;
                col[i + 1] = -s * a + c * bb;
            }
            let (a, bb) = (col[j], col[j + 1]);
            let rho = a.hypot(bb);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, bb / rho) };
            col[j] = rho;
            col[j + 1] = 0.0;
            cs.push((c, s));
            let gj = g[j];
            g[j] = c * gj;
            g.push(-s * gj);
            hess.push(col);
            let converged = g[j + 1].abs() <= target;
            if converged || w_norm == 0.0 || total >= max_inner || j + 1 == restart {
                break;
            }
            basis.push(w.scaled(1.0 / w_norm));
        }
        // back substitution on the triangular system
        let k = hess.len();
        let mut coef = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for (jj, c) in coef.iter().enumerate().skip(i + 1) {
                acc -= hess[jj][i] * c;
            }
            coef[i] = acc / hess[i][i];
        }
        for (v, c) in basis.iter().zip(&coef) {
            x = x.axpy(*c, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_grid::Grid;

    #[test]
    fn gmres_solves_diagonal_system() {
        let grid = Grid::new(2, 8, 4.0).unwrap();
        let b = SymTensorField::from_fn(&grid, |p, i, j| ((p + 3 * i + j) % 7) as f64 - 3.0);
        let weights = SymTensorField::from_fn(&grid, |p, i, j| 1.0 + ((p * 5 + i + j) % 11) as f64);
        let apply = |v: &SymTensorField| -> Result<SymTensorField> {
            let comps = v
                .components()
                .iter()
                .zip(weights.components())
                .map(|(a, w)| a.iter().zip(w).map(|(x, y)| x * y).collect())
                .collect();
            SymTensorField::from_components(&grid, comps)
        };
        let (x, _) = gmres(apply, &b, 1e-12, 12, 400).unwrap();
        let r = &b - &apply(&x).unwrap();
        assert!(r.l2_norm() <= 1e-10 * b.l2_norm());
    }

    #[test]
    fn config_validation_messages() {
        let params = EinParams::new(3, 0.0, 1.0);
        assert!(SolveConfig::new(params, 2.0, 1.0).validate(3).is_ok());
        assert!(SolveConfig::new(params, 1.5, 1.0).validate(3).is_err());
        assert!(SolveConfig::new(params, 2.0, -0.5).validate(3).is_err());
        assert!(SolveConfig::new(params, 2.0, 1.0).validate(2).is_err());
        let mut config = SolveConfig::new(params, 2.0, 1.0);
        config.damping = 1.5;
        assert!(config.validate(3).is_err());
    }
}
