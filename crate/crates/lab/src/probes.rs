//! Numerical measurements shared by the `checks` command and the acceptance
//! runner. Each probe returns raw measured values; thresholds live with the
//! callers.

use einlab_core::curvature::{
    bianchi_cal_shifted, bianchi_with_coefficient, cal_ein, cal_ein_trace_defect, ein, four_trace,
    kulkarni_nomizu, ricci_with_asymmetry, riemann, scalar_curvature, Connection,
    CurvatureSymmetries, EinParams,
};
use einlab_core::gauged_solver::{assemble_f, df0};
use einlab_core::generators::{bump_tensor, Bump, RandomBumps};
use einlab_core::riemann_image::{riemann_christoffel_map, R13Residuals};
use einlab_core::spectral::{
    algebra_probe, apply_helmholtz, embedding_constant, invert_helmholtz, sobolev_norm, L0Symbol,
    ProbeSummary,
};
use einlab_core::tensor_grid::{
    neumann_bound_check, trace, Grid, LatticeIsometry, NeumannCheck, SymTensorField, TensorField,
};
use rand::Rng;
use serde::Serialize;

use crate::error::Result;

/// `‖a − b‖_{L²} / ‖b‖_{L²}`, or the absolute difference when `b = 0`.
pub fn relative_l2<F: TensorField>(a: &F, b: &F) -> f64
where
    for<'x> &'x F: std::ops::Sub<&'x F, Output = F>,
{
    let diff = (a - b).l2_norm();
    let scale = b.l2_norm();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        value
    } else {
        value / scale
    }
}

/// Small smooth perturbations: two periodized bumps with FWHM `4Δx · 2√(2 ln 2)`
/// (standard deviation four cells) and amplitude `amplitude`.
pub fn small_bumps(grid: &Grid, amplitude: f64) -> RandomBumps {
    let fwhm = 4.0 * grid.spacing() * 2.354_820_045_030_949_4 / grid.length();
    RandomBumps {
        count: 2,
        center_fraction: 0.05,
        width_fraction: (fwhm, fwhm),
        amplitude,
    }
}

pub fn small_perturbation<R: Rng>(rng: &mut R, grid: &Grid, amplitude: f64) -> SymTensorField {
    small_bumps(grid, amplitude).tensor(rng, grid)
}

/// A centred bump with standard deviation `L/16` and fixed, generic coefficients.
pub fn reference_bump(grid: &Grid, amplitude: f64) -> Result<SymTensorField> {
    let n = grid.dim();
    let coefficients = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        1.0 + 0.3 * i as f64
                    } else {
                        0.4 / (1.0 + (i + j) as f64)
                    }
                })
                .collect()
        })
        .collect();
    let bump = Bump {
        center: vec![0.0; n],
        width: grid.length() / 16.0 * 2.354_820_045_030_949_4,
        amplitude,
        coefficients,
    };
    Ok(bump_tensor(grid, &[bump])?)
}

/// `‖F(0, 0)‖_∞`.
pub fn gauged_root(grid: &Grid, params: &EinParams) -> Result<f64> {
    let zero = SymTensorField::zeros(grid);
    Ok(assemble_f(&zero, &zero, params)?.max_abs())
}

/// Central-difference error of `F(·, 0)` at zero against `dF0`, per direction.
pub fn jacobian_errors(
    directions: &[SymTensorField],
    params: &EinParams,
    epsilon: f64,
) -> Result<Vec<f64>> {
    directions
        .iter()
        .map(|h| {
            let zero = SymTensorField::zeros(h.grid());
            let plus = assemble_f(&h.scaled(epsilon), &zero, params)?;
            let minus = assemble_f(&h.scaled(-epsilon), &zero, params)?;
            let fd = (&plus - &minus).scaled(0.5 / epsilon);
            Ok(relative_l2(&fd, &df0(h, params)?))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobianProbe {
    pub epsilons: Vec<f64>,
    /// Worst relative error over directions, per step size.
    pub max_errors: Vec<f64>,
    /// Least-squares slope of `log err` against `log ε`.
    pub slope: f64,
}

pub fn jacobian_probe(
    directions: &[SymTensorField],
    params: &EinParams,
    epsilons: &[f64],
) -> Result<JacobianProbe> {
    let max_errors = epsilons
        .iter()
        .map(|&eps| {
            Ok(jacobian_errors(directions, params, eps)?
                .into_iter()
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = epsilons.iter().map(|e| e.log10()).collect();
    let ys: Vec<f64> = max_errors.iter().map(|e| e.log10()).collect();
    Ok(JacobianProbe {
        epsilons: epsilons.to_vec(),
        slope: fit_slope(&xs, &ys),
        max_errors,
    })
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolProbe {
    /// Worst `‖dF0(h) − L̂₀h‖ / ‖h‖`.
    pub operator_gap: f64,
    /// Worst `‖L̂₀⁻¹ L̂₀ h − h‖ / ‖h‖`.
    pub round_trip: f64,
}

pub fn symbol_probe(fields: &[SymTensorField], params: &EinParams) -> Result<SymbolProbe> {
    let mut probe = SymbolProbe {
        operator_gap: 0.0,
        round_trip: 0.0,
    };
    for h in fields {
        let symbol = L0Symbol::new(h.grid(), params.kappa, params.lambda)?;
        let applied = symbol.apply(h);
        let scale = h.l2_norm();
        probe.operator_gap = probe
            .operator_gap
            .max(relative((&df0(h, params)? - &applied).l2_norm(), scale));
        probe.round_trip = probe
            .round_trip
            .max(relative((&symbol.solve(&applied) - h).l2_norm(), scale));
    }
    Ok(probe)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderProbe {
    /// Coefficient of `|ξ|²` in the conformal eigenvalue `α`.
    pub leading_coefficient: f64,
    pub min_alpha: Option<f64>,
    /// `max |ξ|²/α(ξ)` over the grid's modes.
    pub max_order_ratio: Option<f64>,
    /// Why the symbol could not be formed, if it could not.
    pub degenerate: Option<String>,
}

pub fn order_probe(grid: &Grid, params: &EinParams) -> Result<OrderProbe> {
    let n = grid.dim() as f64;
    let leading =
        (1.0 + 2.0 * (n - 1.0) * params.kappa) / (2.0 * params.one_plus_kappa_n());
    Ok(match L0Symbol::new(grid, params.kappa, params.lambda) {
        Ok(symbol) => OrderProbe {
            leading_coefficient: leading,
            min_alpha: Some(symbol.min_alpha()),
            max_order_ratio: Some(symbol.max_order_ratio()),
            degenerate: None,
        },
        Err(err @ einlab_core::Error::SymbolDegenerate { .. }) => OrderProbe {
            leading_coefficient: leading,
            min_alpha: None,
            max_order_ratio: None,
            degenerate: Some(err.to_string()),
        },
        Err(err) => return Err(err.into()),
    })
}

/// Pointwise algebraic identities of the curvature module at `δ + h`, each
/// as a relative max-abs residual.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityProbe {
    /// `Tr_g Ein − [(1+nκ)R + nΛ]`.
    pub trace_ein: f64,
    /// `Tr_g 𝓔in − [a(n−2)+1] Ein`.
    pub trace_cal_ein: f64,
    pub riemann_symmetries: f64,
    /// Symmetries of `h ⊼ Ric` and of `𝓔in`.
    pub kulkarni_symmetries: f64,
    /// `g^{ik} R_{ijkl}` against the directly assembled Ricci tensor.
    pub ricci_contraction: f64,
    pub r13: f64,
    /// The three `ℛ¹₃` residuals in absolute terms.
    pub r13_parts: R13Residuals,
}

pub fn identity_probe(h: &SymTensorField, params: &EinParams) -> Result<IdentityProbe> {
    let n = h.grid().dim() as f64;
    let conn = Connection::from_perturbation(h)?;
    let ein_g = ein(&conn, params);
    let tr = trace(conn.metric(), &ein_g);
    let r = scalar_curvature(&conn);
    let trace_ein = tr
        .values()
        .iter()
        .zip(r.values())
        .map(|(a, b)| (a - ((1.0 + n * params.kappa) * b + n * params.lambda)).abs())
        .fold(0.0, f64::max);

    let (tr_cal, scaled_ein) = cal_ein_trace_defect(&conn, params);
    let riem = riemann(&conn);
    let ric = ricci_with_asymmetry(&conn);
    let contraction = four_trace(conn.metric(), &riem);
    let kn = CurvatureSymmetries::of(&kulkarni_nomizu(h, &ric.ricci))
        .worst_relative()
        .max(CurvatureSymmetries::of(&cal_ein(&conn, params)).worst_relative());
    let tau = riemann_christoffel_map(h, params)?;
    let parts = R13Residuals::of(&tau);
    Ok(IdentityProbe {
        trace_ein: relative(trace_ein, tr.max_abs()),
        trace_cal_ein: relative(tr_cal.max_abs_diff(&scaled_ein), scaled_ein.max_abs()),
        riemann_symmetries: CurvatureSymmetries::of(&riem).worst_relative(),
        kulkarni_symmetries: kn,
        ricci_contraction: relative(contraction.max_abs_diff(&ric.ricci), ric.ricci.max_abs()),
        r13: parts.worst_relative(),
        r13_parts: parts,
    })
}

/// Commutation of `Ein` and the Riemann–Christoffel map with a lattice
/// isometry that reverses the axis order and reflects the first axis.
#[derive(Clone, Debug, Serialize)]
pub struct NaturalityProbe {
    pub ein: f64,
    pub r13: f64,
}

pub fn naturality_probe(h: &SymTensorField, params: &EinParams) -> Result<NaturalityProbe> {
    let n = h.grid().dim();
    let mut reflect = vec![false; n];
    reflect[0] = true;
    let iso = LatticeIsometry::new((0..n).rev().collect(), reflect)?;
    let moved = iso.pull_back_sym(h);
    let e = ein(&Connection::from_perturbation(h)?, params);
    let e_moved = ein(&Connection::from_perturbation(&moved)?, params);
    let tau = riemann_christoffel_map(h, params)?;
    let tau_moved = riemann_christoffel_map(&moved, params)?;
    Ok(NaturalityProbe {
        ein: relative(e_moved.max_abs_diff(&iso.pull_back_sym(&e)), e.max_abs()),
        r13: relative(tau_moved.max_abs_diff(&iso.pull_back_r13(&tau)), tau.max_abs()),
    })
}

/// `‖𝓑_g(Ein(g))‖_{L²} / ‖Ein(g)‖_{L²}` for `g = δ + h`, with the `Λδ` part of
/// `Ein(g)` handled in closed form. With `corrupt`, the trace coefficient of
/// `𝓑` has its sign flipped.
pub fn bianchi_residual(h: &SymTensorField, params: &EinParams, corrupt: bool) -> Result<f64> {
    let conn = Connection::from_perturbation(h)?;
    let e = ein(&conn, params);
    let residual = if corrupt {
        bianchi_with_coefficient(&conn, &e, -params.bianchi_trace_coefficient())
    } else {
        let shifted = &e - &SymTensorField::delta(h.grid(), params.lambda);
        bianchi_cal_shifted(&conn, &shifted, params)?
    };
    Ok(relative(residual.l2_norm(), e.l2_norm()))
}

/// `max |(Δ + C)⁻¹(Δ + C) u − u| / max |u|` over the given fields.
pub fn helmholtz_round_trip(fields: &[SymTensorField], shift: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for h in fields {
        let u = h.flat_trace();
        let back = invert_helmholtz(&apply_helmholtz(&u, shift), shift)?;
        worst = worst.max(relative(back.max_abs_diff(&u), u.max_abs()));
    }
    Ok(worst)
}

pub fn algebra_constant(grid: &Grid, s: f64, t: f64, samples: usize, seed: u64) -> Result<ProbeSummary> {
    Ok(algebra_probe(grid, s, t, samples, seed)?)
}

/// `‖u‖_{0,0} / ‖u‖_{s,t}` over random bumps; never above one since both
/// weights are at least one.
pub fn embedding_summary(grid: &Grid, s: f64, t: f64, samples: usize, seed: u64) -> Result<ProbeSummary> {
    Ok(embedding_constant(grid, (s, t), (0.0, 0.0), samples, seed)?)
}

/// Neumann-series bound for perturbations rescaled to the given fractions of
/// the radius `1/(2Ĉ)` in `H^{s+2,t}`.
pub fn neumann_probe(
    shapes: &[SymTensorField],
    fractions: &[f64],
    s: f64,
    t: f64,
    algebra_constant: f64,
) -> Result<Vec<NeumannCheck>> {
    let radius = 1.0 / (2.0 * algebra_constant);
    let mut out = Vec::new();
    for shape in shapes {
        let norm = sobolev_norm(shape, s + 2.0, t);
        for &fraction in fractions {
            let h = shape.scaled(fraction * radius / norm);
            out.push(neumann_bound_check(&h, s, t, algebra_constant)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn slope_of_a_power_law() {
        let xs: Vec<f64> = [1e-2f64, 1e-3, 1e-4].iter().map(|e| e.log10()).collect();
        let ys: Vec<f64> = [1e-2f64, 1e-3, 1e-4].iter().map(|e| (3.0 * e * e).log10()).collect();
        assert!((fit_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn relative_l2_falls_back_to_absolute() {
        let grid = Grid::new(2, 8, 4.0).unwrap();
        let zero = SymTensorField::zeros(&grid);
        let one = SymTensorField::delta(&grid, 1.0);
        assert_eq!(relative_l2(&one, &one), 0.0);
        assert_eq!(relative_l2(&one, &zero), one.l2_norm());
    }

    #[test]
    fn small_perturbations_are_reproducible_and_small() {
        let grid = Grid::new(3, 16, 10.0).unwrap();
        let a = small_perturbation(&mut ChaCha8Rng::seed_from_u64(3), &grid, 1e-2);
        let b = small_perturbation(&mut ChaCha8Rng::seed_from_u64(3), &grid, 1e-2);
        assert_eq!(relative_l2(&a, &b), 0.0);
        assert!(a.max_abs() <= 2e-2 * 1.01);
    }

    #[test]
    fn zero_perturbation_has_no_bianchi_residual() {
        let grid = Grid::new(3, 16, 10.0).unwrap();
        let h = SymTensorField::zeros(&grid);
        let r = bianchi_residual(&h, &EinParams::new(3, 0.1, 1.0), false).unwrap();
        assert_eq!(r, 0.0);
    }
}
