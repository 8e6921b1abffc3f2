mod common;

use std::f64::consts::PI;

use common::{smooth_scalar, smooth_tensor};
use einlab_core::curvature::{bianchi_cal, bianchi_flat, ein, Connection, EinParams};
use einlab_core::gauged_solver::{
    assemble_f, d_bianchi_flat, df0, einstein_residual, gauge_residual, solve, SolveConfig,
    SolveMode, SolveStatus,
};
use einlab_core::spectral::{gradient, L0Symbol};
use einlab_core::tensor_grid::{Grid, ScalarField, SymTensorField, TensorField};
use einlab_core::Error;

fn manufactured(grid: &Grid, params: &EinParams, amplitude: f64) -> SymTensorField {
    let h_star = smooth_tensor(grid, amplitude);
    let conn = Connection::from_perturbation(&h_star).unwrap();
    &ein(&conn, params) - &SymTensorField::delta(grid, params.lambda)
}

#[test]
fn gauged_operator_vanishes_at_origin() {
    for &(kappa, lambda) in &[(0.0, 1.0), (-0.2, 1.0), (0.5, 2.0)] {
        for n in [2, 3] {
            let grid = Grid::new(n, 12, 6.0).unwrap();
            let zero = SymTensorField::zeros(&grid);
            let f = assemble_f(&zero, &zero, &EinParams::new(n, kappa, lambda)).unwrap();
            assert!(f.max_abs() <= 1e-13);
        }
    }
}

#[test]
fn traceless_block_is_half_shifted_laplacian() {
    let grid = Grid::new(3, 16, 2.0 * PI).unwrap();
    let lambda = 1.5;
    let params = EinParams::new(3, 0.3, lambda);
    let wave = ScalarField::from_fn(&grid, |x| (x[0] + 2.0 * x[2]).cos());
    let h = SymTensorField::from_fn(&grid, |p, i, j| match (i, j) {
        (0, 0) => wave.values()[p],
        (1, 1) => -wave.values()[p],
        (0, 2) => 0.5 * wave.values()[p],
        _ => 0.0,
    });
    let expected = h.scaled(0.5 * (5.0 + 2.0 * lambda));
    assert!(df0(&h, &params).unwrap().max_abs_diff(&expected) < 1e-13);
}

#[test]
fn conformal_block_matches_symbol() {
    let n = 3;
    let grid = Grid::new(n, 16, 2.0 * PI).unwrap();
    let (kappa, lambda) = (0.3, 1.5);
    let params = EinParams::new(n, kappa, lambda);
    let xi = [1.0, 0.0, 2.0];
    let u = ScalarField::from_fn(&grid, |x| (x[0] + 2.0 * x[2]).cos());
    let out = df0(&SymTensorField::conformal(&u), &params).unwrap();
    let xi2 = 5.0;
    let one_kn = 1.0 + kappa * n as f64;
    let coupling = (n as f64 - 2.0) * kappa / (2.0 * one_kn);
    let expected = SymTensorField::from_fn(&grid, |p, i, j| {
        let diag = if i == j { 0.5 * xi2 + lambda / one_kn } else { 0.0 };
        (diag + coupling * n as f64 * xi[i] * xi[j]) * u.values()[p]
    });
    assert!(out.max_abs_diff(&expected) < 1e-12);
    // the trace evolves alone with eigenvalue α(ξ)
    let alpha = L0Symbol::new(&grid, kappa, lambda).unwrap().alpha(xi2);
    let tr = out.flat_trace();
    assert!(tr.max_abs_diff(&u.scaled(n as f64 * alpha)) < 1e-12);
}

#[test]
fn physical_and_fourier_assembly_agree() {
    let grid = Grid::new(3, 16, 8.0).unwrap();
    let params = EinParams::new(3, -0.2, 1.0);
    let symbol = L0Symbol::new(&grid, params.kappa, params.lambda).unwrap();
    let h = smooth_tensor(&grid, 1.0);
    let gap = (&df0(&h, &params).unwrap() - &symbol.apply(&h)).l2_norm() / h.l2_norm();
    assert!(gap < 1e-12, "{gap}");
    let back = symbol.solve(&symbol.apply(&h));
    assert!((&back - &h).l2_norm() / h.l2_norm() < 1e-12);
}

#[test]
fn jacobian_central_difference_is_second_order() {
    let grid = Grid::new(3, 16, 8.0).unwrap();
    let params = EinParams::new(3, 0.5, 2.0);
    let h = smooth_tensor(&grid, 1.0);
    let zero = SymTensorField::zeros(&grid);
    let exact = df0(&h, &params).unwrap();
    let error = |eps: f64| {
        let plus = assemble_f(&h.scaled(eps), &zero, &params).unwrap();
        let minus = assemble_f(&h.scaled(-eps), &zero, &params).unwrap();
        (&(&plus - &minus).scaled(0.5 / eps) - &exact).l2_norm() / exact.l2_norm()
    };
    let (coarse, fine) = (error(1e-3), error(1e-4));
    assert!(fine < 1e-7, "{fine}");
    let slope = (coarse / fine).log10();
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn bianchi_linearization_at_multiple_of_delta() {
    let grid = Grid::new(3, 16, 8.0).unwrap();
    let lambda = 1.3;
    let params = EinParams::new(3, 0.25, lambda);
    let h = smooth_tensor(&grid, 1.0);
    let e = SymTensorField::delta(&grid, lambda);
    let got = d_bianchi_flat(&e, &h, &params).unwrap();
    let expected = bianchi_flat(&h)
        .scaled(-lambda)
        .axpy(params.gauge_coupling() * lambda, &gradient(&h.flat_trace()));
    assert!(got.max_abs_diff(&expected) < 1e-13 * expected.max_abs().max(1.0));
}

#[test]
fn bianchi_linearization_matches_central_difference() {
    let grid = Grid::new(3, 16, 8.0).unwrap();
    let params = EinParams::new(3, 0.25, 1.0);
    let h = smooth_tensor(&grid, 1.0);
    let big_e = &SymTensorField::delta(&grid, 1.0) + &smooth_tensor(&grid, 0.3).traceless_part();
    let eps = 1e-4;
    let at = |s: f64| {
        let conn = Connection::from_perturbation(&h.scaled(s)).unwrap();
        bianchi_cal(&conn, &big_e, &params).unwrap()
    };
    let fd = (&at(eps) - &at(-eps)).scaled(0.5 / eps);
    let exact = d_bianchi_flat(&big_e, &h, &params).unwrap();
    let err = (&fd - &exact).l2_norm() / exact.l2_norm();
    assert!(err < 1e-7, "{err}");
}

#[test]
fn gauge_witness_at_flat_metric_is_bianchi_of_e() {
    let grid = Grid::new(3, 16, 8.0).unwrap();
    let params = EinParams::new(3, 0.1, 2.0);
    let e = smooth_tensor(&grid, 0.1);
    let zero = SymTensorField::zeros(&grid);
    let gauge = gauge_residual(&zero, &e, &params, 2.0, 1.0).unwrap();
    let flat = Connection::from_perturbation(&zero).unwrap();
    let expected = bianchi_cal(&flat, &e, &params).unwrap().scaled(0.5);
    assert!(gauge.omega.max_abs_diff(&expected) < 1e-14);
    assert!(gauge.omega_norm > 0.0);
    let trivial = gauge_residual(&zero, &zero, &params, 2.0, 1.0).unwrap();
    assert_eq!(trivial.omega.max_abs(), 0.0);
}

#[test]
fn zero_data_solves_in_one_iteration() {
    let grid = Grid::new(3, 12, 6.0).unwrap();
    let config = SolveConfig::new(EinParams::new(3, 0.0, 1.0), 2.0, 1.0);
    let report = solve(&SymTensorField::zeros(&grid), &config).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    assert_eq!(report.iterations, 1);
    assert_eq!(report.h.max_abs(), 0.0);
}

#[test]
fn negative_lambda_is_rejected() {
    let grid = Grid::new(3, 12, 6.0).unwrap();
    let config = SolveConfig::new(EinParams::new(3, 0.0, -1.0), 2.0, 1.0);
    let err = solve(&SymTensorField::zeros(&grid), &config).unwrap_err();
    assert!(matches!(err, Error::LambdaNonPositive(_)), "{err}");
}

#[test]
fn manufactured_curvature_is_recovered() {
    let grid = Grid::new(3, 24, 15.0).unwrap();
    for kappa in [0.0, -0.2, 0.5] {
        let params = EinParams::new(3, kappa, 1.0);
        let e = manufactured(&grid, &params, 1e-2);
        let mut config = SolveConfig::new(params, 2.0, 1.0);
        config.max_iter = 25;
        let report = solve(&e, &config).unwrap();
        assert_eq!(report.status, SolveStatus::Converged, "κ = {kappa}");
        assert!(report.final_residual().unwrap() <= 1e-10);
        // recomputed from the curvature module alone
        let residual = einstein_residual(&report.h, &e, &params, 2.0, 1.0).unwrap();
        assert!(residual <= 1e-8, "κ = {kappa}: {residual}");
        let gauge = gauge_residual(&report.h, &e, &params, 2.0, 1.0).unwrap();
        assert!(gauge.omega_norm <= 1e-8 && gauge.p_omega_norm <= 1e-8);
    }
}

#[test]
fn newton_krylov_converges_in_fewer_outer_steps() {
    let grid = Grid::new(3, 16, 12.0).unwrap();
    let params = EinParams::new(3, 0.1, 1.0);
    let e = manufactured(&grid, &params, 2e-2);
    let picard = solve(&e, &SolveConfig::new(params, 2.0, 1.0)).unwrap();
    let mut config = SolveConfig::new(params, 2.0, 1.0);
    config.mode = SolveMode::NewtonKrylov;
    let newton = solve(&e, &config).unwrap();
    assert_eq!(newton.status, SolveStatus::Converged);
    assert!(newton.residual_history.len() <= picard.residual_history.len());
    assert!(newton.einstein_residual.unwrap() <= 1e-8);
}

#[test]
fn iteration_budget_is_reported() {
    let grid = Grid::new(3, 16, 12.0).unwrap();
    let params = EinParams::new(3, 0.0, 1.0);
    let e = manufactured(&grid, &params, 2e-2);
    let mut config = SolveConfig::new(params, 2.0, 1.0);
    config.max_iter = 2;
    let report = solve(&e, &config).unwrap();
    assert_eq!(report.status, SolveStatus::MaxIter);
    assert_eq!(report.iterations, 2);
    assert!(!report.verified);
}

#[test]
fn large_data_does_not_converge() {
    let grid = Grid::new(3, 16, 12.0).unwrap();
    let params = EinParams::new(3, 0.0, 1.0);
    let e = smooth_tensor(&grid, 20.0);
    let report = solve(&e, &SolveConfig::new(params, 2.0, 1.0)).unwrap();
    assert!(report.smallness.exceeded);
    assert_ne!(report.status, SolveStatus::Converged);
    assert!(report.failure.is_some() || report.status == SolveStatus::MaxIter);
}

#[test]
fn near_critical_kappa_still_converges_for_smooth_data() {
    let grid = Grid::new(3, 16, 12.0).unwrap();
    let params = EinParams::new(3, -0.25 + 1e-3, 1.0);
    let phi = smooth_scalar(&grid, 1e-3);
    let h_star = SymTensorField::conformal(&phi);
    let conn = Connection::from_perturbation(&h_star).unwrap();
    let e = &ein(&conn, &params) - &SymTensorField::delta(&grid, 1.0);
    let mut config = SolveConfig::new(params, 2.0, 1.0);
    config.max_iter = 200;
    let report = solve(&e, &config).unwrap();
    assert_eq!(report.status, SolveStatus::Converged, "{:?}", report.residual_history);
}
