mod common;

use common::{smooth_scalar, smooth_tensor};
use einlab_core::curvature::{
    bianchi_b, cal_ein, christoffel, ein, four_trace, kulkarni_nomizu, ricci, riemann,
    scalar_curvature, Connection, CurvatureSymmetries, EinParams,
};
use einlab_core::spectral::{derivative, gradient};
use einlab_core::tensor_grid::{trace, Grid, Metric, ScalarField, SymTensorField, TensorField};

/// `g = e^{2φ} δ` written as a perturbation of `δ`.
fn conformal(phi: &ScalarField) -> SymTensorField {
    SymTensorField::conformal(&phi.map(|v| (2.0 * v).exp() - 1.0))
}

#[test]
fn conformal_christoffel_closed_form() {
    let grid = Grid::new(3, 24, 10.0).unwrap();
    let phi = smooth_scalar(&grid, 0.05);
    let d: Vec<ScalarField> = (0..3).map(|a| derivative(&phi, a)).collect();
    let gamma = christoffel(&Metric::new(conformal(&phi)).unwrap());
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut worst: f64 = 0.0;
    let scale = d.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
    for p in 0..grid.len() {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let expected = delta(k, i) * d[j].values()[p] + delta(k, j) * d[i].values()[p]
                        - delta(i, j) * d[k].values()[p];
                    worst = worst.max((gamma.at(p, k, i, j) - expected).abs());
                }
            }
        }
    }
    assert!(worst / scale < 1e-9, "relative error {}", worst / scale);
}

#[test]
fn conformal_ricci_closed_form() {
    let n = 3;
    let grid = Grid::new(n, 24, 10.0).unwrap();
    let phi = smooth_scalar(&grid, 0.05);
    let d: Vec<ScalarField> = (0..n).map(|a| derivative(&phi, a)).collect();
    let dd: Vec<Vec<ScalarField>> = (0..n)
        .map(|a| (0..n).map(|b| derivative(&d[a], b)).collect())
        .collect();
    let m = (n - 2) as f64;
    // Ric = −(n−2)(∂∂φ − dφ⊗dφ) − (Σ∂²φ + (n−2)|dφ|²) δ
    let expected = SymTensorField::from_fn(&grid, |p, i, j| {
        let lap: f64 = (0..n).map(|a| dd[a][a].values()[p]).sum();
        let grad2: f64 = (0..n).map(|a| d[a].values()[p].powi(2)).sum();
        let diag = if i == j { lap + m * grad2 } else { 0.0 };
        -m * (dd[i][j].values()[p] - d[i].values()[p] * d[j].values()[p]) - diag
    });
    let got = ricci(&Connection::from_perturbation(&conformal(&phi)).unwrap());
    let err = got.max_abs_diff(&expected) / expected.max_abs();
    assert!(err < 1e-9, "relative error {err}");
}

#[test]
fn two_dimensional_ricci_is_half_scalar_times_metric() {
    let grid = Grid::new(2, 32, 10.0).unwrap();
    let h = smooth_tensor(&grid, 0.01);
    let conn = Connection::from_perturbation(&h).unwrap();
    let ric = ricci(&conn);
    let r = scalar_curvature(&conn);
    let g = conn.metric().metric_field();
    let expected = SymTensorField::from_fn(&grid, |p, i, j| 0.5 * r.values()[p] * g.at(p, i, j));
    let err = ric.max_abs_diff(&expected) / ric.max_abs();
    assert!(err < 1e-11, "relative error {err}");
}

#[test]
fn contracted_bianchi_identity_for_ricci() {
    let grid = Grid::new(3, 32, 10.0).unwrap();
    let h = smooth_tensor(&grid, 0.05);
    let conn = Connection::from_perturbation(&h).unwrap();
    let w = bianchi_b(&conn, &ricci(&conn));
    let scale = gradient(&scalar_curvature(&conn)).l2_norm();
    assert!(w.l2_norm() / scale < 1e-8, "relative residual {}", w.l2_norm() / scale);
}

#[test]
fn einstein_trace_identity() {
    let grid = Grid::new(3, 24, 10.0).unwrap();
    let h = smooth_tensor(&grid, 0.02);
    let params = EinParams::new(3, 0.3, 1.5);
    let conn = Connection::from_perturbation(&h).unwrap();
    let tr = trace(conn.metric(), &ein(&conn, &params));
    let r = scalar_curvature(&conn);
    let expected = r.scaled(1.0 + 3.0 * 0.3).map(|v| v + 3.0 * 1.5);
    assert!(tr.max_abs_diff(&expected) / tr.max_abs() < 1e-13);
}

#[test]
fn ricci_is_contraction_of_riemann() {
    let grid = Grid::new(3, 24, 10.0).unwrap();
    let h = smooth_tensor(&grid, 0.05);
    let conn = Connection::from_perturbation(&h).unwrap();
    let ric = ricci(&conn);
    let contracted = four_trace(conn.metric(), &riemann(&conn));
    assert!(contracted.max_abs_diff(&ric) / ric.max_abs() < 1e-11);
}

#[test]
fn curvature_tensors_have_algebraic_symmetries() {
    let grid = Grid::new(3, 24, 10.0).unwrap();
    let h = smooth_tensor(&grid, 0.01);
    let conn = Connection::from_perturbation(&h).unwrap();
    let params = EinParams::new(3, 0.2, 1.0);
    let riem = CurvatureSymmetries::of(&riemann(&conn)).worst_relative();
    assert!(riem < 1e-11, "Riemann {riem}");
    let cal = CurvatureSymmetries::of(&cal_ein(&conn, &params)).worst_relative();
    assert!(cal < 1e-11, "𝓔in {cal}");
    let other = smooth_tensor(&grid, 1.0).traceless_part();
    assert!(CurvatureSymmetries::of(&kulkarni_nomizu(&h, &other)).worst_relative() < 1e-14);
}

#[test]
fn ricci_matches_central_difference_of_linearization() {
    use einlab_core::gauged_solver::d_ric_flat;
    let grid = Grid::new(3, 16, 8.0).unwrap();
    let h = smooth_tensor(&grid, 1.0);
    let eps = 1e-4;
    let plus = ricci(&Connection::from_perturbation(&h.scaled(eps)).unwrap());
    let minus = ricci(&Connection::from_perturbation(&h.scaled(-eps)).unwrap());
    let fd = (&plus - &minus).scaled(0.5 / eps);
    let exact = d_ric_flat(&h);
    let err = (&fd - &exact).l2_norm() / exact.l2_norm();
    assert!(err < 1e-7, "relative error {err}");
}

#[test]
fn flat_metric_has_zero_curvature_everywhere() {
    let grid = Grid::new(3, 8, 4.0).unwrap();
    let conn = Connection::from_perturbation(&SymTensorField::zeros(&grid)).unwrap();
    assert_eq!(riemann(&conn).max_abs(), 0.0);
    let params = EinParams::new(3, 0.1, 2.0);
    let e = ein(&conn, &params);
    assert_eq!(e.max_abs_diff(&SymTensorField::delta(&grid, 2.0)), 0.0);
}
