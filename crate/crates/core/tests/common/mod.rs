#![allow(dead_code)]

use einlab_core::generators::{bump_scalar, bump_tensor, Bump};
use einlab_core::tensor_grid::{Grid, ScalarField, SymTensorField};

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_4;

/// Bump with standard deviation `cells` lattice spacings.
pub fn bump(grid: &Grid, cells: f64, amplitude: f64, center: &[f64]) -> Bump {
    let n = grid.dim();
    let coefficients = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 - 0.4 * i as f64 } else { 0.3 / (1.0 + (i + j) as f64) })
                .collect()
        })
        .collect();
    Bump {
        center: center.to_vec(),
        width: cells * grid.spacing() * FWHM_PER_SIGMA,
        amplitude,
        coefficients,
    }
}

pub fn smooth_tensor(grid: &Grid, amplitude: f64) -> SymTensorField {
    let n = grid.dim();
    let mut second = bump(grid, 4.5, -0.6 * amplitude, &vec![0.5; n]);
    second.coefficients = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.5 } else { -0.2 }).collect())
        .collect();
    bump_tensor(grid, &[bump(grid, 4.0, amplitude, &vec![0.1; n]), second]).unwrap()
}

pub fn smooth_scalar(grid: &Grid, amplitude: f64) -> ScalarField {
    let n = grid.dim();
    bump_scalar(grid, &[bump(grid, 4.0, amplitude, &vec![-0.2; n])]).unwrap()
}

pub fn relative(a: f64, scale: f64) -> f64 {
    a / scale
}
