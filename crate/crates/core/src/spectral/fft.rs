//! Multidimensional complex FFT over the lattice.
//!
//! Forward transforms are unnormalized; [`Spectrum::to_real`] divides by `N^n`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::tensor_grid::{Grid, ScalarField, TensorField};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, PlanCache)>> = OnceLock::new();
    let cell = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, cache) = &mut *guard;
    let key = (len, direction == FftDirection::Forward);
    cache
        .entry(key)
        .or_insert_with(|| planner.plan_fft(len, direction))
        .clone()
}

fn transform_in_place(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.points();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let total = grid.len();
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        // gather every line along `axis` into one contiguous batch
        let mut batch = Vec::with_capacity(total);
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                batch.extend((0..n).map(|k| data[base + k * stride]));
            }
        }
        fft.process_with_scratch(&mut batch, &mut scratch);
        let mut it = batch.into_iter();
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for k in 0..n {
                    data[base + k * stride] = it.next().unwrap_or_default();
                }
            }
        }
    }
}

/// Fourier coefficients of a real lattice function, in FFT ordering.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn forward(values: &[f64], grid: &Grid) -> Self {
        let mut coeffs: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform_in_place(grid, &mut coeffs, FftDirection::Forward);
        Self {
            grid: *grid,
            coeffs,
        }
    }

    pub fn of(field: &ScalarField) -> Self {
        Self::forward(field.values(), field.grid())
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid: *grid,
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Inverse transform, keeping the real part.
    pub fn to_values(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        transform_in_place(&self.grid, &mut data, FftDirection::Inverse);
        let scale = 1.0 / self.grid.len() as f64;
        data.into_iter().map(|c| c.re * scale).collect()
    }

    pub fn to_real(&self) -> ScalarField {
        ScalarField::from_values(&self.grid, self.to_values())
            .expect("inverse transform of finite data is finite")
    }

    /// `Σ |ĉ|²` over all modes.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}
