//! Smooth test data: mixtures of Gaussian bumps with tensor coefficients.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_grid::{Grid, ScalarField, SymTensorField};

const IMAGES: i32 = 2;
const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_4; // 2 sqrt(2 ln 2)

/// `amplitude · C · exp(-|x - c|² / (2σ²))` with `σ = width / (2√(2 ln 2))`,
/// so `width` is the full width at half maximum.
///
/// On a grid the Gaussian is summed over its periodic images, which keeps
/// sampled fields smooth across the box boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
    /// Symmetric `n × n` coefficient matrix; ignored for scalar bumps.
    #[serde(default)]
    pub coefficients: Vec<Vec<f64>>,
}

impl Bump {
    pub fn sigma(&self) -> f64 {
        self.width / FWHM_PER_SIGMA
    }

    pub fn profile(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        let s = self.sigma();
        self.amplitude * (-0.5 * r2 / (s * s)).exp()
    }

    /// Profile summed over images shifted by multiples of `period` along each axis.
    pub fn periodic_profile(&self, x: &[f64], period: f64) -> f64 {
        let s = self.sigma();
        let factors: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| {
                (-IMAGES..=IMAGES)
                    .map(|m| {
                        let d = a - c + m as f64 * period;
                        (-0.5 * d * d / (s * s)).exp()
                    })
                    .sum::<f64>()
            })
            .product();
        self.amplitude * factors
    }

    fn validate(&self, dim: usize, tensor: bool) -> Result<()> {
        if self.center.len() != dim {
            return Err(Error::InvalidConfig(format!(
                "bump center has {} coordinates, grid dimension is {dim}",
                self.center.len()
            )));
        }
        if !(self.width > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bump width must be positive, got {}",
                self.width
            )));
        }
        if tensor {
            if self.coefficients.len() != dim || self.coefficients.iter().any(|r| r.len() != dim) {
                return Err(Error::InvalidConfig(format!(
                    "bump coefficients must be a {dim}x{dim} matrix"
                )));
            }
            for i in 0..dim {
                for j in 0..dim {
                    if self.coefficients[i][j] != self.coefficients[j][i] {
                        return Err(Error::InvalidConfig(
                            "bump coefficient matrix must be symmetric".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sum of tensor-valued bumps sampled on `grid`.
pub fn bump_tensor(grid: &Grid, bumps: &[Bump]) -> Result<SymTensorField> {
    for b in bumps {
        b.validate(grid.dim(), true)?;
    }
    let profiles: Vec<ScalarField> = bumps
        .iter()
        .map(|b| ScalarField::from_fn(grid, |x| b.periodic_profile(x, grid.length())))
        .collect();
    Ok(SymTensorField::from_fn(grid, |p, i, j| {
        bumps
            .iter()
            .zip(&profiles)
            .map(|(b, prof)| b.coefficients[i][j] * prof.values()[p])
            .sum()
    }))
}

/// Sum of scalar bumps sampled on `grid`.
pub fn bump_scalar(grid: &Grid, bumps: &[Bump]) -> Result<ScalarField> {
    for b in bumps {
        b.validate(grid.dim(), false)?;
    }
    Ok(ScalarField::from_fn(grid, |x| {
        bumps.iter().map(|b| b.periodic_profile(x, grid.length())).sum()
    }))
}

/// Ranges for randomly drawn bumps, in units of the box length `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomBumps {
    pub count: usize,
    /// Centers are drawn uniformly from `[-r L, r L]^n`.
    pub center_fraction: f64,
    /// FWHM drawn uniformly from `[min, max] · L`.
    pub width_fraction: (f64, f64),
    pub amplitude: f64,
}

impl Default for RandomBumps {
    fn default() -> Self {
        Self {
            count: 2,
            center_fraction: 0.02,
            width_fraction: (0.14, 0.16),
            amplitude: 1.0,
        }
    }
}

impl RandomBumps {
    /// Draws bumps with random symmetric coefficients in `[-1, 1]`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, grid: &Grid) -> Vec<Bump> {
        let dim = grid.dim();
        let l = grid.length();
        (0..self.count)
            .map(|_| {
                let center = (0..dim)
                    .map(|_| rng.gen_range(-1.0..=1.0) * self.center_fraction * l)
                    .collect();
                let width = l * rng.gen_range(self.width_fraction.0..=self.width_fraction.1);
                let mut coefficients = vec![vec![0.0; dim]; dim];
                for i in 0..dim {
                    for j in i..dim {
                        let c = rng.gen_range(-1.0..=1.0);
                        coefficients[i][j] = c;
                        coefficients[j][i] = c;
                    }
                }
                Bump {
                    center,
                    width,
                    amplitude: self.amplitude,
                    coefficients,
                }
            })
            .collect()
    }

    pub fn tensor<R: Rng + ?Sized>(&self, rng: &mut R, grid: &Grid) -> SymTensorField {
        bump_tensor(grid, &self.draw(rng, grid)).expect("generated bumps are valid")
    }

    /// Scalar mixture with random signed amplitudes.
    pub fn scalar<R: Rng + ?Sized>(&self, rng: &mut R, grid: &Grid) -> ScalarField {
        let mut bumps = self.draw(rng, grid);
        for b in &mut bumps {
            b.amplitude *= rng.gen_range(-1.0..=1.0);
        }
        bump_scalar(grid, &bumps).expect("generated bumps are valid")
    }
}
