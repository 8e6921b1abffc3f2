use serde::Serialize;

use crate::spectral::{sobolev_norm, ModeSet};
use crate::tensor_grid::TensorField;

pub const DEFAULT_K_MAX: usize = 4;

/// Fraction of `‖·‖²_{k,t}` above which the outer third of the spectrum is
/// considered to dominate, making the `k`-th seminorm grid-limited.
const SHELL_FRACTION_WARN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormEntry {
    pub k: usize,
    pub t: f64,
    pub value: f64,
    /// The outer spectral shell carries a non-negligible share of the value.
    pub grid_limited: bool,
}

/// `‖u‖_{k,t}` for `k = 0..=K_max`, a finite stand-in for the `C^{∞,t}` seminorms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormProfile {
    pub entries: Vec<SeminormEntry>,
}

impl SeminormProfile {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(|e| e.value.is_finite())
    }
}

pub fn seminorm_profile<F: TensorField>(u: &F, t: f64, k_max: usize) -> SeminormProfile {
    let entries = (0..=k_max)
        .map(|k| {
            let value = sobolev_norm(u, k as f64, t);
            let grid_limited = value > 0.0 && outer_shell_fraction(u, k as f64, t) > SHELL_FRACTION_WARN;
            if grid_limited {
                log::warn!("seminorm k = {k} is dominated by modes near the grid cutoff");
            }
            SeminormEntry { k, t, value, grid_limited }
        })
        .collect();
    SeminormProfile { entries }
}

/// Share of `‖u‖²_{s,t}` carried by modes with `|ξ| > (2/3) ξ_max` on some axis.
fn outer_shell_fraction<F: TensorField>(u: &F, s: f64, t: f64) -> f64 {
    use crate::spectral::Spectrum;
    use crate::tensor_grid::weight_field;

    let grid = *u.grid();
    let modes = ModeSet::shared(&grid);
    let weight = weight_field(&grid, t);
    let cutoff = (2.0 / 3.0) * std::f64::consts::PI / grid.spacing();
    let (mut outer, mut total) = (0.0, 0.0);
    for (c, comp) in u.components().iter().enumerate() {
        let weighted: Vec<f64> = comp.iter().zip(weight.values()).map(|(a, w)| a * w).collect();
        let spec = Spectrum::forward(&weighted, &grid);
        for (p, z) in spec.coeffs().iter().enumerate() {
            let v = u.multiplicity(c) * modes.bracket(p).powf(2.0 * s) * z.norm_sqr();
            total += v;
            if modes.frequency(p)[..grid.dim()].iter().any(|x| x.abs() > cutoff) {
                outer += v;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}
