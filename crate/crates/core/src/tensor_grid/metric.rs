use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::field::{ScalarField, SymTensorField, TensorField};
use super::grid::{sym_index, Grid, MAX_DIM};
use crate::error::{Error, Result};
use crate::spectral::sobolev_norm;

/// Weight `⟨x⟩^t = (1 + |x|²)^{t/2}` on the fundamental domain.
pub fn weight_field(grid: &Grid, t: f64) -> ScalarField {
    let values = (0..grid.len())
        .map(|p| {
            if t == 0.0 {
                1.0
            } else {
                (1.0 + grid.radius_squared(p)).powf(0.5 * t)
            }
        })
        .collect();
    ScalarField::from_values(grid, values).expect("weight is finite")
}

/// Riemannian metric `g = δ + h` with its pointwise inverse.
#[derive(Clone, Debug)]
pub struct Metric {
    perturbation: SymTensorField,
    inverse: SymTensorField,
    min_eigenvalue: f64,
    min_point: usize,
}

struct PointInverse {
    inverse: [[f64; MAX_DIM]; MAX_DIM],
    min_eigenvalue: f64,
}

fn invert_point(dim: usize, g: &[[f64; MAX_DIM]; MAX_DIM]) -> PointInverse {
    let m = DMatrix::<f64>::from_fn(dim, dim, |i, j| g[i][j]);
    let min_eigenvalue = SymmetricEigen::new(m.clone()).eigenvalues.min();
    let mut inverse = [[f64::NAN; MAX_DIM]; MAX_DIM];
    if min_eigenvalue > 0.0 {
        if let Some(inv) = m.try_inverse() {
            for i in 0..dim {
                for j in 0..dim {
                    inverse[i][j] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                }
            }
        }
    }
    PointInverse {
        inverse,
        min_eigenvalue,
    }
}

impl Metric {
    /// The flat metric `δ` on `grid`.
    pub fn flat(grid: &Grid) -> Self {
        Self {
            perturbation: SymTensorField::zeros(grid),
            inverse: SymTensorField::delta(grid, 1.0),
            min_eigenvalue: 1.0,
            min_point: 0,
        }
    }

    /// Inverts `δ + h` point by point; fails if any point is not positive definite.
    pub fn new(h: SymTensorField) -> Result<Self> {
        let grid = *h.grid();
        let dim = grid.dim();
        let mut inverse = SymTensorField::zeros(&grid);
        let mut min_eigenvalue = f64::INFINITY;
        let mut min_point = 0;
        for p in 0..grid.len() {
            let mut g = h.matrix_at(p);
            for (i, row) in g.iter_mut().enumerate().take(dim) {
                row[i] += 1.0;
            }
            let point = invert_point(dim, &g);
            if point.min_eigenvalue < min_eigenvalue {
                min_eigenvalue = point.min_eigenvalue;
                min_point = p;
            }
            for i in 0..dim {
                for j in i..dim {
                    inverse.component_mut(sym_index(dim, i, j))[p] = point.inverse[i][j];
                }
            }
        }
        if !(min_eigenvalue > 0.0) || !inverse.is_finite() {
            return Err(Error::NonRiemannian {
                point: min_point,
                min_eigenvalue,
            });
        }
        Ok(Self {
            perturbation: h,
            inverse,
            min_eigenvalue,
            min_point,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.perturbation.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    /// `h = g - δ`.
    pub fn perturbation(&self) -> &SymTensorField {
        &self.perturbation
    }

    /// `g^{ij}` in packed storage.
    pub fn inverse(&self) -> &SymTensorField {
        &self.inverse
    }

    /// `g_{ij}` at lattice point `p`.
    #[inline]
    pub fn lower(&self, p: usize, i: usize, j: usize) -> f64 {
        let d = if i == j { 1.0 } else { 0.0 };
        d + self.perturbation.at(p, i, j)
    }

    /// `g^{ij}` at lattice point `p`.
    #[inline]
    pub fn upper(&self, p: usize, i: usize, j: usize) -> f64 {
        self.inverse.at(p, i, j)
    }

    /// The full metric `δ + h` as a field.
    pub fn metric_field(&self) -> SymTensorField {
        self.perturbation.axpy(1.0, &SymTensorField::delta(self.grid(), 1.0))
    }

    /// Smallest eigenvalue of `δ + h` over the lattice, and where it occurs.
    pub fn positivity_margin(&self) -> (f64, usize) {
        (self.min_eigenvalue, self.min_point)
    }

    /// `max_p ‖g g⁻¹ - I‖_∞`.
    pub fn identity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0_f64;
        for p in 0..self.grid().len() {
            for i in 0..dim {
                for k in 0..dim {
                    let mut v: f64 = (0..dim).map(|j| self.lower(p, i, j) * self.upper(p, j, k)).sum();
                    if i == k {
                        v -= 1.0;
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }
}

/// `h̃ = g⁻¹ - δ`.
pub fn metric_inverse(g: &Metric) -> SymTensorField {
    g.inverse().axpy(-1.0, &SymTensorField::delta(g.grid(), 1.0))
}

/// `Tr_g S = g^{ij} S_{ij}`.
pub fn trace(g: &Metric, s: &SymTensorField) -> ScalarField {
    let grid = *g.grid();
    let dim = grid.dim();
    let values = (0..grid.len())
        .map(|p| {
            let mut acc = 0.0;
            for i in 0..dim {
                acc += g.upper(p, i, i) * s.at(p, i, i);
                for j in i + 1..dim {
                    acc += 2.0 * g.upper(p, i, j) * s.at(p, i, j);
                }
            }
            acc
        })
        .collect();
    ScalarField::from_values(&grid, values).expect("finite trace")
}

/// Partial sum `Σ_{k<terms} (-h)^k` of the Neumann series for `(δ + h)⁻¹`.
pub fn neumann_partial_sum(h: &SymTensorField, terms: usize) -> SymTensorField {
    let grid = *h.grid();
    let dim = grid.dim();
    let mut out = SymTensorField::zeros(&grid);
    for p in 0..grid.len() {
        let m = h.matrix_at(p);
        let mut power = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in power.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        let mut sum = [[0.0; MAX_DIM]; MAX_DIM];
        for _ in 0..terms {
            for i in 0..dim {
                for j in 0..dim {
                    sum[i][j] += power[i][j];
                }
            }
            let mut next = [[0.0; MAX_DIM]; MAX_DIM];
            for i in 0..dim {
                for j in 0..dim {
                    next[i][j] = -(0..dim).map(|k| power[i][k] * m[k][j]).sum::<f64>();
                }
            }
            power = next;
        }
        for i in 0..dim {
            for j in i..dim {
                out.component_mut(sym_index(dim, i, j))[p] = 0.5 * (sum[i][j] + sum[j][i]);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct NeumannCheck {
    pub perturbation_norm: f64,
    pub inverse_perturbation_norm: f64,
    /// `‖h̃‖_{s+2,t} / ‖h‖_{s+2,t}`, zero for `h = 0`.
    pub ratio: f64,
    /// The ratio exceeded 2.
    pub violated: bool,
}

/// Compares `‖h̃‖_{s+2,t}` with `‖h‖_{s+2,t}` inside the radius
/// `‖h‖_{s+2,t} <= 1 / (2 Ĉ)`, where `Ĉ` is an algebra constant for `(s+2, t)`.
pub fn neumann_bound_check(
    h: &SymTensorField,
    s: f64,
    t: f64,
    algebra_constant: f64,
) -> Result<NeumannCheck> {
    let h_norm = sobolev_norm(h, s + 2.0, t);
    let radius = 1.0 / (2.0 * algebra_constant);
    if h_norm > radius {
        return Err(Error::PreconditionNotMet(format!(
            "‖h‖_{{s+2,t}} = {h_norm:e} exceeds the radius 1/(2C) = {radius:e}"
        )));
    }
    if h_norm == 0.0 {
        return Ok(NeumannCheck {
            perturbation_norm: 0.0,
            inverse_perturbation_norm: 0.0,
            ratio: 0.0,
            violated: false,
        });
    }
    let htilde = metric_inverse(&Metric::new(h.clone())?);
    let ht_norm = sobolev_norm(&htilde, s + 2.0, t);
    let ratio = ht_norm / h_norm;
    Ok(NeumannCheck {
        perturbation_norm: h_norm,
        inverse_perturbation_norm: ht_norm,
        ratio,
        violated: ratio > 2.0,
    })
}
