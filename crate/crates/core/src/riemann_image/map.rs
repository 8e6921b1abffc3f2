use serde::Serialize;

use crate::curvature::{cal_ein, Connection, EinParams};
use crate::error::Result;
use crate::tensor_grid::{four_index, R13Field, SymTensorField, TensorField};

/// `h ↦ (δ+h)⁻¹𝓔in(δ+h) − δ⁻¹𝓔in(δ)` with
/// `[g⁻¹𝓔in(g)]^i_{klm} = g^{ij} 𝓔in(g)_{jklm}`.
pub fn riemann_christoffel_map(h: &SymTensorField, params: &EinParams) -> Result<R13Field> {
    let conn = Connection::from_perturbation(h)?;
    let cal = cal_ein(&conn, params);
    let g = conn.metric();
    let grid = *h.grid();
    let dim = grid.dim();
    let c = params.c();
    let kd = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut comps = Vec::with_capacity(dim.pow(4));
    for i in 0..dim {
        for k in 0..dim {
            for l in 0..dim {
                for m in 0..dim {
                    // c (δ⊼δ)^i_{klm}, the flat value
                    let flat = 2.0 * c * (kd(i, l) * kd(k, m) - kd(i, m) * kd(k, l));
                    let values = (0..grid.len())
                        .map(|p| {
                            let raised: f64 = (0..dim)
                                .map(|j| g.upper(p, i, j) * cal.component(four_index(dim, j, k, l, m))[p])
                                .sum();
                            raised - flat
                        })
                        .collect();
                    comps.push(values);
                }
            }
        }
    }
    R13Field::from_components(&grid, comps)
}

/// Residuals of the three conditions defining Riemann–Christoffel-type
/// `(1,3)` tensors, each a max-abs value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct R13Residuals {
    /// `τ^i_{ilm}`.
    pub trace: f64,
    /// `τ^i_{klm} + τ^i_{kml}`.
    pub antisymmetry: f64,
    /// `τ^i_{klm} + τ^i_{mkl} + τ^i_{lmk}`.
    pub cyclic: f64,
    /// `max |τ|`.
    pub scale: f64,
}

impl R13Residuals {
    pub fn of(tau: &R13Field) -> Self {
        let grid = tau.grid();
        let dim = grid.dim();
        let comp = |i, k, l, m| tau.component(four_index(dim, i, k, l, m));
        let mut r = Self {
            trace: 0.0,
            antisymmetry: 0.0,
            cyclic: 0.0,
            scale: tau.max_abs(),
        };
        for l in 0..dim {
            for m in 0..dim {
                for p in 0..grid.len() {
                    let tr: f64 = (0..dim).map(|i| comp(i, i, l, m)[p]).sum();
                    r.trace = r.trace.max(tr.abs());
                }
            }
        }
        for i in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    for m in 0..dim {
                        let (a, b, c, d) = (comp(i, k, l, m), comp(i, k, m, l), comp(i, m, k, l), comp(i, l, m, k));
                        for p in 0..grid.len() {
                            r.antisymmetry = r.antisymmetry.max((a[p] + b[p]).abs());
                            r.cyclic = r.cyclic.max((a[p] + c[p] + d[p]).abs());
                        }
                    }
                }
            }
        }
        r
    }

    /// Largest residual divided by the tensor scale.
    pub fn worst_relative(&self) -> f64 {
        let worst = self.trace.max(self.antisymmetry).max(self.cyclic);
        if self.scale == 0.0 {
            worst
        } else {
            worst / self.scale
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_grid::Grid;

    #[test]
    fn flat_metric_maps_to_zero() {
        let grid = Grid::new(3, 8, 4.0).unwrap();
        let tau = riemann_christoffel_map(&SymTensorField::zeros(&grid), &EinParams::new(3, 0.1, 1.0)).unwrap();
        assert_eq!(tau.max_abs(), 0.0);
        assert_eq!(R13Residuals::of(&tau).worst_relative(), 0.0);
    }
}
