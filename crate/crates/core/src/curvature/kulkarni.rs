//! Kulkarni–Nomizu product, the curvature four-tensor `𝓔in` and algebraic
//! symmetry validators for four-tensors.

use serde::Serialize;

use crate::tensor_grid::{
    four_index, FourTensorField, Metric, SymTensorField, TensorField,
};

use super::connection::{ein_from_ricci, ricci, riemann, Connection};
use super::params::EinParams;

/// `(A ⊼ B)_{ijkl} = A_{ik}B_{jl} + A_{jl}B_{ik} − A_{il}B_{jk} − A_{jk}B_{il}`.
pub fn kulkarni_nomizu(a: &SymTensorField, b: &SymTensorField) -> FourTensorField {
    let grid = *a.grid();
    FourTensorField::from_fn(&grid, |p, i, j, k, l| {
        a.at(p, i, k) * b.at(p, j, l) + a.at(p, j, l) * b.at(p, i, k)
            - a.at(p, i, l) * b.at(p, j, k)
            - a.at(p, j, k) * b.at(p, i, l)
    })
}

/// `(Tr_g T)_{jl} = g^{ik} T_{ijkl}`, symmetrized in `(j, l)`; for the
/// Riemann tensor this is Ricci.
pub fn four_trace(g: &Metric, t: &FourTensorField) -> SymTensorField {
    let grid = *g.grid();
    let dim = grid.dim();
    SymTensorField::from_fn(&grid, |p, j, l| {
        let mut acc = 0.0;
        for i in 0..dim {
            for k in 0..dim {
                acc += g.upper(p, i, k) * (t.at(p, i, j, k, l) + t.at(p, i, l, k, j));
            }
        }
        0.5 * acc
    })
}

/// `𝓔in(g) = Riem(g) + g ⊼ (a Ric + b R g + c g)`.
pub fn cal_ein(conn: &Connection, params: &EinParams) -> FourTensorField {
    let g = conn.metric();
    let ric = ricci(conn);
    let r = crate::tensor_grid::trace(g, &ric);
    let metric = g.metric_field();
    let (a, b, c) = (params.a, params.b(), params.c());
    let inner = SymTensorField::from_fn(g.grid(), |p, i, j| {
        a * ric.at(p, i, j) + (b * r.values()[p] + c) * metric.at(p, i, j)
    });
    let riem = riemann(conn);
    &riem + &kulkarni_nomizu(&metric, &inner)
}

/// `Tr_g 𝓔in(g) − [a(n−2)+1] Ein(g)`, computed by independent contraction.
pub fn cal_ein_trace_defect(conn: &Connection, params: &EinParams) -> (SymTensorField, SymTensorField) {
    let tr = four_trace(conn.metric(), &cal_ein(conn, params));
    let ein = ein_from_ricci(conn.metric(), &ricci(conn), params).scaled(params.trace_factor());
    (tr, ein)
}

/// Residuals of the algebraic curvature-tensor symmetries, each a max-abs value.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureSymmetries {
    /// `T_{ijkl} + T_{jikl}`.
    pub first_pair: f64,
    /// `T_{ijkl} + T_{ijlk}`.
    pub second_pair: f64,
    /// `T_{ijkl} − T_{klij}`.
    pub pair_exchange: f64,
    /// `T_{ijkl} + T_{iklj} + T_{iljk}`.
    pub first_bianchi: f64,
    /// `max |T|`.
    pub scale: f64,
}

impl CurvatureSymmetries {
    pub fn of(t: &FourTensorField) -> Self {
        let grid = t.grid();
        let dim = grid.dim();
        let comp = |i, j, k, l| t.component(four_index(dim, i, j, k, l));
        let mut r = Self {
            first_pair: 0.0,
            second_pair: 0.0,
            pair_exchange: 0.0,
            first_bianchi: 0.0,
            scale: t.max_abs(),
        };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let (a, b, c, d, e, f) = (
                            comp(i, j, k, l),
                            comp(j, i, k, l),
                            comp(i, j, l, k),
                            comp(k, l, i, j),
                            comp(i, k, l, j),
                            comp(i, l, j, k),
                        );
                        for p in 0..grid.len() {
                            r.first_pair = r.first_pair.max((a[p] + b[p]).abs());
                            r.second_pair = r.second_pair.max((a[p] + c[p]).abs());
                            r.pair_exchange = r.pair_exchange.max((a[p] - d[p]).abs());
                            r.first_bianchi = r.first_bianchi.max((a[p] + e[p] + f[p]).abs());
                        }
                    }
                }
            }
        }
        r
    }

    /// Largest residual divided by the tensor scale (zero for a zero tensor).
    pub fn worst_relative(&self) -> f64 {
        let worst = self
            .first_pair
            .max(self.second_pair)
            .max(self.pair_exchange)
            .max(self.first_bianchi);
        if self.scale == 0.0 {
            worst
        } else {
            worst / self.scale
        }
    }
}
