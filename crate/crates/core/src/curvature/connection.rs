//! Levi-Civita connection of `δ + h` and the curvature tensors built from it.

use crate::error::Result;
use crate::spectral::{differentiate_spectrum, sym_gradients, Spectrum};
use crate::tensor_grid::{
    four_index, sym_index, trace, ChristoffelField, FourTensorField, Metric, ScalarField,
    SymTensorField, TensorField, MAX_DIM,
};

use super::params::EinParams;

type Local2 = [[f64; MAX_DIM]; MAX_DIM];
type Local3 = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

#[inline]
pub(crate) fn local_sym(s: &SymTensorField, p: usize) -> Local2 {
    s.matrix_at(p)
}

/// `Γ[k][i][j]` at lattice point `p`.
#[inline]
pub(crate) fn local_gamma(gamma: &ChristoffelField, p: usize) -> Local3 {
    let dim = gamma.grid().dim();
    let mut out = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for (k, plane) in out.iter_mut().enumerate().take(dim) {
        for i in 0..dim {
            for j in i..dim {
                let v = gamma.at(p, k, i, j);
                plane[i][j] = v;
                plane[j][i] = v;
            }
        }
    }
    out
}

/// `d[s][i][j] = ∂_s S_{ij}` at lattice point `p`, from packed gradients.
#[inline]
pub(crate) fn local_gradient(grads: &[Vec<Vec<f64>>], dim: usize, p: usize) -> Local3 {
    let mut out = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for (s, plane) in out.iter_mut().enumerate().take(dim) {
        for i in 0..dim {
            for j in i..dim {
                let v = grads[s][sym_index(dim, i, j)][p];
                plane[i][j] = v;
                plane[j][i] = v;
            }
        }
    }
    out
}

/// `Γ^k_{ij} = ½ g^{ks}(∂_i g_{sj} + ∂_j g_{is} − ∂_s g_{ij})` with spectral `∂`.
pub fn christoffel(g: &Metric) -> ChristoffelField {
    let grid = *g.grid();
    let dim = grid.dim();
    let grads = sym_gradients(g.perturbation());
    let mut gamma = ChristoffelField::zeros(&grid);
    for p in 0..grid.len() {
        let dh = local_gradient(&grads, dim, p);
        let ginv = local_sym(g.inverse(), p);
        for i in 0..dim {
            for j in i..dim {
                let mut lower = [0.0; MAX_DIM];
                for (s, l) in lower.iter_mut().enumerate().take(dim) {
                    *l = 0.5 * (dh[i][s][j] + dh[j][i][s] - dh[s][i][j]);
                }
                for k in 0..dim {
                    let v: f64 = (0..dim).map(|s| ginv[k][s] * lower[s]).sum();
                    gamma.component_mut(ChristoffelField::slot(dim, k, i, j))[p] = v;
                }
            }
        }
    }
    gamma
}

/// A metric together with its Christoffel symbols.
#[derive(Clone, Debug)]
pub struct Connection {
    metric: Metric,
    gamma: ChristoffelField,
}

impl Connection {
    pub fn new(metric: Metric) -> Self {
        let gamma = christoffel(&metric);
        Self { metric, gamma }
    }

    /// Connection of `δ + h`; fails if `δ + h` is not positive definite.
    pub fn from_perturbation(h: &SymTensorField) -> Result<Self> {
        Ok(Self::new(Metric::new(h.clone())?))
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn christoffel(&self) -> &ChristoffelField {
        &self.gamma
    }

    fn dim(&self) -> usize {
        self.metric.dim()
    }
}

/// Ricci tensor with the size of its antisymmetric part before symmetrization.
#[derive(Clone, Debug)]
pub struct RicciOutput {
    pub ricci: SymTensorField,
    /// `max |Ric_{jk} − Ric_{kj}|` before averaging.
    pub asymmetry: f64,
}

/// `Ric_{jk} = ∂_lΓ^l_{jk} − ∂_kΓ^l_{jl} + Γ^p_{jk}Γ^l_{pl} − Γ^p_{jl}Γ^l_{pk}`.
pub fn ricci_with_asymmetry(conn: &Connection) -> RicciOutput {
    let grid = *conn.metric.grid();
    let dim = grid.dim();
    let m = grid.sym_count();
    let gamma = &conn.gamma;

    // ∂_l Γ^l_{jk}, assembled in Fourier space
    let spectra: Vec<Spectrum> = gamma
        .components()
        .iter()
        .map(|c| Spectrum::forward(c, &grid))
        .collect();
    let mut divergence = vec![Vec::new(); m];
    for (slot, out) in divergence.iter_mut().enumerate() {
        let mut acc = Spectrum::from_coeffs(&grid, vec![Default::default(); grid.len()]);
        for l in 0..dim {
            let d = differentiate_spectrum(&spectra[l * m + slot], l);
            for (a, b) in acc.coeffs_mut().iter_mut().zip(d.coeffs()) {
                *a += b;
            }
        }
        *out = acc.to_values();
    }

    // contracted symbols γ_j = Γ^l_{jl} and their derivatives ∂_k γ_j
    let contracted: Vec<Vec<f64>> = (0..dim)
        .map(|j| {
            (0..grid.len())
                .map(|p| (0..dim).map(|l| gamma.at(p, l, j, l)).sum())
                .collect()
        })
        .collect();
    let contracted_spectra: Vec<Spectrum> =
        contracted.iter().map(|c| Spectrum::forward(c, &grid)).collect();
    // dgamma[k][j] = ∂_k γ_j
    let dgamma: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|k| {
            contracted_spectra
                .iter()
                .map(|s| differentiate_spectrum(s, k).to_values())
                .collect()
        })
        .collect();

    let mut ricci = SymTensorField::zeros(&grid);
    let mut asymmetry = 0.0_f64;
    for p in 0..grid.len() {
        let gm = local_gamma(gamma, p);
        for j in 0..dim {
            for k in j..dim {
                let slot = sym_index(dim, j, k);
                let mut quad = 0.0;
                for pp in 0..dim {
                    quad += gm[pp][j][k] * contracted[pp][p];
                    for l in 0..dim {
                        quad -= gm[pp][j][l] * gm[l][pp][k];
                    }
                }
                let djk = dgamma[k][j][p];
                let dkj = dgamma[j][k][p];
                asymmetry = asymmetry.max((djk - dkj).abs());
                ricci.component_mut(slot)[p] = divergence[slot][p] - 0.5 * (djk + dkj) + quad;
            }
        }
    }
    RicciOutput { ricci, asymmetry }
}

pub fn ricci(conn: &Connection) -> SymTensorField {
    let out = ricci_with_asymmetry(conn);
    let scale = out.ricci.max_abs();
    if out.asymmetry > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        log::warn!(
            "Ricci asymmetry {:e} exceeds 1e-10 of field scale {scale:e}",
            out.asymmetry
        );
    }
    out.ricci
}

/// `R = Tr_g Ric`.
pub fn scalar_curvature(conn: &Connection) -> ScalarField {
    trace(&conn.metric, &ricci(conn))
}

/// `Ein(g) = Ric + κRg + Λg`.
pub fn ein(conn: &Connection, params: &EinParams) -> SymTensorField {
    let ric = ricci(conn);
    ein_from_ricci(conn.metric(), &ric, params)
}

pub(crate) fn ein_from_ricci(g: &Metric, ric: &SymTensorField, params: &EinParams) -> SymTensorField {
    let r = trace(g, ric);
    let metric = g.metric_field();
    let grid = *g.grid();
    SymTensorField::from_fn(&grid, |p, i, j| {
        ric.at(p, i, j) + (params.kappa * r.values()[p] + params.lambda) * metric.at(p, i, j)
    })
}

/// Covariant Riemann tensor `R_{mjkl} = g_{mi} R^i_{jkl}` with
/// `R^i_{jkl} = ∂_kΓ^i_{lj} − ∂_lΓ^i_{kj} + Γ^i_{kp}Γ^p_{lj} − Γ^i_{lp}Γ^p_{kj}`,
/// so that `Ric_{jl} = g^{mk} R_{mjkl}`.
pub fn riemann(conn: &Connection) -> FourTensorField {
    let grid = *conn.metric.grid();
    let dim = conn.dim();
    let gamma = &conn.gamma;
    // dg[k][slot] = ∂_k Γ^i_{lj}, slot over (i, {l,j})
    let spectra: Vec<Spectrum> = gamma
        .components()
        .iter()
        .map(|c| Spectrum::forward(c, &grid))
        .collect();
    let dg: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|k| {
            spectra
                .iter()
                .map(|s| differentiate_spectrum(s, k).to_values())
                .collect()
        })
        .collect();

    let mut out = FourTensorField::zeros(&grid);
    let mut mixed = vec![0.0; dim.pow(4)];
    for p in 0..grid.len() {
        let gm = local_gamma(gamma, p);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let mut v = dg[k][ChristoffelField::slot(dim, i, l, j)][p]
                            - dg[l][ChristoffelField::slot(dim, i, k, j)][p];
                        for q in 0..dim {
                            v += gm[i][k][q] * gm[q][l][j] - gm[i][l][q] * gm[q][k][j];
                        }
                        mixed[four_index(dim, i, j, k, l)] = v;
                    }
                }
            }
        }
        for m in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let v: f64 = (0..dim)
                            .map(|i| conn.metric.lower(p, m, i) * mixed[four_index(dim, i, j, k, l)])
                            .sum();
                        out.component_mut(four_index(dim, m, j, k, l))[p] = v;
                    }
                }
            }
        }
    }
    out
}

/// `(div S)_i = −g^{jk}(∂_k S_{ji} − Γ^p_{kj} S_{pi} − Γ^p_{ki} S_{jp})`.
pub fn divergence(conn: &Connection, s: &SymTensorField) -> crate::tensor_grid::OneFormField {
    let grid = *conn.metric.grid();
    let dim = grid.dim();
    let grads = sym_gradients(s);
    let mut comps = vec![vec![0.0; grid.len()]; dim];
    for p in 0..grid.len() {
        let ds = local_gradient(&grads, dim, p);
        let sl = local_sym(s, p);
        let gm = local_gamma(&conn.gamma, p);
        let ginv = local_sym(conn.metric.inverse(), p);
        for (i, comp) in comps.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..dim {
                for k in 0..dim {
                    let mut cov = ds[k][j][i];
                    for q in 0..dim {
                        cov -= gm[q][k][j] * sl[q][i] + gm[q][k][i] * sl[j][q];
                    }
                    acc += ginv[j][k] * cov;
                }
            }
            comp[p] = -acc;
        }
    }
    crate::tensor_grid::OneFormField::from_components(&grid, comps).expect("finite divergence")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_grid::Grid;

    #[test]
    fn flat_metric_has_no_curvature() {
        let grid = Grid::new(3, 8, 4.0).unwrap();
        let conn = Connection::new(Metric::flat(&grid));
        assert_eq!(conn.christoffel().max_abs(), 0.0);
        assert_eq!(ricci(&conn).max_abs(), 0.0);
        assert_eq!(riemann(&conn).max_abs(), 0.0);
        assert_eq!(scalar_curvature(&conn).max_abs(), 0.0);
    }

    #[test]
    fn constant_metric_has_vanishing_symbols() {
        let grid = Grid::new(3, 8, 4.0).unwrap();
        let h = SymTensorField::from_fn(&grid, |_, i, j| if i == j { 0.1 * (i + 1) as f64 } else { 0.0 });
        let conn = Connection::from_perturbation(&h).unwrap();
        assert!(conn.christoffel().max_abs() < 1e-15);
    }
}
