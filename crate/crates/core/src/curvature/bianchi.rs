//! Bianchi-type operators, the flat symmetrized derivative and the
//! first-order correction term of the modified Bianchi operator.

use crate::error::Result;
use crate::spectral::{gradient, sym_gradients, Spectrum, differentiate_spectrum};
use crate::tensor_grid::{trace, OneFormField, ScalarField, SymTensorField, TensorField};

use super::connection::{divergence, local_gamma, local_gradient, local_sym, Connection};
use super::params::EinParams;

fn add_scaled_gradient(w: &OneFormField, coefficient: f64, f: &ScalarField) -> OneFormField {
    w.axpy(coefficient, &gradient(f))
}

/// `B_g(S) = div_g S + ½ d(Tr_g S)`.
pub fn bianchi_b(conn: &Connection, s: &SymTensorField) -> OneFormField {
    add_scaled_gradient(&divergence(conn, s), 0.5, &trace(conn.metric(), s))
}

/// `𝓑_g(E) = div_g E + (2κ+1)/(2(1+κn)) d(Tr_g E)`.
pub fn bianchi_cal(conn: &Connection, e: &SymTensorField, params: &EinParams) -> Result<OneFormField> {
    params.require_regular()?;
    Ok(bianchi_with_coefficient(conn, e, params.bianchi_trace_coefficient()))
}

/// `div_g E + c · d(Tr_g E)` for an arbitrary trace coefficient `c`.
pub fn bianchi_with_coefficient(conn: &Connection, e: &SymTensorField, coefficient: f64) -> OneFormField {
    add_scaled_gradient(&divergence(conn, e), coefficient, &trace(conn.metric(), e))
}

/// `𝓑_g(Λδ + e)`, with the constant background handled in closed form.
///
/// Spectral derivatives of `Λδ + e` pick up roundoff at the scale of `Λ`;
/// splitting off `Λ 𝓑_g(δ)` keeps only the small field `e` under `∂`.
pub fn bianchi_cal_shifted(conn: &Connection, e: &SymTensorField, params: &EinParams) -> Result<OneFormField> {
    let background = bianchi_cal_of_delta(conn, params.bianchi_trace_coefficient());
    Ok(bianchi_cal(conn, e, params)?.axpy(params.lambda, &background))
}

/// `𝓑_g(δ)_i = g^{jk}(Γ^i_{kj} + Γ^j_{ki}) − 2c g^{mb} Γ^m_{ib}`, using
/// `∂_i g^{mm} = −2 g^{mb} Γ^m_{ib}` for the trace term.
fn bianchi_cal_of_delta(conn: &Connection, coefficient: f64) -> OneFormField {
    let grid = *conn.metric().grid();
    let dim = grid.dim();
    let mut comps = vec![vec![0.0; grid.len()]; dim];
    for p in 0..grid.len() {
        let gm = local_gamma(conn.christoffel(), p);
        let ginv = local_sym(conn.metric().inverse(), p);
        for (i, comp) in comps.iter_mut().enumerate() {
            let mut div = 0.0;
            let mut dtr = 0.0;
            for j in 0..dim {
                for k in 0..dim {
                    div += ginv[j][k] * (gm[i][k][j] + gm[j][k][i]);
                    dtr -= 2.0 * ginv[j][k] * gm[j][i][k];
                }
            }
            comp[p] = div + coefficient * dtr;
        }
    }
    OneFormField::from_components(&grid, comps).expect("finite")
}

/// `B_δ(h)_i = −∂_j h_{ji} + ½ ∂_i tr h`.
pub fn bianchi_flat(h: &SymTensorField) -> OneFormField {
    let grid = *h.grid();
    let dim = grid.dim();
    let grads = sym_gradients(h);
    let mut comps = vec![vec![0.0; grid.len()]; dim];
    for p in 0..grid.len() {
        let dh = local_gradient(&grads, dim, p);
        for (i, comp) in comps.iter_mut().enumerate() {
            let div: f64 = (0..dim).map(|j| dh[j][j][i]).sum();
            let dtr: f64 = (0..dim).map(|j| dh[i][j][j]).sum();
            comp[p] = -div + 0.5 * dtr;
        }
    }
    OneFormField::from_components(&grid, comps).expect("finite")
}

/// `(𝓛_δ ω)_{ij} = ½(∂_i ω_j + ∂_j ω_i)`.
pub fn sym_grad_flat(w: &OneFormField) -> SymTensorField {
    let grid = *w.grid();
    let dim = grid.dim();
    let spectra: Vec<Spectrum> = w
        .components()
        .iter()
        .map(|c| Spectrum::forward(c, &grid))
        .collect();
    let mut comps = Vec::with_capacity(grid.sym_count());
    for slot in 0..grid.sym_count() {
        let (i, j) = crate::tensor_grid::sym_pair(dim, slot);
        let mut acc = differentiate_spectrum(&spectra[j], i);
        let other = differentiate_spectrum(&spectra[i], j);
        for (a, b) in acc.coeffs_mut().iter_mut().zip(other.coeffs()) {
            *a = 0.5 * (*a + b);
        }
        comps.push(acc.to_values());
    }
    SymTensorField::from_components(&grid, comps).expect("finite")
}

/// `T(E,h)_j = ½(∂_k E_{jl} + ∂_l E_{kj} − ∂_j E_{kl}) h^{kl}`, indices raised with `δ`.
pub fn t_correction(e: &SymTensorField, h: &SymTensorField) -> OneFormField {
    let grid = *e.grid();
    let dim = grid.dim();
    let grads = sym_gradients(e);
    let mut comps = vec![vec![0.0; grid.len()]; dim];
    for p in 0..grid.len() {
        let de = local_gradient(&grads, dim, p);
        let hl = local_sym(h, p);
        for (j, comp) in comps.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..dim {
                for l in 0..dim {
                    acc += (de[k][j][l] + de[l][k][j] - de[j][k][l]) * hl[k][l];
                }
            }
            comp[p] = 0.5 * acc;
        }
    }
    OneFormField::from_components(&grid, comps).expect("finite")
}

/// `(E∘ω)_j = E_{jk} ω_k`, `E` acting as an endomorphism through `δ`.
pub fn contract_flat(e: &SymTensorField, w: &OneFormField) -> OneFormField {
    let grid = *e.grid();
    let dim = grid.dim();
    let comps = (0..dim)
        .map(|j| {
            (0..grid.len())
                .map(|p| (0..dim).map(|k| e.at(p, j, k) * w.at(p, k)).sum())
                .collect()
        })
        .collect();
    OneFormField::from_components(&grid, comps).expect("finite")
}

/// `⟨E, h⟩ = Σ_{kl} E_{kl} h_{kl}`.
pub fn flat_inner(e: &SymTensorField, h: &SymTensorField) -> ScalarField {
    let grid = *e.grid();
    let dim = grid.dim();
    let values = (0..grid.len())
        .map(|p| {
            let mut acc = 0.0;
            for k in 0..dim {
                for l in 0..dim {
                    acc += e.at(p, k, l) * h.at(p, k, l);
                }
            }
            acc
        })
        .collect();
    ScalarField::from_values(&grid, values).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_grid::{Grid, Metric};

    #[test]
    fn bianchi_of_metric_vanishes() {
        let grid = Grid::new(3, 16, 8.0).unwrap();
        let h = SymTensorField::from_fn(&grid, |p, i, j| {
            let x = grid.position(p);
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            0.05 * (1.0 + (i + 2 * j) as f64 * 0.3) * (-r2 / 2.0).exp()
        });
        let conn = Connection::new(Metric::new(h).unwrap());
        let g = conn.metric().metric_field();
        assert!(bianchi_b(&conn, &g).max_abs() < 1e-11);
    }

    #[test]
    fn t_correction_vanishes_for_constant_multiple_of_delta() {
        let grid = Grid::new(3, 8, 4.0).unwrap();
        let e = SymTensorField::delta(&grid, 1.7);
        let h = SymTensorField::from_fn(&grid, |p, i, j| ((p + i * j) % 3) as f64);
        assert!(t_correction(&e, &h).max_abs() < 1e-14);
    }

    #[test]
    fn flat_bianchi_matches_connection_version() {
        let grid = Grid::new(2, 16, 6.0).unwrap();
        let h = SymTensorField::from_fn(&grid, |p, i, j| {
            let x = grid.position(p);
            (1.0 + i as f64 - 0.5 * j as f64) * (-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp()
        });
        let flat = Connection::new(Metric::flat(&grid));
        let d = bianchi_flat(&h).max_abs_diff(&bianchi_b(&flat, &h));
        assert!(d < 1e-13, "{d}");
    }
}
