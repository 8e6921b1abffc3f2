use serde::Serialize;

use crate::curvature::{
    bianchi_b, bianchi_cal_shifted, bianchi_flat, contract_flat, flat_inner, ricci, sym_grad_flat,
    t_correction, Connection, EinParams,
};
use crate::error::Result;
use crate::spectral::{gradient, laplacian_sym, sobolev_norm};
use crate::tensor_grid::{trace, Metric, OneFormField, SymTensorField, TensorField};

/// `E = Λδ + e`.
pub fn target(e: &SymTensorField, params: &EinParams) -> SymTensorField {
    &SymTensorField::delta(e.grid(), params.lambda) + e
}

/// `Z = (κ Tr_g E + Λ)/(1+κn) · g − E` with `g = δ + h`, `E = Λδ + e`.
pub fn zero_order_z(h: &SymTensorField, e: &SymTensorField, params: &EinParams) -> Result<SymTensorField> {
    params.require_regular()?;
    let metric = Metric::new(h.clone())?;
    Ok(zero_order_z_with(&metric, &target(e, params), params))
}

fn zero_order_z_with(metric: &Metric, big_e: &SymTensorField, params: &EinParams) -> SymTensorField {
    let tr = trace(metric, big_e);
    let g = metric.metric_field();
    let denom = params.one_plus_kappa_n();
    SymTensorField::from_fn(g.grid(), |p, i, j| {
        (params.kappa * tr.values()[p] + params.lambda) / denom * g.at(p, i, j) - big_e.at(p, i, j)
    })
}

/// `F(h, e) = Ric(δ+h) + Z(h, e) − (1/Λ) 𝓛_δ 𝓑_{δ+h}(Λδ + e)`.
pub fn assemble_f(h: &SymTensorField, e: &SymTensorField, params: &EinParams) -> Result<SymTensorField> {
    params.require_gauged()?;
    let conn = Connection::from_perturbation(h)?;
    let omega = bianchi_cal_shifted(&conn, e, params)?.scaled(1.0 / params.lambda);
    let z = zero_order_z_with(conn.metric(), &target(e, params), params);
    Ok(&(&ricci(&conn) + &z) - &sym_grad_flat(&omega))
}

/// `∂_i ∂_j u`.
fn hessian(u: &crate::tensor_grid::ScalarField) -> SymTensorField {
    sym_grad_flat(&gradient(u))
}

/// `D_hF(0,0) h = ½Δh + Λh − (κΛ/(1+κn)) tr h δ − ((n−2)κ/(2(1+κn))) ∂∂ tr h`,
/// assembled in physical space.
pub fn df0(h: &SymTensorField, params: &EinParams) -> Result<SymTensorField> {
    params.require_regular()?;
    let tr = h.flat_trace();
    let shift = params.kappa * params.lambda / params.one_plus_kappa_n();
    let out = laplacian_sym(h)
        .scaled(0.5)
        .axpy(params.lambda, h)
        .axpy(-shift, &SymTensorField::conformal(&tr))
        .axpy(-params.gauge_coupling(), &hessian(&tr));
    Ok(out)
}

/// `DRic(δ) h = ½Δh − 𝓛_δ B_δ(h)`.
pub fn d_ric_flat(h: &SymTensorField) -> SymTensorField {
    &laplacian_sym(h).scaled(0.5) - &sym_grad_flat(&bianchi_flat(h))
}

/// Derivative of `g ↦ 𝓑_g(E)` at `δ` in direction `h`:
/// `−E∘B_δ(h) + ((n−2)κ/(2(1+κn))) d⟨E,h⟩ + T(E,h)`.
pub fn d_bianchi_flat(e: &SymTensorField, h: &SymTensorField, params: &EinParams) -> Result<OneFormField> {
    params.require_regular()?;
    let out = contract_flat(e, &bianchi_flat(h))
        .scaled(-1.0)
        .axpy(params.gauge_coupling(), &gradient(&flat_inner(e, h)))
        .axpy(1.0, &t_correction(e, h));
    Ok(out)
}

/// Gauge witness `ω = (1/Λ)𝓑_{δ+h}(Λδ+e)` and the norms certifying it vanishes.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeResidual {
    #[serde(skip)]
    pub omega: OneFormField,
    /// `‖ω‖_{s+1,t}`.
    pub omega_norm: f64,
    /// `‖P_{δ+h} ω‖_{s−1,t}` with `P_g ω = B_g(𝓛_δ ω) + Λω`.
    pub p_omega_norm: f64,
}

pub fn gauge_residual(
    h: &SymTensorField,
    e: &SymTensorField,
    params: &EinParams,
    s: f64,
    t: f64,
) -> Result<GaugeResidual> {
    params.require_gauged()?;
    let conn = Connection::from_perturbation(h)?;
    let omega = bianchi_cal_shifted(&conn, e, params)?.scaled(1.0 / params.lambda);
    let p_omega = bianchi_b(&conn, &sym_grad_flat(&omega)).axpy(params.lambda, &omega);
    Ok(GaugeResidual {
        omega_norm: sobolev_norm(&omega, s + 1.0, t),
        p_omega_norm: sobolev_norm(&p_omega, s - 1.0, t),
        omega,
    })
}
