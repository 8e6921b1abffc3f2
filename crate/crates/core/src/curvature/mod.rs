//! Differential-geometric operators on metrics `g = δ + h`.
//!
//! All derivatives are spectral; products are pointwise.

mod bianchi;
mod connection;
mod kulkarni;
mod params;

pub use bianchi::{
    bianchi_b, bianchi_cal, bianchi_cal_shifted, bianchi_flat, bianchi_with_coefficient, contract_flat, flat_inner,
    sym_grad_flat, t_correction,
};
pub use connection::{
    christoffel, divergence, ein, ricci, ricci_with_asymmetry, riemann, scalar_curvature,
    Connection, RicciOutput,
};
pub use kulkarni::{cal_ein, cal_ein_trace_defect, four_trace, kulkarni_nomizu, CurvatureSymmetries};
pub use params::{EinParams, Hypothesis};
