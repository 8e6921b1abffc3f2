//! The gauged prescribed-curvature operator, its linearization at the flat
//! metric and the iterative solver built on the explicit inverse of that
//! linearization.

mod operator;
mod solve;

pub use operator::{
    assemble_f, d_bianchi_flat, d_ric_flat, df0, gauge_residual, target, zero_order_z, GaugeResidual,
};
pub use solve::{einstein_residual, solve, Smallness, SolveConfig, SolveMode, SolveReport, SolveStatus};
