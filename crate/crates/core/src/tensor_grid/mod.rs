//! Lattice discretization of `ℝⁿ` and the fields living on it.

mod field;
mod grid;
mod isometry;
mod metric;

pub use field::{
    four_index, ChristoffelField, FourTensorField, OneFormField, R13Field, RankTag, ScalarField,
    SymTensorField, TensorField,
};
pub use isometry::LatticeIsometry;
pub use grid::{sym_index, sym_pair, Grid, MAX_DIM};
pub use metric::{
    metric_inverse, neumann_bound_check, neumann_partial_sum, trace, weight_field, Metric,
    NeumannCheck,
};
