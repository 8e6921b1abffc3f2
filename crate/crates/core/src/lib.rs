//! Numerical laboratory for affine-in-Ricci curvature operators on `ℝⁿ`.
//!
//! `Ein(g) = Ric(g) + κR(g)g + Λg` is computed on a periodic lattice standing
//! in for `ℝⁿ`, and the prescribed-curvature equation `Ein(δ+h) = Λδ + e` is
//! solved near the flat metric through a DeTurck-gauged operator whose
//! linearization is inverted mode by mode.

pub mod curvature;
pub mod efld;
pub mod error;
pub mod gauged_solver;
pub mod generators;
pub mod riemann_image;
pub mod spectral;
pub mod tensor_grid;

pub use error::{Error, Result};
