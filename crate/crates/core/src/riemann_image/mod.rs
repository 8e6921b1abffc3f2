//! The map `h ↦ (δ+h)⁻¹𝓔in(δ+h) − δ⁻¹𝓔in(δ)` into `(1,3)` tensors, its
//! symmetry validators, and finite seminorm profiles.

mod injectivity;
mod map;
mod seminorms;

pub use injectivity::{differential_injectivity, InjectivityProbe};
pub use map::{riemann_christoffel_map, R13Residuals};
pub use seminorms::{seminorm_profile, SeminormEntry, SeminormProfile, DEFAULT_K_MAX};
