//! Fourier transforms, spectral derivatives, weighted Sobolev norms and the
//! closed-form inverse of the linearized gauged operator.

mod fft;
mod modes;
mod norms;
mod ops;
mod symbol;

pub use fft::Spectrum;
pub use modes::ModeSet;
pub use norms::{
    algebra_probe, algebra_ratio, embedding_constant, embedding_probe, sobolev_norm, ProbeSummary,
};
pub use ops::{
    apply_helmholtz, apply_radial_symbol, derivative, derivative_of, differentiate_spectrum,
    gradient, invert_helmholtz, laplacian, laplacian_sym, nyquist_fraction, NYQUIST_WARN_FRACTION,
};
pub(crate) use ops::sym_gradients;
pub use symbol::{order_ratio, L0Symbol};
