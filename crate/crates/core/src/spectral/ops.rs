use num_complex::Complex64;

use super::fft::Spectrum;
use super::modes::ModeSet;
use crate::error::{Error, Result};
use crate::tensor_grid::{OneFormField, ScalarField, SymTensorField, TensorField};

/// Nyquist-plane energy above this fraction of the total triggers a warning.
pub const NYQUIST_WARN_FRACTION: f64 = 1e-10;

/// Fraction of spectral energy carried by Nyquist-plane modes.
pub fn nyquist_fraction(spectrum: &Spectrum) -> f64 {
    let modes = ModeSet::shared(spectrum.grid());
    let total = spectrum.energy();
    if total == 0.0 {
        return 0.0;
    }
    let nyq: f64 = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(p, _)| modes.is_nyquist(*p))
        .map(|(_, c)| c.norm_sqr())
        .sum();
    nyq / total
}

fn warn_if_not_band_limited(spectrum: &Spectrum) {
    if log::log_enabled!(log::Level::Warn) {
        let frac = nyquist_fraction(spectrum);
        if frac > NYQUIST_WARN_FRACTION {
            log::warn!("field is not band-limited: Nyquist energy fraction {frac:e}");
        }
    }
}

/// Multiplies the spectrum by `iξ_axis`.
pub fn differentiate_spectrum(spectrum: &Spectrum, axis: usize) -> Spectrum {
    let modes = ModeSet::shared(spectrum.grid());
    let coeffs = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .map(|(p, c)| {
            let xi = modes.xi(p, axis);
            Complex64::new(-c.im * xi, c.re * xi)
        })
        .collect();
    Spectrum::from_coeffs(spectrum.grid(), coeffs)
}

/// `∂_axis` of the field whose spectrum is given.
pub fn derivative_of(spectrum: &Spectrum, axis: usize) -> ScalarField {
    differentiate_spectrum(spectrum, axis).to_real()
}

/// Spectral derivative `∂_axis f`.
pub fn derivative(f: &ScalarField, axis: usize) -> ScalarField {
    let spectrum = Spectrum::of(f);
    warn_if_not_band_limited(&spectrum);
    derivative_of(&spectrum, axis)
}

/// Exterior derivative of a scalar, `(df)_j = ∂_j f`.
pub fn gradient(f: &ScalarField) -> OneFormField {
    let spectrum = Spectrum::of(f);
    let comps = (0..f.grid().dim())
        .map(|j| derivative_of(&spectrum, j))
        .collect();
    OneFormField::from_scalars(f.grid(), comps)
}

/// Multiplies every mode by `symbol(|ξ|²)`.
pub fn apply_radial_symbol(f: &ScalarField, symbol: impl Fn(f64) -> f64) -> ScalarField {
    let mut spectrum = Spectrum::of(f);
    let modes = ModeSet::shared(f.grid());
    for (p, c) in spectrum.coeffs_mut().iter_mut().enumerate() {
        *c *= symbol(modes.xi_squared(p));
    }
    spectrum.to_real()
}

/// Geometer's Laplacian `Δ = -Σ_j ∂_j²`, symbol `+|ξ|²`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    apply_radial_symbol(f, |xi2| xi2)
}

/// Solves `(Δ + C) u = f` mode by mode.
pub fn invert_helmholtz(f: &ScalarField, shift: f64) -> Result<ScalarField> {
    if !(shift > 0.0) {
        return Err(Error::NonPositiveC(shift));
    }
    Ok(apply_radial_symbol(f, |xi2| 1.0 / (xi2 + shift)))
}

/// Applies `Δ + C`.
pub fn apply_helmholtz(f: &ScalarField, shift: f64) -> ScalarField {
    apply_radial_symbol(f, |xi2| xi2 + shift)
}

/// Component-wise Laplacian of a symmetric 2-tensor field.
pub fn laplacian_sym(h: &SymTensorField) -> SymTensorField {
    map_sym_components(h, laplacian)
}

pub(crate) fn map_sym_components(
    h: &SymTensorField,
    f: impl Fn(&ScalarField) -> ScalarField,
) -> SymTensorField {
    let grid = *h.grid();
    let comps = h
        .components()
        .iter()
        .map(|c| {
            let s = ScalarField::from_values(&grid, c.clone()).expect("finite field");
            f(&s).into_components().remove(0)
        })
        .collect();
    SymTensorField::from_raw(&grid, comps)
}

/// `∂_s S_c` for every axis `s` and component `c`: `out[s][c]`.
pub(crate) fn sym_gradients(s: &SymTensorField) -> Vec<Vec<Vec<f64>>> {
    let grid = s.grid();
    let spectra: Vec<Spectrum> = s
        .components()
        .iter()
        .map(|c| Spectrum::forward(c, grid))
        .collect();
    (0..grid.dim())
        .map(|axis| {
            spectra
                .iter()
                .map(|sp| differentiate_spectrum(sp, axis).to_values())
                .collect()
        })
        .collect()
}
