use std::sync::Arc;

use num_complex::Complex64;

use super::fft::Spectrum;
use super::modes::ModeSet;
use crate::error::{Error, Result};
use crate::tensor_grid::{sym_index, Grid, SymTensorField, TensorField};

/// Fourier symbol of the linearized gauged operator at the flat metric.
///
/// On each mode the operator acts on `ĥ` as
///
/// ```text
/// β(ξ) ĥ − κΛ/(1+κn) tr ĥ δ + (n−2)κ/(2(1+κn)) ξ⊗ξ tr ĥ,     β(ξ) = ½|ξ|² + Λ,
/// ```
///
/// which is block-triangular in the conformal/trace-free splitting: the trace
/// evolves alone with eigenvalue `α(ξ) = [(1+2(n−1)κ)|ξ|² + 2Λ] / (2(1+κn))`
/// and feeds the trace-free part through `ξ⊗ξ`.
#[derive(Clone, Debug)]
pub struct L0Symbol {
    dim: usize,
    kappa: f64,
    lambda: f64,
    modes: Arc<ModeSet>,
}

impl L0Symbol {
    pub fn new(grid: &Grid, kappa: f64, lambda: f64) -> Result<Self> {
        let dim = grid.dim();
        if 1.0 + kappa * dim as f64 == 0.0 {
            return Err(Error::KappaSingular { kappa, dim });
        }
        let symbol = Self {
            dim,
            kappa,
            lambda,
            modes: ModeSet::shared(grid),
        };
        for p in 0..symbol.modes.len() {
            let xi2 = symbol.modes.xi_squared(p);
            let (alpha, beta) = (symbol.alpha(xi2), symbol.beta(xi2));
            if !(alpha > 0.0 && beta > 0.0) {
                let xi = symbol.modes.xi_vector(p)[..dim].to_vec();
                return Err(Error::SymbolDegenerate {
                    kappa,
                    lambda,
                    xi,
                    alpha,
                    beta,
                });
            }
        }
        Ok(symbol)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    fn one_plus_kn(&self) -> f64 {
        1.0 + self.kappa * self.dim as f64
    }

    /// Conformal-block eigenvalue `α(ξ)` as a function of `|ξ|²`.
    pub fn alpha(&self, xi2: f64) -> f64 {
        let n = self.dim as f64;
        ((1.0 + 2.0 * (n - 1.0) * self.kappa) * xi2 + 2.0 * self.lambda) / (2.0 * self.one_plus_kn())
    }

    /// Trace-free-block eigenvalue `β(ξ) = ½|ξ|² + Λ`.
    pub fn beta(&self, xi2: f64) -> f64 {
        0.5 * xi2 + self.lambda
    }

    /// Coefficient `(n−2)κ / (2(1+κn))` of the `ξ⊗ξ` coupling.
    pub fn coupling(&self) -> f64 {
        (self.dim as f64 - 2.0) * self.kappa / (2.0 * self.one_plus_kn())
    }

    /// Coefficient `κΛ / (1+κn)` of the zero-order trace term.
    pub fn trace_shift(&self) -> f64 {
        self.kappa * self.lambda / self.one_plus_kn()
    }

    /// Coefficient of `|ξ|²` in `α(ξ)`; the conformal block is second order
    /// only while it is positive, i.e. for `κ > −1/(2(n−1))`.
    pub fn leading_coefficient(&self) -> f64 {
        let n = self.dim as f64;
        (1.0 + 2.0 * (n - 1.0) * self.kappa) / (2.0 * self.one_plus_kn())
    }

    /// `min_ξ α(ξ)` over the grid's modes.
    pub fn min_alpha(&self) -> f64 {
        self.modes
            .xi_squared_all()
            .iter()
            .map(|&x| self.alpha(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_ξ |ξ|² / α(ξ)`: how far the conformal block is from second order.
    pub fn max_order_ratio(&self) -> f64 {
        order_ratio(&self.modes, self.dim, self.kappa, self.lambda)
    }

    fn transform(h: &SymTensorField) -> Vec<Spectrum> {
        h.components()
            .iter()
            .map(|c| Spectrum::forward(c, h.grid()))
            .collect()
    }

    fn back(grid: &Grid, spectra: Vec<Vec<Complex64>>) -> SymTensorField {
        let comps = spectra
            .into_iter()
            .map(|c| Spectrum::from_coeffs(grid, c).to_values())
            .collect();
        SymTensorField::from_components(grid, comps).expect("finite symbol output")
    }

    fn trace_hat(&self, spectra: &[Vec<Complex64>], p: usize) -> Complex64 {
        (0..self.dim)
            .map(|i| spectra[sym_index(self.dim, i, i)][p])
            .sum()
    }

    /// Fourier-side application of the linearized operator.
    pub fn apply(&self, h: &SymTensorField) -> SymTensorField {
        let grid = *h.grid();
        let input: Vec<Vec<Complex64>> = Self::transform(h)
            .into_iter()
            .map(|s| s.coeffs().to_vec())
            .collect();
        let mut out = input.clone();
        let (shift, coupling) = (self.trace_shift(), self.coupling());
        for p in 0..grid.len() {
            let xi2 = self.modes.xi_squared(p);
            let xi = self.modes.xi_vector(p);
            let beta = self.beta(xi2);
            let tr = self.trace_hat(&input, p);
            for i in 0..self.dim {
                for j in i..self.dim {
                    let slot = sym_index(self.dim, i, j);
                    let mut v = input[slot][p] * beta + tr * (coupling * xi[i] * xi[j]);
                    if i == j {
                        v -= tr * shift;
                    }
                    out[slot][p] = v;
                }
            }
        }
        Self::back(&grid, out)
    }

    /// Inverts [`apply`](Self::apply): solve the trace equation with `α`,
    /// remove the trace-sourced `δ` and `ξ⊗ξ` terms, divide by `β`.
    pub fn solve(&self, f: &SymTensorField) -> SymTensorField {
        let grid = *f.grid();
        let input: Vec<Vec<Complex64>> = Self::transform(f)
            .into_iter()
            .map(|s| s.coeffs().to_vec())
            .collect();
        let mut out = input.clone();
        let (shift, coupling) = (self.trace_shift(), self.coupling());
        for p in 0..grid.len() {
            let xi2 = self.modes.xi_squared(p);
            let xi = self.modes.xi_vector(p);
            let tr = self.trace_hat(&input, p) / self.alpha(xi2);
            let inv_beta = 1.0 / self.beta(xi2);
            for i in 0..self.dim {
                for j in i..self.dim {
                    let slot = sym_index(self.dim, i, j);
                    let mut v = input[slot][p] - tr * (coupling * xi[i] * xi[j]);
                    if i == j {
                        v += tr * shift;
                    }
                    out[slot][p] = v * inv_beta;
                }
            }
        }
        Self::back(&grid, out)
    }
}

/// `max_ξ |ξ|² / α(ξ)` over the operator modes of `modes`; infinite when
/// `α` is not positive somewhere (at or below the critical `κ`).
pub fn order_ratio(modes: &ModeSet, dim: usize, kappa: f64, lambda: f64) -> f64 {
    let n = dim as f64;
    let denom = 2.0 * (1.0 + kappa * n);
    let mut worst = 0.0_f64;
    for &xi2 in modes.xi_squared_all() {
        let alpha = ((1.0 + 2.0 * (n - 1.0) * kappa) * xi2 + 2.0 * lambda) / denom;
        if !(alpha > 0.0) {
            return f64::INFINITY;
        }
        worst = worst.max(xi2 / alpha);
    }
    worst
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::ops::invert_helmholtz;
    use crate::tensor_grid::ScalarField;

    #[test]
    fn kappa_zero_decouples() {
        let grid = Grid::new(3, 8, 4.0).unwrap();
        let sym = L0Symbol::new(&grid, 0.0, 1.0).unwrap();
        assert_eq!(sym.coupling(), 0.0);
        assert_eq!(sym.trace_shift(), 0.0);
        let f = SymTensorField::from_fn(&grid, |p, i, j| ((p * 13 + i + 2 * j) % 7) as f64 - 3.0);
        let h = sym.solve(&f);
        let c = ScalarField::from_values(&grid, f.component(1).to_vec()).unwrap();
        let expected = invert_helmholtz(&c, 2.0).unwrap().scaled(2.0);
        let got = ScalarField::from_values(&grid, h.component(1).to_vec()).unwrap();
        assert!(got.max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn traceless_mode_divides_by_beta() {
        let grid = Grid::new(3, 16, 2.0 * PI).unwrap();
        let sym = L0Symbol::new(&grid, 0.3, 1.0).unwrap();
        let wave = ScalarField::from_fn(&grid, |x| (x[0] + 2.0 * x[2]).cos());
        // diag(1, -1, 0) is trace-free
        let f = SymTensorField::from_fn(&grid, |p, i, j| match (i, j) {
            (0, 0) => wave.values()[p],
            (1, 1) => -wave.values()[p],
            _ => 0.0,
        });
        let h = sym.solve(&f);
        let expected = f.scaled(1.0 / (0.5 * 5.0 + 1.0));
        assert!(h.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn degenerate_symbol_is_rejected() {
        let grid = Grid::new(3, 8, 4.0).unwrap();
        assert!(matches!(
            L0Symbol::new(&grid, -1.0 / 3.0, 1.0),
            Err(Error::KappaSingular { .. })
        ));
        assert!(matches!(
            L0Symbol::new(&grid, 0.0, -1.0),
            Err(Error::SymbolDegenerate { .. })
        ));
        assert!(matches!(
            L0Symbol::new(&grid, -0.3, 1.0),
            Err(Error::SymbolDegenerate { .. })
        ));
    }

    #[test]
    fn alpha_is_bounded_below_above_critical_kappa() {
        let grid = Grid::new(3, 16, 10.0).unwrap();
        for kappa in [-0.24, -0.1, 0.0, 0.5] {
            let sym = L0Symbol::new(&grid, kappa, 1.0).unwrap();
            let floor = 1.0 / (1.0 + 3.0 * kappa);
            for &xi2 in sym.modes().xi_squared_all() {
                assert!(sym.alpha(xi2) >= floor - 1e-15);
            }
        }
    }
}
