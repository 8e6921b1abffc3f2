use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::tensor_grid::{Grid, MAX_DIM};

/// Frequencies `ξ_k = 2πk/L`, `k ∈ {-N/2, …, N/2-1}^n`, in FFT ordering.
///
/// Two wavenumber tables are kept. Operator symbols (derivatives, Laplacian,
/// the linearized operator) use the derivative table, in which the Nyquist
/// frequency `k = -N/2` is set to zero on every axis so that spectral
/// derivatives of real fields stay real and `Σ ∂_j∂_j` matches the Laplacian
/// symbol exactly. Sobolev norms grade with the true frequencies.
#[derive(Debug)]
pub struct ModeSet {
    grid: Grid,
    wavenumbers: Vec<f64>,
    derivative_wavenumbers: Vec<f64>,
    xi_squared: Vec<f64>,
    bracket: Vec<f64>,
}

impl ModeSet {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.points();
        let base = 2.0 * PI / grid.length();
        let wavenumbers: Vec<f64> = (0..n)
            .map(|i| {
                let k = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
                base * k
            })
            .collect();
        let mut derivative_wavenumbers = wavenumbers.clone();
        derivative_wavenumbers[n / 2] = 0.0;

        let dim = grid.dim();
        let mut xi_squared = Vec::with_capacity(grid.len());
        let mut bracket = Vec::with_capacity(grid.len());
        for p in 0..grid.len() {
            let idx = grid.multi_index(p);
            let mut eff = 0.0;
            let mut full = 0.0;
            for &i in &idx[..dim] {
                eff += derivative_wavenumbers[i] * derivative_wavenumbers[i];
                full += wavenumbers[i] * wavenumbers[i];
            }
            xi_squared.push(eff);
            bracket.push((1.0 + full).sqrt());
        }
        Self {
            grid: *grid,
            wavenumbers,
            derivative_wavenumbers,
            xi_squared,
            bracket,
        }
    }

    /// Process-wide cached mode set for `grid`.
    pub fn shared(grid: &Grid) -> Arc<ModeSet> {
        type Key = (usize, usize, u64);
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<ModeSet>>>> = OnceLock::new();
        let key = (grid.dim(), grid.points(), grid.length().to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(key)
            .or_insert_with(|| Arc::new(ModeSet::new(grid)))
            .clone()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.xi_squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi_squared.is_empty()
    }

    /// Derivative wavenumber `ξ_axis` of mode `p` (zero at Nyquist).
    #[inline]
    pub fn xi(&self, p: usize, axis: usize) -> f64 {
        self.derivative_wavenumbers[self.grid.axis_index(p, axis)]
    }

    /// All derivative wavenumbers of mode `p`.
    pub fn xi_vector(&self, p: usize) -> [f64; MAX_DIM] {
        let idx = self.grid.multi_index(p);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.grid.dim() {
            xi[axis] = self.derivative_wavenumbers[idx[axis]];
        }
        xi
    }

    /// Per-axis derivative wavenumbers in FFT ordering.
    pub fn axis_wavenumbers(&self) -> &[f64] {
        &self.derivative_wavenumbers
    }

    /// True frequencies of mode `p` (Nyquist kept at `-πN/L`).
    pub fn frequency(&self, p: usize) -> [f64; MAX_DIM] {
        let idx = self.grid.multi_index(p);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.grid.dim() {
            xi[axis] = self.wavenumbers[idx[axis]];
        }
        xi
    }

    /// Operator symbol `|ξ|²` of mode `p`.
    #[inline]
    pub fn xi_squared(&self, p: usize) -> f64 {
        self.xi_squared[p]
    }

    pub fn xi_squared_all(&self) -> &[f64] {
        &self.xi_squared
    }

    /// `⟨ξ⟩ = (1 + |ξ|²)^{1/2}` of mode `p`, true frequencies.
    #[inline]
    pub fn bracket(&self, p: usize) -> f64 {
        self.bracket[p]
    }

    /// True when mode `p` sits on the Nyquist plane of some axis.
    pub fn is_nyquist(&self, p: usize) -> bool {
        let idx = self.grid.multi_index(p);
        idx[..self.grid.dim()]
            .iter()
            .any(|&i| i == self.grid.points() / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mode_appears_once() {
        let grid = Grid::new(3, 8, 2.0 * PI).unwrap();
        let modes = ModeSet::new(&grid);
        let zeros = (0..modes.len())
            .filter(|&p| modes.frequency(p)[..3].iter().all(|&x| x == 0.0))
            .count();
        assert_eq!(zeros, 1);
        assert_eq!(modes.bracket(0), 1.0);
    }

    #[test]
    fn wavenumbers_follow_fft_ordering() {
        let grid = Grid::new(2, 8, 2.0 * PI).unwrap();
        let modes = ModeSet::new(&grid);
        assert_eq!(
            modes.axis_wavenumbers(),
            &[0.0, 1.0, 2.0, 3.0, 0.0, -3.0, -2.0, -1.0]
        );
        assert_eq!(modes.frequency(grid.flat_index(&[4, 0]))[0], -4.0);
    }

    #[test]
    fn hermitian_partner_has_opposite_wavenumber() {
        let grid = Grid::new(3, 8, 3.0).unwrap();
        let modes = ModeSet::new(&grid);
        for p in [1, 9, 77, 300] {
            let idx = grid.multi_index(p);
            let partner: Vec<usize> = idx[..3].iter().map(|&i| (8 - i) % 8).collect();
            let q = grid.flat_index(&partner);
            for axis in 0..3 {
                assert_eq!(modes.xi(p, axis), -modes.xi(q, axis));
            }
        }
    }
}
