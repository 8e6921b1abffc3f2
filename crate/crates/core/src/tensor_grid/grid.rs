use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

/// Uniform periodic lattice on the box `[-L/2, L/2)^n`.
///
/// Lattice points are stored row-major: axis 0 varies slowest. The point with
/// axis index `N/2` on every axis is the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be in 2..={MAX_DIM}, got {dim}"
            )));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self {
            dim,
            points,
            length,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis (`N`).
    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Lattice spacing `L / N`, identical on every axis.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Total number of lattice points, `N^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `Δx^n` of the lattice quadrature.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Flat-index distance between neighbours along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.dim - 1 - axis) as u32)
    }

    /// Index along `axis` of the lattice point `flat`.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.stride(axis)) % self.points
    }

    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rest % self.points;
            rest /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim);
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Lattice index of `x = 0` along each axis.
    pub fn origin_index(&self) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        idx[..self.dim].fill(self.points / 2);
        idx
    }

    /// Coordinate of axis index `i`.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        (i as f64 - (self.points / 2) as f64) * self.spacing()
    }

    /// Coordinates of lattice point `flat` (unused trailing slots are zero).
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// `|x|^2` at lattice point `flat`, measured in the fundamental domain.
    pub fn radius_squared(&self, flat: usize) -> f64 {
        self.position(flat)[..self.dim].iter().map(|x| x * x).sum()
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "grids differ: {self:?} vs {other:?}"
            )))
        }
    }

    /// Number of independent components of a symmetric 2-tensor, `n(n+1)/2`.
    #[inline]
    pub fn sym_count(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }
}

/// Storage slot of `S(i, j)` in the packed upper-triangular layout.
#[inline]
pub fn sym_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

/// Inverse of [`sym_index`]: the `(i, j)` pair with `i <= j` stored at `slot`.
pub fn sym_pair(dim: usize, slot: usize) -> (usize, usize) {
    let mut s = slot;
    for i in 0..dim {
        let row = dim - i;
        if s < row {
            return (i, i + s);
        }
        s -= row;
    }
    panic!("slot {slot} out of range for dimension {dim}");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_3d_point_count_and_spacing() {
        let g = Grid::new(3, 32, 20.0).unwrap();
        assert_eq!(g.len(), 32768);
        assert_eq!(g.spacing(), 0.625);
    }

    #[test]
    fn origin_sits_on_lattice() {
        let g = Grid::new(2, 8, 8.0).unwrap();
        assert_eq!(g.len(), 64);
        let o = g.origin_index();
        assert_eq!(&o[..2], &[4, 4]);
        let flat = g.flat_index(&o[..2]);
        assert_eq!(g.radius_squared(flat), 0.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(3, 7, 10.0).is_err());
        assert!(Grid::new(5, 8, 10.0).is_err());
        assert!(Grid::new(1, 8, 10.0).is_err());
        assert!(Grid::new(3, 6, 10.0).is_err());
        assert!(Grid::new(3, 8, 0.0).is_err());
    }

    #[test]
    fn multi_index_round_trips() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        for flat in [0, 1, 7, 8, 63, 64, 511] {
            let idx = g.multi_index(flat);
            assert_eq!(g.flat_index(&idx[..3]), flat);
        }
        assert_eq!(g.axis_index(g.flat_index(&[3, 5, 6]), 1), 5);
    }

    #[test]
    fn sym_layout() {
        for dim in 2..=4 {
            let mut seen = vec![false; dim * (dim + 1) / 2];
            for i in 0..dim {
                for j in i..dim {
                    let s = sym_index(dim, i, j);
                    assert_eq!(s, sym_index(dim, j, i));
                    assert_eq!(sym_pair(dim, s), (i, j));
                    seen[s] = true;
                }
            }
            assert!(seen.iter().all(|&b| b));
        }
    }
}
