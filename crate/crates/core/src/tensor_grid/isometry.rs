use super::field::{four_index, FourTensorField, R13Field, SymTensorField, TensorField};
use super::grid::{Grid, MAX_DIM};
use crate::error::{Error, Result};

/// Linear isometry `(φx)_a = s_a x_{π(a)}` of the lattice: an axis
/// permutation composed with reflections.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeIsometry {
    permutation: Vec<usize>,
    reflect: Vec<bool>,
}

impl LatticeIsometry {
    pub fn new(permutation: Vec<usize>, reflect: Vec<bool>) -> Result<Self> {
        let dim = permutation.len();
        let mut seen = vec![false; dim];
        for &a in &permutation {
            if a >= dim || seen[a] {
                return Err(Error::PreconditionNotMet(format!(
                    "{permutation:?} is not a permutation"
                )));
            }
            seen[a] = true;
        }
        if reflect.len() != dim {
            return Err(Error::ShapeMismatch("reflection flags must match dimension".into()));
        }
        Ok(Self { permutation, reflect })
    }

    /// Lattice point that `φ` sends `p` to.
    fn image(&self, grid: &Grid, p: usize) -> usize {
        let n = grid.points();
        let idx = grid.multi_index(p);
        let mut out = [0; MAX_DIM];
        for a in 0..grid.dim() {
            let i = idx[self.permutation[a]];
            out[a] = if self.reflect[a] { (n - i) % n } else { i };
        }
        grid.flat_index(&out[..grid.dim()])
    }

    /// Jacobian entry `∂(φx)_a / ∂x_i`.
    fn jacobian(&self, a: usize, i: usize) -> f64 {
        if self.permutation[a] != i {
            0.0
        } else if self.reflect[a] {
            -1.0
        } else {
            1.0
        }
    }

    /// `a` with `π(a) = i`, and its sign.
    fn preimage(&self, i: usize) -> (usize, f64) {
        let a = self.permutation.iter().position(|&x| x == i).expect("permutation");
        (a, self.jacobian(a, i))
    }

    fn image_table(&self, grid: &Grid) -> Vec<usize> {
        (0..grid.len()).map(|p| self.image(grid, p)).collect()
    }

    /// `(φ*S)_{ij}(x) = J^a_i J^b_j S_{ab}(φx)`.
    pub fn pull_back_sym(&self, s: &SymTensorField) -> SymTensorField {
        let grid = *s.grid();
        let table = self.image_table(&grid);
        SymTensorField::from_fn(&grid, |p, i, j| {
            let (a, sa) = self.preimage(i);
            let (b, sb) = self.preimage(j);
            sa * sb * s.at(table[p], a, b)
        })
    }

    pub fn pull_back_four(&self, t: &FourTensorField) -> FourTensorField {
        let grid = *t.grid();
        let table = self.image_table(&grid);
        FourTensorField::from_fn(&grid, |p, i, j, k, l| {
            let (a, sa) = self.preimage(i);
            let (b, sb) = self.preimage(j);
            let (c, sc) = self.preimage(k);
            let (d, sd) = self.preimage(l);
            sa * sb * sc * sd * t.at(table[p], a, b, c, d)
        })
    }

    /// Orthogonal Jacobian, so the raised index transforms like the others.
    pub fn pull_back_r13(&self, t: &R13Field) -> R13Field {
        let grid = *t.grid();
        let dim = grid.dim();
        let table = self.image_table(&grid);
        let mut comps = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let (a, sa) = self.preimage(i);
                        let (b, sb) = self.preimage(j);
                        let (c, sc) = self.preimage(k);
                        let (d, sd) = self.preimage(l);
                        let src = t.component(four_index(dim, a, b, c, d));
                        let sign = sa * sb * sc * sd;
                        comps.push((0..grid.len()).map(|p| sign * src[table[p]]).collect());
                    }
                }
            }
        }
        R13Field::from_components(&grid, comps).expect("finite")
    }
}
