use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::grid::{sym_index, sym_pair, Grid, MAX_DIM};
use crate::error::{Error, Result};

/// Index layout of a field, also written into EFLD headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankTag {
    Scalar,
    OneForm,
    SymTensor,
    /// `Γ^k_{ij}`, symmetric in the lower pair.
    Christoffel,
    /// Fully covariant 4-tensor, all `n^4` slots.
    FourTensor,
    /// Type (1,3) tensor, first index raised.
    R13,
}

impl RankTag {
    pub fn component_count(self, dim: usize) -> usize {
        match self {
            RankTag::Scalar => 1,
            RankTag::OneForm => dim,
            RankTag::SymTensor => dim * (dim + 1) / 2,
            RankTag::Christoffel => dim * dim * (dim + 1) / 2,
            RankTag::FourTensor | RankTag::R13 => dim.pow(4),
        }
    }

    /// On-disk code: covariant rank in the low digit, contravariant rank in
    /// the tens digit; symmetric 2-tensors and Christoffel fields get their
    /// own codes.
    pub fn code(self) -> u32 {
        match self {
            RankTag::Scalar => 0,
            RankTag::OneForm => 1,
            RankTag::SymTensor => 2,
            RankTag::FourTensor => 4,
            RankTag::Christoffel => 12,
            RankTag::R13 => 13,
        }
    }

    pub fn from_code(code: u32) -> Result<Self> {
        Ok(match code {
            0 => RankTag::Scalar,
            1 => RankTag::OneForm,
            2 => RankTag::SymTensor,
            4 => RankTag::FourTensor,
            12 => RankTag::Christoffel,
            13 => RankTag::R13,
            other => return Err(Error::Format(format!("unknown rank tag {other}"))),
        })
    }
}

/// Common view over every field type on a [`Grid`].
pub trait TensorField {
    const RANK: RankTag;

    fn grid(&self) -> &Grid;

    fn components(&self) -> &[Vec<f64>];

    /// How many tensor slots component `c` stands for (2 for off-diagonal
    /// entries of packed symmetric storage).
    fn multiplicity(&self, _c: usize) -> f64 {
        1.0
    }

    fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Lattice-quadrature L² norm, summed over all tensor slots.
    fn l2_norm(&self) -> f64 {
        let vol = self.grid().cell_volume();
        let sum: f64 = self
            .components()
            .iter()
            .enumerate()
            .map(|(c, comp)| self.multiplicity(c) * comp.iter().map(|v| v * v).sum::<f64>())
            .sum();
        (vol * sum).sqrt()
    }

    /// Lattice-quadrature L² inner product.
    fn l2_dot(&self, other: &Self) -> f64
    where
        Self: Sized,
    {
        let vol = self.grid().cell_volume();
        let sum: f64 = self
            .components()
            .iter()
            .zip(other.components())
            .enumerate()
            .map(|(c, (a, b))| {
                self.multiplicity(c) * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
            })
            .sum();
        vol * sum
    }
}

fn check_components(grid: &Grid, rank: RankTag, comps: &[Vec<f64>]) -> Result<()> {
    let expected = rank.component_count(grid.dim());
    if comps.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "{rank:?} field needs {expected} components, got {}",
            comps.len()
        )));
    }
    for (c, comp) in comps.iter().enumerate() {
        if comp.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "component {c} has {} values, grid has {} points",
                comp.len(),
                grid.len()
            )));
        }
        if let Some(point) = comp.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                component: c,
                point,
            });
        }
    }
    Ok(())
}

macro_rules! tensor_field {
    ($(#[$meta:meta])* $name:ident, $rank:expr) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            grid: Grid,
            comps: Vec<Vec<f64>>,
        }

        impl $name {
            pub fn zeros(grid: &Grid) -> Self {
                let count = $rank.component_count(grid.dim());
                Self {
                    grid: *grid,
                    comps: vec![vec![0.0; grid.len()]; count],
                }
            }

            /// Validates component count, lengths and finiteness.
            pub fn from_components(grid: &Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
                check_components(grid, $rank, &comps)?;
                Ok(Self { grid: *grid, comps })
            }

            #[allow(dead_code)]
            pub(crate) fn from_raw(grid: &Grid, comps: Vec<Vec<f64>>) -> Self {
                debug_assert_eq!(comps.len(), $rank.component_count(grid.dim()));
                Self { grid: *grid, comps }
            }

            pub fn into_components(self) -> Vec<Vec<f64>> {
                self.comps
            }

            pub fn component(&self, c: usize) -> &[f64] {
                &self.comps[c]
            }

            #[allow(dead_code)]
            pub(crate) fn component_mut(&mut self, c: usize) -> &mut [f64] {
                &mut self.comps[c]
            }

            pub fn is_finite(&self) -> bool {
                self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
            }

            pub fn scaled(&self, a: f64) -> Self {
                self.map(|v| a * v)
            }

            pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
                let comps = self
                    .comps
                    .iter()
                    .map(|c| c.iter().map(|&v| f(v)).collect())
                    .collect();
                Self { grid: self.grid, comps }
            }

            /// `self + a * other`.
            pub fn axpy(&self, a: f64, other: &Self) -> Self {
                debug_assert_eq!(self.grid, other.grid);
                let comps = self
                    .comps
                    .iter()
                    .zip(&other.comps)
                    .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + a * v).collect())
                    .collect();
                Self { grid: self.grid, comps }
            }

            /// Component-wise difference, sup norm.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.comps
                    .iter()
                    .zip(&other.comps)
                    .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
                    .fold(0.0, f64::max)
            }
        }

        impl TensorField for $name {
            const RANK: RankTag = $rank;

            fn grid(&self) -> &Grid {
                &self.grid
            }

            fn components(&self) -> &[Vec<f64>] {
                &self.comps
            }

            fn multiplicity(&self, c: usize) -> f64 {
                multiplicity($rank, self.grid.dim(), c)
            }
        }

        impl Add<&$name> for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                self.axpy(1.0, rhs)
            }
        }

        impl Sub<&$name> for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                self.axpy(-1.0, rhs)
            }
        }

        impl Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, rhs: f64) -> $name {
                self.scaled(rhs)
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scaled(-1.0)
            }
        }
    };
}

fn multiplicity(rank: RankTag, dim: usize, c: usize) -> f64 {
    match rank {
        RankTag::SymTensor => {
            let (i, j) = sym_pair(dim, c);
            if i == j {
                1.0
            } else {
                2.0
            }
        }
        RankTag::Christoffel => {
            let m = dim * (dim + 1) / 2;
            let (i, j) = sym_pair(dim, c % m);
            if i == j {
                1.0
            } else {
                2.0
            }
        }
        _ => 1.0,
    }
}

tensor_field!(
    /// Real function on the lattice.
    ScalarField,
    RankTag::Scalar
);
tensor_field!(
    /// Covector field, one component per axis.
    OneFormField,
    RankTag::OneForm
);
tensor_field!(
    /// Symmetric covariant 2-tensor field in packed `i <= j` storage.
    SymTensorField,
    RankTag::SymTensor
);
tensor_field!(
    /// Fully covariant 4-tensor field; symmetries are checked, not stored.
    FourTensorField,
    RankTag::FourTensor
);
tensor_field!(
    /// Christoffel symbols `Γ^k_{ij}`, packed in `(i, j)`.
    ChristoffelField,
    RankTag::Christoffel
);
tensor_field!(
    /// Type (1,3) tensor field `τ^i_{klm}`.
    R13Field,
    RankTag::R13
);

impl ScalarField {
    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        Self::from_components(grid, vec![values])
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self::from_raw(grid, vec![vec![value; grid.len()]])
    }

    /// Samples `f(x)` at every lattice point.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|p| f(&grid.position(p)[..dim]))
            .collect();
        Self::from_raw(grid, vec![values])
    }

    pub fn values(&self) -> &[f64] {
        &self.comps[0]
    }

    /// Pointwise product.
    pub fn mul_pointwise(&self, other: &ScalarField) -> ScalarField {
        let values = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .collect();
        Self::from_raw(&self.grid, vec![values])
    }
}

impl OneFormField {
    #[inline]
    pub fn at(&self, p: usize, i: usize) -> f64 {
        self.comps[i][p]
    }

    pub fn from_scalars(grid: &Grid, comps: Vec<ScalarField>) -> Self {
        Self::from_raw(grid, comps.into_iter().map(|s| s.into_components().remove(0)).collect())
    }
}

impl SymTensorField {
    #[inline]
    pub fn at(&self, p: usize, i: usize, j: usize) -> f64 {
        self.comps[sym_index(self.grid.dim(), i, j)][p]
    }

    /// Builds the field from `f(p, i, j)`, evaluated for `i <= j` only.
    pub fn from_fn(grid: &Grid, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let dim = grid.dim();
        let comps = (0..grid.sym_count())
            .map(|slot| {
                let (i, j) = sym_pair(dim, slot);
                (0..grid.len()).map(|p| f(p, i, j)).collect()
            })
            .collect();
        Self::from_raw(grid, comps)
    }

    /// `u · δ` for a scalar field `u`.
    pub fn conformal(u: &ScalarField) -> Self {
        let grid = *u.grid();
        Self::from_fn(&grid, |p, i, j| if i == j { u.values()[p] } else { 0.0 })
    }

    /// Constant multiple of the Kronecker tensor.
    pub fn delta(grid: &Grid, c: f64) -> Self {
        Self::from_fn(grid, |_, i, j| if i == j { c } else { 0.0 })
    }

    /// `u · T` for a scalar field `u` (pointwise).
    pub fn scale_by(&self, u: &ScalarField) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(u.values()).map(|(a, b)| a * b).collect())
            .collect();
        Self::from_raw(&self.grid, comps)
    }

    /// Trace with respect to the flat metric, `Σ_i S_ii`.
    pub fn flat_trace(&self) -> ScalarField {
        let dim = self.grid.dim();
        let mut values = vec![0.0; self.grid.len()];
        for i in 0..dim {
            for (v, s) in values.iter_mut().zip(&self.comps[sym_index(dim, i, i)]) {
                *v += s;
            }
        }
        ScalarField::from_raw(&self.grid, vec![values])
    }

    /// Flat trace-free part, `S - (tr S / n) δ`.
    pub fn traceless_part(&self) -> Self {
        let tr = self.flat_trace();
        let n = self.grid.dim() as f64;
        let mut out = self.clone();
        for i in 0..self.grid.dim() {
            let slot = sym_index(self.grid.dim(), i, i);
            for (v, t) in out.comps[slot].iter_mut().zip(tr.values()) {
                *v -= t / n;
            }
        }
        out
    }

    /// Dense `n × n` matrix at lattice point `p`.
    pub fn matrix_at(&self, p: usize) -> [[f64; MAX_DIM]; MAX_DIM] {
        let dim = self.grid.dim();
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..dim {
            for j in i..dim {
                let v = self.at(p, i, j);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }
}

#[inline]
pub fn four_index(dim: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * dim + j) * dim + k) * dim + l
}

impl FourTensorField {
    #[inline]
    pub fn at(&self, p: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comps[four_index(self.grid.dim(), i, j, k, l)][p]
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(usize, usize, usize, usize, usize) -> f64) -> Self {
        let dim = grid.dim();
        let mut comps = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        comps.push((0..grid.len()).map(|p| f(p, i, j, k, l)).collect());
                    }
                }
            }
        }
        Self::from_raw(grid, comps)
    }
}

impl R13Field {
    #[inline]
    pub fn at(&self, p: usize, i: usize, k: usize, l: usize, m: usize) -> f64 {
        self.comps[four_index(self.grid.dim(), i, k, l, m)][p]
    }
}

impl ChristoffelField {
    /// `Γ^k_{ij}` at lattice point `p`.
    #[inline]
    pub fn at(&self, p: usize, k: usize, i: usize, j: usize) -> f64 {
        let dim = self.grid.dim();
        self.comps[k * self.grid.sym_count() + sym_index(dim, i, j)][p]
    }

    #[inline]
    pub(crate) fn slot(dim: usize, k: usize, i: usize, j: usize) -> usize {
        k * (dim * (dim + 1) / 2) + sym_index(dim, i, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(3, 8, 4.0).unwrap()
    }

    #[test]
    fn sym_access_is_symmetric() {
        let g = grid();
        let s = SymTensorField::from_fn(&g, |p, i, j| (p + 10 * i + 100 * j) as f64);
        for p in [0, 5, 100] {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(s.at(p, i, j), s.at(p, j, i));
                }
            }
        }
    }

    #[test]
    fn rejects_non_finite_components() {
        let g = grid();
        let mut comps = vec![vec![0.0; g.len()]; 6];
        comps[2][17] = f64::NAN;
        let err = SymTensorField::from_components(&g, comps).unwrap_err();
        assert!(matches!(
            err,
            Error::NonFinite {
                component: 2,
                point: 17
            }
        ));
    }

    #[test]
    fn rejects_wrong_component_count() {
        let g = grid();
        assert!(OneFormField::from_components(&g, vec![vec![0.0; g.len()]; 2]).is_err());
    }

    #[test]
    fn l2_norm_counts_off_diagonal_twice() {
        let g = grid();
        let s = SymTensorField::from_fn(&g, |_, i, j| if i != j { 1.0 } else { 0.0 });
        // six off-diagonal slots of unit size over a box of volume 64
        assert!((s.l2_norm() - (6.0_f64 * 64.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn traceless_part_has_zero_trace() {
        let g = grid();
        let s = SymTensorField::from_fn(&g, |p, i, j| ((p * 7 + i * 3 + j) % 5) as f64);
        let tr = s.traceless_part().flat_trace();
        assert!(tr.max_abs() < 1e-14);
    }
}
