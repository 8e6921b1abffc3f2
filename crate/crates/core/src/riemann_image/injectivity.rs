use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::EinParams;
use crate::error::{Error, Result};
use crate::generators::RandomBumps;
use crate::tensor_grid::{Grid, R13Field, SymTensorField, TensorField};

use super::map::riemann_christoffel_map;

/// Singular values of the finite-difference differential of the
/// Riemann–Christoffel map at `h = 0`, restricted to a random sample of
/// conformal and traceless directions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityProbe {
    pub directions: usize,
    pub epsilon: f64,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub smallest: f64,
}

fn flat_dot(a: &R13Field, b: &R13Field) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>())
        .sum()
}

fn random_direction(rng: &mut ChaCha8Rng, grid: &Grid, conformal: bool) -> SymTensorField {
    let gen = RandomBumps {
        count: 1,
        center_fraction: 0.05,
        width_fraction: (0.25, 0.3),
        amplitude: 1.0,
    };
    if conformal {
        SymTensorField::conformal(&gen.scalar(rng, grid))
    } else {
        gen.tensor(rng, grid).traceless_part()
    }
}

pub fn differential_injectivity(
    grid: &Grid,
    params: &EinParams,
    directions: usize,
    epsilon: f64,
    seed: u64,
) -> Result<InjectivityProbe> {
    if directions == 0 || !(epsilon > 0.0) {
        return Err(Error::PreconditionNotMet(
            "need at least one direction and a positive step".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // orthonormal inputs, so singular values of the image matrix are those of the differential
    let mut inputs: Vec<SymTensorField> = Vec::with_capacity(directions);
    for d in 0..directions {
        let mut v = random_direction(&mut rng, grid, d % 2 == 0);
        for u in &inputs {
            v = v.axpy(-v.l2_dot(u), u);
        }
        let norm = v.l2_norm();
        if norm > 0.0 {
            inputs.push(v.scaled(1.0 / norm));
        }
    }
    let images: Vec<R13Field> = inputs
        .iter()
        .map(|v| {
            let plus = riemann_christoffel_map(&v.scaled(epsilon), params)?;
            let minus = riemann_christoffel_map(&v.scaled(-epsilon), params)?;
            Ok((&plus - &minus).scaled(0.5 / epsilon))
        })
        .collect::<Result<_>>()?;
    let k = images.len();
    let volume = grid.cell_volume();
    let gram = DMatrix::from_fn(k, k, |a, b| volume * flat_dot(&images[a], &images[b]));
    let mut singular_values: Vec<f64> = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let smallest = singular_values.last().copied().unwrap_or(0.0);
    Ok(InjectivityProbe {
        directions: k,
        epsilon,
        singular_values,
        smallest,
    })
}
