use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fft::Spectrum;
use super::modes::ModeSet;
use crate::error::{Error, Result};
use crate::generators::RandomBumps;
use crate::tensor_grid::{weight_field, Grid, ScalarField, TensorField};

/// Weighted Sobolev norm `‖u‖_{s,t} = ‖⟨ξ⟩^s · DFT(⟨x⟩^t u)‖`, with the lattice
/// quadrature folded in so that `s = t = 0` is the discrete L² norm.
/// Tensor fields take the root-sum-square over all slots.
pub fn sobolev_norm<F: TensorField>(u: &F, s: f64, t: f64) -> f64 {
    let grid = u.grid();
    let weight = (t != 0.0).then(|| weight_field(grid, t));
    let modes = ModeSet::shared(grid);
    let grade: Vec<f64> = (0..grid.len())
        .map(|p| {
            if s == 0.0 {
                1.0
            } else {
                modes.bracket(p).powf(2.0 * s)
            }
        })
        .collect();
    let mut total = 0.0;
    for (c, comp) in u.components().iter().enumerate() {
        let spectrum = match &weight {
            Some(w) => {
                let weighted: Vec<f64> = comp.iter().zip(w.values()).map(|(a, b)| a * b).collect();
                Spectrum::forward(&weighted, grid)
            }
            None => Spectrum::forward(comp, grid),
        };
        let sum: f64 = spectrum
            .coeffs()
            .iter()
            .zip(&grade)
            .map(|(c, g)| g * c.norm_sqr())
            .sum();
        total += u.multiplicity(c) * sum;
    }
    (total * grid.cell_volume() / grid.len() as f64).sqrt()
}

/// `‖u‖_{s',t'} / ‖u‖_{s,t}` for `s' <= s`, `t' <= t`.
pub fn embedding_probe<F: TensorField>(
    u: &F,
    (s, t): (f64, f64),
    (s_low, t_low): (f64, f64),
) -> Result<f64> {
    if s_low > s || t_low > t {
        return Err(Error::PreconditionNotMet(format!(
            "embedding needs s' <= s and t' <= t, got ({s_low}, {t_low}) vs ({s}, {t})"
        )));
    }
    let denom = sobolev_norm(u, s, t);
    if denom == 0.0 {
        return Err(Error::PreconditionNotMet("embedding probe of the zero field".into()));
    }
    Ok(sobolev_norm(u, s_low, t_low) / denom)
}

/// Result of a sampling probe over random bump pairs.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeSummary {
    pub samples: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

impl ProbeSummary {
    fn from_ratios(ratios: &[f64]) -> Self {
        Self {
            samples: ratios.len(),
            max_ratio: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }
}

fn probe_bumps() -> RandomBumps {
    RandomBumps {
        count: 2,
        center_fraction: 0.05,
        width_fraction: (0.12, 0.2),
        amplitude: 1.0,
    }
}

/// Empirical embedding constant `max ‖u‖_{s',t'} / ‖u‖_{s,t}` over random bumps.
pub fn embedding_constant(
    grid: &Grid,
    high: (f64, f64),
    low: (f64, f64),
    samples: usize,
    seed: u64,
) -> Result<ProbeSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = probe_bumps();
    let ratios = (0..samples)
        .map(|_| embedding_probe(&gen.scalar(&mut rng, grid), high, low))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeSummary::from_ratios(&ratios))
}

/// `‖uv‖_{s,t} / (‖u‖_{s,t} ‖v‖_{s,t})` for one pair.
pub fn algebra_ratio(u: &ScalarField, v: &ScalarField, s: f64, t: f64) -> f64 {
    let uv = u.mul_pointwise(v);
    sobolev_norm(&uv, s, t) / (sobolev_norm(u, s, t) * sobolev_norm(v, s, t))
}

/// Empirical algebra constant `Ĉ_{s,t}`: the largest [`algebra_ratio`] over
/// `samples` random bump pairs. Requires `s > n/2` and `t >= 0`.
pub fn algebra_probe(grid: &Grid, s: f64, t: f64, samples: usize, seed: u64) -> Result<ProbeSummary> {
    let half_dim = grid.dim() as f64 / 2.0;
    if !(s > half_dim) {
        return Err(Error::PreconditionNotMet(format!(
            "algebra property needs s > n/2 = {half_dim}, got s = {s}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::PreconditionNotMet(format!(
            "algebra property needs t >= 0, got t = {t}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = probe_bumps();
    let ratios: Vec<f64> = (0..samples)
        .map(|_| {
            let u = gen.scalar(&mut rng, grid);
            let v = gen.scalar(&mut rng, grid);
            algebra_ratio(&u, &v, s, t)
        })
        .collect();
    Ok(ProbeSummary::from_ratios(&ratios))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::tensor_grid::SymTensorField;

    #[test]
    fn zero_field_has_zero_norm() {
        let grid = Grid::new(2, 8, 3.0).unwrap();
        assert_eq!(sobolev_norm(&ScalarField::zeros(&grid), 2.0, 1.0), 0.0);
    }

    #[test]
    fn parseval_matches_lattice_l2() {
        let grid = Grid::new(3, 8, 3.0).unwrap();
        let s = SymTensorField::from_fn(&grid, |p, i, j| ((p * 31 + i * 7 + j) % 11) as f64 - 5.0);
        let a = sobolev_norm(&s, 0.0, 0.0);
        let b = s.l2_norm();
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn single_mode_grades_by_bracket() {
        let grid = Grid::new(2, 16, 2.0 * PI).unwrap();
        let u = ScalarField::from_fn(&grid, |x| (3.0 * x[0] + x[1]).cos());
        let r = embedding_probe(&u, (2.0, 0.0), (0.5, 0.0)).unwrap();
        let expected = (1.0_f64 + 10.0).powf(-0.75);
        assert!((r - expected).abs() < 1e-13);
        assert_eq!(embedding_probe(&u, (1.0, 0.0), (1.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn unit_element_ratio() {
        let grid = Grid::new(3, 8, 2.0).unwrap();
        let one = ScalarField::constant(&grid, 1.0);
        let v = ScalarField::from_fn(&grid, |x| (-x[0] * x[0] - x[1] * x[1]).exp());
        let r = algebra_ratio(&one, &v, 2.0, 0.0);
        let expected = 1.0 / sobolev_norm(&one, 2.0, 0.0);
        assert!((r - expected).abs() < 1e-13 * expected);
        assert!((sobolev_norm(&one, 2.0, 0.0) - 8.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn probes_check_hypotheses() {
        let grid = Grid::new(3, 8, 2.0).unwrap();
        assert!(algebra_probe(&grid, 1.5, 0.0, 1, 0).is_err());
        assert!(algebra_probe(&grid, 2.0, -1.0, 1, 0).is_err());
        let u = ScalarField::constant(&grid, 1.0);
        assert!(embedding_probe(&u, (1.0, 0.0), (2.0, 0.0)).is_err());
    }
}
