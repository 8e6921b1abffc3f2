//! Fields built from a configuration's generator section.

use einlab_core::curvature::{ein, Connection};
use einlab_core::efld;
use einlab_core::generators::{bump_tensor, Bump};
use einlab_core::tensor_grid::{Grid, SymTensorField, TensorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{GeneratorRole, LoadedConfig};
use crate::error::{LabError, Result};

/// The one random stream of a run.
pub fn rng(loaded: &LoadedConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(loaded.config.seed)
}

/// Explicit bumps followed by the randomly drawn ones. Random bumps are drawn
/// on the configured grid so that every resolution sees the same data.
pub fn bumps(loaded: &LoadedConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Bump>> {
    let gen = &loaded.config.generator;
    let mut out = gen.bump.clone();
    if let Some(random) = &gen.random {
        out.extend(random.draw(rng, &loaded.config.grid()?));
    }
    Ok(out)
}

/// `e := Ein(δ+h*) − Λδ`.
pub fn manufacture_e(h_star: &SymTensorField, loaded: &LoadedConfig) -> Result<SymTensorField> {
    let params = loaded.config.ein_params();
    let conn = Connection::from_perturbation(h_star)?;
    Ok(&ein(&conn, &params) - &SymTensorField::delta(h_star.grid(), params.lambda))
}

/// Right-hand side `e` on `grid`, and `h*` when it was manufactured.
pub struct ProblemData {
    pub e: SymTensorField,
    pub h_star: Option<SymTensorField>,
    pub source: String,
}

pub fn problem_data(loaded: &LoadedConfig, grid: &Grid, bumps: &[Bump]) -> Result<ProblemData> {
    let gen = &loaded.config.generator;
    if let Some(path) = &gen.e_file {
        let resolved = loaded.resolve(path);
        let e = efld::read(&resolved)
            .map_err(|err| LabError::Config(format!("e_file {}: {err}", path.display())))?
            .into_sym()?;
        if e.grid() != grid {
            return Err(LabError::Config(format!(
                "e_file {} is on {:?}, the run needs {:?}",
                path.display(),
                e.grid(),
                grid
            )));
        }
        return Ok(ProblemData {
            e,
            h_star: None,
            source: format!("file:{}", path.display()),
        });
    }
    let field = bump_tensor(grid, bumps)?;
    Ok(match gen.role {
        GeneratorRole::Manufactured => ProblemData {
            e: manufacture_e(&field, loaded)?,
            h_star: Some(field),
            source: "manufactured".into(),
        },
        GeneratorRole::Direct => ProblemData {
            e: field,
            h_star: None,
            source: "direct".into(),
        },
    })
}
