//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use einlab_core::curvature::EinParams;
use einlab_core::gauged_solver::{SolveConfig, SolveMode};
use einlab_core::generators::{Bump, RandomBumps};
use einlab_core::tensor_grid::Grid;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSection,
    pub params: ParamsSection,
    #[serde(default)]
    pub sobolev: SobolevSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub generator: GeneratorSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub kappa: f64,
    pub lambda: f64,
    /// Free coefficient of the four-tensor operator; defaults to `2κ`.
    #[serde(default)]
    pub a: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevSection {
    pub s: f64,
    pub t: f64,
}

impl Default for SobolevSection {
    fn default() -> Self {
        Self { s: 2.0, t: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol_residual: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub mode: SolveMode,
    pub smallness: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            max_iter: 50,
            damping: 1.0,
            mode: SolveMode::Picard,
            smallness: 0.1,
        }
    }
}

/// What the bump mixture describes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorRole {
    /// Bumps define a metric perturbation `h*`; `e = Ein(δ+h*) − Λδ`.
    #[default]
    Manufactured,
    /// Bumps define `e` directly.
    Direct,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSection {
    pub role: GeneratorRole,
    /// Read `e` from an EFLD file instead of generating it (relative paths
    /// are resolved against the config file's directory).
    pub e_file: Option<PathBuf>,
    pub bump: Vec<Bump>,
    /// Additional bumps drawn from the seeded generator.
    pub random: Option<RandomBumps>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Write EFLD dumps of solved/manufactured fields.
    pub dump_fields: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("einlab-out"),
            dump_fields: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSection {
    /// Debug fault injection: flips the sign of the trace coefficient of the
    /// modified Bianchi operator in the Bianchi check.
    pub corrupt_bianchi_sign: bool,
    pub bianchi_points: Vec<usize>,
    pub bianchi_amplitude: f64,
    pub jacobian_directions: usize,
    pub probe_samples: usize,
    /// Run the solver on the configured data and check its gauge witness.
    pub solve: bool,
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self {
            corrupt_bianchi_sign: false,
            bianchi_points: vec![16, 24, 32],
            bianchi_amplitude: 0.05,
            jacobian_directions: 4,
            probe_samples: 20,
            solve: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceSection {
    pub points: Vec<usize>,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            points: vec![16, 32, 48],
        }
    }
}

/// One theorem hypothesis evaluated against a configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub statement: String,
    pub holds: bool,
}

/// A parsed configuration together with everything derived at load time.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    /// Directory relative paths in the file are resolved against.
    pub base_dir: PathBuf,
    pub hash: String,
    pub hypotheses: Vec<HypothesisCheck>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = self.grid;
        Ok(Grid::new(g.dim, g.points, g.length)?)
    }

    pub fn grid_with_points(&self, points: usize) -> Result<Grid> {
        Ok(Grid::new(self.grid.dim, points, self.grid.length)?)
    }

    pub fn ein_params(&self) -> EinParams {
        let p = EinParams::new(self.grid.dim, self.params.kappa, self.params.lambda);
        match self.params.a {
            Some(a) => p.with_a(a),
            None => p,
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        let s = self.solver;
        SolveConfig {
            params: self.ein_params(),
            s: self.sobolev.s,
            t: self.sobolev.t,
            tol_residual: s.tol_residual,
            max_iter: s.max_iter,
            damping: s.damping,
            mode: s.mode,
            smallness: s.smallness,
        }
    }

    /// SHA-256 of the canonical JSON form, so formatting and comments in the
    /// file do not change it.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The existence theorem's hypotheses: `s > n/2`, `t >= 0`, `Λ > 0`,
    /// `κ > −1/(2(n−1))`.
    pub fn hypotheses(&self) -> Vec<HypothesisCheck> {
        let n = self.grid.dim;
        let (s, t) = (self.sobolev.s, self.sobolev.t);
        let mut out = vec![
            HypothesisCheck {
                name: "s_above_half_dimension".into(),
                statement: format!("s > n/2 (got s = {s}, n/2 = {})", n as f64 / 2.0),
                holds: s > n as f64 / 2.0,
            },
            HypothesisCheck {
                name: "t_nonnegative".into(),
                statement: format!("t >= 0 (got t = {t})"),
                holds: t >= 0.0,
            },
        ];
        out.extend(self.ein_params().hypotheses().into_iter().map(|h| HypothesisCheck {
            name: h.name.into(),
            statement: h.statement,
            holds: h.holds,
        }));
        out
    }

    /// Structural validation, independent of the theorem hypotheses.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        let s = &self.solver;
        if !(s.tol_residual > 0.0) {
            return Err(LabError::Config(format!("solver.tol_residual must be positive (got {})", s.tol_residual)));
        }
        if s.max_iter == 0 {
            return Err(LabError::Config("solver.max_iter must be at least 1".into()));
        }
        if !(s.damping > 0.0 && s.damping <= 1.0) {
            return Err(LabError::Config(format!("solver.damping must lie in (0, 1] (got {})", s.damping)));
        }
        if !(s.smallness > 0.0) {
            return Err(LabError::Config(format!("solver.smallness must be positive (got {})", s.smallness)));
        }
        if self.checks.bianchi_points.is_empty() || self.convergence.points.is_empty() {
            return Err(LabError::Config("point lists must not be empty".into()));
        }
        for &points in self.checks.bianchi_points.iter().chain(&self.convergence.points) {
            self.grid_with_points(points)?;
        }
        if !self.params.kappa.is_finite() || !self.params.lambda.is_finite() {
            return Err(LabError::Config("kappa and lambda must be finite".into()));
        }
        Ok(())
    }

    pub fn violated_hypotheses(&self) -> Vec<String> {
        self.hypotheses()
            .into_iter()
            .filter(|h| !h.holds)
            .map(|h| format!("{}: {}", h.name, h.statement))
            .collect()
    }
}

impl LoadedConfig {
    pub fn from_config(config: ExperimentConfig, base_dir: PathBuf) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            hash: config.hash(),
            hypotheses: config.hypotheses(),
            config,
            base_dir,
        })
    }

    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let mut config = ExperimentConfig::from_toml(&text)?;
        if let Some(seed) = seed {
            config.seed = seed;
        }
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_config(config, base_dir)
    }

    /// Refuses configurations outside the theorem's hypotheses.
    pub fn require_hypotheses(&self) -> Result<()> {
        let violated = self.config.violated_hypotheses();
        if violated.is_empty() {
            Ok(())
        } else {
            Err(LabError::Hypotheses(violated))
        }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        [grid]
        dim = 3
        points = 16
        length = 10.0
        [params]
        kappa = 0.0
        lambda = 1.0
    ";

    #[test]
    fn defaults_fill_missing_sections() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.sobolev, SobolevSection { s: 2.0, t: 1.0 });
        assert_eq!(c.solver.mode, SolveMode::Picard);
        assert_eq!(c.ein_params().a, 0.0);
        assert!(c.hypotheses().iter().all(|h| h.holds));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn hash_ignores_formatting_but_not_values() {
        let a = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let b = ExperimentConfig::from_toml(&MINIMAL.replace("10.0", "10.000")).unwrap();
        let c = ExperimentConfig::from_toml(&MINIMAL.replace("10.0", "11.0")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn hypothesis_messages_quote_the_condition() {
        let c = ExperimentConfig::from_toml(&MINIMAL.replace("lambda = 1.0", "lambda = -1.0")).unwrap();
        let v = c.violated_hypotheses();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("Λ > 0"), "{v:?}");
        let c = ExperimentConfig::from_toml(&MINIMAL.replace("kappa = 0.0", "kappa = -0.25")).unwrap();
        assert!(c.violated_hypotheses()[0].contains("κ > −1/(2(n−1))"));
    }

    #[test]
    fn unknown_keys_and_bad_grids_are_rejected() {
        assert!(ExperimentConfig::from_toml(&format!("{MINIMAL}\nbogus = 1")).is_err());
        let c = ExperimentConfig::from_toml(&MINIMAL.replace("points = 16", "points = 7")).unwrap();
        assert!(c.validate().is_err());
    }
}
