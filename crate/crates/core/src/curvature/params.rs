use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of `Ein(g) = Ric + κRg + Λg` and of its four-tensor analogue
/// `𝓔in(g) = Riem + g ⊼ (a Ric + b R g + c g)`.
///
/// `b` and `c` are always derived from `(κ, Λ, a, n)` so that
/// `Tr_g 𝓔in(g) = [a(n−2) + 1] Ein(g)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EinParams {
    pub dim: usize,
    pub kappa: f64,
    pub lambda: f64,
    pub a: f64,
}

/// One theorem hypothesis, evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub statement: String,
    pub holds: bool,
}

impl EinParams {
    /// Parameters with the default `a = 2κ`.
    pub fn new(dim: usize, kappa: f64, lambda: f64) -> Self {
        Self {
            dim,
            kappa,
            lambda,
            a: 2.0 * kappa,
        }
    }

    pub fn with_a(self, a: f64) -> Self {
        Self { a, ..self }
    }

    fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn b(&self) -> f64 {
        let n = self.n();
        (self.kappa * (1.0 + self.a * (n - 2.0)) - self.a) / (2.0 * (n - 1.0))
    }

    pub fn c(&self) -> f64 {
        let n = self.n();
        (1.0 + (n - 2.0) * self.a) * self.lambda / (2.0 * (n - 1.0))
    }

    /// `a(n−2) + 1`, the factor in the four-tensor trace identity.
    pub fn trace_factor(&self) -> f64 {
        self.a * (self.n() - 2.0) + 1.0
    }

    /// `−1/(2(n−1))`, the Schouten constant.
    pub fn critical_kappa(dim: usize) -> f64 {
        -1.0 / (2.0 * (dim as f64 - 1.0))
    }

    pub fn one_plus_kappa_n(&self) -> f64 {
        1.0 + self.kappa * self.n()
    }

    pub fn lambda_positive(&self) -> bool {
        self.lambda > 0.0
    }

    pub fn kappa_above_critical(&self) -> bool {
        self.kappa > Self::critical_kappa(self.dim)
    }

    pub fn kappa_regular(&self) -> bool {
        self.one_plus_kappa_n() != 0.0
    }

    /// `(2κ+1) / (2(1+κn))`, the trace coefficient of the modified Bianchi operator.
    pub fn bianchi_trace_coefficient(&self) -> f64 {
        (2.0 * self.kappa + 1.0) / (2.0 * self.one_plus_kappa_n())
    }

    /// `(n−2)κ / (2(1+κn))`.
    pub fn gauge_coupling(&self) -> f64 {
        (self.n() - 2.0) * self.kappa / (2.0 * self.one_plus_kappa_n())
    }

    pub fn require_regular(&self) -> Result<()> {
        if self.kappa_regular() {
            Ok(())
        } else {
            Err(Error::KappaSingular {
                kappa: self.kappa,
                dim: self.dim,
            })
        }
    }

    /// `Λ > 0` and `κ ≠ −1/n`: what the gauged operator needs to be defined.
    pub fn require_gauged(&self) -> Result<()> {
        if !self.lambda_positive() {
            return Err(Error::LambdaNonPositive(self.lambda));
        }
        self.require_regular()
    }

    /// Existence-theorem hypotheses on `(κ, Λ)`.
    pub fn hypotheses(&self) -> Vec<Hypothesis> {
        let crit = Self::critical_kappa(self.dim);
        vec![
            Hypothesis {
                name: "lambda_positive",
                statement: format!("Λ > 0 (got Λ = {})", self.lambda),
                holds: self.lambda_positive(),
            },
            Hypothesis {
                name: "kappa_above_critical",
                statement: format!(
                    "κ > −1/(2(n−1)) = {crit} for n = {} (got κ = {})",
                    self.dim, self.kappa
                ),
                holds: self.kappa_above_critical(),
            },
        ]
    }
}
