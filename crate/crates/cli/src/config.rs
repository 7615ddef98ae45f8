use std::path::PathBuf;

use hardy_core::interp::InterpMode;
use hardy_core::wiener::SimConfig;
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `s ≡ 1`, `s ≡ ½`, `s = t`.
    Trivial,
    /// Seeded Schur functions.
    Schur,
    /// Named `H^p` functions.
    Hp,
    /// Polynomials listed under `functions`.
    Listed,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub family: Family,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A polynomial test function, coefficients as `[re, im]` pairs from degree 0 up.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub name: String,
    pub coeffs: Vec<[f64; 2]>,
}

impl FunctionSpec {
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect()
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// If present, must name the command being run.
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub grid_size: Option<usize>,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub corpus: Option<CorpusSpec>,
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub q: Option<Vec<f64>>,
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default)]
    pub mode: Option<InterpMode>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn validate(&self, command: &str) -> Result<(), String> {
        if let Some(c) = &self.command {
            if c != command {
                return Err(format!("config is for command `{c}`, not `{command}`"));
            }
        }
        for (name, grid) in [("lambdas", &self.lambdas), ("q", &self.q), ("p", &self.p), ("theta", &self.theta), ("t", &self.t)] {
            if let Some(g) = grid {
                if g.is_empty() {
                    return Err(format!("grid `{name}` is empty"));
                }
                if g.iter().any(|x| !x.is_finite()) {
                    return Err(format!("grid `{name}` has a non-finite entry"));
                }
            }
        }
        if let Some(n) = self.grid_size {
            if n < 8 || !n.is_power_of_two() {
                return Err(format!("grid_size {n} must be a power of two and at least 8"));
            }
        }
        for f in &self.functions {
            if f.coeffs.is_empty() {
                return Err(format!("function `{}` has no coefficients", f.name));
            }
        }
        if let Some(sim) = &self.sim {
            sim.validate().map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}
