use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};

/// Simulation parameters. Serialized as JSON with these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Number of paths `P`.
    pub paths: usize,
    pub dt: f64,
    /// Paths still inside the disk at `t_max` are stopped there.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    pub seed: u64,
    /// Stopping scale `M > 1`.
    #[serde(default = "default_m")]
    pub m: f64,
    /// Index shift of the truncation family.
    #[serde(default = "default_offset")]
    pub offset: usize,
    #[serde(default = "default_degree")]
    pub regression_degree: usize,
}

fn default_t_max() -> f64 {
    10.0
}
fn default_m() -> f64 {
    2.0
}
fn default_offset() -> usize {
    8
}
fn default_degree() -> usize {
    6
}

impl SimConfig {
    pub fn new(paths: usize, dt: f64, seed: u64) -> Self {
        SimConfig {
            paths,
            dt,
            t_max: default_t_max(),
            seed,
            m: default_m(),
            offset: default_offset(),
            regression_degree: default_degree(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(HardyError::InvalidParameter("path count must be positive".into()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() || self.dt > 0.5 {
            return Err(HardyError::InvalidParameter(format!("dt must lie in (0, 0.5], got {}", self.dt)));
        }
        if !(self.t_max >= self.dt) || !self.t_max.is_finite() {
            return Err(HardyError::InvalidParameter(format!("t_max must be at least dt, got {}", self.t_max)));
        }
        if !(self.m > 1.0) || !self.m.is_finite() {
            return Err(HardyError::InvalidParameter(format!("M must exceed 1, got {}", self.m)));
        }
        Ok(())
    }

    /// Step cap `ceil(t_max / dt)`.
    pub fn max_steps(&self) -> usize {
        (self.t_max / self.dt).ceil() as usize
    }
}
