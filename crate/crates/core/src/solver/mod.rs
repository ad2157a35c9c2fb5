//! Solvers for the frontier `Lambda`: an N-particle scheme with exact
//! discrete cascades and a Picard iteration towards the minimal solution.

pub mod cascade;
pub mod frontier;
pub mod functional;
pub mod particles;
pub mod picard;

use serde::{Deserialize, Serialize};

pub use cascade::{initial_cascade, physical_jump_bruteforce, physical_jump_scan};
pub use frontier::{FrontierPath, Jump};
pub use functional::{compute_Y_samples, YSamples};
pub use particles::{simulate_particles, ParticleEnsemble};
pub use picard::{picard_minimal, PicardResult};

use crate::error::{Error, Result};

/// Work items per parallel chunk. Fixed so that reductions do not depend on
/// the number of worker threads.
pub(crate) const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardConfig {
    pub n_paths: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            n_paths: 100_000,
            max_iters: 50,
            tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub n_particles: usize,
    pub dt: f64,
    #[serde(alias = "T")]
    pub horizon: f64,
    pub seed: u64,
    /// Kill survivors of a step with the Brownian-bridge crossing
    /// probability; Picard then uses the exact bridge maximum per step.
    pub bridge_correction: bool,
    pub picard: PicardConfig,
    /// Minimum step increment recorded as a jump; `max(5/n, 10 sqrt(dt))`
    /// when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jump_threshold: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_particles: 10_000,
            dt: 1e-3,
            horizon: 0.25,
            seed: 0,
            bridge_correction: false,
            picard: PicardConfig::default(),
            jump_threshold: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::Config("n_particles must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Config(format!(
                "horizon {} is not a whole number of steps dt = {}",
                self.horizon, self.dt
            )));
        }
        if self.picard.n_paths == 0 {
            return Err(Error::Config("picard.n_paths must be at least 1".into()));
        }
        if !(self.picard.tol > 0.0) {
            return Err(Error::Config(format!("picard.tol must be positive, got {}", self.picard.tol)));
        }
        if let Some(j) = self.jump_threshold {
            if !(j >= 0.0) {
                return Err(Error::Config(format!("jump_threshold must be nonnegative, got {j}")));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn t_grid(&self) -> Vec<f64> {
        (0..=self.steps()).map(|k| k as f64 * self.dt).collect()
    }

    pub fn jump_threshold(&self, samples: usize) -> f64 {
        self.jump_threshold
            .unwrap_or_else(|| (5.0 / samples as f64).max(10.0 * self.dt.sqrt()))
    }
}
