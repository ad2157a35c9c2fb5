//! Samples of the running maximum `Y_t = sup_{s <= t} (-B_s + Lambda_s)` for a
//! given frontier.

use super::picard::PathBank;
use super::FrontierPath;
use crate::numerics::rng::Domain;

/// `values[k][i]` is `Y_{t_k}` on path `i`.
#[derive(Debug, Clone)]
pub struct YSamples {
    pub t_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl YSamples {
    pub fn paths(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }
}

/// Running maxima over `n_paths` independent Brownian paths on the frontier
/// grid. The frontier is a step function and the supremum within each step
/// uses the exact Brownian-bridge maximum.
#[allow(non_snake_case)]
pub fn compute_Y_samples(frontier: &FrontierPath, n_paths: usize, seed: u64) -> YSamples {
    let steps = frontier.len() - 1;
    let bank = PathBank::generate(n_paths, steps, frontier.dt(), seed, Domain::FunctionalPaths, true);
    let mut values = vec![vec![0.0; n_paths]; steps + 1];
    for p in 0..n_paths {
        bank.running_max(p, &frontier.lambda, |k, y, _| values[k][p] = y);
    }
    YSamples {
        t_grid: frontier.t_grid.clone(),
        values,
    }
}
