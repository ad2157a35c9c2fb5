//! Picard iteration `Lambda^{n+1}_t = E[F(Y^n_t)]` from `Lambda^0 = 0`, with
//! `Y^n_t = sup_{s <= t} (-B_s + Lambda^n_s)` over one stored set of
//! Brownian paths.

use rayon::prelude::*;
use serde::Serialize;

use super::{FrontierPath, SolverConfig, CHUNK};
use crate::densities::Density;
use crate::error::Result;
use crate::numerics::rng::{Domain, Stream};

#[derive(Debug, Clone, Serialize)]
pub struct PicardResult {
    pub frontier: FrontierPath,
    pub iterations: usize,
    /// `sup_t |Lambda^{n+1} - Lambda^n|` after each iteration.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Grid nodes where an iterate fell below its predecessor.
    pub monotonicity_violations: usize,
}

/// `-B` at the grid points `t_1, ..., t_K` and, with the bridge enabled, the
/// maximum of `-B` over each step, sampled from its exact bridge law.
pub(crate) struct PathBank {
    pub steps: usize,
    pub paths: usize,
    pub neg_b: Vec<f64>,
    pub step_max: Option<Vec<f64>>,
}

/// Maximum of a Brownian bridge from `e0` to `e1` over a step of length `dt`,
/// by inversion of its distribution at the uniform `u`.
#[inline]
pub(crate) fn bridge_maximum(e0: f64, e1: f64, dt: f64, u: f64) -> f64 {
    let d = e1 - e0;
    0.5 * (e0 + e1 + (d * d - 2.0 * dt * u.ln()).sqrt())
}

impl PathBank {
    pub fn generate(paths: usize, steps: usize, dt: f64, seed: u64, domain: Domain, bridge: bool) -> Self {
        let sqrt_dt = dt.sqrt();
        let mut neg_b = vec![0.0; paths * steps];
        let mut step_max = if bridge { Some(vec![0.0; paths * steps]) } else { None };
        let fill = |first_path: usize, nb: &mut [f64], mut sm: Option<&mut [f64]>| {
            for (p, row) in nb.chunks_mut(steps).enumerate() {
                let mut s = Stream::new(seed, domain, (first_path + p) as u64);
                let mut e = 0.0;
                for k in 0..steps {
                    let e1 = e - sqrt_dt * s.gaussian();
                    row[k] = e1;
                    if let Some(sm) = sm.as_deref_mut() {
                        sm[p * steps + k] = bridge_maximum(e, e1, dt, s.uniform());
                    }
                    e = e1;
                }
            }
        };
        let block = CHUNK * steps;
        match step_max.as_mut() {
            Some(sm) => neg_b
                .par_chunks_mut(block)
                .zip(sm.par_chunks_mut(block))
                .enumerate()
                .for_each(|(c, (nb, sm))| fill(c * CHUNK, nb, Some(sm))),
            None => neg_b
                .par_chunks_mut(block)
                .enumerate()
                .for_each(|(c, nb)| fill(c * CHUNK, nb, None)),
        }
        PathBank {
            steps,
            paths,
            neg_b,
            step_max,
        }
    }

    /// Running maxima `Y` of `-B + lambda` along path `p`, with `lambda`
    /// constant between grid points; `visit(k, y)` is called for
    /// `k = 0..=steps` with the current value.
    #[inline]
    pub fn running_max(&self, p: usize, lambda: &[f64], mut visit: impl FnMut(usize, f64, bool)) {
        let row = &self.neg_b[p * self.steps..(p + 1) * self.steps];
        let mut y = lambda[0];
        visit(0, y, true);
        match &self.step_max {
            Some(sm) => {
                let sm = &sm[p * self.steps..(p + 1) * self.steps];
                for k in 0..self.steps {
                    let candidate = (row[k] + lambda[k + 1]).max(sm[k] + lambda[k]);
                    let changed = candidate > y;
                    if changed {
                        y = candidate;
                    }
                    visit(k + 1, y, changed);
                }
            }
            None => {
                for k in 0..self.steps {
                    let candidate = row[k] + lambda[k + 1];
                    let changed = candidate > y;
                    if changed {
                        y = candidate;
                    }
                    visit(k + 1, y, changed);
                }
            }
        }
    }

    /// `(1/M) sum_paths F(Y_t)` for every grid time, reduced in a fixed order.
    fn average_cdf(&self, d: &Density, lambda: &[f64]) -> Vec<f64> {
        let nodes = self.steps + 1;
        let partials: Vec<Vec<f64>> = (0..self.paths.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![0.0; nodes];
                let mut value = 0.0;
                for p in c * CHUNK..((c + 1) * CHUNK).min(self.paths) {
                    self.running_max(p, lambda, |k, y, changed| {
                        if changed {
                            value = d.cdf(y);
                        }
                        acc[k] += value;
                    });
                }
                acc
            })
            .collect();
        let mut total = vec![0.0; nodes];
        for part in &partials {
            for (t, v) in total.iter_mut().zip(part) {
                *t += v;
            }
        }
        let m = self.paths as f64;
        total.iter().map(|s| (s / m).min(1.0)).collect()
    }
}

/// Iterates from `Lambda = 0` until the sup-change drops below
/// `cfg.picard.tol` or `cfg.picard.max_iters` is reached.
pub fn picard_minimal(d: &Density, cfg: &SolverConfig) -> Result<PicardResult> {
    cfg.validate()?;
    let steps = cfg.steps();
    let m = cfg.picard.n_paths;
    let bank = PathBank::generate(m, steps, cfg.dt, cfg.seed, Domain::PicardPaths, cfg.bridge_correction);
    let mut lambda = vec![0.0; steps + 1];
    let mut history = Vec::new();
    let mut violations = 0;
    let mut converged = false;
    for _ in 0..cfg.picard.max_iters {
        let next = bank.average_cdf(d, &lambda);
        let mut change: f64 = 0.0;
        for (new, old) in next.iter().zip(&lambda) {
            if new < old {
                violations += 1;
            }
            change = change.max((new - old).abs());
        }
        history.push(change);
        lambda = next;
        if change < cfg.picard.tol {
            converged = true;
            break;
        }
    }
    let alive: Vec<f64> = lambda.iter().map(|l| 1.0 - l).collect();
    let frontier = FrontierPath::new(cfg.t_grid(), lambda, alive, m, cfg.jump_threshold(m));
    Ok(PicardResult {
        frontier,
        iterations: history.len(),
        history,
        converged,
        monotonicity_violations: violations,
    })
}
