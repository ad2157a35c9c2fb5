//! N-particle scheme: Euler steps, optional bridge killing, then one exact
//! cascade per step.

use rayon::prelude::*;
use serde::Serialize;

use super::cascade::{initial_cascade, scan_sorted};
use super::{FrontierPath, SolverConfig, CHUNK};
use crate::densities::Density;
use crate::error::Result;
use crate::numerics::rng::{Domain, Stream};

#[derive(Debug, Clone, Serialize)]
pub struct ParticleEnsemble {
    pub n: usize,
    pub seed: u64,
    /// Current positions; for dead particles the last value before death
    /// (`-inf` when removed by the bridge test).
    pub positions: Vec<f64>,
    pub alive: Vec<bool>,
    /// Grid time at which each particle died, `inf` while alive.
    pub death_time: Vec<f64>,
}

impl ParticleEnsemble {
    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn dead_fraction(&self) -> f64 {
        (self.n - self.alive_count()) as f64 / self.n as f64
    }
}

/// Removes the `k*` lowest alive particles and shifts the survivors down by
/// `k* / n`. Returns `k*`.
fn resolve_cascade(positions: &mut [f64], alive: &mut [bool], death_time: &mut [f64], t: f64) -> usize {
    let n = positions.len();
    let hit = positions.iter().zip(alive.iter()).any(|(&x, &a)| a && x <= 0.0);
    if !hit {
        return 0;
    }
    let mut candidates: Vec<(f64, usize)> = positions
        .iter()
        .zip(alive.iter())
        .enumerate()
        .filter(|(_, (&x, &a))| a && x <= 1.0)
        .map(|(i, (&x, _))| (x, i))
        .collect();
    candidates.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let sorted: Vec<f64> = candidates.iter().map(|c| c.0).collect();
    let k = scan_sorted(&sorted, n, 0.0);
    for &(_, i) in &candidates[..k] {
        alive[i] = false;
        death_time[i] = t;
    }
    let delta = k as f64 / n as f64;
    for (x, &a) in positions.iter_mut().zip(alive.iter()) {
        if a {
            *x -= delta;
        }
    }
    k
}

/// Simulates `X^i = X^i_0 + B^i - Lambda` with `Lambda` the dead fraction.
///
/// Starting points are the stratified quantiles `F^{-1}((i - 1/2) / n)`.
/// The time-zero cascade uses [`initial_cascade`]; every later step uses the
/// plain empirical jump condition.
pub fn simulate_particles(d: &Density, cfg: &SolverConfig) -> Result<(FrontierPath, ParticleEnsemble)> {
    cfg.validate()?;
    let n = cfg.n_particles;
    let nf = n as f64;
    let steps = cfg.steps();
    let t_grid = cfg.t_grid();

    let mut positions: Vec<f64> = (0..n)
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(|i| d.sample((i as f64 + 0.5) / nf))
        .collect();
    positions.sort_unstable_by(f64::total_cmp);
    let k0 = initial_cascade(&positions, n);
    let mut alive: Vec<bool> = (0..n).map(|i| i >= k0).collect();
    let mut death_time: Vec<f64> = (0..n).map(|i| if i < k0 { 0.0 } else { f64::INFINITY }).collect();
    let shift = k0 as f64 / nf;
    for x in positions[k0..].iter_mut() {
        *x -= shift;
    }
    let mut dead = k0;
    let mut lambda = Vec::with_capacity(steps + 1);
    let mut alive_fraction = Vec::with_capacity(steps + 1);
    lambda.push(dead as f64 / nf);
    alive_fraction.push((n - dead) as f64 / nf);

    let mut streams: Vec<Stream> = (0..n)
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(|i| Stream::new(cfg.seed, Domain::Particles, i as u64))
        .collect();
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let bridge = cfg.bridge_correction;

    for step in 1..=steps {
        if dead < n {
            positions
                .par_chunks_mut(CHUNK)
                .zip(alive.par_chunks(CHUNK))
                .zip(streams.par_chunks_mut(CHUNK))
                .for_each(|((xs, alive), streams)| {
                    for ((x, &a), s) in xs.iter_mut().zip(alive).zip(streams.iter_mut()) {
                        if !a {
                            continue;
                        }
                        let z0 = *x;
                        let mut z1 = z0 + sqrt_dt * s.gaussian();
                        if bridge {
                            let u = s.uniform();
                            if z1 > 0.0 && u < (-2.0 * z0 * z1 / dt).exp() {
                                z1 = f64::NEG_INFINITY;
                            }
                        }
                        *x = z1;
                    }
                });
            dead += resolve_cascade(&mut positions, &mut alive, &mut death_time, t_grid[step]);
        }
        lambda.push(dead as f64 / nf);
        alive_fraction.push((n - dead) as f64 / nf);
    }

    let frontier = FrontierPath::new(t_grid, lambda, alive_fraction, n, cfg.jump_threshold(n));
    let ensemble = ParticleEnsemble {
        n,
        seed: cfg.seed,
        positions,
        alive,
        death_time,
    };
    Ok((frontier, ensemble))
}
