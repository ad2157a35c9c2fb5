//! Picard iteration from `Lambda = 0` towards the minimal solution, with
//! common random numbers across iterations, compared against the particle
//! scheme on the same grid.
//!
//! ```text
//! cargo run --release --example picard_minimal -- 20000
//! ```

use stefan_lab::densities::PiecewiseGeometricDensity;
use stefan_lab::solver::{picard_minimal, simulate_particles, PicardConfig, SolverConfig};
use stefan_lab::Density;

fn main() -> stefan_lab::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(20_000, |s| s.parse().expect("path count"));
    let d = Density::Piecewise(PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5)?);
    let cfg = SolverConfig {
        n_particles: n,
        dt: 5e-4,
        horizon: 0.25,
        seed: 11,
        bridge_correction: true,
        picard: PicardConfig {
            n_paths: n,
            ..PicardConfig::default()
        },
        ..SolverConfig::default()
    };
    let picard = picard_minimal(&d, &cfg)?;
    println!("iterations: {}  converged: {}", picard.iterations, picard.converged);
    println!("monotonicity violations: {}", picard.monotonicity_violations);
    for (i, change) in picard.history.iter().enumerate() {
        println!("  sweep {:2}: sup change {change:.3e}", i + 1);
    }
    let (particles, _) = simulate_particles(&d, &cfg)?;
    println!("\nsup_t |particles - picard| = {:.4}", particles.sup_distance(&picard.frontier));
    println!("Lambda_T: particles {:.5}, picard {:.5}", particles.lambda.last().unwrap(), picard.frontier.lambda.last().unwrap());
    Ok(())
}
