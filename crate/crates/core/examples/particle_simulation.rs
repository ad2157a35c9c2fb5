//! The particle scheme for the reference piecewise density, with the
//! Brownian-bridge correction, and the frontier written as CSV.
//!
//! ```text
//! cargo run --release --example particle_simulation -- 100000 frontier.csv
//! ```

use std::path::Path;

use stefan_lab::densities::PiecewiseGeometricDensity;
use stefan_lab::solver::{simulate_particles, SolverConfig};
use stefan_lab::Density;

fn main() -> stefan_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(20_000, |s| s.parse().expect("particle count"));
    let out = args.next();

    let d = Density::Piecewise(PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5)?);
    let cfg = SolverConfig {
        n_particles: n,
        dt: 5e-4,
        horizon: 0.25,
        seed: 7,
        bridge_correction: true,
        ..SolverConfig::default()
    };
    let (frontier, ensemble) = simulate_particles(&d, &cfg)?;
    println!("n = {n}, {} steps, {} jumps recorded", frontier.len() - 1, frontier.jumps.len());
    println!("survivors at T: {} of {}", ensemble.alive_count(), ensemble.n);
    println!("\n     t      Lambda_t      se   Lambda_t/sqrt(t)");
    for t in [0.001, 0.004, 0.016, 0.0625, 0.25] {
        let k = (t / cfg.dt).round() as usize;
        let l = frontier.lambda[k];
        println!("{t:7.4}  {l:9.5}  {:8.5}  {:8.4}", frontier.standard_error(k), l / t.sqrt());
    }
    if let Some(path) = out {
        frontier.save_csv(Path::new(&path))?;
        println!("\nwrote {path}");
    }
    Ok(())
}
