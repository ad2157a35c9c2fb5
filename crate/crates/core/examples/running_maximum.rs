//! Samples of `Y_t = sup_{s <= t}(Lambda_s - B_s)` and the identity
//! `Lambda_t = E[F(Y_t)]` that the minimal frontier satisfies.
//!
//! ```text
//! cargo run --release --example running_maximum
//! ```

use stefan_lab::densities::PiecewiseGeometricDensity;
use stefan_lab::solver::{compute_Y_samples, picard_minimal, PicardConfig, SolverConfig};
use stefan_lab::Density;

fn main() -> stefan_lab::Result<()> {
    let d = Density::Piecewise(PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5)?);
    let cfg = SolverConfig {
        dt: 1e-3,
        horizon: 0.25,
        seed: 3,
        bridge_correction: true,
        picard: PicardConfig {
            n_paths: 20_000,
            ..PicardConfig::default()
        },
        ..SolverConfig::default()
    };
    let frontier = picard_minimal(&d, &cfg)?.frontier;
    // fresh paths, independent of the ones used by the iteration
    let y = compute_Y_samples(&frontier, 20_000, 99);
    println!("     t     Lambda_t   E[F(Y_t)]   E[Y_t]/sqrt(t)");
    for k in [10, 50, 100, 250] {
        let values = &y.values[k];
        let m = values.len() as f64;
        let ef = values.iter().map(|&v| d.cdf(v)).sum::<f64>() / m;
        let ey = values.iter().sum::<f64>() / m;
        let t = y.t_grid[k];
        println!("{t:7.3}  {:9.5}  {ef:9.5}  {:9.4}", frontier.lambda[k], ey / t.sqrt());
    }
    Ok(())
}
