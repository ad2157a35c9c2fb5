//! A density built from one exact fractional Brownian sample path, clipped
//! into [0, 1] around an iterated-logarithm envelope.
//!
//! ```text
//! cargo run --release --example gaussian_path_density -- 0.5 7
//! ```

use stefan_lab::densities::gaussian_path::{build_gaussian_path, kappa};

fn main() -> stefan_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let hurst: f64 = args.next().map_or(0.5, |s| s.parse().expect("hurst"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let beta = std::f64::consts::SQRT_2;

    let d = build_gaussian_path(hurst, beta, 1025, seed)?;
    println!("H = {hurst}, seed = {seed}");
    println!("mass on [0, 1]: {:.6}  tail mass: {:.6}  rescaled: {}", d.grid_mass, d.tail_mass, d.rescaled);
    println!("first moment: {:.6}", d.first_moment());

    let values = d.grid_values();
    for eps in [0.5, 0.1, 0.01] {
        let touches = d
            .grid
            .iter()
            .zip(values)
            .filter(|(&x, &f)| x > 0.0 && x < eps && f >= 1.0)
            .count();
        println!("grid points in (0, {eps}) with f = 1: {touches}");
    }
    println!("\n        x        S_x     kappa      f");
    for i in [1, 4, 16, 64, 256, 512, 1000] {
        let x = d.grid[i];
        println!("{x:10.3e} {:9.5} {:9.5} {:7.4}", d.path[i], kappa(x, beta, hurst), values[i]);
    }
    Ok(())
}
