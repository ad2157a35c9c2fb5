//! The slope bound `L` of `F` on the good set: closed form, exact rational
//! value, brute-force search over difference quotients, and the chord
//! sequence that attains it.
//!
//! ```text
//! cargo run --release --example slope_bound -- 1.05
//! ```

use stefan_lab::bounds::{bruteforce_sup_ratio, check_chord_sequence, compute_l, exact_from, GoodSet, BAND_CAP};
use stefan_lab::densities::PiecewiseGeometricDensity;

fn main() -> stefan_lab::Result<()> {
    let alpha2: f64 = std::env::args().nth(1).map_or(1.05, |s| s.parse().expect("alpha2"));
    let d = PiecewiseGeometricDensity::new(0.5, alpha2, 0.5, 0.5)?;
    let b = compute_l(&d);
    let e = exact_from(&d)?;
    println!("alpha2 = {alpha2}: rho = {}, L = {} (exact {}), L < 1: {}", b.rho, b.l, e.slope_bound(), b.below_one);

    let set = GoodSet::new(&d, BAND_CAP);
    println!("good set: {} bands, the first three:", set.bands.len());
    for (lo, hi) in set.bands.iter().take(3) {
        println!("  [{lo:.6}, {hi:.6}]");
    }
    for m in [10, 100, 1000] {
        println!("brute force on {m} x {m}: {:.9}", bruteforce_sup_ratio(&d, m, m));
    }
    match check_chord_sequence(&e, 10, 5) {
        None => println!("chord sequence nondecreasing and ending at L for 10 bands"),
        Some((n, y)) => println!("chord sequence fails in band {n} at y = {y:e}"),
    }
    Ok(())
}
