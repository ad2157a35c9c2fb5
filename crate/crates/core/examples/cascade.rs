//! The discrete cascade: deaths shift the survivors down by `1/n` each until
//! the smallest survivor clears the accumulated loss.
//!
//! ```text
//! cargo run --release --example cascade
//! ```

use stefan_lab::solver::{initial_cascade, physical_jump_bruteforce, physical_jump_scan};

fn main() {
    let positions = [-0.05, 0.3, 0.6, 0.9];
    println!("{positions:?} -> jump {}", physical_jump_scan(&positions, 4));

    let crowded = [-0.1, 0.15, 0.3, 0.5, 0.9];
    println!(
        "{crowded:?} -> jump {} (grid search {})",
        physical_jump_scan(&crowded, 5),
        physical_jump_bruteforce(&crowded, 5, 1e-6)
    );

    // stratified uniform samples: on [0, 1/2] everything freezes, on [0, 2] nothing does
    for (width, n) in [(0.5, 1000), (2.0, 1000)] {
        let sorted: Vec<f64> = (0..n).map(|i| width * (i as f64 + 0.5) / n as f64).collect();
        let k = initial_cascade(&sorted, n);
        println!("uniform on [0, {width}], n = {n}: {k} particles lost at time 0");
    }
}
