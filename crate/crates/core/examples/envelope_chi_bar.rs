//! The fitted averaging envelope `g` of the sine density and the early-time
//! upper bound `chi_bar(t) = (s g(s))^{-1}(sqrt(2 t / pi))` it produces.
//!
//! ```text
//! cargo run --release --example envelope_chi_bar
//! ```

use stefan_lab::conditions::{chi_bar, check_averaging_condition, AveragingGrids};
use stefan_lab::densities::{PeriodicOscillatoryDensity, Profile};
use stefan_lab::Density;

fn main() -> stefan_lab::Result<()> {
    let d = Density::Periodic(PeriodicOscillatoryDensity::new(1.0, Profile::Sine)?);
    let r = check_averaging_condition(&d, 1.0, &AveragingGrids::default());
    let g = &r.g_envelope;
    println!("averaging condition holds: {}", r.averaging_holds);
    println!("min g = {:.6}, s g(s) reaches {:.6}", g.min_value(), g.range_max());
    println!("\n      t      chi_bar(t)");
    for t in [1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5] {
        match chi_bar(g, t) {
            Ok(c) => println!("{t:9.1e}  {c:.6}"),
            Err(e) => println!("{t:9.1e}  undefined ({e})"),
        }
    }
    Ok(())
}
