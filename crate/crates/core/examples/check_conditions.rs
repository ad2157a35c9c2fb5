//! Pointwise, moment and averaging conditions for a density given as JSON.
//!
//! ```text
//! cargo run --release --example check_conditions -- data/periodic_sine.json 0.01
//! ```

use std::path::PathBuf;

use stefan_lab::conditions::{check_averaging_condition, AveragingGrids};
use stefan_lab::Density;

fn main() -> stefan_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/periodic_sine.json"),
        PathBuf::from,
    );
    let lambda0: f64 = args.next().map_or(1e-2, |s| s.parse().expect("lambda0"));

    let d = Density::from_json_file(&path)?;
    let r = check_averaging_condition(&d, lambda0, &AveragingGrids::default());
    println!("{} ({})", path.display(), r.family);
    println!("pointwise f <= 1 - h near 0: {}", r.pointwise_holds);
    if let Some(x) = r.pointwise.violation {
        println!("  first violation at x = {x:.3e}");
    }
    println!("finite first moment:        {} ({:.6})", r.moment_holds, r.first_moment);
    println!("averaging condition:        {} (margin {:.6})", r.averaging_holds, r.averaging_margin);
    println!("largest window average:     {:.9}", r.max_sup_psi());
    println!("lambda0:                    {:e}", r.lambda0);
    println!("\n   lambda      argmax mu   sup psi");
    for row in r.sup_psi_per_lambda.iter().step_by(20) {
        println!("{:10.3e}  {:9.5}  {:10.7}", row[0], row[1], row[2]);
    }
    Ok(())
}
