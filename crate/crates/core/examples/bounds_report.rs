//! Square-root envelopes, the increment bound, the good-set probabilities and
//! the contraction estimate for a simulated frontier of the reference
//! density.
//!
//! ```text
//! cargo run --release --example bounds_report -- 100000
//! ```

use stefan_lab::bounds::{compute_bounds, BoundsConfig};
use stefan_lab::densities::PiecewiseGeometricDensity;
use stefan_lab::solver::{simulate_particles, SolverConfig};
use stefan_lab::Density;

fn main() -> stefan_lab::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(50_000, |s| s.parse().expect("particle count"));
    let d = Density::Piecewise(PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5)?);
    let cfg = SolverConfig {
        n_particles: n,
        dt: 5e-4,
        horizon: 0.25,
        seed: 7,
        bridge_correction: true,
        ..SolverConfig::default()
    };
    let (frontier, _) = simulate_particles(&d, &cfg)?;
    let report = compute_bounds(&d, &frontier, None, &BoundsConfig { seed: 7, ..BoundsConfig::default() })?;
    let p = report.piecewise.as_ref().expect("piecewise density");
    let c = p.constants.expect("constants defined");
    println!("c1 = {:.5}  c2 = {:.4}  c3 = {:.4} (slope estimate {:.4})", c.c1, c.c2, c.c3, c.beta_slope);
    let e = &report.envelopes;
    for m in [&e.lower, &e.upper, e.holder.as_ref().unwrap(), &report.initial_increment] {
        println!("{:55}  min {:+.5} at t = {:.4}  (se {:.1e})  holds: {}", m.inequality, m.min, m.at_t, m.standard_error, m.holds);
    }
    let g = p.good_set.as_ref().unwrap();
    println!("\nP(Y_t in G) against the threshold {:.4}:", g.threshold);
    for (row, band) in g.rows.iter().zip(&g.bands) {
        println!(
            "  t = {:.4}  P = {:.4}  band [{:.3}, {:.3}] sqrt(t): observed {:.4} >= bound {:.4}",
            row.t, row.prob, band.a, band.b, band.observed, band.lower_bound
        );
    }
    println!("\ndelta0 estimate {:.4} (se {:.1e}) at t = {:.4}, h = {:.2e}", report.delta0.delta0_hat, report.delta0.se, report.delta0.at_t, report.delta0.at_h);
    println!("findings: {:?}", report.findings());
    Ok(())
}
