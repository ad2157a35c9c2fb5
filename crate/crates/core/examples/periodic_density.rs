//! Densities `f(x) = Psi(x^{-alpha})` near the origin, normalized by the cut
//! point `a`, for the sine profile and a tabulated profile.
//!
//! ```text
//! cargo run --release --example periodic_density
//! ```

use stefan_lab::densities::{PeriodicOscillatoryDensity, Profile};

fn main() -> stefan_lab::Result<()> {
    let profiles = [
        ("sine, alpha = 1", 1.0, Profile::Sine),
        ("sine, alpha = 2", 2.0, Profile::Sine),
        (
            "tabulated triangle, alpha = 1",
            1.0,
            Profile::Tabulated {
                period: 1.0,
                values: vec![0.0, 0.9, 0.0],
            },
        ),
    ];
    for (name, alpha, psi) in profiles {
        let d = PeriodicOscillatoryDensity::new(alpha, psi)?;
        println!("{name}");
        println!("  a = {:.12}  F(a) = {:.3e} off one", d.a, (d.cdf(d.a) - 1.0).abs());
        println!("  sup f = {:.6}  first moment = {:.6}", d.sup(), d.first_moment()?);
        for u in [0.1, 0.5, 0.9] {
            let x = d.sample(u);
            println!("  F^-1({u}) = {x:.6}  F(F^-1({u})) = {:.12}", d.cdf(x));
        }
    }
    Ok(())
}
