//! The piecewise-geometric density: band endpoints, the two CDF slopes at the
//! endpoints, and the exact rational identities behind them.
//!
//! ```text
//! cargo run --release --example piecewise_density
//! ```

use stefan_lab::densities::exact::{ratio, to_f64, ExactPiecewise};
use stefan_lab::densities::PiecewiseGeometricDensity;

fn main() -> stefan_lab::Result<()> {
    let d = PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5)?;
    println!("beta1 = {:.6}  beta2 = {:.6}  a1 = {:.6}", d.beta1, d.beta2, d.a1);
    println!("admissible: {}", d.admissible);
    println!("resolved periods: {}  floor: {:e}", d.resolved_periods(), d.floor());
    println!("first moment: {:.6}", d.first_moment());

    println!("\n  k        a_k          F(a_k)/a_k   f on [a_(k+1), a_k)");
    for k in 1..=8 {
        let a = d.endpoint(k);
        let below = d.pdf(0.5 * (a + d.endpoint(k + 1)));
        println!("{k:3}  {a:12.6e}  {:12.6}  {below:8.3}", d.cdf(a) / a);
    }

    let e = ExactPiecewise::new(ratio(1, 2), ratio(21, 20), ratio(1, 2), ratio(1, 2));
    let ok = (1..=20).all(|n| {
        let odd = e.endpoint(2 * n - 1);
        let even = e.endpoint(2 * n);
        e.cdf(&odd) == &e.beta1 * &odd && e.cdf(&even) == &e.beta2 * &even
    });
    println!("\nexact: beta1 = {}, beta2 = {}, a1 = {}", e.beta1, e.beta2, e.a1);
    println!("F(a_odd) = beta1 a_odd and F(a_even) = beta2 a_even for 20 periods: {ok}");
    println!("a1 as f64: {}", to_f64(&e.a1));
    Ok(())
}
