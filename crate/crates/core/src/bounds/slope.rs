//! The good set `G` of the piecewise-geometric family and the slope bound
//! `L` of `F` on it.

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::conditions::log_grid;
use crate::densities::exact::{ExactPiecewise, Rational};
use crate::densities::PiecewiseGeometricDensity;
use crate::error::{Error, Result};

/// Number of bands `[a_{2n+2}, rho a_{2n+1}]` kept in `G`.
pub const BAND_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeBound {
    pub rho: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub below_one: bool,
}

/// `rho = (1 + p)/2` and `L = ((1-q) alpha2 + q (1-rho) alpha1) / (1 - q rho)`.
/// The comparison with 1 is exact when the parameters are small fractions.
pub fn compute_l(d: &PiecewiseGeometricDensity) -> SlopeBound {
    let rho = d.rho();
    let l = ((1.0 - d.q) * d.alpha2 + d.q * (1.0 - rho) * d.alpha1) / (1.0 - d.q * rho);
    let below_one = match exact_from(d) {
        Ok(e) => e.slope_bound() < Rational::from_integer(1.into()),
        Err(_) => l < 1.0,
    };
    SlopeBound { rho, l, below_one }
}

/// The good set: bands `[a_{2n+2}, rho a_{2n+1}]` for `1 <= n <= cap` together
/// with `[a_2, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSet {
    /// Closed bands in decreasing order, the first being `[a_2, inf)`.
    pub bands: Vec<(f64, f64)>,
}

impl GoodSet {
    pub fn new(d: &PiecewiseGeometricDensity, cap: usize) -> Self {
        let rho = d.rho();
        let cap = cap.min(d.resolved_periods().saturating_sub(1));
        let mut bands = vec![(d.endpoint(2), f64::INFINITY)];
        for n in 1..=cap {
            bands.push((d.endpoint(2 * n + 2), rho * d.endpoint(2 * n + 1)));
        }
        GoodSet { bands }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.bands.iter().any(|&(lo, hi)| lo <= y && y <= hi)
    }
}

/// Largest `(F(y+h) - F(y))/h` over a grid with `y` in `G`, `h > 0` and
/// `y + h <= a_1`. Each band gets `y_points` uniform points (endpoints
/// included) and each `y` gets `h_points` log-spaced steps in
/// `[1e-4 y, a_1 - y]`.
pub fn bruteforce_sup_ratio(d: &PiecewiseGeometricDensity, y_points: usize, h_points: usize) -> f64 {
    use rayon::prelude::*;
    let set = GoodSet::new(d, BAND_CAP);
    let a1 = d.a1;
    let ys: Vec<f64> = set
        .bands
        .iter()
        .flat_map(|&(lo, hi)| {
            let hi = hi.min(a1);
            let m = y_points.max(2);
            (0..m).map(move |i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
        })
        .filter(|&y| y < a1)
        .collect();
    ys.par_iter()
        .map(|&y| {
            let f0 = d.cdf(y);
            log_grid(1e-4 * y, a1 - y, h_points.max(1))
                .into_iter()
                .map(|h| (d.cdf(y + h) - f0) / h)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Converts a float parameter to the nearest small rational.
pub fn rational_parameter(name: &'static str, x: f64) -> Result<Rational> {
    let r = Ratio::<i64>::approximate_float(x).ok_or(Error::UndefinedConstant(name))?;
    Ok(Rational::new((*r.numer()).into(), (*r.denom()).into()))
}

pub fn exact_from(d: &PiecewiseGeometricDensity) -> Result<ExactPiecewise> {
    Ok(ExactPiecewise::new(
        rational_parameter("alpha1", d.alpha1)?,
        rational_parameter("alpha2", d.alpha2)?,
        rational_parameter("p", d.p)?,
        rational_parameter("q", d.q)?,
    ))
}

/// Exact check, for bands `n = 1..=n_max` and `y_points` rational points of
/// `[a_{2n+2}, rho a_{2n+1}]`, that `k -> (F(a_{2k}) - F(y))/(a_{2k} - y)` is
/// nondecreasing for `k = 1..=n`, and that at `y = rho a_{2n+1}` the last term
/// equals `L`. Returns the first failing `(n, y)` if any.
pub fn check_chord_sequence(e: &ExactPiecewise, n_max: usize, y_points: usize) -> Option<(usize, f64)> {
    let rho = e.rho();
    let l = e.slope_bound();
    let m = y_points.max(2) as i64;
    for n in 1..=n_max {
        let lo = e.endpoint(2 * n + 2);
        let hi = &rho * e.endpoint(2 * n + 1);
        for i in 0..m {
            let y = &lo + (&hi - &lo) * Rational::new(i.into(), (m - 1).into());
            let fy = e.cdf(&y);
            let mut previous: Option<Rational> = None;
            for k in 1..=n {
                let a = e.endpoint(2 * k);
                let chord = (e.cdf(&a) - &fy) / (&a - &y);
                if let Some(prev) = &previous {
                    if chord < *prev {
                        return Some((n, crate::densities::exact::to_f64(&y)));
                    }
                }
                previous = Some(chord);
            }
            if i == m - 1 && (previous.unwrap() - &l) != Rational::zero() {
                return Some((n, crate::densities::exact::to_f64(&y)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::exact::ratio;

    fn reference() -> PiecewiseGeometricDensity {
        PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5).unwrap()
    }

    #[test]
    fn reference_slope_bound() {
        let b = compute_l(&reference());
        assert!((b.rho - 0.75).abs() < 1e-15);
        assert!((b.l - 0.94).abs() < 1e-12);
        assert!(b.below_one);
    }

    #[test]
    fn boundary_case_flagged() {
        let d = PiecewiseGeometricDensity::new(0.5, 1.125, 0.5, 0.5).unwrap();
        let b = compute_l(&d);
        assert!(!b.below_one);
        assert_eq!(exact_from(&d).unwrap().slope_bound(), ratio(1, 1));
    }

    #[test]
    fn good_set_membership() {
        let d = reference();
        let g = GoodSet::new(&d, BAND_CAP);
        assert!(g.contains(d.endpoint(2)));
        assert!(g.contains(5.0));
        assert!(g.contains(0.75 * d.endpoint(3)));
        assert!(!g.contains(0.9 * d.endpoint(3)));
        assert!(!g.contains(1.5 * d.endpoint(3)));
    }

    #[test]
    fn parameters_recovered_as_small_fractions() {
        assert_eq!(rational_parameter("x", 1.05).unwrap(), ratio(21, 20));
        assert_eq!(rational_parameter("x", 0.5).unwrap(), ratio(1, 2));
    }

    #[test]
    fn chord_sequence_reference() {
        let e = exact_from(&reference()).unwrap();
        assert_eq!(check_chord_sequence(&e, 4, 5), None);
    }
}
