//! How often the running maximum `Y_t` sits in the good set, and the lower
//! bound for band probabilities built from `|N|` and a drifted maximum.

use rayon::prelude::*;
use serde::Serialize;

use super::slope::{GoodSet, SlopeBound};
use crate::densities::PiecewiseGeometricDensity;
use crate::numerics::normal;
use crate::numerics::rng::Domain;
use crate::solver::picard::PathBank;
use crate::solver::YSamples;

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n.max(1) as f64).sqrt()
}

/// Samples of `U = sup_{0 <= s <= 1} (B_s + c3 sqrt(s))` on a grid of `steps`
/// cells. Within a cell the bridge maximum of `B` is added to `c3 sqrt(s)` at
/// the left end, so every sample is at most the continuous supremum.
pub fn drifted_maximum_samples(c3: f64, paths: usize, steps: usize, seed: u64) -> Vec<f64> {
    let steps = steps.max(1);
    let dt = 1.0 / steps as f64;
    let bank = PathBank::generate(paths, steps, dt, seed, Domain::DriftedMaximum, true);
    let step_max = bank.step_max.as_ref().expect("bridge maxima requested");
    (0..paths)
        .into_par_iter()
        .map(|p| {
            let row = &bank.neg_b[p * steps..(p + 1) * steps];
            let sm = &step_max[p * steps..(p + 1) * steps];
            let mut u: f64 = 0.0;
            for j in 0..steps {
                let s0 = j as f64 * dt;
                let s1 = (j + 1) as f64 * dt;
                u = u.max(sm[j] + c3 * s0.sqrt()).max(row[j] + c3 * s1.sqrt());
            }
            u
        })
        .collect()
}

/// The band `[a sqrt(t), b sqrt(t)]` associated with time `t`: if
/// `a_{2n+3} <= sqrt(t) < a_{2n+1}` it is `[a_{2n+2}, rho a_{2n+1}]`, and for
/// `sqrt(t) >= a_3` it is `[a_2, inf)`. Returns `(a, b)`.
pub fn band_for_time(d: &PiecewiseGeometricDensity, t: f64) -> (f64, f64) {
    let r = t.sqrt();
    if r >= d.endpoint(3) {
        return (d.endpoint(2) / r, f64::INFINITY);
    }
    let mut n = 1;
    while !(d.endpoint(2 * n + 3) <= r) {
        n += 1;
        if n > 4096 {
            break;
        }
    }
    (d.endpoint(2 * n + 2) / r, d.rho() * d.endpoint(2 * n + 1) / r)
}

/// `P(|N| >= a) P(U <= b - a)`, with `P(U <= .)` from samples; zero when
/// `b <= a`. Returns the value and its standard error.
pub fn band_lower_bound(a: f64, b: f64, u_samples: &[f64]) -> (f64, f64) {
    if !(b > a) {
        return (0.0, 0.0);
    }
    let tail = normal::abs_tail(a);
    let pu = if b.is_infinite() {
        return (tail, 0.0);
    } else {
        u_samples.iter().filter(|&&u| u <= b - a).count() as f64 / u_samples.len().max(1) as f64
    };
    (tail * pu, tail * binomial_se(pu, u_samples.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    /// `P(Y_t in [a sqrt(t), b sqrt(t)])`.
    pub observed: f64,
    pub observed_se: f64,
    pub lower_bound: f64,
    pub lower_bound_se: f64,
    /// `observed - lower_bound`.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSetRow {
    pub t: f64,
    pub prob: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodSetReport {
    pub rows: Vec<GoodSetRow>,
    /// `(alpha2 - 1)/(alpha2 - L)`.
    pub threshold: f64,
    /// `min_t P(Y_t in G) - threshold`.
    pub margin: f64,
    pub bands: Vec<BandRow>,
}

/// `P(Y_t in G)` and the band bounds at the times `indices` of `y`.
pub fn estimate_prob_in_good_set(
    y: &YSamples,
    indices: &[usize],
    d: &PiecewiseGeometricDensity,
    slope: &SlopeBound,
    u_samples: &[f64],
    se_width: f64,
) -> GoodSetReport {
    let set = GoodSet::new(d, super::slope::BAND_CAP);
    let m = y.paths();
    let mut rows = Vec::new();
    let mut bands = Vec::new();
    for &k in indices {
        let t = y.t_grid[k];
        let values = &y.values[k];
        let prob = values.iter().filter(|&&v| set.contains(v)).count() as f64 / m.max(1) as f64;
        rows.push(GoodSetRow {
            t,
            prob,
            se: binomial_se(prob, m),
        });
        if t > 0.0 {
            let (a, b) = band_for_time(d, t);
            let (lo, hi) = (a * t.sqrt(), b * t.sqrt());
            let observed = values.iter().filter(|&&v| lo <= v && v <= hi).count() as f64 / m.max(1) as f64;
            let observed_se = binomial_se(observed, m);
            let (lower_bound, lower_bound_se) = band_lower_bound(a, b, u_samples);
            let margin = observed - lower_bound;
            let se = observed_se.hypot(lower_bound_se);
            bands.push(BandRow {
                t,
                a,
                b,
                observed,
                observed_se,
                lower_bound,
                lower_bound_se,
                margin,
                holds: margin + se_width * se >= 0.0,
            });
        }
    }
    let threshold = (d.alpha2 - 1.0) / (d.alpha2 - slope.l);
    let margin = rows.iter().map(|r| r.prob).fold(f64::INFINITY, f64::min) - threshold;
    GoodSetReport {
        rows,
        threshold,
        margin,
        bands,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> PiecewiseGeometricDensity {
        PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5).unwrap()
    }

    #[test]
    fn degenerate_band_has_zero_bound() {
        assert_eq!(band_lower_bound(0.7, 0.7, &[0.1, 0.2]), (0.0, 0.0));
        let (v, _) = band_lower_bound(0.0, f64::INFINITY, &[]);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn band_selection() {
        let d = reference();
        let t = 0.25;
        let (a, b) = band_for_time(&d, t);
        assert!((a - d.endpoint(2) / 0.5).abs() < 1e-15);
        assert!(b.is_infinite());
        let r = 0.5 * (d.endpoint(5) + d.endpoint(3));
        let (a, b) = band_for_time(&d, r * r);
        assert!((a * r - d.endpoint(4)).abs() < 1e-14);
        assert!((b * r - 0.75 * d.endpoint(3)).abs() < 1e-14);
    }

    #[test]
    fn drifted_maximum_dominates_endpoint() {
        let u = drifted_maximum_samples(2.0, 2000, 200, 3);
        assert!(u.iter().all(|&x| x > 0.0));
        // U >= B_1 + c3 with B_1 ~ N(0,1): the mean is at least c3
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        assert!(mean > 2.0);
    }
}
