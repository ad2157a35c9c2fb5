//! Square-root envelopes of the frontier and the margins by which a computed
//! frontier satisfies them.

use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{chi_bar, log_grid, EnvelopeFunction};
use crate::densities::{Density, PiecewiseGeometricDensity};
use crate::error::{Error, Result};
use crate::numerics::rng::{Domain, Stream};
use crate::solver::FrontierPath;

/// `sqrt(2/pi)`, the mean of `|N(0,1)|`.
pub const SQRT_2_OVER_PI: f64 = crate::numerics::normal::MEAN_ABS_NORMAL;

/// Width, in standard errors, allowed before a margin counts as violated.
pub const SE_WIDTH: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqrtConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub beta_slope: f64,
}

/// `c1 = beta1 sqrt(2/pi)`, `c2 = alpha2 sqrt(2/pi)/(1 - beta2)` and
/// `c3 = alpha2 sqrt(2/pi)/(1 - beta_slope)`.
pub fn compute_sqrt_constants(d: &PiecewiseGeometricDensity, beta_slope: f64) -> Result<SqrtConstants> {
    if d.beta2 >= 1.0 {
        return Err(Error::UndefinedConstant("c2 (beta2 >= 1)"));
    }
    if !(beta_slope < 1.0) {
        return Err(Error::UndefinedConstant("c3 (slope bound >= 1)"));
    }
    Ok(SqrtConstants {
        c1: d.beta1 * SQRT_2_OVER_PI,
        c2: d.alpha2 * SQRT_2_OVER_PI / (1.0 - d.beta2),
        c3: d.alpha2 * SQRT_2_OVER_PI / (1.0 - beta_slope),
        beta_slope,
    })
}

/// Grid sizes for [`estimate_beta_slope`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeGrid {
    pub t_points: usize,
    pub x_points: usize,
    pub samples: usize,
}

impl Default for SlopeGrid {
    fn default() -> Self {
        SlopeGrid {
            t_points: 20,
            x_points: 60,
            samples: 20_000,
        }
    }
}

/// Indices of `points` log-spaced grid times in `(0, T]` (fewer if the grid
/// is shorter), optionally preceded by index 0.
pub fn time_indices(frontier: &FrontierPath, points: usize, with_zero: bool) -> Vec<usize> {
    let last = frontier.len() - 1;
    let mut idx = Vec::new();
    let mut prev = 0;
    for k in log_grid(1.0, last as f64, points.max(1)) {
        // spread collisions upwards so short grids still get distinct times
        let k = (k.round() as usize).max(prev + 1).min(last);
        idx.push(k);
        prev = k;
    }
    if with_zero {
        idx.insert(0, 0);
    }
    idx.dedup();
    idx
}

/// Monte Carlo estimate of `sup_{t, x} F_t(x)/x` where
/// `F_t(x) = E[F(Lambda_t - B_t + x) - F(Lambda_t - B_t)]`, over grid times of
/// the frontier and log-spaced `x` in `[1e-4 a_1, a_1]`.
pub fn estimate_beta_slope(frontier: &FrontierPath, d: &Density, scale: f64, grid: &SlopeGrid, seed: u64) -> f64 {
    let xs = log_grid(1e-4 * scale, scale, grid.x_points.max(1));
    time_indices(frontier, grid.t_points, true)
        .par_iter()
        .map(|&k| {
            let t = frontier.t_grid[k];
            let lambda = frontier.lambda[k];
            let base: Vec<f64> = if t == 0.0 {
                vec![lambda]
            } else {
                let mut s = Stream::new(seed, Domain::SlopeSamples, k as u64);
                (0..grid.samples.max(1)).map(|_| lambda - t.sqrt() * s.gaussian()).collect()
            };
            let f0: Vec<f64> = base.iter().map(|&w| d.cdf(w)).collect();
            xs.iter()
                .map(|&x| {
                    let sum: f64 = base.iter().zip(&f0).map(|(&w, &f)| d.cdf(w + x) - f).sum();
                    sum / base.len() as f64 / x
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Minimum over nodes of `observed - required`, read in the direction given
/// by `inequality`. A node passes when its margin plus `SE_WIDTH` standard
/// errors is nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margin {
    pub inequality: &'static str,
    pub min: f64,
    pub at_t: f64,
    pub standard_error: f64,
    /// `min over nodes of (margin + SE_WIDTH * se)`.
    pub slack: f64,
    pub holds: bool,
    pub nodes: usize,
}

impl Margin {
    /// From `(t, margin, se)` triples. With no nodes the margin is vacuous.
    pub fn from_nodes(inequality: &'static str, nodes: impl IntoIterator<Item = (f64, f64, f64)>) -> Self {
        let mut m = Margin {
            inequality,
            min: f64::INFINITY,
            at_t: f64::NAN,
            standard_error: 0.0,
            slack: f64::INFINITY,
            holds: true,
            nodes: 0,
        };
        for (t, margin, se) in nodes {
            m.nodes += 1;
            if margin < m.min {
                m.min = margin;
                m.at_t = t;
                m.standard_error = se;
            }
            m.slack = m.slack.min(margin + SE_WIDTH * se);
        }
        m.holds = m.slack >= 0.0;
        m
    }
}

/// Margins of a frontier against the square-root envelopes, the Hölder bound
/// and (when an averaging envelope is given) the `chi_bar` lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeMargins {
    pub lower: Margin,
    pub upper: Margin,
    pub holder: Option<Margin>,
    pub chi_bar: Option<Margin>,
    /// Grid times where `chi_bar` could not be evaluated.
    pub chi_bar_skipped: usize,
}

pub fn verify_frontier_envelopes(
    frontier: &FrontierPath,
    consts: Option<&SqrtConstants>,
    g: Option<&EnvelopeFunction>,
) -> EnvelopeMargins {
    let k_max = frontier.len();
    let t = &frontier.t_grid;
    let l = &frontier.lambda;
    let se = |k: usize| frontier.standard_error(k);
    let inner = || (1..k_max).map(|k| (k, t[k].sqrt()));
    let (lower, upper, holder) = match consts {
        Some(c) => {
            let lower = Margin::from_nodes(
                "Lambda_t - c1 sqrt(t) >= 0",
                inner().map(|(k, r)| (t[k], l[k] - c.c1 * r, se(k))),
            );
            let upper = Margin::from_nodes(
                "c2 sqrt(t) - Lambda_t >= 0",
                inner().map(|(k, r)| (t[k], c.c2 * r - l[k], se(k))),
            );
            let n = frontier.samples.max(1) as f64;
            let holder = Margin::from_nodes(
                "c3 sqrt(h) - (Lambda_{t+h} - Lambda_t) >= 0",
                (0..k_max).flat_map(|i| {
                    (i + 1..k_max).map(move |j| {
                        let inc = l[j] - l[i];
                        let p = inc.clamp(0.0, 1.0);
                        (t[i], c.c3 * (t[j] - t[i]).sqrt() - inc, (p * (1.0 - p) / n).sqrt())
                    })
                }),
            );
            (lower, upper, Some(holder))
        }
        None => (
            Margin::from_nodes("Lambda_t - c1 sqrt(t) >= 0", std::iter::empty()),
            Margin::from_nodes("c2 sqrt(t) - Lambda_t >= 0", std::iter::empty()),
            None,
        ),
    };
    let mut skipped = 0;
    let chi = g.map(|g| {
        let nodes: Vec<(f64, f64, f64)> = inner()
            .filter_map(|(k, _)| match chi_bar(g, t[k]) {
                Ok(c) => Some((t[k], c - l[k], se(k))),
                Err(_) => {
                    skipped += 1;
                    None
                }
            })
            .collect();
        Margin::from_nodes("chi_bar(t) - Lambda_t >= 0", nodes)
    });
    EnvelopeMargins {
        lower,
        upper,
        holder,
        chi_bar: chi,
        chi_bar_skipped: skipped,
    }
}

/// `alpha2 sqrt(2/pi) sqrt(h) - (Lambda_h - Lambda_0 - F(Lambda_h - Lambda_0))`
/// at each grid time: the one-step increment bound started from time zero.
pub fn initial_increment_margin(frontier: &FrontierPath, d: &Density, f_max: f64) -> Margin {
    let l0 = frontier.lambda[0];
    let f0 = d.cdf(l0);
    Margin::from_nodes(
        "f_max sqrt(2/pi) sqrt(h) - (dLambda - F_0(dLambda)) >= 0",
        (1..frontier.len()).map(|k| {
            let inc = frontier.lambda[k] - l0;
            let drift = d.cdf(l0 + inc) - f0;
            let h = frontier.t_grid[k];
            (h, f_max * SQRT_2_OVER_PI * h.sqrt() - (inc - drift), frontier.standard_error(k))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> PiecewiseGeometricDensity {
        PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5).unwrap()
    }

    #[test]
    fn reference_constants() {
        let d = reference();
        let c = compute_sqrt_constants(&d, 0.9).unwrap();
        assert!((c.c1 - 0.54522).abs() < 1e-4);
        assert!((c.c2 - 6.2834).abs() < 1e-3);
        assert!((c.c3 - 10.0 * 1.05 * SQRT_2_OVER_PI).abs() < 1e-9);
        assert!(compute_sqrt_constants(&d, 1.0).is_err());
    }

    #[test]
    fn margin_reduction() {
        let m = Margin::from_nodes("x >= 0", vec![(0.1, 0.5, 0.0), (0.2, -0.01, 0.01), (0.3, 0.2, 0.0)]);
        assert_eq!(m.min, -0.01);
        assert_eq!(m.at_t, 0.2);
        assert!(m.holds);
        assert!((m.slack - 0.02).abs() < 1e-15);
        let m = Margin::from_nodes("x >= 0", vec![(0.1, -0.1, 0.01)]);
        assert!(!m.holds);
    }

    #[test]
    fn linear_frontier_holder() {
        let t: Vec<f64> = (0..=10).map(|k| k as f64 * 0.01).collect();
        let l: Vec<f64> = t.iter().map(|s| s.sqrt()).collect();
        let a = vec![1.0; t.len()];
        let f = FrontierPath::new(t, l, a, 1_000_000, 1.0);
        let c = SqrtConstants {
            c1: 0.5,
            c2: 2.0,
            c3: 1.0,
            beta_slope: 0.0,
        };
        let m = verify_frontier_envelopes(&f, Some(&c), None);
        assert!(m.lower.holds && m.upper.holds);
        let h = m.holder.unwrap();
        assert!(h.min.abs() < 1e-12);
        assert_eq!(h.nodes, 55);
    }

    #[test]
    fn chi_bar_margin_sign() {
        // g = 1 gives chi_t = E|N| sqrt(t); a frontier at half of it sits below
        let g = EnvelopeFunction::new(vec![0.0, 10.0], vec![1.0, 1.0]).unwrap();
        let t: Vec<f64> = (0..=10).map(|k| k as f64 * 0.01).collect();
        let l: Vec<f64> = t.iter().map(|s| 0.5 * SQRT_2_OVER_PI * s.sqrt()).collect();
        let f = FrontierPath::new(t, l, vec![1.0; 11], 1_000_000, 1.0);
        let chi = verify_frontier_envelopes(&f, None, Some(&g)).chi_bar.unwrap();
        assert!(chi.holds && chi.min > 0.0);
        assert!((chi.min - 0.5 * SQRT_2_OVER_PI * 0.1).abs() < 1e-12);
    }
}
