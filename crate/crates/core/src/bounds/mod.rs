//! Constants and envelopes for the frontier of the piecewise-geometric
//! family, and Monte Carlo margins by which a computed frontier meets them.

pub mod contraction;
pub mod envelopes;
pub mod good_set;
pub mod slope;

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

pub use contraction::{estimate_delta0, Delta0Estimate, QuotientNode};
pub use envelopes::{
    compute_sqrt_constants, estimate_beta_slope, initial_increment_margin, time_indices, verify_frontier_envelopes,
    EnvelopeMargins, Margin, SlopeGrid, SqrtConstants, SE_WIDTH,
};
pub use good_set::{
    band_for_time, band_lower_bound, drifted_maximum_samples, estimate_prob_in_good_set, BandRow, GoodSetReport,
};
pub use slope::{bruteforce_sup_ratio, check_chord_sequence, compute_l, exact_from, GoodSet, SlopeBound, BAND_CAP};

use crate::conditions::EnvelopeFunction;
use crate::densities::Density;
use crate::error::Result;
use crate::solver::{compute_Y_samples, FrontierPath};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsConfig {
    /// Times (log-spaced grid indices) for the `Y_t` statistics.
    pub t_points: usize,
    pub y_paths: usize,
    pub u_paths: usize,
    pub u_steps: usize,
    pub slope: SlopeGrid,
    pub h_points: usize,
    /// Grid sizes of the brute-force slope search on `G`.
    pub ratio_points: (usize, usize),
    /// Bands checked exactly for the chord sequence.
    pub exact_bands: usize,
    pub seed: u64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            t_points: 10,
            y_paths: 20_000,
            u_paths: 20_000,
            u_steps: 500,
            slope: SlopeGrid::default(),
            h_points: 40,
            ratio_points: (200, 200),
            exact_bands: 10,
            seed: 0,
        }
    }
}

/// Parts that exist only for the piecewise-geometric family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseBounds {
    pub beta1: f64,
    pub beta2: f64,
    pub admissible: bool,
    pub slope: SlopeBound,
    pub sup_ratio_bruteforce: f64,
    /// First `(band, y)` where the exact chord sequence check fails.
    pub chord_failure: Option<(usize, f64)>,
    pub constants: Option<SqrtConstants>,
    pub constants_error: Option<String>,
    pub good_set: Option<GoodSetReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub family: &'static str,
    pub beta_slope: f64,
    pub piecewise: Option<PiecewiseBounds>,
    pub envelopes: EnvelopeMargins,
    pub initial_increment: Margin,
    pub delta0: Delta0Estimate,
}

impl BoundsReport {
    /// Names of the checks whose margins fail.
    pub fn findings(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut push = |ok: bool, name| {
            if !ok {
                out.push(name)
            }
        };
        push(self.envelopes.lower.holds, "sqrt_lower");
        push(self.envelopes.upper.holds, "sqrt_upper");
        push(self.envelopes.holder.as_ref().is_none_or(|m| m.holds), "holder");
        push(self.envelopes.chi_bar.as_ref().is_none_or(|m| m.holds), "chi_bar");
        push(self.initial_increment.holds, "initial_increment");
        if let Some(p) = &self.piecewise {
            push(p.slope.below_one, "slope_bound");
            push(p.chord_failure.is_none(), "chord_sequence");
            push(p.constants.is_some(), "constants");
            if let Some(g) = &p.good_set {
                push(g.margin >= 0.0, "good_set");
                push(g.bands.iter().all(|b| b.holds), "band_bound");
            }
        }
        push(self.delta0.delta0_hat + SE_WIDTH * self.delta0.se < 1.0, "delta0");
        out
    }

    /// Command-line JSON layout.
    pub fn to_json(&self) -> Value {
        let p = self.piecewise.as_ref();
        let c = p.and_then(|p| p.constants.as_ref());
        json!({
            "family": self.family,
            "beta1": p.map(|p| p.beta1),
            "beta2": p.map(|p| p.beta2),
            "admissible": p.map(|p| p.admissible),
            "rho": p.map(|p| p.slope.rho),
            "L": p.map(|p| p.slope.l),
            "sup_ratio_bruteforce": p.map(|p| p.sup_ratio_bruteforce),
            "chord_sequence_ok": p.map(|p| p.chord_failure.is_none()),
            "c1": c.map(|c| c.c1),
            "c2": c.map(|c| c.c2),
            "c3": c.map(|c| c.c3),
            "constants_error": p.and_then(|p| p.constants_error.clone()),
            "beta_slope": self.beta_slope,
            "delta0_hat": self.delta0.delta0_hat,
            "delta0_se": self.delta0.se,
            "sqrt_margin": { "lower": self.envelopes.lower, "upper": self.envelopes.upper },
            "holder_margin": self.envelopes.holder,
            "chi_bar_margin": self.envelopes.chi_bar,
            "initial_increment_margin": self.initial_increment,
            "good_set": p.and_then(|p| p.good_set.as_ref()),
            "findings": self.findings(),
        })
    }

    /// Per-time margins: `t, lambda, se, lower, upper, chi_bar`.
    pub fn write_margin_csv<W: Write>(
        &self,
        frontier: &FrontierPath,
        g: Option<&EnvelopeFunction>,
        writer: W,
    ) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "lambda", "se", "lower_margin", "upper_margin", "chi_bar_margin"])?;
        let c = self.piecewise.as_ref().and_then(|p| p.constants.as_ref());
        let fmt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        for k in 0..frontier.len() {
            let t = frontier.t_grid[k];
            let l = frontier.lambda[k];
            let chi = g.and_then(|g| crate::conditions::chi_bar(g, t).ok()).map(|c| c - l);
            w.write_record([
                t.to_string(),
                l.to_string(),
                frontier.standard_error(k).to_string(),
                fmt(c.map(|c| l - c.c1 * t.sqrt())),
                fmt(c.map(|c| c.c2 * t.sqrt() - l)),
                fmt(chi),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// All bounds for one frontier. `g` is the averaging envelope, if the
/// density satisfies the averaging condition.
pub fn compute_bounds(
    d: &Density,
    frontier: &FrontierPath,
    g: Option<&EnvelopeFunction>,
    cfg: &BoundsConfig,
) -> Result<BoundsReport> {
    let end = d.support_end();
    let scale = match d.as_piecewise() {
        Some(pw) => pw.a1,
        None if end.is_finite() => end,
        None => 1.0,
    };
    let beta_slope = estimate_beta_slope(frontier, d, scale, &cfg.slope, cfg.seed);
    let indices = time_indices(frontier, cfg.t_points, false);
    let y = compute_Y_samples(frontier, cfg.y_paths, cfg.seed);

    let piecewise = match d.as_piecewise() {
        Some(pw) => {
            let slope = compute_l(pw);
            let exact = exact_from(pw)?;
            let (constants, constants_error) = match compute_sqrt_constants(pw, beta_slope) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let good_set = constants.map(|c| {
                let u = drifted_maximum_samples(c.c3, cfg.u_paths, cfg.u_steps, cfg.seed);
                estimate_prob_in_good_set(&y, &indices, pw, &slope, &u, SE_WIDTH)
            });
            Some(PiecewiseBounds {
                beta1: pw.beta1,
                beta2: pw.beta2,
                admissible: pw.admissible,
                slope,
                sup_ratio_bruteforce: bruteforce_sup_ratio(pw, cfg.ratio_points.0, cfg.ratio_points.1),
                chord_failure: check_chord_sequence(&exact, cfg.exact_bands, 5),
                constants,
                constants_error,
                good_set,
            })
        }
        None => None,
    };
    let constants = piecewise.as_ref().and_then(|p| p.constants.as_ref());
    let envelopes = verify_frontier_envelopes(frontier, constants, g);
    let f_max = d.sup_on(0.0, end);
    Ok(BoundsReport {
        family: d.family(),
        beta_slope,
        envelopes,
        initial_increment: initial_increment_margin(frontier, d, f_max),
        delta0: estimate_delta0(&y, &indices, d, scale, cfg.h_points),
        piecewise,
    })
}
