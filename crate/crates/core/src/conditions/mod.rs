//! Window averages `psi(lambda, mu) = int_mu^{mu+1} f(lambda x) dx` and the
//! pointwise, moment and averaging conditions on an initial density.

pub mod envelope;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub use envelope::{chi_bar, g_tilde_inverse, EnvelopeFunction};

use crate::densities::Density;
use crate::numerics::golden_section_max;

/// Seeds of the golden-section search in [`sup_psi`].
pub const SUP_PSI_SEEDS: usize = 256;

/// `int_mu^{mu+1} f(lambda x) dx`, as a difference of CDF values.
pub fn psi(d: &Density, lambda: f64, mu: f64) -> f64 {
    if lambda <= 0.0 {
        return d.pdf(0.0);
    }
    ((d.cdf(lambda * (mu + 1.0)) - d.cdf(lambda * mu)) / lambda).max(0.0)
}

/// `(sup_mu psi(lambda, mu), argmax)` over `mu` in `[0, 1]`.
pub fn sup_psi(d: &Density, lambda: f64) -> (f64, f64) {
    let (mu, value) = golden_section_max(|mu| psi(d, lambda, mu), 0.0, 1.0, SUP_PSI_SEEDS);
    (value, mu)
}

/// Evaluation grids for [`check_averaging_condition`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragingGrids {
    pub lambda_min: f64,
    pub lambda_points: usize,
    pub mu_points: usize,
    pub s_bins: usize,
    /// Right end of the pointwise check; defaults to `min(1/2, support end)`.
    pub x_max: Option<f64>,
    pub dyadic_levels: usize,
}

impl Default for AveragingGrids {
    fn default() -> Self {
        AveragingGrids {
            lambda_min: 1e-6,
            lambda_points: 200,
            mu_points: 101,
            s_bins: 256,
            x_max: None,
            dyadic_levels: 40,
        }
    }
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo * (hi / lo).powf(i as f64 / (points - 1) as f64)
            }
        })
        .collect()
}

/// Outcome of the dyadic-window check of `f <= 1 - h` near the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseReport {
    pub holds: bool,
    pub x_max: f64,
    /// `1 - sup f` on `(x_max 2^{-k-1}, x_max 2^{-k}]`, for `k = 0, 1, ...`.
    pub window_margins: Vec<f64>,
    /// Running minimum of the window margins towards the origin: a
    /// nondecreasing-in-`x` candidate for `h`.
    pub witness_h: Vec<f64>,
    /// A point of the first window where `f >= 1`.
    pub violation: Option<f64>,
}

/// Checks `f(x) <= 1 - h(x)` for a positive nondecreasing `h` on `(0, x_max]`
/// through the windows `(x_max 2^{-k-1}, x_max 2^{-k}]`, `k < levels`.
pub fn check_pointwise_condition(d: &Density, x_max: f64, levels: usize) -> PointwiseReport {
    let mut window_margins = Vec::with_capacity(levels);
    let mut witness_h = Vec::with_capacity(levels);
    let mut violation = None;
    let mut running = f64::INFINITY;
    for k in 0..levels {
        let hi = x_max * 0.5f64.powi(k as i32);
        let lo = 0.5 * hi;
        let margin = 1.0 - d.sup_on(lo, hi);
        running = running.min(margin);
        window_margins.push(margin);
        witness_h.push(running);
        if margin <= 0.0 && violation.is_none() {
            violation = Some(locate_max(d, lo, hi));
        }
    }
    PointwiseReport {
        holds: violation.is_none(),
        x_max,
        window_margins,
        witness_h,
        violation,
    }
}

fn locate_max(d: &Density, lo: f64, hi: f64) -> f64 {
    let points = 4096;
    let mut best = (hi, d.pdf(hi));
    for i in 1..points {
        let x = lo + (hi - lo) * i as f64 / points as f64;
        let v = d.pdf(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best.0
}

/// `(sup f <= 1, int x f(x) dx)`.
pub fn check_moment_condition(d: &Density) -> (bool, f64) {
    let f_max = d.sup_on(0.0, d.support_end());
    let moment = d.first_moment().unwrap_or(f64::NAN);
    (f_max <= 1.0, moment)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub family: &'static str,
    pub lambda0_candidate: f64,
    pub lambda_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    /// `psi_values[i][j] = psi(lambda_grid[i], mu_grid[j])`.
    pub psi_values: Vec<Vec<f64>>,
    /// `(lambda, argmax mu, sup psi)` per grid lambda, refined off the grid.
    pub sup_psi_per_lambda: Vec<[f64; 3]>,
    /// Fitted `g`, clipped at zero.
    pub g_envelope: EnvelopeFunction,
    /// `min_s (1 - worst psi)` over the s-bins; may be negative.
    pub averaging_margin: f64,
    pub averaging_holds: bool,
    /// Largest grid `lambda` such that `sup psi < 1` at every grid `lambda`
    /// below it (zero if the first grid point already fails).
    pub lambda0: f64,
    pub pointwise: PointwiseReport,
    pub pointwise_holds: bool,
    pub f_max: f64,
    pub first_moment: f64,
    pub moment_holds: bool,
}

impl ConditionReport {
    pub fn max_sup_psi(&self) -> f64 {
        self.sup_psi_per_lambda.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Report in the command-line JSON layout.
    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family,
            "pointwise_holds": self.pointwise_holds,
            "moment_holds": self.moment_holds,
            "averaging_holds": self.averaging_holds,
            "lambda0": self.lambda0,
            "lambda0_candidate": self.lambda0_candidate,
            "averaging_margin": self.averaging_margin,
            "max_sup_psi": self.max_sup_psi(),
            "f_max": self.f_max,
            "first_moment": self.first_moment,
            "pointwise_violation": self.pointwise.violation,
            "g_envelope": self.g_envelope,
            "worst_psi": self.sup_psi_per_lambda,
        })
    }
}

/// Evaluates `psi` on a `(lambda, mu)` grid below `lambda0_candidate`, bins
/// the values by `s = lambda (mu + 1)` and fits `g(s) = inf_{s' >= s} d(s')`
/// with `d = 1 - worst psi` per bin. Also runs the pointwise and moment
/// checks so that the report covers all three conditions.
pub fn check_averaging_condition(d: &Density, lambda0_candidate: f64, grids: &AveragingGrids) -> ConditionReport {
    let lambda_min = grids.lambda_min.min(lambda0_candidate);
    let lambda_grid = log_grid(lambda_min, lambda0_candidate, grids.lambda_points.max(1));
    let mu_points = grids.mu_points.max(2);
    let mu_grid: Vec<f64> = (0..mu_points).map(|j| j as f64 / (mu_points - 1) as f64).collect();

    let rows: Vec<(Vec<f64>, [f64; 3])> = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let row: Vec<f64> = mu_grid.iter().map(|&mu| psi(d, lambda, mu)).collect();
            let (value, mu) = sup_psi(d, lambda);
            (row, [lambda, mu, value])
        })
        .collect();
    let (psi_values, sup_psi_per_lambda): (Vec<Vec<f64>>, Vec<[f64; 3]>) = rows.into_iter().unzip();

    // s-bins
    let bins = grids.s_bins.max(1);
    let s_lo = lambda_grid[0];
    let s_hi = 2.0 * lambda0_candidate;
    let edges = log_grid(s_lo, s_hi, bins + 1);
    let bin_of = |s: f64| -> usize {
        let i = edges.partition_point(|&e| e <= s);
        i.clamp(1, bins) - 1
    };
    let mut worst = vec![f64::NEG_INFINITY; bins];
    for (i, &lambda) in lambda_grid.iter().enumerate() {
        for (j, &mu) in mu_grid.iter().enumerate() {
            let b = bin_of(lambda * (mu + 1.0));
            worst[b] = worst[b].max(psi_values[i][j]);
        }
        let [_, mu, value] = sup_psi_per_lambda[i];
        let b = bin_of(lambda * (mu + 1.0));
        worst[b] = worst[b].max(value);
    }
    // inf over s' >= s of 1 - worst, skipping empty bins
    let mut g_raw = vec![0.0; bins];
    let mut running = f64::INFINITY;
    for b in (0..bins).rev() {
        if worst[b].is_finite() {
            running = running.min(1.0 - worst[b]);
        }
        g_raw[b] = running;
    }
    let averaging_margin = g_raw.iter().cloned().filter(|g| g.is_finite()).fold(f64::INFINITY, f64::min);
    let averaging_holds = averaging_margin > 0.0;
    let g_envelope = EnvelopeFunction {
        s_grid: edges[..bins].to_vec(),
        g_values: g_raw.iter().map(|g| if g.is_finite() { g.max(0.0) } else { 0.0 }).collect(),
    };

    let mut lambda0 = lambda0_candidate;
    for (i, row) in sup_psi_per_lambda.iter().enumerate() {
        let grid_max = psi_values[i].iter().cloned().fold(row[2], f64::max);
        if grid_max >= 1.0 {
            lambda0 = if i == 0 { 0.0 } else { lambda_grid[i] };
            break;
        }
    }

    let x_max = grids.x_max.unwrap_or_else(|| d.support_end().min(0.5));
    let pointwise = check_pointwise_condition(d, x_max, grids.dyadic_levels);
    let (moment_holds, first_moment) = check_moment_condition(d);
    ConditionReport {
        family: d.family(),
        lambda0_candidate,
        lambda_grid,
        mu_grid,
        psi_values,
        sup_psi_per_lambda,
        g_envelope,
        averaging_margin,
        averaging_holds,
        lambda0,
        pointwise_holds: pointwise.holds,
        pointwise,
        f_max: d.sup_on(0.0, d.support_end()),
        first_moment,
        moment_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{PiecewiseGeometricDensity, TabulatedDensity};

    fn uniform_unit() -> Density {
        Density::Tabulated(TabulatedDensity::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap())
    }

    #[test]
    fn uniform_windows() {
        let d = uniform_unit();
        assert!((psi(&d, 0.3, 0.5) - 1.0).abs() < 1e-15);
        let (sup, _) = sup_psi(&d, 0.4);
        assert!((sup - 1.0).abs() < 1e-15);
    }

    #[test]
    fn piecewise_window_on_an_even_band() {
        let d = PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5).unwrap();
        let lambda = d.endpoint(3);
        let d = Density::Piecewise(d);
        assert!((psi(&d, lambda, 1.0) - 1.05).abs() < 1e-12);
    }

    #[test]
    fn ramp_satisfies_all_conditions_near_zero() {
        let d = Density::Tabulated(
            TabulatedDensity::new(vec![0.0, 2f64.sqrt()], vec![0.0, 2f64.sqrt()]).unwrap(),
        );
        let report = check_averaging_condition(&d, 0.1, &AveragingGrids::default());
        assert!(report.pointwise_holds);
        assert!(report.averaging_holds);
        assert!(!report.moment_holds);
        assert!(report.g_envelope.g_values.windows(2).all(|w| w[1] >= w[0]));
    }
}
