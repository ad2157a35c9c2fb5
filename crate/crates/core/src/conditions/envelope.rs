//! Nondecreasing step envelopes `g`, `g~(s) = s g(s)` and its inverse.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::normal::MEAN_ABS_NORMAL;

/// Left-constant nondecreasing function: `g(s) = g_values[i]` for
/// `s_grid[i] <= s < s_grid[i+1]`, extended by `g_values[0]` to the left and
/// by the last value to the right.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFunction {
    pub s_grid: Vec<f64>,
    pub g_values: Vec<f64>,
}

impl Serialize for EnvelopeFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.s_grid.iter().zip(&self.g_values).map(|(&s, &g)| [s, g]).collect();
        pairs.serialize(serializer)
    }
}

impl EnvelopeFunction {
    pub fn new(s_grid: Vec<f64>, g_values: Vec<f64>) -> Result<Self> {
        if s_grid.is_empty() || s_grid.len() != g_values.len() {
            return Err(Error::Config("envelope grid and values must be nonempty and of equal length".into()));
        }
        if s_grid[0] < 0.0 || s_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("envelope grid must be strictly increasing in [0, inf)".into()));
        }
        if g_values.iter().any(|g| !(*g >= 0.0)) || g_values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("envelope values must be nonnegative and nondecreasing".into()));
        }
        Ok(EnvelopeFunction { s_grid, g_values })
    }

    /// Samples a nondecreasing `g` at the grid points.
    pub fn from_fn(s_grid: Vec<f64>, g: impl Fn(f64) -> f64) -> Result<Self> {
        let g_values = s_grid.iter().map(|&s| g(s)).collect();
        EnvelopeFunction::new(s_grid, g_values)
    }

    fn index(&self, s: f64) -> usize {
        self.s_grid.partition_point(|&x| x <= s).max(1) - 1
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.g_values[self.index(s)]
    }

    pub fn g_tilde(&self, s: f64) -> f64 {
        s * self.eval(s)
    }

    pub fn min_value(&self) -> f64 {
        self.g_values[0]
    }

    /// Largest value of `g~` certified by the grid.
    pub fn range_max(&self) -> f64 {
        self.g_tilde(*self.s_grid.last().unwrap())
    }

    /// Smallest `s` with `s g(s) >= y`. Each constant piece is inverted in
    /// closed form.
    pub fn g_tilde_inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::out_of_range("y", y, "y >= 0"));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let max = self.range_max();
        if y > max {
            return Err(Error::EnvelopeRange { y, max });
        }
        let n = self.s_grid.len();
        for i in 0..n {
            let g = self.g_values[i];
            if g <= 0.0 {
                continue;
            }
            let lo = if i == 0 { 0.0 } else { self.s_grid[i] };
            let hi = if i + 1 == n { f64::INFINITY } else { self.s_grid[i + 1] };
            let s = (y / g).max(lo);
            if s < hi {
                return Ok(s);
            }
        }
        Err(Error::EnvelopeRange { y, max })
    }
}

/// Inverse of `g~` at `y`.
pub fn g_tilde_inverse(g: &EnvelopeFunction, y: f64) -> Result<f64> {
    g.g_tilde_inverse(y)
}

/// `chi_t = g~^{-1}(E|N| sqrt(t))`, the early-time bound on the frontier.
pub fn chi_bar(g: &EnvelopeFunction, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::out_of_range("t", t, "t >= 0"));
    }
    g.g_tilde_inverse(MEAN_ABS_NORMAL * t.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(points: usize, hi: f64) -> Vec<f64> {
        (0..points).map(|i| hi * i as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn identity_envelope() {
        let g = EnvelopeFunction::from_fn(grid(11, 2.0), |_| 1.0).unwrap();
        assert!((g.g_tilde_inverse(0.7).unwrap() - 0.7).abs() < 1e-12);
        assert!((chi_bar(&g, 1.0).unwrap() - MEAN_ABS_NORMAL).abs() < 1e-12);
        assert_eq!(chi_bar(&g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn left_constant_pieces_invert_exactly_at_nodes() {
        let g = EnvelopeFunction::from_fn(grid(101, 1.0), |s| s).unwrap();
        assert!((g.g_tilde_inverse(0.09).unwrap() - 0.3).abs() < 1e-12);
        let g = EnvelopeFunction::from_fn(grid(101, 1.0), |s| s.min(0.5)).unwrap();
        assert!((g.g_tilde_inverse(0.3).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_is_reported() {
        let g = EnvelopeFunction::from_fn(grid(11, 1.0), |_| 0.5).unwrap();
        match g.g_tilde_inverse(0.75) {
            Err(Error::EnvelopeRange { max, .. }) => assert_eq!(max, 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_decreasing_values() {
        assert!(EnvelopeFunction::new(vec![0.0, 1.0], vec![1.0, 0.5]).is_err());
    }
}
