//! Standard normal distribution helpers.

use libm::erfc;
use statrs::function::erf::erfc_inv;

/// `sqrt(2 / pi)`, the mean of `|N|` for a standard normal `N`.
pub const MEAN_ABS_NORMAL: f64 = 0.797_884_560_802_865_4;

/// Standard normal CDF.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile for `u` in `(0, 1)`.
pub fn quantile(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

/// `P(|N| >= a)` for `a >= 0`.
pub fn abs_tail(a: f64) -> f64 {
    if a <= 0.0 {
        1.0
    } else {
        erfc(a / std::f64::consts::SQRT_2)
    }
}
