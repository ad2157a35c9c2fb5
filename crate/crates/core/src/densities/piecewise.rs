//! Piecewise-constant density oscillating between two levels on
//! geometrically shrinking bands.
//!
//! With `r = pq`, the band endpoints are `a_{2n-1} = r^{n-1} a_1` and
//! `a_{2n} = p r^{n-1} a_1`. The density equals `alpha1` on `[a_{2n}, a_{2n-1})`
//! and `alpha2` on `[a_{2n+1}, a_{2n})`. Its CDF touches the line `beta1 x` at
//! every odd endpoint and `beta2 x` at every even endpoint.

use serde::Serialize;

use crate::error::{Error, Result};

/// Bands are resolved down to `a_{2N+1} < BAND_FLOOR * a_1`; below that the
/// density is the uniform sliver `beta1`, which carries exactly the missing
/// mass `beta1 * a_{2N+1}`.
pub const BAND_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseGeometricDensity {
    pub alpha1: f64,
    pub alpha2: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub a1: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// `beta2 < 1`, equivalently `alpha2 < 1 + q (1-p)/(1-q) (1-alpha1)`.
    pub admissible: bool,
    #[serde(skip)]
    endpoints: Vec<f64>,
    #[serde(skip)]
    cdf_at_endpoints: Vec<f64>,
}

/// `(beta1, beta2)` for the given band parameters.
pub fn slope_envelopes(alpha1: f64, alpha2: f64, p: f64, q: f64) -> (f64, f64) {
    let denom = 1.0 - p * q;
    let beta1 = (alpha2 * p * (1.0 - q) + alpha1 * (1.0 - p)) / denom;
    let beta2 = (alpha2 * (1.0 - q) + alpha1 * q * (1.0 - p)) / denom;
    (beta1, beta2)
}

impl PiecewiseGeometricDensity {
    pub fn new(alpha1: f64, alpha2: f64, p: f64, q: f64) -> Result<Self> {
        if !(alpha1 > 0.0 && alpha1 < 1.0) {
            return Err(Error::out_of_range("alpha1", alpha1, "0 < alpha1 < 1"));
        }
        if !(alpha2 > 1.0 && alpha2.is_finite()) {
            return Err(Error::out_of_range("alpha2", alpha2, "alpha2 > 1"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::out_of_range("p", p, "0 < p < 1"));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::out_of_range("q", q, "0 < q < 1"));
        }
        let r = p * q;
        let (beta1, beta2) = slope_envelopes(alpha1, alpha2, p, q);
        let a1 = 1.0 / beta1;
        let admissible = alpha2 < 1.0 + q * (1.0 - p) / (1.0 - q) * (1.0 - alpha1);

        let periods = (BAND_FLOOR.ln() / r.ln()).ceil().max(1.0) as usize;
        // endpoints[k] = a_{k+1}, k = 0..=2N
        let mut endpoints = Vec::with_capacity(2 * periods + 1);
        let mut cdf_at_endpoints = Vec::with_capacity(2 * periods + 1);
        for n in 0..=periods {
            let odd = r.powi(n as i32) * a1;
            endpoints.push(odd);
            cdf_at_endpoints.push(beta1 * odd);
            if n < periods {
                let even = p * odd;
                endpoints.push(even);
                cdf_at_endpoints.push(beta2 * even);
            }
        }
        cdf_at_endpoints[0] = 1.0;

        Ok(PiecewiseGeometricDensity {
            alpha1,
            alpha2,
            p,
            q,
            r,
            a1,
            beta1,
            beta2,
            admissible,
            endpoints,
            cdf_at_endpoints,
        })
    }

    /// Band endpoint `a_k` for `k >= 1`.
    pub fn endpoint(&self, k: usize) -> f64 {
        assert!(k >= 1, "band endpoints are indexed from 1");
        let n = (k - 1) / 2;
        let odd = self.r.powi(n as i32) * self.a1;
        if k % 2 == 1 {
            odd
        } else {
            self.p * odd
        }
    }

    /// Smallest resolved endpoint; below it the density is the `beta1` sliver.
    pub fn floor(&self) -> f64 {
        *self.endpoints.last().expect("at least one band")
    }

    /// Number of resolved `(alpha1, alpha2)` band pairs.
    pub fn resolved_periods(&self) -> usize {
        self.endpoints.len() / 2
    }

    /// Index `k` with `endpoints[k + 1] <= x < endpoints[k]`, for `floor <= x < a1`.
    fn band_of(&self, x: f64) -> usize {
        self.endpoints.partition_point(|&e| e > x) - 1
    }

    fn level(&self, k: usize) -> f64 {
        if k % 2 == 0 {
            self.alpha1
        } else {
            self.alpha2
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            // the sliver level is the right limit at 0
            return if x == 0.0 { self.beta1 } else { 0.0 };
        }
        if x >= self.a1 {
            return 0.0;
        }
        if x < self.floor() {
            return self.beta1;
        }
        self.level(self.band_of(x))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.a1 {
            return 1.0;
        }
        let floor = self.floor();
        if x < floor {
            return (self.beta1 * x).min(self.cdf_at_endpoints[self.endpoints.len() - 1]);
        }
        let k = self.band_of(x);
        let lo = self.cdf_at_endpoints[k + 1];
        let hi = self.cdf_at_endpoints[k];
        (lo + self.level(k) * (x - self.endpoints[k + 1])).clamp(lo, hi)
    }

    /// Inverse CDF by band inversion.
    pub fn sample(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return self.a1;
        }
        let last = self.endpoints.len() - 1;
        if u < self.cdf_at_endpoints[last] {
            return (u / self.beta1).min(self.endpoints[last]);
        }
        let k = self.cdf_at_endpoints.partition_point(|&c| c > u) - 1;
        let lo = self.endpoints[k + 1];
        let hi = self.endpoints[k];
        (lo + (u - self.cdf_at_endpoints[k + 1]) / self.level(k)).clamp(lo, hi)
    }

    /// Largest density value on `[x1, x2]`.
    pub fn sup_on(&self, x1: f64, x2: f64) -> f64 {
        let x1 = x1.max(0.0);
        if x2 < x1 || x1 >= self.a1 {
            return 0.0;
        }
        let x2 = x2.min(self.a1 * (1.0 - f64::EPSILON));
        let floor = self.floor();
        let mut sup: f64 = 0.0;
        if x1 < floor {
            sup = self.beta1;
        }
        if x2 >= floor {
            let k_hi = self.band_of(x2);
            let k_lo = if x1 < floor {
                self.endpoints.len() - 2
            } else {
                self.band_of(x1)
            };
            for k in k_hi..=k_lo.min(k_hi + 1) {
                sup = sup.max(self.level(k));
            }
        }
        sup
    }

    pub fn first_moment(&self) -> f64 {
        let mut m = 0.0;
        for k in 0..self.endpoints.len() - 1 {
            let (lo, hi) = (self.endpoints[k + 1], self.endpoints[k]);
            m += self.level(k) * (hi * hi - lo * lo) / 2.0;
        }
        let floor = self.floor();
        m + self.beta1 * floor * floor / 2.0
    }

    /// `rho = (1 + p) / 2`, the fraction of each odd band kept in the good set.
    pub fn rho(&self) -> f64 {
        (1.0 + self.p) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> PiecewiseGeometricDensity {
        PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5).unwrap()
    }

    #[test]
    fn derived_constants_for_reference_parameters() {
        let d = reference();
        assert!((d.beta1 - 41.0 / 60.0).abs() < 1e-15);
        assert!((d.beta2 - 13.0 / 15.0).abs() < 1e-15);
        assert!((d.a1 - 60.0 / 41.0).abs() < 1e-15);
        assert!(d.admissible);
        assert!(d.beta1 < d.beta2);
    }

    #[test]
    fn admissibility_flag() {
        let d = PiecewiseGeometricDensity::new(0.5, 9.0 / 8.0, 0.5, 0.5).unwrap();
        assert!((d.beta2 - 11.0 / 12.0).abs() < 1e-15);
        assert!(d.admissible);
        let d = PiecewiseGeometricDensity::new(0.5, 1.5, 0.5, 0.5).unwrap();
        assert!(!d.admissible);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(PiecewiseGeometricDensity::new(1.0, 1.05, 0.5, 0.5).is_err());
        assert!(PiecewiseGeometricDensity::new(0.5, 1.0, 0.5, 0.5).is_err());
        assert!(PiecewiseGeometricDensity::new(0.5, 1.05, 0.0, 0.5).is_err());
        assert!(PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 1.0).is_err());
        assert!(PiecewiseGeometricDensity::new(f64::NAN, 1.05, 0.5, 0.5).is_err());
    }

    #[test]
    fn band_lookup_and_cdf_at_endpoints() {
        let d = reference();
        assert_eq!(d.pdf(d.a1 * 0.99), 0.5);
        assert_eq!(d.pdf(d.endpoint(2) * 0.99), 1.05);
        assert_eq!(d.pdf(d.a1), 0.0);
        assert!((d.cdf(30.0 / 41.0) - 26.0 / 41.0).abs() < 1e-15);
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(60.0 / 41.0), 1.0);
        for k in 1..30 {
            let a = d.endpoint(k);
            let slope = if k % 2 == 1 { d.beta1 } else { d.beta2 };
            assert!((d.cdf(a) - slope * a).abs() <= 1e-15 * a.max(1e-300) * 4.0, "k = {k}");
        }
    }

    #[test]
    fn inverse_cdf_examples() {
        let d = reference();
        assert_eq!(d.sample(1.0), d.a1);
        assert!((d.sample(26.0 / 41.0) - 30.0 / 41.0).abs() < 1e-15);
        for i in 1..1000 {
            let u = i as f64 / 1000.0;
            assert!((d.cdf(d.sample(u)) - u).abs() < 1e-14);
        }
    }

    #[test]
    fn first_moment_matches_geometric_series() {
        // each period scales lengths by r and squared lengths by r^2
        let d = reference();
        let a1 = d.a1;
        let per_period = d.alpha1 * (a1 * a1 - (d.p * a1).powi(2)) / 2.0
            + d.alpha2 * ((d.p * a1).powi(2) - (d.r * a1).powi(2)) / 2.0;
        let expected = per_period / (1.0 - d.r * d.r);
        assert!((d.first_moment() - expected).abs() < 1e-14);
    }

    #[test]
    fn sup_on_windows() {
        let d = reference();
        assert_eq!(d.sup_on(d.endpoint(2), d.a1 * 0.999), 0.5);
        assert_eq!(d.sup_on(0.0, 1e-3), 1.05);
        assert_eq!(d.sup_on(d.endpoint(3), d.endpoint(2) * 0.999), 1.05);
        assert_eq!(d.sup_on(2.0, 3.0), 0.0);
    }
}
