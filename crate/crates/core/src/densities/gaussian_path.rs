//! Densities built from one sampled path of fractional Brownian motion:
//! `f(x) = (1 + S_x - kappa_x)_+ ^ 1` on the grid, with
//! `kappa_x = beta sqrt(x^{2H} |log|log x||)`, and an exponential tail past the
//! last grid point carrying the remaining mass.

use serde::Serialize;

use super::tabulated::LinearTable;
use crate::error::{Error, Result};
use crate::numerics::rng::{Domain, Stream};

/// `0`, roughly half the points log-spaced on `[1e-6, 0.05)`, the rest uniform
/// on `[0.05, 1]`. Small sizes fall back to a uniform grid.
pub fn default_grid(size: usize) -> Vec<f64> {
    if size < 16 {
        let n = size.max(2);
        return (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    }
    let (lo, split) = (1e-6_f64, 0.05_f64);
    let n_log = (size - 1) / 2;
    let n_lin = size - 1 - n_log;
    let mut grid = Vec::with_capacity(size);
    grid.push(0.0);
    for k in 0..n_log {
        grid.push(lo * (split / lo).powf(k as f64 / n_log as f64));
    }
    for j in 0..n_lin {
        grid.push(split + (1.0 - split) * j as f64 / (n_lin - 1) as f64);
    }
    grid
}

/// Lower-triangular Cholesky factor of the fBm covariance on a grid.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    grid: Vec<f64>,
    hurst: f64,
    /// index of the first strictly positive grid point
    first: usize,
    /// packed rows, row `i` holds `i + 1` entries
    factor: Vec<f64>,
}

fn covariance(x: f64, y: f64, two_h: f64) -> f64 {
    0.5 * (x.powf(two_h) + y.powf(two_h) - (x - y).abs().powf(two_h))
}

impl FbmSampler {
    pub fn new(grid: &[f64], hurst: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::out_of_range("hurst", hurst, "0 < H < 1"));
        }
        if grid.len() < 2 || grid[0] < 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Density("grid must be strictly increasing in [0, inf)".into()));
        }
        let first = if grid[0] == 0.0 { 1 } else { 0 };
        let pts = &grid[first..];
        let n = pts.len();
        let two_h = 2.0 * hurst;
        let row = |i: usize| i * (i + 1) / 2;
        let mut factor = vec![0.0; row(n)];
        for i in 0..n {
            for j in 0..=i {
                let mut s = covariance(pts[i], pts[j], two_h);
                let (ri, rj) = (row(i), row(j));
                for k in 0..j {
                    s -= factor[ri + k] * factor[rj + k];
                }
                if i == j {
                    if !(s > 0.0 && s.is_finite()) {
                        let index = i + first;
                        let spacing = if index == 0 { grid[0] } else { grid[index] - grid[index - 1] };
                        return Err(Error::Factorization { index, spacing });
                    }
                    factor[ri + i] = s.sqrt();
                } else {
                    factor[ri + j] = s / factor[rj + j];
                }
            }
        }
        Ok(FbmSampler {
            grid: grid.to_vec(),
            hurst,
            first,
            factor,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// One exact draw of `S` on the grid, `S_0 = 0`.
    pub fn sample(&self, stream: &mut Stream) -> Vec<f64> {
        let n = self.grid.len() - self.first;
        let z: Vec<f64> = (0..n).map(|_| stream.gaussian()).collect();
        let mut path = vec![0.0; self.grid.len()];
        for i in 0..n {
            let r = i * (i + 1) / 2;
            path[i + self.first] = self.factor[r..=r + i].iter().zip(&z).map(|(l, z)| l * z).sum();
        }
        path
    }

    pub fn sample_seeded(&self, seed: u64) -> Vec<f64> {
        self.sample(&mut Stream::new(seed, Domain::GaussianPath, 0))
    }
}

/// `beta sqrt(x^{2H} |log|log x||)`, zero at the origin. The formula is used
/// as is elsewhere: infinite at `x = 1`, zero at `x = 1/e`.
pub fn kappa(x: f64, beta: f64, hurst: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    beta * (x.powf(2.0 * hurst) * x.ln().abs().ln().abs()).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianPathDensity {
    pub grid: Vec<f64>,
    pub path: Vec<f64>,
    pub hurst: f64,
    pub beta_lil: f64,
    pub seed: u64,
    /// Mass `m` of the tail `m exp(-(x - x_end))` past the last grid point.
    pub tail_mass: f64,
    /// Mass of the clipped path on the grid before any rescaling.
    pub grid_mass: f64,
    /// The grid part alone had mass >= 1 and was rescaled to 1 (no tail).
    pub rescaled: bool,
    #[serde(skip)]
    table: LinearTable,
}

impl GaussianPathDensity {
    pub fn from_path(grid: Vec<f64>, path: Vec<f64>, hurst: f64, beta_lil: f64, seed: u64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::out_of_range("hurst", hurst, "0 < H < 1"));
        }
        if !(beta_lil >= 0.0 && beta_lil.is_finite()) {
            return Err(Error::out_of_range("beta_lil", beta_lil, "beta >= 0"));
        }
        if grid.first().is_some_and(|&x| x < 0.0) || grid.last().is_some_and(|&x| x > 1.0) {
            return Err(Error::Density("gaussian-path grid must lie in [0, 1]".into()));
        }
        if path.iter().any(|s| !s.is_finite()) {
            return Err(Error::Density("path values must be finite".into()));
        }
        let values: Vec<f64> = grid
            .iter()
            .zip(&path)
            .map(|(&x, &s)| (1.0 + s - kappa(x, beta_lil, hurst)).clamp(0.0, 1.0))
            .collect();
        let raw = LinearTable::new(grid.clone(), values)?;
        let grid_mass = raw.total();
        let (table, tail_mass, rescaled) = if grid_mass >= 1.0 {
            (raw.scaled(1.0 / grid_mass), 0.0, true)
        } else {
            (raw, 1.0 - grid_mass, false)
        };
        Ok(GaussianPathDensity {
            grid,
            path,
            hurst,
            beta_lil,
            seed,
            tail_mass,
            grid_mass,
            rescaled,
            table,
        })
    }

    fn end(&self) -> f64 {
        self.table.hi()
    }

    /// Values of the (possibly rescaled) density at the grid points.
    pub fn grid_values(&self) -> &[f64] {
        &self.table.ys
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= self.end() {
            self.table.eval(x)
        } else {
            self.tail_mass * (-(x - self.end())).exp()
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.end() {
            self.table.integral_to(x)
        } else {
            (self.table.total() - self.tail_mass * (-(x - self.end())).exp_m1()).min(1.0)
        }
    }

    pub fn sample(&self, u: f64) -> f64 {
        let head = self.table.total();
        if u <= head || self.tail_mass == 0.0 {
            self.table.invert_integral(u.min(head))
        } else {
            self.end() - (-((u - head) / self.tail_mass).min(1.0)).ln_1p()
        }
    }

    pub fn sup_on(&self, x1: f64, x2: f64) -> f64 {
        let mut m = self.table.max_on(x1, x2);
        if x2 > self.end() {
            m = m.max(self.pdf(x1.max(self.end()) + f64::MIN_POSITIVE));
        }
        m
    }

    pub fn first_moment(&self) -> f64 {
        self.table.first_moment() + self.tail_mass * (self.end() + 1.0)
    }
}

/// Samples `S` exactly on [`default_grid`] and builds the density.
pub fn build_gaussian_path(hurst: f64, beta_lil: f64, grid_size: usize, seed: u64) -> Result<GaussianPathDensity> {
    if grid_size < 2 {
        return Err(Error::out_of_range("grid_size", grid_size as f64, "grid_size >= 2"));
    }
    let sampler = FbmSampler::new(&default_grid(grid_size), hurst)?;
    let path = sampler.sample_seeded(seed);
    GaussianPathDensity::from_path(sampler.grid, path, hurst, beta_lil, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = default_grid(257);
        assert_eq!(g.len(), 257);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 1e-6);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(default_grid(5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn kappa_special_points() {
        assert_eq!(kappa(0.0, 2.0, 0.5), 0.0);
        assert_eq!(kappa(1.0, 2.0, 0.5), f64::INFINITY);
        assert!(kappa((-1.0f64).exp(), 2.0, 0.5) < 1e-7);
    }

    #[test]
    fn brownian_factor_is_increment_structure() {
        // for H = 1/2 the Cholesky factor of min(x, y) has rows of sqrt(dx)
        let grid = [0.0, 0.25, 0.5, 1.0];
        let s = FbmSampler::new(&grid, 0.5).unwrap();
        let expected = [0.5, 0.5, 0.5, 0.5, 0.5, 0.5_f64.sqrt()];
        for (a, b) in s.factor.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_grid_reports_spacing() {
        let grid = [0.0, 0.5, 0.5 + 1e-12, 0.5 + 2e-12, 1.0];
        match FbmSampler::new(&grid, 0.99) {
            Err(Error::Factorization { index, spacing }) => {
                assert!(index == 2 || index == 3);
                assert!(spacing < 1e-11);
            }
            other => panic!("expected factorization error, got {other:?}"),
        }
    }

    #[test]
    fn mass_balance_and_inversion() {
        let d = build_gaussian_path(0.5, 2.0_f64.sqrt(), 129, 11).unwrap();
        assert_eq!(d.pdf(0.0), 1.0);
        assert!((d.cdf(1e9) - 1.0).abs() < 1e-12);
        for i in 1..100 {
            let u = i as f64 / 100.0;
            assert!((d.cdf(d.sample(u)) - u).abs() < 1e-12);
        }
        assert!(d.first_moment().is_finite());
    }
}
