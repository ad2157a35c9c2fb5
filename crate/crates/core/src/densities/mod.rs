//! Initial densities of the supercooled system: evaluation, CDFs and
//! inverse-CDF sampling.

pub mod exact;
pub mod gaussian_path;
pub mod periodic;
pub mod piecewise;
pub mod tabulated;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use gaussian_path::{build_gaussian_path, default_grid, kappa, FbmSampler, GaussianPathDensity};
pub use periodic::{normalize_periodic, PeriodicOscillatoryDensity, Profile};
pub use piecewise::{slope_envelopes, PiecewiseGeometricDensity};
pub use tabulated::{LinearTable, TabulatedDensity};

use crate::error::{Error, Result};

pub const DEFAULT_GAUSSIAN_GRID: usize = 1025;

#[derive(Debug, Clone)]
pub enum Density {
    Piecewise(PiecewiseGeometricDensity),
    Periodic(PeriodicOscillatoryDensity),
    GaussianPath(GaussianPathDensity),
    Tabulated(TabulatedDensity),
}

impl Density {
    pub fn family(&self) -> &'static str {
        match self {
            Density::Piecewise(_) => "piecewise",
            Density::Periodic(_) => "periodic",
            Density::GaussianPath(_) => "gaussian_path",
            Density::Tabulated(_) => "tabulated",
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            Density::Piecewise(d) => d.pdf(x),
            Density::Periodic(d) => d.pdf(x),
            Density::GaussianPath(d) => d.pdf(x),
            Density::Tabulated(d) => d.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            Density::Piecewise(d) => d.cdf(x),
            Density::Periodic(d) => d.cdf(x),
            Density::GaussianPath(d) => d.cdf(x),
            Density::Tabulated(d) => d.cdf(x),
        }
    }

    /// `F^{-1}(u)`, nondecreasing in `u`.
    pub fn sample(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Density::Piecewise(d) => d.sample(u),
            Density::Periodic(d) => d.sample(u),
            Density::GaussianPath(d) => d.sample(u),
            Density::Tabulated(d) => d.sample(u),
        }
    }

    /// `sup f` over `[x1, x2]`.
    pub fn sup_on(&self, x1: f64, x2: f64) -> f64 {
        match self {
            Density::Piecewise(d) => d.sup_on(x1, x2),
            Density::Periodic(d) => d.sup_on(x1, x2),
            Density::GaussianPath(d) => d.sup_on(x1, x2),
            Density::Tabulated(d) => d.sup_on(x1, x2),
        }
    }

    /// Right end of the support (infinite for the exponential tail).
    pub fn support_end(&self) -> f64 {
        match self {
            Density::Piecewise(d) => d.a1,
            Density::Periodic(d) => d.a,
            Density::GaussianPath(d) if d.tail_mass > 0.0 => f64::INFINITY,
            Density::GaussianPath(d) => *d.grid.last().unwrap(),
            Density::Tabulated(d) => d.table.hi(),
        }
    }

    pub fn first_moment(&self) -> Result<f64> {
        match self {
            Density::Piecewise(d) => Ok(d.first_moment()),
            Density::Periodic(d) => d.first_moment(),
            Density::GaussianPath(d) => Ok(d.first_moment()),
            Density::Tabulated(d) => Ok(d.first_moment()),
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseGeometricDensity> {
        match self {
            Density::Piecewise(d) => Some(d),
            _ => None,
        }
    }

    /// Builds a density from a JSON specification; relative CSV paths are
    /// resolved against `base`.
    pub fn from_spec(spec: &DensitySpec, base: &Path) -> Result<Density> {
        Ok(match spec {
            DensitySpec::Piecewise { alpha1, alpha2, p, q } => {
                Density::Piecewise(PiecewiseGeometricDensity::new(*alpha1, *alpha2, *p, *q)?)
            }
            DensitySpec::Periodic { alpha, psi } => {
                Density::Periodic(PeriodicOscillatoryDensity::new(*alpha, psi.clone())?)
            }
            DensitySpec::GaussianPath {
                hurst,
                beta_lil,
                seed,
                grid_size,
                grid,
                path,
            } => {
                let density = match (grid, path) {
                    (Some(grid), Some(path)) => {
                        GaussianPathDensity::from_path(grid.clone(), path.clone(), *hurst, *beta_lil, *seed)?
                    }
                    (Some(grid), None) => {
                        let sampler = FbmSampler::new(grid, *hurst)?;
                        let path = sampler.sample_seeded(*seed);
                        GaussianPathDensity::from_path(grid.clone(), path, *hurst, *beta_lil, *seed)?
                    }
                    (None, None) => build_gaussian_path(
                        *hurst,
                        *beta_lil,
                        grid_size.unwrap_or(DEFAULT_GAUSSIAN_GRID),
                        *seed,
                    )?,
                    (None, Some(_)) => return Err(Error::Density("`path` given without `grid`".into())),
                };
                Density::GaussianPath(density)
            }
            DensitySpec::Tabulated { grid, values, csv } => match (grid, values, csv) {
                (Some(grid), Some(values), None) => {
                    Density::Tabulated(TabulatedDensity::new(grid.clone(), values.clone())?)
                }
                (None, None, Some(csv)) => Density::Tabulated(TabulatedDensity::from_csv(&base.join(csv))?),
                _ => {
                    return Err(Error::Density(
                        "tabulated density needs either `grid` and `values` or `csv`".into(),
                    ))
                }
            },
        })
    }

    pub fn from_json_str(text: &str, base: &Path) -> Result<Density> {
        let spec: DensitySpec = serde_json::from_str(text).map_err(|e| Error::Density(e.to_string()))?;
        Density::from_spec(&spec, base)
    }

    pub fn from_json_file(path: &Path) -> Result<Density> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let spec: DensitySpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Density::from_spec(&spec, path.parent().unwrap_or(Path::new(".")))
    }
}

fn sine() -> Profile {
    Profile::Sine
}

/// JSON description of a density, tagged by `family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Piecewise {
        alpha1: f64,
        alpha2: f64,
        p: f64,
        q: f64,
    },
    Periodic {
        alpha: f64,
        #[serde(default = "sine")]
        psi: Profile,
    },
    GaussianPath {
        hurst: f64,
        beta_lil: f64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid_size: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<Vec<f64>>,
    },
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
    },
}

/// Root of `cdf(x) = u` in `[lo, hi]` by Newton steps, falling back to
/// bisection whenever a step leaves the bracket.
pub(crate) fn invert_monotone<C, P>(cdf: C, pdf: P, u: f64, mut lo: f64, mut hi: f64) -> f64
where
    C: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let residual = cdf(x) - u;
        if residual.abs() <= 1e-15 {
            return x;
        }
        if residual > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let slope = pdf(x);
        let newton = x - residual / slope;
        x = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}
