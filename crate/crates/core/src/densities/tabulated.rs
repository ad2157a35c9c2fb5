//! Densities given by values on a grid, linearly interpolated.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Piecewise-linear nonnegative function with exact running integrals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearTable {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl LinearTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Density(format!(
                "grid has {} points but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::Density("table needs at least two points".into()));
        }
        if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Density("grid must be finite and strictly increasing".into()));
        }
        if let Some(y) = ys.iter().find(|y| !(y.is_finite() && **y >= 0.0)) {
            return Err(Error::Density(format!("negative or non-finite value {y}")));
        }
        let mut cumulative = Vec::with_capacity(xs.len());
        cumulative.push(0.0);
        for i in 1..xs.len() {
            let piece = 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
            cumulative.push(cumulative[i - 1] + piece);
        }
        Ok(LinearTable { xs, ys, cumulative })
    }

    pub fn scaled(&self, factor: f64) -> LinearTable {
        LinearTable {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|y| y * factor).collect(),
            cumulative: self.cumulative.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Index `i` with `xs[i] <= x < xs[i+1]`, for `x` inside the grid.
    fn segment(&self, x: f64) -> usize {
        (self.xs.partition_point(|&g| g <= x).max(1) - 1).min(self.xs.len() - 2)
    }

    /// Interpolated value; zero outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo() || x > self.hi() {
            return 0.0;
        }
        let i = self.segment(x);
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    /// `int_{lo}^{x}` of the interpolant.
    pub fn integral_to(&self, x: f64) -> f64 {
        if x <= self.lo() {
            return 0.0;
        }
        if x >= self.hi() {
            return self.total();
        }
        let i = self.segment(x);
        let h = x - self.xs[i];
        let y = self.eval(x);
        self.cumulative[i] + 0.5 * h * (self.ys[i] + y)
    }

    /// Smallest `x` with `integral_to(x) = target`, solving the quadratic on
    /// the containing segment.
    pub fn invert_integral(&self, target: f64) -> f64 {
        if target <= 0.0 {
            return self.lo();
        }
        if target >= self.total() {
            // last point where mass is still accumulating
            let last = self.cumulative.partition_point(|&c| c < self.total());
            return self.xs[last.min(self.xs.len() - 1)];
        }
        let i = self.cumulative.partition_point(|&c| c < target).max(1) - 1;
        let width = self.xs[i + 1] - self.xs[i];
        let y0 = self.ys[i];
        let slope = (self.ys[i + 1] - y0) / width;
        let rest = target - self.cumulative[i];
        let disc = (y0 * y0 + 2.0 * slope * rest).max(0.0);
        let denom = y0 + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * rest / denom } else { 0.0 };
        self.xs[i] + t.clamp(0.0, width)
    }

    /// Maximum of the interpolant on `[x1, x2]`.
    pub fn max_on(&self, x1: f64, x2: f64) -> f64 {
        let x1 = x1.max(self.lo());
        let x2 = x2.min(self.hi());
        if x2 < x1 {
            return 0.0;
        }
        let mut m = self.eval(x1).max(self.eval(x2));
        let start = self.xs.partition_point(|&g| g <= x1);
        for i in start..self.xs.len() {
            if self.xs[i] >= x2 {
                break;
            }
            m = m.max(self.ys[i]);
        }
        m
    }

    /// `int x * y(x) dx` over the grid, exact for the interpolant.
    pub fn first_moment(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (x[1] - x[0]) / 6.0 * (x[0] * (2.0 * y[0] + y[1]) + x[1] * (y[0] + 2.0 * y[1])))
            .sum()
    }
}

/// Grid density rescaled to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedDensity {
    pub table: LinearTable,
    /// Mass of the table before rescaling.
    pub raw_mass: f64,
}

impl TabulatedDensity {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.first().is_some_and(|&x| x < 0.0) {
            return Err(Error::Density("tabulated grid must lie in [0, inf)".into()));
        }
        let raw = LinearTable::new(xs, values)?;
        let raw_mass = raw.total();
        if !(raw_mass > 0.0) {
            return Err(Error::Density("tabulated density has zero mass".into()));
        }
        Ok(TabulatedDensity {
            table: raw.scaled(1.0 / raw_mass),
            raw_mass,
        })
    }

    /// Reads a two-column `x,f` CSV file. A header row is skipped if its first
    /// field is not numeric.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| parse_err(e.to_string()))?;
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| parse_err(e.to_string()))?;
            if record.len() < 2 {
                return Err(parse_err(format!("row {} has fewer than two columns", line + 1)));
            }
            let (x, f) = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match (x, f) {
                (Ok(x), Ok(f)) => {
                    xs.push(x);
                    fs.push(f);
                }
                _ if line == 0 => continue,
                _ => return Err(parse_err(format!("row {} is not numeric", line + 1))),
            }
        }
        TabulatedDensity::new(xs, fs).map_err(|e| parse_err(e.to_string()))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.table.eval(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.table.integral_to(x).min(1.0)
    }

    pub fn sample(&self, u: f64) -> f64 {
        self.table.invert_integral(u)
    }

    pub fn sup_on(&self, x1: f64, x2: f64) -> f64 {
        self.table.max_on(x1, x2)
    }

    pub fn first_moment(&self) -> f64 {
        self.table.first_moment()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_on_zero_two() {
        let d = TabulatedDensity::new(vec![0.0, 2.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(d.raw_mass, 2.0);
        assert_eq!(d.sample(0.5), 1.0);
        assert_eq!(d.cdf(1.0), 0.5);
        assert_eq!(d.first_moment(), 1.0);
    }

    #[test]
    fn quadratic_inversion_on_a_ramp() {
        // f(x) = 2x on [0, 1]: F(x) = x^2
        let d = TabulatedDensity::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        for &u in &[0.01, 0.25, 0.5, 0.81] {
            assert!((d.sample(u) - u.sqrt()).abs() < 1e-15);
        }
        assert!((d.first_moment() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn max_on_sees_interior_nodes() {
        let t = LinearTable::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 5.0, 1.0, 0.0]).unwrap();
        assert_eq!(t.max_on(0.5, 2.5), 5.0);
        assert_eq!(t.max_on(1.5, 2.5), 3.0);
        assert_eq!(t.max_on(4.0, 5.0), 0.0);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(TabulatedDensity::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(TabulatedDensity::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(TabulatedDensity::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(TabulatedDensity::new(vec![-1.0, 1.0], vec![1.0, 1.0]).is_err());
    }
}
