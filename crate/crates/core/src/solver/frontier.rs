//! Frontier paths `t -> Lambda_t` on a uniform grid, and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump {
    pub t: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierPath {
    pub t_grid: Vec<f64>,
    pub lambda: Vec<f64>,
    pub alive_fraction: Vec<f64>,
    pub jumps: Vec<Jump>,
    pub jump_threshold: f64,
    /// Particles or paths behind each value, for standard errors.
    pub samples: usize,
}

impl FrontierPath {
    /// Builds a frontier and records every increment above `jump_threshold`
    /// (including `Lambda_0` itself) as a jump.
    pub fn new(t_grid: Vec<f64>, lambda: Vec<f64>, alive_fraction: Vec<f64>, samples: usize, jump_threshold: f64) -> Self {
        let mut jumps = Vec::new();
        let mut previous = 0.0;
        for (&t, &l) in t_grid.iter().zip(&lambda) {
            if l - previous > jump_threshold {
                jumps.push(Jump { t, size: l - previous });
            }
            previous = l;
        }
        FrontierPath {
            t_grid,
            lambda,
            alive_fraction,
            jumps,
            jump_threshold,
            samples,
        }
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.t_grid.last().unwrap_or(&0.0)
    }

    pub fn dt(&self) -> f64 {
        if self.t_grid.len() < 2 {
            0.0
        } else {
            self.t_grid[1] - self.t_grid[0]
        }
    }

    /// Binomial standard error `sqrt(Lambda (1 - Lambda) / samples)` at node `k`.
    pub fn standard_error(&self, k: usize) -> f64 {
        let l = self.lambda[k].clamp(0.0, 1.0);
        (l * (1.0 - l) / self.samples as f64).sqrt()
    }

    /// Value on the grid at the last node `t_k <= t` (right-continuous steps).
    pub fn at(&self, t: f64) -> f64 {
        let i = self.t_grid.partition_point(|&s| s <= t);
        if i == 0 {
            0.0
        } else {
            self.lambda[i - 1]
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.lambda.windows(2).all(|w| w[1] >= w[0]) && self.lambda.iter().all(|l| (0.0..=1.0).contains(l))
    }

    pub fn sup_distance(&self, other: &FrontierPath) -> f64 {
        self.lambda
            .iter()
            .zip(&other.lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Writes `t,lambda,alive_fraction` with shortest round-trip decimals.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "lambda", "alive_fraction"])?;
        for k in 0..self.len() {
            w.write_record([
                self.t_grid[k].to_string(),
                self.lambda[k].to_string(),
                self.alive_fraction[k].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Reads a frontier CSV. The header row is required.
    pub fn read_csv<R: Read>(reader: R, samples: usize, jump_threshold: f64) -> std::result::Result<Self, String> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = r.headers().map_err(|e| e.to_string())?.clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| format!("missing column `{name}`"))
        };
        let (ct, cl, ca) = (column("t")?, column("lambda")?, column("alive_fraction")?);
        let (mut t, mut lambda, mut alive) = (Vec::new(), Vec::new(), Vec::new());
        for (row, record) in r.records().enumerate() {
            let record = record.map_err(|e| e.to_string())?;
            let field = |c: usize, name: &str| -> std::result::Result<f64, String> {
                record
                    .get(c)
                    .ok_or_else(|| format!("row {}: missing `{name}`", row + 1))?
                    .parse::<f64>()
                    .map_err(|e| format!("row {}: `{name}`: {e}", row + 1))
            };
            t.push(field(ct, "t")?);
            lambda.push(field(cl, "lambda")?);
            alive.push(field(ca, "alive_fraction")?);
        }
        if t.is_empty() {
            return Err("frontier has no rows".into());
        }
        Ok(FrontierPath::new(t, lambda, alive, samples, jump_threshold))
    }

    pub fn load_csv(path: &Path, samples: usize, jump_threshold: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        FrontierPath::read_csv(file, samples, jump_threshold).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            message,
        })
    }
}
