//! Oscillatory density `f(x) = (1 + Psi(x^-alpha)) / 2` on `(0, a]` built from
//! a periodic profile `Psi` with values in `[-1, 1]`.
//!
//! Integrals over `(0, x]` with `x <= 1` are computed in the variable
//! `u = x^-alpha`, where they become `int_u^inf Psi(v) v^-s dv` with
//! `s = 1 + 1/alpha`. That integral is tabulated period by period and closed
//! off with an integration-by-parts series in the periodic antiderivatives
//! of `Psi`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::invert_monotone;
use crate::error::{Error, Result};
use crate::numerics::adaptive_simpson;

const PERIOD_TOL: f64 = 1e-15;
const PARTIAL_TOL: f64 = 1e-13;
const SERIES_REMAINDER: f64 = 1e-16;
const MAX_TABULATED_PERIODS: usize = 4_000_000;

/// Periodic profile `Psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Sine,
    Constant(f64),
    /// Piecewise-linear profile through `values` at equally spaced points of
    /// one period (the last value wraps to the first).
    Tabulated { period: f64, values: Vec<f64> },
}

/// Piecewise polynomial on equal segments of one period, in local coordinates.
#[derive(Debug, Clone)]
struct PiecewisePoly {
    width: f64,
    period: f64,
    segments: Vec<Vec<f64>>,
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci)
}

impl PiecewisePoly {
    fn eval(&self, u: f64) -> f64 {
        let v = u.rem_euclid(self.period);
        let i = ((v / self.width) as usize).min(self.segments.len() - 1);
        horner(&self.segments[i], v - i as f64 * self.width)
    }

    /// Antiderivative shifted to zero mean over the period.
    fn integrate_zero_mean(&self) -> PiecewisePoly {
        let mut start = 0.0;
        let mut segments = Vec::with_capacity(self.segments.len());
        let mut total = 0.0;
        for seg in &self.segments {
            let mut next = Vec::with_capacity(seg.len() + 1);
            next.push(start);
            for (i, c) in seg.iter().enumerate() {
                next.push(c / (i + 1) as f64);
            }
            start = horner(&next, self.width);
            // integral of the new segment over its width
            let integral: f64 = next
                .iter()
                .enumerate()
                .map(|(i, c)| c * self.width.powi(i as i32 + 1) / (i + 1) as f64)
                .sum();
            total += integral;
            segments.push(next);
        }
        let mean = total / self.period;
        for seg in &mut segments {
            seg[0] -= mean;
        }
        PiecewisePoly {
            width: self.width,
            period: self.period,
            segments,
        }
    }

    fn abs_bound(&self) -> f64 {
        let mut m: f64 = 0.0;
        for seg in &self.segments {
            for k in 0..=32 {
                m = m.max(horner(seg, self.width * k as f64 / 32.0).abs());
            }
        }
        // polynomial pieces of low degree: sampled max plus a margin
        1.25 * m + 1e-300
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Sine,
    Constant(f64),
    Tabulated {
        period: f64,
        values: Vec<f64>,
        mean: f64,
        antiderivatives: Vec<PiecewisePoly>,
        bounds: Vec<f64>,
    },
}

const SINE_TERMS: usize = 8;
const TABULATED_TERMS: usize = 4;

impl Kernel {
    fn new(profile: &Profile) -> Result<Kernel> {
        match profile {
            Profile::Sine => Ok(Kernel::Sine),
            Profile::Constant(c) => {
                if !(c.abs() <= 1.0) {
                    return Err(Error::out_of_range("psi", *c, "|Psi| <= 1"));
                }
                Ok(Kernel::Constant(*c))
            }
            Profile::Tabulated { period, values } => {
                if !(*period > 0.0 && period.is_finite()) {
                    return Err(Error::out_of_range("period", *period, "period > 0"));
                }
                if values.len() < 2 {
                    return Err(Error::Density("tabulated profile needs at least two values".into()));
                }
                if let Some(v) = values.iter().find(|v| !(v.abs() <= 1.0)) {
                    return Err(Error::out_of_range("psi", *v, "|Psi| <= 1"));
                }
                let n = values.len();
                let width = period / n as f64;
                let mean = values.iter().sum::<f64>() / n as f64;
                let segments = (0..n)
                    .map(|i| {
                        let v0 = values[i];
                        let v1 = values[(i + 1) % n];
                        vec![v0 - mean, (v1 - v0) / width]
                    })
                    .collect();
                let mut current = PiecewisePoly {
                    width,
                    period: *period,
                    segments,
                };
                let mut antiderivatives = Vec::with_capacity(TABULATED_TERMS);
                let mut bounds = Vec::with_capacity(TABULATED_TERMS);
                for _ in 0..TABULATED_TERMS {
                    current = current.integrate_zero_mean();
                    bounds.push(current.abs_bound());
                    antiderivatives.push(current.clone());
                }
                Ok(Kernel::Tabulated {
                    period: *period,
                    values: values.clone(),
                    mean,
                    antiderivatives,
                    bounds,
                })
            }
        }
    }

    fn period(&self) -> f64 {
        match self {
            Kernel::Sine => 2.0 * PI,
            Kernel::Constant(_) => 1.0,
            Kernel::Tabulated { period, .. } => *period,
        }
    }

    fn mean(&self) -> f64 {
        match self {
            Kernel::Sine => 0.0,
            Kernel::Constant(c) => *c,
            Kernel::Tabulated { mean, .. } => *mean,
        }
    }

    fn value(&self, u: f64) -> f64 {
        match self {
            Kernel::Sine => u.sin(),
            Kernel::Constant(c) => *c,
            Kernel::Tabulated { period, values, .. } => {
                let n = values.len();
                let width = period / n as f64;
                let v = u.rem_euclid(*period);
                let i = ((v / width) as usize).min(n - 1);
                let t = (v - i as f64 * width) / width;
                values[i] + t * (values[(i + 1) % n] - values[i])
            }
        }
    }

    fn max_value(&self) -> f64 {
        match self {
            Kernel::Sine => 1.0,
            Kernel::Constant(c) => *c,
            Kernel::Tabulated { values, .. } => values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Maximum of `Psi` on `[u1, u2]`.
    fn max_on(&self, u1: f64, u2: f64) -> f64 {
        if u2 - u1 >= self.period() {
            return self.max_value();
        }
        match self {
            Kernel::Sine => {
                // is some pi/2 + 2 pi k inside?
                let k = ((u1 - PI / 2.0) / (2.0 * PI)).ceil();
                let peak = PI / 2.0 + 2.0 * PI * k;
                if peak <= u2 {
                    1.0
                } else {
                    u1.sin().max(u2.sin())
                }
            }
            Kernel::Constant(c) => *c,
            Kernel::Tabulated { period, values, .. } => {
                let n = values.len();
                let width = period / n as f64;
                let mut m = self.value(u1).max(self.value(u2));
                let mut node = (u1 / width).ceil() * width;
                while node <= u2 {
                    m = m.max(self.value(node));
                    node += width;
                }
                m
            }
        }
    }

    fn terms(&self) -> usize {
        match self {
            Kernel::Sine => SINE_TERMS,
            Kernel::Constant(_) => 0,
            Kernel::Tabulated { .. } => TABULATED_TERMS,
        }
    }

    /// `j`-th zero-mean periodic antiderivative of `Psi - mean`, `j >= 1`.
    fn antiderivative(&self, j: usize, u: f64) -> f64 {
        match self {
            Kernel::Sine => match j % 4 {
                1 => -u.cos(),
                2 => -u.sin(),
                3 => u.cos(),
                _ => u.sin(),
            },
            Kernel::Constant(_) => 0.0,
            Kernel::Tabulated { antiderivatives, .. } => antiderivatives[j - 1].eval(u),
        }
    }

    fn antiderivative_bound(&self, j: usize) -> f64 {
        match self {
            Kernel::Sine => 1.0,
            Kernel::Constant(_) => 0.0,
            Kernel::Tabulated { bounds, .. } => bounds[j - 1],
        }
    }
}

/// `u -> int_u^inf Psi(v) v^-s dv` for `u > 0` and `s > 1`.
#[derive(Debug, Clone)]
struct OscillatoryTail {
    kernel: Kernel,
    s: f64,
    period: f64,
    cutoff_periods: usize,
    /// `cumulative[k] = int_{kP}^inf`, for `1 <= k <= cutoff_periods`.
    cumulative: Vec<f64>,
}

impl OscillatoryTail {
    fn new(kernel: Kernel, s: f64) -> Result<Self> {
        let period = kernel.period();
        let terms = kernel.terms();
        let cutoff_periods = if terms == 0 {
            1
        } else {
            // remainder after J integrations by parts:
            // c_{J+1} max|H_J| U^{-(s+J-1)} / (s+J-1)
            let mut c = 1.0;
            for i in 0..terms {
                c *= s + i as f64;
            }
            let bound = c * kernel.antiderivative_bound(terms) / (s + terms as f64 - 1.0);
            let u = (bound / SERIES_REMAINDER).powf(1.0 / (s + terms as f64 - 1.0));
            let k = (u / period).ceil().max(2.0);
            if k > MAX_TABULATED_PERIODS as f64 {
                return Err(Error::Density(format!(
                    "oscillatory tail needs {k:e} tabulated periods"
                )));
            }
            k as usize
        };
        let mut tail = OscillatoryTail {
            kernel,
            s,
            period,
            cutoff_periods,
            cumulative: vec![0.0; cutoff_periods + 1],
        };
        tail.cumulative[cutoff_periods] = tail.series(cutoff_periods as f64 * period);
        for k in (1..cutoff_periods).rev() {
            let piece = adaptive_simpson(
                |v| tail.integrand(v),
                k as f64 * period,
                (k + 1) as f64 * period,
                PERIOD_TOL,
            );
            tail.cumulative[k] = tail.cumulative[k + 1] + piece.value;
        }
        Ok(tail)
    }

    #[inline]
    fn integrand(&self, v: f64) -> f64 {
        self.kernel.value(v) * v.powf(-self.s)
    }

    /// Integration-by-parts expansion of the tail at large `u`.
    fn series(&self, u: f64) -> f64 {
        let s = self.s;
        let mut value = self.kernel.mean() * u.powf(1.0 - s) / (s - 1.0);
        let mut coeff = 1.0;
        for j in 1..=self.kernel.terms() {
            value -= coeff * self.kernel.antiderivative(j, u) * u.powf(-(s + j as f64 - 1.0));
            coeff *= s + j as f64 - 1.0;
        }
        value
    }

    fn upper(&self, u: f64) -> f64 {
        if u.is_infinite() {
            return 0.0;
        }
        let cutoff = self.cutoff_periods as f64 * self.period;
        if u >= cutoff {
            return self.series(u);
        }
        let k = ((u / self.period).floor() as usize).clamp(0, self.cutoff_periods - 1);
        let next = (k + 1).min(self.cutoff_periods);
        let boundary = next as f64 * self.period;
        adaptive_simpson(|v| self.integrand(v), u, boundary, PARTIAL_TOL).value + self.cumulative[next]
    }
}

#[derive(Debug)]
struct PeriodicCore {
    kernel: Kernel,
    alpha: f64,
    tail: OscillatoryTail,
    /// unnormalized CDF at x = 1
    at_unit: f64,
}

impl PeriodicCore {
    fn new(alpha: f64, profile: &Profile) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::out_of_range("alpha", alpha, "alpha > 0"));
        }
        let kernel = Kernel::new(profile)?;
        let tail = OscillatoryTail::new(kernel.clone(), 1.0 + 1.0 / alpha)?;
        let at_unit = 0.5 + tail.upper(1.0) / (2.0 * alpha);
        Ok(PeriodicCore {
            kernel,
            alpha,
            tail,
            at_unit,
        })
    }

    fn raw_pdf(&self, x: f64) -> f64 {
        0.5 * (1.0 + self.kernel.value(x.powf(-self.alpha)))
    }

    /// `int_0^x (1 + Psi(y^-alpha)) / 2 dy`, without truncation at `a`.
    fn raw_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x <= 1.0 {
            0.5 * x + self.tail.upper(x.powf(-self.alpha)) / (2.0 * self.alpha)
        } else {
            self.at_unit + adaptive_simpson(|y| self.raw_pdf(y), 1.0, x, PARTIAL_TOL).value
        }
    }
}

/// Solves `int_0^a f = 1` for the support endpoint `a` (the smallest root).
pub fn normalize_periodic(alpha: f64, psi: &Profile) -> Result<f64> {
    let core = PeriodicCore::new(alpha, psi)?;
    normalize_core(&core)
}

fn normalize_core(core: &PeriodicCore) -> Result<f64> {
    const CAP: f64 = 1e12;
    let mut hi = 1.0;
    while core.raw_cdf(hi) < 1.0 {
        hi *= 2.0;
        if hi > CAP {
            return Err(Error::Normalization { cap: CAP });
        }
    }
    Ok(crate::numerics::bisect_increasing(
        |x| core.raw_cdf(x),
        1.0,
        0.0,
        hi,
        1e-15 * hi,
    ))
}

const INVERSION_TABLE: usize = 2048;

#[derive(Debug, Clone)]
pub struct PeriodicOscillatoryDensity {
    pub alpha: f64,
    pub psi: Profile,
    pub a: f64,
    core: Arc<PeriodicCore>,
    table_x: Arc<Vec<f64>>,
    table_f: Arc<Vec<f64>>,
}

impl PeriodicOscillatoryDensity {
    pub fn new(alpha: f64, psi: Profile) -> Result<Self> {
        let core = PeriodicCore::new(alpha, &psi)?;
        let a = normalize_core(&core)?;
        // log-spaced bracketing table for inversion
        let lo = 1e-12 * a;
        let table_x: Vec<f64> = (0..INVERSION_TABLE)
            .map(|i| {
                if i + 1 == INVERSION_TABLE {
                    a
                } else {
                    lo * (a / lo).powf(i as f64 / (INVERSION_TABLE - 1) as f64)
                }
            })
            .collect();
        let mut table_f: Vec<f64> = table_x.iter().map(|&x| core.raw_cdf(x).min(1.0)).collect();
        *table_f.last_mut().unwrap() = 1.0;
        for i in 1..table_f.len() {
            table_f[i] = table_f[i].max(table_f[i - 1]);
        }
        Ok(PeriodicOscillatoryDensity {
            alpha,
            psi,
            a,
            core: Arc::new(core),
            table_x: Arc::new(table_x),
            table_f: Arc::new(table_f),
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.a {
            0.0
        } else if x == 0.0 {
            0.5 * (1.0 + self.core.kernel.mean())
        } else {
            self.core.raw_pdf(x)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x >= self.a {
            1.0
        } else {
            self.core.raw_cdf(x).clamp(0.0, 1.0)
        }
    }

    pub fn sample(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return self.a;
        }
        let i = self.table_f.partition_point(|&f| f < u);
        let (lo, hi) = if i == 0 {
            (0.0, self.table_x[0])
        } else {
            (self.table_x[i - 1], self.table_x[i])
        };
        invert_monotone(|x| self.cdf(x), |x| self.pdf(x), u, lo, hi)
    }

    pub fn sup_on(&self, x1: f64, x2: f64) -> f64 {
        let x1 = x1.max(0.0);
        let x2 = x2.min(self.a);
        if x2 < x1 || x2 <= 0.0 {
            return 0.0;
        }
        let u1 = x2.powf(-self.alpha);
        let u2 = if x1 == 0.0 { f64::INFINITY } else { x1.powf(-self.alpha) };
        0.5 * (1.0 + self.core.kernel.max_on(u1, u2))
    }

    pub fn sup(&self) -> f64 {
        self.sup_on(0.0, self.a)
    }

    /// `int_0^a x f(x) dx`, through the same substitution with exponent
    /// `1 + 2/alpha`.
    pub fn first_moment(&self) -> Result<f64> {
        let alpha = self.alpha;
        let tail = OscillatoryTail::new(self.core.kernel.clone(), 1.0 + 2.0 / alpha)?;
        let kernel = &self.core.kernel;
        let oscillating = if self.a <= 1.0 {
            tail.upper(self.a.powf(-alpha)) / alpha
        } else {
            tail.upper(1.0) / alpha
                + adaptive_simpson(|x| x * kernel.value(x.powf(-alpha)), 1.0, self.a, PARTIAL_TOL).value
        };
        Ok(0.25 * self.a * self.a + 0.5 * oscillating)
    }
}
