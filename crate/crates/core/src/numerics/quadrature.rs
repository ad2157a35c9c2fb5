//! Adaptive Simpson quadrature and one-dimensional root/extremum search.

/// Absolute tolerance used for density integrals unless a caller asks for more.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Maximum number of interval subdivisions per quadrature call.
pub const MAX_SUBDIVISIONS: usize = 1_000_000;

/// Result of an adaptive quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    /// `false` when the subdivision cap was hit before every panel met its
    /// tolerance.
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson rule on `[a, b]` with absolute tolerance `abs_tol`.
///
/// Uses an explicit stack so deep refinement near singular points cannot
/// overflow the call stack; the number of subdivisions is capped at
/// [`MAX_SUBDIVISIONS`].
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            converged: true,
        };
    }
    if a > b {
        let mut q = adaptive_simpson(f, b, a, abs_tol);
        q.value = -q.value;
        return q;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol: abs_tol,
        depth: 0,
    }];
    let mut value = 0.0;
    let mut error_estimate = 0.0;
    let mut subdivisions = 0usize;
    let mut converged = true;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        let tiny = m <= p.a || m >= p.b;
        if delta.abs() <= 15.0 * p.tol || tiny || p.depth >= 60 || subdivisions >= MAX_SUBDIVISIONS {
            if delta.abs() > 15.0 * p.tol {
                converged = false;
            }
            value += left + right + delta / 15.0;
            error_estimate += delta.abs() / 15.0;
            continue;
        }
        subdivisions += 1;
        let tol = 0.5 * p.tol;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol,
            depth: p.depth + 1,
        });
    }
    Quadrature {
        value,
        error_estimate,
        subdivisions,
        converged,
    }
}

/// Smallest `x` in `[lo, hi]` with `g(x) >= target`, for nondecreasing `g`,
/// located by bisection to absolute width `tol`.
///
/// Assumes `g(lo) < target <= g(hi)`; returns `hi` if the bracket is empty.
pub fn bisect_increasing<G: Fn(f64) -> f64>(g: G, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Maximizes `f` on `[lo, hi]` by a seed grid of `seeds` points followed by a
/// golden-section refinement around the best seed. Returns `(argmax, max)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, seeds: usize) -> (f64, f64) {
    let seeds = seeds.max(2);
    let step = (hi - lo) / (seeds - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..seeds {
        let x = if i + 1 == seeds { hi } else { lo + step * i as f64 };
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut best_x = if best_i + 1 == seeds {
        hi
    } else {
        lo + step * best_i as f64
    };
    let mut a = (best_x - step).max(lo);
    let mut b = (best_x + step).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..100 {
        if (b - a).abs() < 1e-13 * (1.0 + best_x.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best {
            best = v;
            best_x = x;
        }
    }
    (best_x, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_and_smooth_functions() {
        let q = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((q.value - 4.0).abs() < 1e-12);
        let q = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10);
        assert!((q.value - 2.0).abs() < 1e-10);
        assert!(q.converged);
    }

    #[test]
    fn simpson_handles_reversed_and_empty_intervals() {
        let q = adaptive_simpson(|x| x, 1.0, 0.0, 1e-12);
        assert!((q.value + 0.5).abs() < 1e-14);
        assert_eq!(adaptive_simpson(|x| x, 3.0, 3.0, 1e-12).value, 0.0);
    }

    #[test]
    fn simpson_copes_with_integrable_singularity() {
        let q = adaptive_simpson(|x: f64| 1.0 / x.sqrt(), 1e-12, 1.0, 1e-8);
        assert!((q.value - (2.0 - 2.0 * 1e-6)).abs() < 1e-6);
    }

    #[test]
    fn bisection_finds_threshold_crossing() {
        let x = bisect_increasing(|x| x * x, 2.0, 0.0, 2.0, 1e-14);
        assert!((x - 2f64.sqrt()).abs() < 1e-13);
        // step function: smallest point reaching the target
        let x = bisect_increasing(|x| if x >= 0.3 { 1.0 } else { 0.0 }, 1.0, 0.0, 1.0, 1e-15);
        assert!((x - 0.3).abs() < 1e-14);
    }

    #[test]
    fn golden_section_refines_interior_and_boundary_maxima() {
        let (x, v) = golden_section_max(|x| -(x - 0.3137) * (x - 0.3137), 0.0, 1.0, 16);
        assert!((x - 0.3137).abs() < 1e-6);
        assert!(v.abs() < 1e-12);
        let (x, v) = golden_section_max(|x| x, 0.0, 1.0, 16);
        assert_eq!(x, 1.0);
        assert_eq!(v, 1.0);
    }
}
