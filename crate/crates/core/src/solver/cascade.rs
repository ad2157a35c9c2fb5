//! Discrete physical jump condition on an empirical measure.

/// Size `k*` of the cascade among `values` when the total population is `n`:
/// the least `k` with `y_(k+1) > k / n`, counting `y_(n+1) = +inf`.
pub fn cascade_size(values: &[f64], n: usize) -> usize {
    let nonpositive = values.iter().filter(|&&y| y <= 0.0).count();
    if nonpositive == 0 {
        return 0;
    }
    // only values below 1 can take part, since k / n <= 1
    let mut candidates: Vec<f64> = values.iter().cloned().filter(|&y| y <= 1.0).collect();
    candidates.sort_unstable_by(f64::total_cmp);
    scan_sorted(&candidates, n, 0.0)
}

pub(crate) fn scan_sorted(sorted: &[f64], n: usize, offset: f64) -> usize {
    let n = n as f64;
    let mut k = 0;
    while k < sorted.len() && sorted[k] <= (k as f64 + offset) / n {
        k += 1;
    }
    k
}

/// Jump size `Delta = k* / n` for the empirical measure of `values`.
pub fn physical_jump_scan(values: &[f64], n: usize) -> f64 {
    cascade_size(values, n) as f64 / n as f64
}

/// Reference implementation: walks `x = x_step, 2 x_step, ...` until
/// `#{y <= x} / n < x` and snaps the result to the grid `{k / n}`.
pub fn physical_jump_bruteforce(values: &[f64], n: usize, x_step: f64) -> f64 {
    let nf = n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut count = 0;
    let mut j = 1u64;
    loop {
        let x = j as f64 * x_step;
        while count < sorted.len() && sorted[count] <= x {
            count += 1;
        }
        if (count as f64) / nf < x {
            return (x * nf).floor().min(nf) / nf;
        }
        j += 1;
    }
}

/// Number of particles removed at time zero from a stratified sample.
///
/// Sample point `i` stands for the quantile `(i - 1/2) / n`, so the
/// empirical CDF sits at the midpoint of its jumps and the first sample
/// point where the CDF falls strictly below the identity marks the end of
/// the initial cascade: `k0 = min{k : y_(k+1) > (k + 1/2) / n}`.
pub fn initial_cascade(sorted: &[f64], n: usize) -> usize {
    scan_sorted(sorted, n, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_ensembles() {
        assert_eq!(physical_jump_scan(&[0.3, 0.5, 0.7, 0.9], 4), 0.0);
        assert_eq!(physical_jump_scan(&[-0.05, 0.3, 0.6, 0.9], 4), 0.25);
        assert_eq!(physical_jump_scan(&[-0.05, 0.1, 0.4, 0.6], 4), 1.0);
        assert_eq!(physical_jump_scan(&[-0.1, 0.2, 0.26, 0.9], 4), 0.75);
    }

    #[test]
    fn bruteforce_reference_ensembles() {
        assert_eq!(physical_jump_bruteforce(&[0.3, 0.5, 0.7, 0.9], 4, 1e-6), 0.0);
        assert_eq!(physical_jump_bruteforce(&[-0.05, 0.3, 0.6, 0.9], 4, 1e-6), 0.25);
        assert_eq!(physical_jump_bruteforce(&[-0.05, 0.1, 0.4, 0.6], 4, 1e-6), 1.0);
        assert_eq!(physical_jump_bruteforce(&[-0.1, 0.2, 0.26, 0.9], 4, 1e-6), 0.75);
    }

    #[test]
    fn previously_dead_particles_count_in_n() {
        // two of eight already gone: the two values present die one by one
        assert_eq!(cascade_size(&[-0.01, 0.1, 0.5, 0.6, 0.9, 0.95], 8), 2);
        assert_eq!(cascade_size(&[f64::NEG_INFINITY, 0.3], 8), 1);
    }

    #[test]
    fn midpoint_rule_at_time_zero() {
        let n = 10;
        let half: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64 * 0.5).collect();
        assert_eq!(initial_cascade(&half, n), n);
        let two: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64 * 2.0).collect();
        assert_eq!(initial_cascade(&two, n), 0);
    }
}
