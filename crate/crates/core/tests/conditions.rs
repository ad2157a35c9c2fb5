use stefan_lab::conditions::{
    check_averaging_condition, check_moment_condition, check_pointwise_condition, chi_bar, g_tilde_inverse, psi,
    sup_psi, AveragingGrids, EnvelopeFunction,
};
use stefan_lab::densities::exact::{ratio, ExactPiecewise};
use stefan_lab::densities::{PeriodicOscillatoryDensity, PiecewiseGeometricDensity, Profile, TabulatedDensity};
use stefan_lab::Density;

fn sine() -> Density {
    Density::Periodic(PeriodicOscillatoryDensity::new(1.0, Profile::Sine).unwrap())
}

fn piecewise() -> Density {
    Density::Piecewise(PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5).unwrap())
}

/// `psi(lambda, 0)` for the sine density with `lambda <= a`, as a midpoint
/// sum in `u = 1/y` over `[1/lambda, U]` with `10^6` panels, plus the tails
/// `1/(2U)` and `cos(U)/(2U^2)` beyond `U`.
fn sine_psi_riemann(lambda: f64) -> f64 {
    let (lo, hi) = (1.0 / lambda, 1e4);
    let panels = 1_000_000;
    let h = (hi - lo) / panels as f64;
    let oscillating: f64 = (0..panels)
        .map(|i| {
            let u = lo + (i as f64 + 0.5) * h;
            u.sin() / (u * u)
        })
        .sum::<f64>()
        * h;
    let integral = 0.5 / lo + 0.5 * (oscillating + hi.cos() / (hi * hi));
    integral / lambda
}

#[test]
fn sine_window_matches_riemann_oracle() {
    let d = sine();
    let value = psi(&d, 0.01, 0.0);
    let oracle = sine_psi_riemann(0.01);
    assert!(value < 0.75);
    assert!((value - oracle).abs() < 1e-6, "{value} vs {oracle}");
}

#[test]
fn sine_window_sups_below_three_quarters() {
    let d = sine();
    for lambda in [1e-2, 1e-3, 1e-4] {
        let (value, mu) = sup_psi(&d, lambda);
        assert!(value < 0.75, "lambda = {lambda}: {value}");
        assert!((0.0..=1.0).contains(&mu));
        assert!(value >= psi(&d, lambda, mu) - 1e-15);
    }
}

#[test]
fn uniform_windows() {
    let d = Density::Tabulated(TabulatedDensity::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap());
    assert!((psi(&d, 0.3, 0.5) - 1.0).abs() < 1e-15);
    for lambda in [0.1, 0.25, 0.5] {
        assert!((sup_psi(&d, lambda).0 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn piecewise_window_reaches_alpha2() {
    let d = piecewise();
    let pw = d.as_piecewise().unwrap();
    let e = ExactPiecewise::new(ratio(1, 2), ratio(21, 20), ratio(1, 2), ratio(1, 2));
    for n in 1..=10 {
        let lambda = pw.endpoint(2 * n + 1);
        assert!((psi(&d, lambda, 1.0) - 1.05).abs() < 1e-12);
        assert!(sup_psi(&d, lambda).0 >= 1.05 - 1e-12);
        assert_eq!(e.psi(&e.endpoint(2 * n + 1), &ratio(1, 1)), ratio(21, 20));
    }
}

#[test]
fn averaging_condition_on_reference_densities() {
    let grids = AveragingGrids::default();
    let r = check_averaging_condition(&piecewise(), 1e-2, &grids);
    assert!(!r.averaging_holds);
    assert!(r.max_sup_psi() > 1.04);
    assert!(!r.pointwise_holds);

    let r = check_averaging_condition(&sine(), 1e-2, &grids);
    assert!(r.averaging_holds);
    assert!(r.g_envelope.min_value() >= 0.25);
    assert!(r.moment_holds);
    assert!(r.g_envelope.g_values.windows(2).all(|w| w[0] <= w[1]));
    // every grid node below lambda0 sits under 1 - g
    for (i, &lambda) in r.lambda_grid.iter().enumerate() {
        if lambda >= r.lambda0 {
            continue;
        }
        for (j, &mu) in r.mu_grid.iter().enumerate() {
            assert!(r.psi_values[i][j] <= 1.0 - r.g_envelope.eval(lambda * (mu + 1.0)) + 1e-12);
        }
    }

    let ramp = Density::Tabulated(
        TabulatedDensity::new(vec![0.0, std::f64::consts::SQRT_2], vec![0.0, std::f64::consts::SQRT_2]).unwrap(),
    );
    let r = check_averaging_condition(&ramp, 0.5, &grids);
    assert!(r.averaging_holds);
    assert!(r.pointwise_holds);
}

#[test]
fn pointwise_and_moment_checks() {
    let r = check_pointwise_condition(&sine(), 0.5, 40);
    assert!(!r.holds);
    let half = Density::Tabulated(TabulatedDensity::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap());
    let r = check_pointwise_condition(&half, 0.5, 40);
    assert!(r.holds);
    assert!(r.witness_h.iter().all(|&h| (h - 0.5).abs() < 1e-12));
    let (holds, m) = check_moment_condition(&half);
    assert!(holds);
    assert!((m - 1.0).abs() < 1e-12);
}

#[test]
fn envelope_inverse_and_chi_bar() {
    let g = EnvelopeFunction::new(vec![0.0, 0.5, 1.0, 2.0], vec![0.1, 0.2, 0.4, 0.5]).unwrap();
    for s in [0.1, 0.7, 1.5, 1.9] {
        let y = g.g_tilde(s);
        assert!((g_tilde_inverse(&g, y).unwrap() - s).abs() < 1e-12, "s = {s}");
    }
    let mut last = 0.0;
    for i in 1..50 {
        let t = i as f64 * 0.02;
        let c = chi_bar(&g, t).unwrap();
        assert!(c >= last);
        last = c;
    }
    assert!(g_tilde_inverse(&g, 1e9).is_err());
    assert!(EnvelopeFunction::new(vec![0.0, 1.0], vec![0.3, 0.2]).is_err());
}
