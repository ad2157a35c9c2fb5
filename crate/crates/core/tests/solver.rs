use stefan_lab::densities::{PiecewiseGeometricDensity, TabulatedDensity};
use stefan_lab::numerics::rng::{Domain, Stream};
use stefan_lab::solver::{
    compute_Y_samples, physical_jump_bruteforce, physical_jump_scan, picard_minimal, simulate_particles, FrontierPath,
    PicardConfig, SolverConfig,
};
use stefan_lab::Density;

fn uniform(width: f64) -> Density {
    Density::Tabulated(TabulatedDensity::new(vec![0.0, width], vec![1.0 / width, 1.0 / width]).unwrap())
}

fn reference() -> Density {
    Density::Piecewise(PiecewiseGeometricDensity::new(0.5, 1.05, 0.5, 0.5).unwrap())
}

fn small_config(seed: u64) -> SolverConfig {
    SolverConfig {
        n_particles: 4000,
        dt: 0.005,
        horizon: 0.25,
        seed,
        bridge_correction: true,
        picard: PicardConfig {
            n_paths: 4000,
            max_iters: 50,
            tol: 1e-3,
        },
        jump_threshold: None,
    }
}

#[test]
fn scan_matches_bruteforce_on_random_ensembles() {
    let mut s = Stream::new(2024, Domain::Particles, 0);
    for _ in 0..1000 {
        let n = 2 + (s.uniform() * 63.0) as usize;
        let values: Vec<f64> = (0..n).map(|_| -0.2 + 1.4 * s.uniform()).collect();
        let scan = physical_jump_scan(&values, n);
        let brute = physical_jump_bruteforce(&values, n, 1e-6);
        assert_eq!(scan, brute, "{values:?}");
        assert_eq!((scan * n as f64).round() / n as f64, scan);
    }
}

#[test]
fn initial_full_cascade() {
    let mut cfg = small_config(1);
    cfg.jump_threshold = Some(0.5);
    let (f, e) = simulate_particles(&uniform(0.5), &cfg).unwrap();
    assert_eq!(f.lambda[0], 1.0);
    assert_eq!(e.alive_count(), 0);
    assert_eq!(f.jumps.len(), 1);
    let (f, _) = simulate_particles(&uniform(2.0), &cfg).unwrap();
    assert_eq!(f.lambda[0], 0.0);
}

#[test]
fn particles_are_reproducible_across_pools() {
    let d = reference();
    let cfg = small_config(5);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_particles(&d, &cfg).unwrap().0)
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.lambda, b.lambda);
    assert!(a.is_monotone());
    let (c, _) = simulate_particles(&d, &small_config(6)).unwrap();
    assert_ne!(a.lambda, c.lambda);
}

#[test]
fn frontier_csv_round_trip() {
    let (f, _) = simulate_particles(&reference(), &small_config(2)).unwrap();
    let mut bytes = Vec::new();
    f.write_csv(&mut bytes).unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert!(text.starts_with("t,lambda,alive_fraction\n"));
    let g = FrontierPath::read_csv(bytes.as_slice(), f.samples, f.jump_threshold).unwrap();
    assert_eq!(f, g);
    assert!(FrontierPath::read_csv("t,lambda\n0,0\n".as_bytes(), 1, 1.0).is_err());
    assert!(FrontierPath::read_csv("t,lambda,alive_fraction\n0,x,1\n".as_bytes(), 1, 1.0).is_err());
}

#[test]
fn picard_is_monotone_and_close_to_particles() {
    let d = reference();
    let cfg = small_config(3);
    let r = picard_minimal(&d, &cfg).unwrap();
    assert!(r.converged);
    assert_eq!(r.monotonicity_violations, 0);
    assert!(r.frontier.is_monotone());
    let (p, _) = simulate_particles(&d, &cfg).unwrap();
    assert!(p.sup_distance(&r.frontier) < 0.05);
}

#[test]
fn minimal_frontier_is_a_fixed_point() {
    let d = reference();
    let r = picard_minimal(&d, &small_config(8)).unwrap();
    // independent paths: Lambda_t = E[F(Y_t)] up to Monte Carlo error
    let y = compute_Y_samples(&r.frontier, 20_000, 77);
    for k in [5, 20, 50] {
        let m = y.values[k].len() as f64;
        let ef = y.values[k].iter().map(|&v| d.cdf(v)).sum::<f64>() / m;
        assert!((ef - r.frontier.lambda[k]).abs() < 0.02, "k = {k}: {ef} vs {}", r.frontier.lambda[k]);
    }
}

#[test]
fn configuration_validation() {
    let mut cfg = small_config(0);
    cfg.dt = 0.003;
    assert!(cfg.validate().is_err());
    cfg.dt = 0.0;
    assert!(cfg.validate().is_err());
    let cfg: SolverConfig = serde_json::from_str(r#"{"T": 0.5, "dt": 0.01}"#).unwrap();
    assert_eq!(cfg.horizon, 0.5);
    assert!(serde_json::from_str::<SolverConfig>(r#"{"n_particle": 5}"#).is_err());
}
