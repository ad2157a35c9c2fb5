use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn stefan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stefan"))
        .args(args)
        .env_remove("STEFAN_THREADS")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("run.json");
    let text = format!(
        r#"{{ "density": {{ "family": "piecewise", "alpha1": 0.5, "alpha2": 1.05, "p": 0.5, "q": 0.5 }},
             "solver": {{ "n_particles": 3000, "dt": 0.005, "T": 0.25, "bridge_correction": true,
                          "picard": {{ "n_paths": 3000 }} }},
             "bounds": {{ "y_paths": 2000, "u_paths": 2000 }} }}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn jump_on_positions_file() {
    let dir = tempfile::tempdir().unwrap();
    let pos = dir.path().join("pos.csv");
    std::fs::write(&pos, "-0.05\n0.3\n0.6\n0.9\n").unwrap();
    let o = stefan(&["jump", "--positions", pos.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0.25");

    std::fs::write(&pos, "x\n0.1\nfoo\n").unwrap();
    let o = stefan(&["jump", "--positions", pos.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pos.csv"));
}

#[test]
fn check_sine_density() {
    let o = stefan(&["check", "--density", &data("periodic_sine.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["averaging_holds"], true);
    assert_eq!(v["pointwise_holds"], false);
    assert_eq!(v["moment_holds"], true);

    let o = stefan(&["check", "--density", &data("piecewise_21_20.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_configuration_errors() {
    let o = stefan(&["simulate", "--config", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.json"));
    assert_eq!(stderr(&o).trim().lines().count(), 1);

    let o = stefan(&["simulate", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--bogus"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"solver": {"n_particles": 100, "dtt": 0.1}}"#).unwrap();
    let o = stefan(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dtt") && stderr(&o).contains("bad.json"), "{}", stderr(&o));

    std::fs::write(&bad, r#"{"density": {"family": "piecewise", "alpha1": 0.5}}"#).unwrap();
    let o = stefan(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha2"), "{}", stderr(&o));

    let o = stefan(&["simulate", "--density", &data("piecewise_21_20.json"), "--dt", "0.003"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("f.csv");
    let o = stefan(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,lambda,alive_fraction"));
    assert_eq!(text.lines().count(), 52);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["effective_config"]["solver"]["seed"], 4);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    for f in manifest["outputs"].as_array().unwrap() {
        assert!(Path::new(f.as_str().unwrap()).exists());
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let o = stefan(&["--threads", threads, "picard", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("4", "b.csv"));
}

#[test]
fn bounds_from_file_equals_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    let frontier = dir.path().join("f.csv");
    let o = stefan(&["simulate", "--config", cfg, "--seed", "3", "--out", frontier.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let table = dir.path().join("m.csv");
    let o1 = stefan(&[
        "bounds", "--config", cfg, "--seed", "3", "--frontier", frontier.to_str().unwrap(), "--out", a.to_str().unwrap(),
        "--emit-csv", table.to_str().unwrap(),
    ]);
    let o2 = stefan(&["--threads", "2", "bounds", "--config", cfg, "--seed", "3", "--out", b.to_str().unwrap()]);
    assert!(matches!(o1.status.code(), Some(0 | 2)), "{}", stderr(&o1));
    assert_eq!(o1.status.code(), o2.status.code());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(std::fs::read_to_string(&table).unwrap().starts_with("t,lambda,se,"));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert!((report["L"].as_f64().unwrap() - 0.94).abs() < 1e-12);
    let findings = report["findings"].as_array().unwrap();
    assert_eq!(o1.status.code() == Some(2), !findings.is_empty());
}

#[test]
fn sweep_writes_cells_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("sweep");
    let o = stefan(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--grid", "seed=1,2", "--grid",
        "n_particles=500,1000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let index: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("index.json")).unwrap()).unwrap();
    let cells = index.as_array().unwrap();
    assert_eq!(cells.len(), 4);
    for c in cells {
        assert!(out.join(c["file"].as_str().unwrap()).exists());
    }
    assert!(out.join("manifest.json").exists());

    let o = stefan(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--grid", "colour=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colour"));
}
