//! The `stefan` command line: density checks, both solvers, bounds and
//! parameter sweeps, with a manifest for every run that writes files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bounds::{compute_bounds, BoundsConfig};
use crate::conditions::{check_averaging_condition, AveragingGrids};
use crate::densities::{Density, DensitySpec};
use crate::error::{Error, Result};
use crate::solver::{physical_jump_scan, picard_minimal, simulate_particles, FrontierPath, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "stefan", version, about = "Supercooled Stefan problem laboratory")]
struct Cli {
    /// Worker threads (defaults to the hardware parallelism).
    #[arg(long, global = true, env = "STEFAN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Particle simulation; writes the frontier CSV.
    Simulate(RunArgs),
    /// Picard iteration towards the minimal solution; writes the frontier CSV.
    Picard(RunArgs),
    /// Pointwise, moment and averaging conditions of a density.
    Check(CheckArgs),
    /// Constants, envelopes and margins for a frontier.
    Bounds(BoundsArgs),
    /// Size of the one-shot cascade of a list of positions.
    Jump(JumpArgs),
    /// Repeats `simulate` over a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Run configuration (JSON); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Density specification (JSON), overriding the configuration's.
    #[arg(long)]
    density: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; reports go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
struct SolverArgs {
    #[arg(long)]
    n_particles: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "horizon", short = 'T')]
    horizon: Option<f64>,
    /// Brownian-bridge crossing correction.
    #[arg(long)]
    bridge: Option<bool>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Upper end of the lambda grid.
    #[arg(long)]
    lambda0: Option<f64>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Frontier CSV from `simulate`; simulated when absent.
    #[arg(long)]
    frontier: Option<PathBuf>,
    /// Writes the per-time margin table to this CSV.
    #[arg(long)]
    emit_csv: Option<PathBuf>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    y_paths: Option<usize>,
    #[arg(long)]
    t_points: Option<usize>,
}

#[derive(Debug, Args)]
struct JumpArgs {
    /// CSV of positions (any layout; non-numeric fields are skipped).
    #[arg(long)]
    positions: PathBuf,
    /// Population size; defaults to the number of positions.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// `key=v1,v2,...` with key one of n_particles, dt, T, seed, bridge_correction.
    #[arg(long = "grid", value_name = "KEY=VALUES")]
    grid: Vec<String>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Inline specification, or a path relative to the configuration file.
    pub density: Option<Value>,
    pub solver: SolverConfig,
    pub lambda0: Option<f64>,
    pub bounds: Option<BoundsOverrides>,
    /// Parameter grid for `sweep`: key to list of values.
    pub sweep: BTreeMap<String, Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsOverrides {
    pub t_points: Option<usize>,
    pub y_paths: Option<usize>,
    pub u_paths: Option<usize>,
    pub h_points: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: &'static str,
    pub effective_config: Value,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    fn new(command: &str, effective_config: Value, seed: u64) -> Self {
        let canonical = serde_json::to_vec(&effective_config).expect("JSON values serialize");
        let config_hash = Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect();
        RunManifest {
            command: command.to_string(),
            config_hash,
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            effective_config,
            timings: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.insert(phase.to_string(), start.elapsed().as_secs_f64());
        out
    }

    fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_file(path, text.as_bytes())
    }
}

/// Path of the manifest written next to `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(OsString::from).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Outcome of a subcommand.
enum Outcome {
    Ok,
    Finding,
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 on a usage or configuration error, 2 when a verification fails.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("usage error"));
            return 1;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 1;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Finding) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Simulate(a) => run_solver("simulate", a),
        Command::Picard(a) => run_solver("picard", a),
        Command::Check(a) => run_check(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Jump(a) => run_jump(a),
        Command::Sweep(a) => run_sweep(a),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_file(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

/// Loads the configuration file, if any.
fn load_config(path: Option<&Path>) -> Result<(RunConfig, PathBuf)> {
    let Some(path) = path else {
        return Ok((RunConfig::default(), PathBuf::from("<flags>")));
    };
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok((config, path.to_path_buf()))
}

/// Resolves the density from the flag or the configuration, returning it
/// with the specification recorded in the manifest.
fn resolve_density(common: &CommonArgs, config: &RunConfig, config_path: &Path) -> Result<(Density, Value)> {
    if let Some(path) = &common.density {
        let density = Density::from_json_file(path)?;
        return Ok((density, json!(path)));
    }
    let base = config_path.parent().unwrap_or(Path::new("."));
    match &config.density {
        Some(Value::String(p)) => {
            let path = base.join(p);
            Ok((Density::from_json_file(&path)?, json!(path)))
        }
        Some(value) => {
            let spec: DensitySpec = serde_json::from_value(value.clone()).map_err(|e| Error::Parse {
                path: config_path.to_path_buf(),
                message: format!("density: {e}"),
            })?;
            Ok((Density::from_spec(&spec, base)?, json!(spec)))
        }
        None => Err(Error::Config("no density: pass --density or set `density` in --config".into())),
    }
}

fn apply_solver_flags(cfg: &mut SolverConfig, common: &CommonArgs, s: &SolverArgs) {
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = s.n_particles {
        cfg.n_particles = v;
    }
    if let Some(v) = s.dt {
        cfg.dt = v;
    }
    if let Some(v) = s.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = s.bridge {
        cfg.bridge_correction = v;
    }
    if let Some(v) = s.paths {
        cfg.picard.n_paths = v;
    }
    if let Some(v) = s.max_iters {
        cfg.picard.max_iters = v;
    }
    if let Some(v) = s.tol {
        cfg.picard.tol = v;
    }
}

fn frontier_csv(frontier: &FrontierPath) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    frontier
        .write_csv(&mut bytes)
        .map_err(|e| Error::Config(format!("frontier CSV: {e}")))?;
    Ok(bytes)
}

fn run_solver(name: &str, a: RunArgs) -> Result<Outcome> {
    let (config, base) = load_config(a.common.config.as_deref())?;
    let (density, density_json) = resolve_density(&a.common, &config, &base)?;
    let mut cfg = config.solver.clone();
    apply_solver_flags(&mut cfg, &a.common, &a.solver);
    cfg.validate()?;
    let mut manifest = RunManifest::new(name, json!({ "density": density_json, "solver": cfg }), cfg.seed);
    let (frontier, extra) = if name == "picard" {
        let r = manifest.time("picard", || picard_minimal(&density, &cfg))?;
        let extra = json!({
            "iterations": r.iterations,
            "converged": r.converged,
            "history": r.history,
            "monotonicity_violations": r.monotonicity_violations,
        });
        (r.frontier, Some(extra))
    } else {
        let (f, _) = manifest.time("simulate", || simulate_particles(&density, &cfg))?;
        (f, None)
    };
    emit(a.common.out.as_deref(), &frontier_csv(&frontier)?)?;
    if let Some(out) = &a.common.out {
        manifest.outputs.push(out.clone());
        if let Some(extra) = extra {
            manifest.effective_config["result"] = extra;
        }
        manifest.save(&manifest_path(out))?;
    }
    Ok(Outcome::Ok)
}

fn run_check(a: CheckArgs) -> Result<Outcome> {
    let (config, base) = load_config(a.common.config.as_deref())?;
    let (density, density_json) = resolve_density(&a.common, &config, &base)?;
    let lambda0 = a.lambda0.or(config.lambda0).unwrap_or(1e-2);
    if !(lambda0 > 0.0) {
        return Err(Error::Config(format!("lambda0 must be positive, got {lambda0}")));
    }
    let mut manifest = RunManifest::new("check", json!({ "density": density_json, "lambda0": lambda0 }), 0);
    let report = manifest.time("check", || check_averaging_condition(&density, lambda0, &AveragingGrids::default()));
    let mut value = report.to_json();
    value["first_moment_error"] = json!(density.first_moment().err().map(|e| e.to_string()));
    emit(a.common.out.as_deref(), format!("{value:#}\n").as_bytes())?;
    if let Some(out) = &a.common.out {
        manifest.outputs.push(out.clone());
        manifest.save(&manifest_path(out))?;
    }
    Ok(if report.averaging_margin < 0.0 {
        Outcome::Finding
    } else {
        Outcome::Ok
    })
}

fn run_bounds(a: BoundsArgs) -> Result<Outcome> {
    let (config, base) = load_config(a.common.config.as_deref())?;
    let (density, density_json) = resolve_density(&a.common, &config, &base)?;
    let mut cfg = config.solver.clone();
    apply_solver_flags(&mut cfg, &a.common, &a.solver);
    cfg.validate()?;
    let mut bcfg = BoundsConfig {
        seed: cfg.seed,
        ..BoundsConfig::default()
    };
    if let Some(o) = &config.bounds {
        bcfg.t_points = o.t_points.unwrap_or(bcfg.t_points);
        bcfg.y_paths = o.y_paths.unwrap_or(bcfg.y_paths);
        bcfg.u_paths = o.u_paths.unwrap_or(bcfg.u_paths);
        bcfg.h_points = o.h_points.unwrap_or(bcfg.h_points);
    }
    bcfg.t_points = a.t_points.unwrap_or(bcfg.t_points);
    bcfg.y_paths = a.y_paths.unwrap_or(bcfg.y_paths);
    let lambda0 = a.lambda0.or(config.lambda0).unwrap_or(1.0);

    let mut manifest = RunManifest::new(
        "bounds",
        json!({ "density": density_json, "solver": cfg, "bounds": bcfg, "lambda0": lambda0, "frontier": a.frontier }),
        cfg.seed,
    );
    let frontier = match &a.frontier {
        Some(path) => FrontierPath::load_csv(path, cfg.n_particles, cfg.jump_threshold(cfg.n_particles))?,
        None => manifest.time("simulate", || simulate_particles(&density, &cfg))?.0,
    };
    let g = if density.as_piecewise().is_some() {
        None
    } else {
        let report = manifest.time("check", || check_averaging_condition(&density, lambda0, &AveragingGrids::default()));
        report.averaging_holds.then_some(report.g_envelope)
    };
    let report = manifest.time("bounds", || compute_bounds(&density, &frontier, g.as_ref(), &bcfg))?;
    emit(a.common.out.as_deref(), format!("{:#}\n", report.to_json()).as_bytes())?;
    if let Some(out) = &a.common.out {
        manifest.outputs.push(out.clone());
    }
    if let Some(path) = &a.emit_csv {
        let mut bytes = Vec::new();
        report
            .write_margin_csv(&frontier, g.as_ref(), &mut bytes)
            .map_err(|e| Error::Config(format!("margin CSV: {e}")))?;
        write_file(path, &bytes)?;
        manifest.outputs.push(path.clone());
    }
    if let Some(out) = &a.common.out {
        manifest.save(&manifest_path(out))?;
    }
    Ok(if report.findings().is_empty() {
        Outcome::Ok
    } else {
        Outcome::Finding
    })
}

/// Every numeric field of a CSV file, in order.
pub fn read_positions(path: &Path) -> Result<Vec<f64>> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        for field in record.iter().filter(|f| !f.is_empty()) {
            match field.parse::<f64>() {
                Ok(v) if v.is_nan() => return Err(parse_err(format!("row {}: NaN position", row + 1))),
                Ok(v) => values.push(v),
                Err(_) if row == 0 => {}
                Err(_) => return Err(parse_err(format!("row {}: `{field}` is not a number", row + 1))),
            }
        }
    }
    if values.is_empty() {
        return Err(parse_err("no positions".into()));
    }
    Ok(values)
}

fn run_jump(a: JumpArgs) -> Result<Outcome> {
    let values = read_positions(&a.positions)?;
    let n = a.n.unwrap_or(values.len());
    if n < values.len() {
        return Err(Error::Config(format!("--n {n} is smaller than the {} positions", values.len())));
    }
    println!("{}", physical_jump_scan(&values, n));
    Ok(Outcome::Ok)
}

/// Sets one solver field from a sweep value.
fn set_field(cfg: &mut SolverConfig, key: &str, value: &Value) -> Result<()> {
    let bad = || Error::Config(format!("sweep: bad value {value} for `{key}`"));
    match key {
        "n_particles" => cfg.n_particles = value.as_u64().ok_or_else(bad)? as usize,
        "dt" => cfg.dt = value.as_f64().ok_or_else(bad)?,
        "T" | "horizon" => cfg.horizon = value.as_f64().ok_or_else(bad)?,
        "seed" => cfg.seed = value.as_u64().ok_or_else(bad)?,
        "bridge_correction" => cfg.bridge_correction = value.as_bool().ok_or_else(bad)?,
        _ => return Err(Error::Config(format!("sweep: unknown key `{key}`"))),
    }
    Ok(())
}

fn parse_grid_flag(flag: &str) -> Result<(String, Vec<Value>)> {
    let (key, values) = flag
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--grid `{flag}`: expected KEY=V1,V2,...")))?;
    let values = values
        .split(',')
        .map(|v| serde_json::from_str::<Value>(v.trim()))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Config(format!("--grid `{key}`: {e}")))?;
    Ok((key.trim().to_string(), values))
}

fn run_sweep(a: SweepArgs) -> Result<Outcome> {
    let (config, base) = load_config(a.common.config.as_deref())?;
    let (density, density_json) = resolve_density(&a.common, &config, &base)?;
    let dir = a
        .common
        .out
        .clone()
        .ok_or_else(|| Error::Config("sweep needs --out DIR".into()))?;
    let mut grid = config.sweep.clone();
    for flag in &a.grid {
        let (k, v) = parse_grid_flag(flag)?;
        grid.insert(k, v);
    }
    if grid.values().any(Vec::is_empty) {
        return Err(Error::Config("sweep: empty value list".into()));
    }
    let mut base_cfg = config.solver.clone();
    apply_solver_flags(&mut base_cfg, &a.common, &a.solver);
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;

    // cartesian product in key order, last key fastest
    let keys: Vec<&String> = grid.keys().collect();
    let mut cells: Vec<Vec<&Value>> = vec![vec![]];
    for k in &keys {
        cells = cells
            .into_iter()
            .flat_map(|c| {
                grid[*k].iter().map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    let mut manifest = RunManifest::new(
        "sweep",
        json!({ "density": density_json, "solver": base_cfg, "sweep": grid }),
        base_cfg.seed,
    );
    let mut index = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let mut cfg = base_cfg.clone();
        let mut params = serde_json::Map::new();
        for (k, v) in keys.iter().zip(cell) {
            set_field(&mut cfg, k, v)?;
            params.insert((*k).clone(), (*v).clone());
        }
        cfg.validate()?;
        let (frontier, _) = manifest.time(&format!("cell_{i:03}"), || simulate_particles(&density, &cfg))?;
        let file = dir.join(format!("cell_{i:03}.csv"));
        write_file(&file, &frontier_csv(&frontier)?)?;
        manifest.outputs.push(file.clone());
        index.push(json!({
            "cell": i,
            "params": params,
            "file": file.file_name().map(|f| f.to_string_lossy().into_owned()),
            "lambda_T": frontier.lambda.last(),
            "jumps": frontier.jumps.len(),
        }));
    }
    let index_path = dir.join("index.json");
    write_file(&index_path, format!("{:#}\n", Value::Array(index)).as_bytes())?;
    manifest.outputs.push(index_path);
    manifest.save(&dir.join("manifest.json"))?;
    Ok(Outcome::Ok)
}
