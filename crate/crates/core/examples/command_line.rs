//! Drives the `stefan` command line in-process: simulate to CSV, then compute
//! bounds from that file and from scratch, and compare the two reports.
//!
//! ```text
//! cargo run --release --example command_line
//! ```

use stefan_lab::cli;

fn main() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let dir = std::env::temp_dir().join("stefan-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let frontier = dir.join("frontier.csv");
    let (from_file, end_to_end) = (dir.join("a.json"), dir.join("b.json"));
    let config = format!("{data}/reference_run.json");
    let frontier_arg = frontier.to_str().unwrap();

    let code = cli::run(["stefan", "simulate", "--config", &config, "--out", frontier_arg]);
    println!("simulate -> {code}");
    let code = cli::run([
        "stefan", "bounds", "--config", &config, "--frontier", frontier_arg, "--out", from_file.to_str().unwrap(),
    ]);
    println!("bounds --frontier -> {code} (2 means a margin failed)");
    let code = cli::run(["stefan", "--threads", "1", "bounds", "--config", &config, "--out", end_to_end.to_str().unwrap()]);
    println!("bounds end to end, one thread -> {code}");
    let same = std::fs::read(&from_file).unwrap() == std::fs::read(&end_to_end).unwrap();
    println!("reports identical: {same}");

    let positions = dir.join("positions.csv");
    std::fs::write(&positions, "-0.05\n0.3\n0.6\n0.9\n").unwrap();
    cli::run(["stefan", "jump", "--positions", positions.to_str().unwrap()]);
}
