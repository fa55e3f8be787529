//! Runs an experiment described by TOML text and lists its artifacts.
//!
//! `cargo run --release --example run_from_config [out_dir]`

use vpbgk::{run_experiment, RunConfig};

const CONFIG: &str = r#"
[model]
eps = 1e-2

[parareal]
ng = 50

[adaptation]
enabled = true
delta0 = 1e-5
eta0 = 1e-5

[lifting]
order = 2
"#;

fn main() -> vpbgk::Result<()> {
    let mut cfg = RunConfig::from_toml(CONFIG)?;
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "out/run_from_config".into());
    cfg.set("output.dir", &out)?;
    let r = run_experiment(&cfg)?;
    println!(
        "{:?} after {} iterations, wall {:.2} s",
        r.status, r.iterations, r.timings.wall
    );
    if let Some(e) = r.max_baseline_error() {
        println!("max error vs classical solver {e:.2e}");
    }
    let mut files: Vec<_> = std::fs::read_dir(&r.dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name())
        .collect();
    files.sort();
    for f in files {
        println!("  {}", f.to_string_lossy());
    }
    Ok(())
}
