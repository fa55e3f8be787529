//! Reduced eps-by-toggle sweep on a small mesh, one directory per cell.
//!
//! `cargo run --release --example sweep [out_dir]`

use vpbgk::{run_sweep, RunConfig, SweepSpec};

fn main() -> vpbgk::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.mesh.nvx = 16;
    cfg.mesh.nvy = 8;
    cfg.mesh.nvz = 8;
    cfg.parareal.ng = 20;
    cfg.output.dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "out/sweep".into())
        .into();
    let spec = SweepSpec {
        eps: vec![1e-1, 1e-2, 1e-4],
        ..SweepSpec::default()
    };
    for row in run_sweep(&cfg, &spec)? {
        let r = &row.report;
        println!(
            "{:<36} {:?} k={:<2} wall {:>7.3} s  speedup {:>6}  max error {:>9}",
            r.dir.file_name().unwrap_or_default().to_string_lossy(),
            r.status,
            r.iterations,
            r.timings.wall,
            r.timings.speedup().map_or("-".into(), |s| format!("{s:.2}")),
            r.max_baseline_error().map_or("-".into(), |e| format!("{e:.1e}"))
        );
    }
    Ok(())
}
