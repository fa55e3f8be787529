//! Successive errors of the multiscale parareal iteration for several eps.
//!
//! `cargo run --release --example parareal_convergence [ng]`

use vpbgk::init::initial_state;
use vpbgk::{parareal_run, RunConfig};

fn main() -> vpbgk::Result<()> {
    let ng: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    for eps in [1.0, 1e-1, 1e-2, 1e-4] {
        let mut cfg = RunConfig::default();
        cfg.model.eps = eps;
        cfg.parareal.ng = ng;
        cfg.adaptation.enabled = false;
        let mesh = cfg.build_mesh()?;
        let (s0, g0) = initial_state(&mesh)?;
        let (ledger, status) = parareal_run(&s0, &g0, &cfg.parareal_config(&s0, &mesh), &mesh)?;
        let errs: Vec<String> = ledger
            .errors()
            .iter()
            .take(8)
            .map(|e| format!("{e:.1e}"))
            .collect();
        println!(
            "eps {eps:<6e} {status:?} after {:>2} iterations: {}",
            ledger.iteration_count(),
            errs.join(" ")
        );
    }
    Ok(())
}
