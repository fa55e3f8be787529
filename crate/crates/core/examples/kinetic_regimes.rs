//! Micro-macro kinetic solver across regimes: the gap to the fluid solver
//! closes as eps -> 0 while the step stays bounded.
//!
//! `cargo run --release --example kinetic_regimes [t_end]`

use vpbgk::fluid::{fluid_propagate, FluidStepParams};
use vpbgk::init::initial_state;
use vpbgk::kinetic::{kinetic_propagate, KineticStepParams};
use vpbgk::lifting::{lift, LiftOptions};
use vpbgk::{build_mesh, MeshSpec};

fn main() -> vpbgk::Result<()> {
    let t_end: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(0.05);
    let mesh = build_mesh(MeshSpec::default())?;
    let (s0, g0) = initial_state(&mesh)?;
    println!(
        "{:>8} {:>10} {:>14} {:>14}",
        "eps", "dt", "gap (g0)", "gap (lifted)"
    );
    for eps in [1.0, 0.5, 1e-1, 1e-2, 1e-4, 1e-6] {
        let p = KineticStepParams::stable(eps, 1.5 * s0.max_abs_field(), &mesh);
        let fluid = fluid_propagate(&s0, t_end, &FluidStepParams::new(p.dt, &mesh), &mesh)?;
        let lifted = lift(&s0.rho, &s0.e, s0.rho_bar, eps, &LiftOptions::default(), &mesh)?;
        let mut gaps = Vec::new();
        for g in [&g0, &lifted] {
            let (s, _) = kinetic_propagate(&s0, g, t_end, &p, &mesh)?;
            gaps.push(
                s.rho
                    .iter()
                    .zip(&fluid.rho)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            );
        }
        println!(
            "{eps:>8.0e} {:>10.3e} {:>14.4e} {:>14.4e}",
            p.dt, gaps[0], gaps[1]
        );
    }
    Ok(())
}
