//! Chapman-Enskog lift of the initial density at first and second order.

use vpbgk::init::initial_state;
use vpbgk::lifting::{lift, projection_defect, LiftOptions, LiftOrder};
use vpbgk::{build_mesh, MeshSpec};

fn main() -> vpbgk::Result<()> {
    let mesh = build_mesh(MeshSpec::default())?;
    let (s0, _) = initial_state(&mesh)?;
    for order in [LiftOrder::One, LiftOrder::Two] {
        let opts = LiftOptions {
            order,
            ..LiftOptions::default()
        };
        for eps in [1.0, 1e-2, 1e-4] {
            let g = lift(&s0.rho, &s0.e, s0.rho_bar, eps, &opts, &mesh)?;
            let mass = g
                .interface_masses(&mesh)
                .iter()
                .map(|m| m.abs())
                .fold(0.0, f64::max);
            let flux = g.flux_moments(&mesh).iter().map(|m| m.abs()).fold(0.0, f64::max);
            let defect = projection_defect(&s0.rho, &s0.e, s0.rho_bar, eps, &opts, &mesh)?;
            println!(
                "L = {} eps = {eps:<6e} max |<g>| = {mass:.1e}  max |<xi g>| = {flux:.4e}  defect = {defect:.1e}",
                order.as_int()
            );
        }
    }
    Ok(())
}
