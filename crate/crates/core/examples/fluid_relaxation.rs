//! Drift-diffusion solve of the initial density: relaxation to the
//! background with exact mass conservation.

use vpbgk::fluid::{fluid_propagate, FluidStepParams};
use vpbgk::init::initial_state;
use vpbgk::{build_mesh, MeshSpec};

fn main() -> vpbgk::Result<()> {
    let mesh = build_mesh(MeshSpec::default())?;
    let (mut s, _) = initial_state(&mesh)?;
    let p = FluidStepParams::stable(&mesh);
    let m0 = s.mass(&mesh);
    println!("dt = {:.5}", p.dt);
    for t in [0.01, 0.1, 0.5, 1.0, 2.0] {
        s = fluid_propagate(&s, t, &p, &mesh)?;
        let dev = s.rho.iter().map(|r| (r - s.rho_bar).abs()).fold(0.0, f64::max);
        println!(
            "t = {t:<5} max |rho - rho_bar| = {dev:.4e}  mass drift = {:.1e}",
            (s.mass(&mesh) - m0) / m0
        );
    }
    Ok(())
}
