//! Field of the initial density and its Gauss-law residual.

use vpbgk::init::initial_state;
use vpbgk::poisson::{gauss_residual, solve_field};
use vpbgk::{build_mesh, MeshSpec};

fn main() -> vpbgk::Result<()> {
    let mesh = build_mesh(MeshSpec::default())?;
    let (s0, _) = initial_state(&mesh)?;
    let e = solve_field(&s0.rho, s0.rho_bar, &mesh)?;
    println!("rho_bar = {:.6}", s0.rho_bar);
    println!("{:>10} {:>12} {:>12}", "x", "rho", "E");
    for i in (0..mesh.nx()).step_by(4) {
        println!("{:>10.4} {:>12.6} {:>12.6}", mesh.cell_center(i), s0.rho[i], e[i]);
    }
    println!("residual {:.2e}", gauss_residual(&s0.rho, &e, s0.rho_bar, &mesh));
    println!("mean field {:.2e}", e.iter().sum::<f64>() / e.len() as f64);
    Ok(())
}
