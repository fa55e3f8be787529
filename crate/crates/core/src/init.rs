//! Far-from-equilibrium initial datum `f0 = M(v) v_x^4 (1 + 0.9 cos(2 pi x / x_star))`.

use crate::error::Result;
use crate::mesh::PhaseMesh;
use crate::state::{MacroState, MicroState};

/// Relative amplitude of the spatial cosine modulation.
pub const MODULATION: f64 = 0.9;

/// Spatial factor `1 + 0.9 cos(2 pi x / x_star)`.
pub fn spatial_profile(x: f64, mesh: &PhaseMesh) -> f64 {
    1.0 + MODULATION * (2.0 * std::f64::consts::PI * x / mesh.spec.x_star).cos()
}

/// Velocity factor `M(v) v_x^4` on the grid.
pub fn velocity_profile(mesh: &PhaseMesh) -> Vec<f64> {
    let vg = &mesh.velocity;
    vg.xi
        .iter()
        .zip(&vg.maxwellian)
        .map(|(x, m)| m * x.powi(4))
        .collect()
}

/// Density at cell centers, the field, and `g0 = f0 - <f0> M` at interfaces.
pub fn initial_state(mesh: &PhaseMesh) -> Result<(MacroState, MicroState)> {
    let vel = velocity_profile(mesh);
    let moment = mesh.velocity.bracket(&vel);

    let rho: Vec<f64> = mesh
        .cell_centers()
        .iter()
        .map(|&x| moment * spatial_profile(x, mesh))
        .collect();
    let rho_bar = rho.iter().sum::<f64>() / rho.len() as f64;
    let state = MacroState::from_density(0.0, rho, rho_bar, mesh)?;

    let mut micro = MicroState::zeros(mesh);
    let centered: Vec<f64> = vel
        .iter()
        .zip(&mesh.velocity.maxwellian)
        .map(|(f, m)| f - moment * m)
        .collect();

    for i in 0..mesh.nx() {
        let a = spatial_profile(mesh.interface(i), mesh);
        for (g, c) in micro.interface_mut(i).iter_mut().zip(&centered) {
            *g = a * c;
        }
        mesh.velocity.project_mass_free(micro.interface_mut(i));
    }
    Ok((state, micro))
}
