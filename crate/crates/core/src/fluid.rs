//! Explicit finite-volume scheme for the drift-diffusion limit
//!
//! ```text
//! rho_i^{n+1} = rho_i^n + m2 dt/dx (J_{i+1/2} - J_{i-1/2})
//! J_{i+1/2}   = (rho_{i+1} - rho_i)/dx - E_{i+1/2} (rho_i + rho_{i+1})/2
//! ```
//!
//! It is the coarse propagator of the parareal iteration and the update of
//! fluid cells inside the hybrid scheme.

use crate::error::{Error, Result};
use crate::mesh::PhaseMesh;
use crate::poisson::{solve_field_into, SOLVABILITY_TOLERANCE};
use crate::state::MacroState;
use crate::timestep::{exceeds, fluid_bound, substeps};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidStepParams {
    pub dt: f64,
    pub m2: f64,
}

impl FluidStepParams {
    pub fn new(dt: f64, mesh: &PhaseMesh) -> Self {
        Self {
            dt,
            m2: mesh.velocity.m2,
        }
    }

    /// Largest admissible step on this mesh.
    pub fn stable(mesh: &PhaseMesh) -> Self {
        Self::new(fluid_bound(mesh), mesh)
    }

    pub fn check(&self, mesh: &PhaseMesh) -> Result<()> {
        let bound = fluid_bound(mesh);
        if exceeds(self.dt, bound) || !(self.dt > 0.0) {
            return Err(Error::StabilityViolation {
                scheme: "drift-diffusion",
                dt: self.dt,
                bound,
            });
        }
        Ok(())
    }
}

/// Interface fluxes `J_{i+1/2}`.
pub fn fluid_flux(rho: &[f64], e: &[f64], mesh: &PhaseMesh) -> Vec<f64> {
    let mut j = vec![0.0; mesh.nx()];
    fluid_flux_into(rho, e, mesh, &mut j);
    j
}

pub(crate) fn fluid_flux_into(rho: &[f64], e: &[f64], mesh: &PhaseMesh, out: &mut [f64]) {
    let n = mesh.nx();
    debug_assert!(rho.len() == n && e.len() == n && out.len() == n);
    let inv_dx = 1.0 / mesh.dx;
    for i in 0..n {
        let r0 = rho[i];
        let r1 = rho[mesh.next(i)];
        out[i] = (r1 - r0) * inv_dx - e[i] * 0.5 * (r0 + r1);
    }
}

/// Conservative update of cell `i` from interface fluxes; shared with the
/// hybrid scheme so that fluid cells follow bit-identical arithmetic.
#[inline]
pub(crate) fn fluid_cell_update(rho_i: f64, flux: &[f64], i: usize, coeff: f64, mesh: &PhaseMesh) -> f64 {
    rho_i + coeff * (flux[i] - flux[mesh.prev(i)])
}

#[inline]
pub(crate) fn fluid_coeff(p: &FluidStepParams, mesh: &PhaseMesh) -> f64 {
    p.m2 * p.dt / mesh.dx
}

/// One step of the drift-diffusion scheme. The field of `state` must be
/// consistent with its density; the returned field is re-solved.
pub fn fluid_step(state: &MacroState, p: &FluidStepParams, mesh: &PhaseMesh) -> Result<MacroState> {
    p.check(mesh)?;
    let mut next = state.clone();
    let mut flux = vec![0.0; mesh.nx()];
    step_in_place(&mut next, p, mesh, &mut flux, SOLVABILITY_TOLERANCE)?;
    Ok(next)
}

fn step_in_place(
    state: &mut MacroState,
    p: &FluidStepParams,
    mesh: &PhaseMesh,
    flux: &mut [f64],
    field_tol: f64,
) -> Result<()> {
    fluid_flux_into(&state.rho, &state.e, mesh, flux);
    let c = fluid_coeff(p, mesh);
    for i in 0..mesh.nx() {
        state.rho[i] = fluid_cell_update(state.rho[i], flux, i, c, mesh);
    }
    solve_field_into(&state.rho, state.rho_bar, mesh, field_tol, &mut state.e)?;
    state.t += p.dt;
    Ok(())
}

/// Repeated [`fluid_step`] up to exactly `t_end`, the last step clipped.
pub fn fluid_propagate(
    state: &MacroState,
    t_end: f64,
    p: &FluidStepParams,
    mesh: &PhaseMesh,
) -> Result<MacroState> {
    let mut s = state.clone();
    fluid_propagate_in_place(&mut s, t_end, p, mesh, SOLVABILITY_TOLERANCE)?;
    Ok(s)
}

pub(crate) fn fluid_propagate_in_place(
    state: &mut MacroState,
    t_end: f64,
    p: &FluidStepParams,
    mesh: &PhaseMesh,
    field_tol: f64,
) -> Result<()> {
    p.check(mesh)?;
    let mut flux = vec![0.0; mesh.nx()];
    for (h, t) in substeps(state.t, t_end, p.dt) {
        let sub = FluidStepParams { dt: h, ..*p };
        step_in_place(state, &sub, mesh, &mut flux, field_tol)?;
        state.t = t;
    }
    Ok(())
}
