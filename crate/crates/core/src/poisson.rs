//! Periodic 1D Gauss law `E_{i+1/2} - E_{i-1/2} = (rho_i - rho_bar) dx`.
//!
//! The relation fixes `E` up to a constant on the torus; the zero-mean gauge
//! `sum_i E_{i+1/2} = 0` is used throughout.

use crate::error::{Error, Result};
use crate::mesh::PhaseMesh;

/// Relative net-charge tolerance accepted by [`solve_field`].
pub const SOLVABILITY_TOLERANCE: f64 = 1e-10;

/// Interface field from cell densities.
pub fn solve_field(rho: &[f64], rho_bar: f64, mesh: &PhaseMesh) -> Result<Vec<f64>> {
    solve_field_with_tolerance(rho, rho_bar, mesh, SOLVABILITY_TOLERANCE)
}

/// As [`solve_field`], with an explicit relative compatibility tolerance.
pub fn solve_field_with_tolerance(
    rho: &[f64],
    rho_bar: f64,
    mesh: &PhaseMesh,
    rel_tol: f64,
) -> Result<Vec<f64>> {
    let mut e = vec![0.0; mesh.nx()];
    solve_field_into(rho, rho_bar, mesh, rel_tol, &mut e)?;
    Ok(e)
}

pub(crate) fn solve_field_into(
    rho: &[f64],
    rho_bar: f64,
    mesh: &PhaseMesh,
    rel_tol: f64,
    e: &mut [f64],
) -> Result<()> {
    Error::check_len(mesh.nx(), rho.len())?;
    Error::check_len(mesh.nx(), e.len())?;
    let dx = mesh.dx;

    let mut acc = 0.0;
    let mut scale = 0.0;
    for (ei, r) in e.iter_mut().zip(rho) {
        acc += (r - rho_bar) * dx;
        scale += r.abs() * dx;
        *ei = acc;
    }
    let tolerance = rel_tol * scale.max(f64::MIN_POSITIVE);
    if !(acc.abs() <= tolerance) {
        return Err(Error::SolvabilityViolation { net: acc, tolerance });
    }

    // spread the admissible net charge evenly instead of closing the loop
    // through the last cell
    let shift = acc / e.len() as f64;
    for (k, ei) in e.iter_mut().enumerate() {
        *ei -= (k + 1) as f64 * shift;
    }
    let mean = e.iter().sum::<f64>() / e.len() as f64;
    for ei in e.iter_mut() {
        *ei -= mean;
    }
    Ok(())
}

/// Largest `|(E_{i+1/2} - E_{i-1/2}) / dx - (rho_i - rho_bar)|` over all cells.
pub fn gauss_residual(rho: &[f64], e: &[f64], rho_bar: f64, mesh: &PhaseMesh) -> f64 {
    (0..mesh.nx())
        .map(|i| ((e[i] - e[mesh.prev(i)]) / mesh.dx - (rho[i] - rho_bar)).abs())
        .fold(0.0, f64::max)
}
