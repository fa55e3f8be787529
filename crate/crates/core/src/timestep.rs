//! Step-size bounds and window substepping shared by all propagators.

use crate::mesh::PhaseMesh;

/// Fraction of the explicit parabolic limit `dx^2 / (2 m2)` that is accepted.
pub const CFL_SAFETY: f64 = 0.9;

/// Fraction of the critical upwind amplification accepted by the kinetic bound.
pub const TRANSPORT_SAFETY: f64 = 0.9;

/// Relative slack when comparing a step against its bound.
const BOUND_SLACK: f64 = 1e-12;

/// Parabolic bound `CFL_SAFETY * dx^2 / (2 m2)` of the drift-diffusion scheme.
pub fn fluid_bound(mesh: &PhaseMesh) -> f64 {
    CFL_SAFETY * mesh.dx * mesh.dx / (2.0 * mesh.velocity.m2)
}

/// Largest step for which the relaxed upwind transport of `g` stays stable.
///
/// With `k1 = exp(-dt/eps^2)`, `k2 = eps (1 - k1)` and upwind Courant ratio
/// `c = k2 (v_star/dx + |E|/dvx)`, stability needs `c <= (1 + k1) / 2`, i.e.
/// `2 eps tanh(dt / (2 eps^2)) s <= 1`. Below `eps = 1 / (2 s)` every step is
/// admissible.
pub fn transport_bound(mesh: &PhaseMesh, eps: f64, e_max: f64) -> f64 {
    let s = mesh.spec.v_star / mesh.dx + e_max.abs() / mesh.velocity.dvx;
    let ratio = TRANSPORT_SAFETY / (2.0 * eps * s);
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        2.0 * eps * eps * ratio.atanh()
    }
}

/// Velocity-advection bound `0.5 dvx / max|E|`.
pub fn field_bound(mesh: &PhaseMesh, e_max: f64) -> f64 {
    if e_max == 0.0 {
        f64::INFINITY
    } else {
        0.5 * mesh.velocity.dvx / e_max.abs()
    }
}

/// Admissible step of the micro-macro scheme: the minimum of the parabolic,
/// transport and field bounds.
pub fn kinetic_bound(mesh: &PhaseMesh, eps: f64, e_max: f64) -> f64 {
    fluid_bound(mesh)
        .min(transport_bound(mesh, eps, e_max))
        .min(field_bound(mesh, e_max))
}

pub(crate) fn exceeds(dt: f64, bound: f64) -> bool {
    dt > bound * (1.0 + BOUND_SLACK)
}

/// Substep lengths covering `[t0, t_end]` with steps of `dt`, the last one
/// clipped so the sequence lands exactly on `t_end`.
pub fn substeps(t0: f64, t_end: f64, dt: f64) -> Substeps {
    Substeps {
        t: t0,
        t_end,
        dt,
        done: !(t_end > t0),
    }
}

#[derive(Clone, Debug)]
pub struct Substeps {
    t: f64,
    t_end: f64,
    dt: f64,
    done: bool,
}

impl Iterator for Substeps {
    /// `(step length, time after the step)`.
    type Item = (f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let remaining = self.t_end - self.t;
        // absorb a sliver left over by round-off into the current step
        if remaining <= self.dt * (1.0 + 1e-9) {
            self.done = true;
            self.t = self.t_end;
            return Some((remaining, self.t_end));
        }
        self.t += self.dt;
        Some((self.dt, self.t))
    }
}
