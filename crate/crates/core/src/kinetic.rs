//! Relaxed asymptotic-preserving micro-macro scheme.
//!
//! One step updates the interface perturbation first,
//!
//! ```text
//! g^{n+1} = k1 g^n - k2 (T'(g^n) + xi M J^n),   k1 = exp(-dt/eps^2),  k2 = eps (1 - k1)
//! ```
//!
//! then the densities with the fresh flux moments,
//!
//! ```text
//! rho_i^{n+1} = rho_i^n - dt/(eps dx) (<xi g^{n+1}_{i+1/2}> - <xi g^{n+1}_{i-1/2}>).
//! ```
//!
//! `T'` is first-order upwind transport `xi d_x g + E d_xi g` followed by the
//! discrete projection `(I - Pi)`, `Pi h = <h> M`, so that every update keeps
//! the perturbation mass-free. The `x` difference is upwinded by `sign(xi)`
//! across neighbouring interfaces, the `xi` difference by `sign(E)` with zero
//! inflow at `|xi| = v_star`.

use crate::error::{Error, Result};
use crate::fluid::fluid_flux_into;
use crate::mesh::PhaseMesh;
use crate::poisson::{solve_field_into, SOLVABILITY_TOLERANCE};
use crate::state::{MacroState, MicroState};
use crate::timestep::{exceeds, kinetic_bound, substeps};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticStepParams {
    pub eps: f64,
    pub dt: f64,
}

/// The two relaxation coefficients of one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Relaxation {
    /// `exp(-dt / eps^2)`
    pub decay: f64,
    /// `eps (1 - exp(-dt / eps^2))`, evaluated through `expm1`.
    pub gain: f64,
}

impl KineticStepParams {
    pub fn new(eps: f64, dt: f64) -> Self {
        Self { eps, dt }
    }

    /// Params at the largest admissible step for a field bounded by `e_max`.
    pub fn stable(eps: f64, e_max: f64, mesh: &PhaseMesh) -> Self {
        Self::new(eps, kinetic_bound(mesh, eps, e_max))
    }

    pub fn relaxation(&self) -> Relaxation {
        let r = -self.dt / (self.eps * self.eps);
        Relaxation {
            decay: r.exp(),
            gain: -self.eps * r.exp_m1(),
        }
    }

    pub fn check(&self, e_max: f64, mesh: &PhaseMesh) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps", "must be positive"));
        }
        let bound = kinetic_bound(mesh, self.eps, e_max);
        if exceeds(self.dt, bound) || !(self.dt > 0.0) {
            return Err(Error::StabilityViolation {
                scheme: "micro-macro",
                dt: self.dt,
                bound,
            });
        }
        Ok(())
    }

    fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..*self }
    }
}

/// Projected transport density `T'(g)` at interface `i`, written into `out`.
pub(crate) fn transport_interface(g: &[f64], i: usize, e: f64, mesh: &PhaseMesh, out: &mut [f64]) {
    let vg = &mesh.velocity;
    let nv = vg.len();
    let b = vg.block();
    let gi = &g[i * nv..(i + 1) * nv];
    let gm = &g[mesh.prev(i) * nv..(mesh.prev(i) + 1) * nv];
    let gp = &g[mesh.next(i) * nv..(mesh.next(i) + 1) * nv];
    let inv_dx = 1.0 / mesh.dx;
    let ev = e / vg.dvx;

    for jx in 0..vg.nvx {
        let xi = vg.axis_x[jx];
        let a = xi * inv_dx;
        let r = jx * b..(jx + 1) * b;
        let ci = &gi[r.clone()];
        let o = &mut out[r.clone()];
        if xi >= 0.0 {
            for ((o, c), m) in o.iter_mut().zip(ci).zip(&gm[r.clone()]) {
                *o = a * (c - m);
            }
        } else {
            for ((o, c), p) in o.iter_mut().zip(ci).zip(&gp[r.clone()]) {
                *o = a * (p - c);
            }
        }

        if ev > 0.0 {
            if jx > 0 {
                let lower = &gi[(jx - 1) * b..jx * b];
                for ((o, c), l) in o.iter_mut().zip(ci).zip(lower) {
                    *o += ev * (c - l);
                }
            } else {
                for (o, c) in o.iter_mut().zip(ci) {
                    *o += ev * c;
                }
            }
        } else if ev < 0.0 {
            if jx + 1 < vg.nvx {
                let upper = &gi[(jx + 1) * b..(jx + 2) * b];
                for ((o, c), u) in o.iter_mut().zip(ci).zip(upper) {
                    *o += ev * (u - c);
                }
            } else {
                for (o, c) in o.iter_mut().zip(ci) {
                    *o -= ev * c;
                }
            }
        }
    }

    let mass = vg.bracket(out);
    if mass != 0.0 {
        for (o, m) in out.iter_mut().zip(&vg.maxwellian) {
            *o -= mass * m;
        }
    }
}

/// Relaxed micro update of interface `i` into `out`. `flux` is the interface
/// drift-diffusion flux `J_{i+1/2}`.
#[inline]
pub(crate) fn micro_update_interface(
    g: &[f64],
    i: usize,
    e: f64,
    flux: f64,
    relax: Relaxation,
    mesh: &PhaseMesh,
    out: &mut [f64],
) {
    transport_interface(g, i, e, mesh, out);
    let nv = mesh.nv();
    let gi = &g[i * nv..(i + 1) * nv];
    for ((o, g0), xm) in out.iter_mut().zip(gi).zip(&mesh.velocity.xi_maxwellian) {
        *o = relax.decay * g0 - relax.gain * (*o + xm * flux);
    }
}

/// Kinetic update of cell `i` from interface flux moments `<xi g>`.
#[inline]
pub(crate) fn kinetic_cell_update(
    rho_i: f64,
    moments: &[f64],
    i: usize,
    coeff: f64,
    mesh: &PhaseMesh,
) -> f64 {
    rho_i - coeff * (moments[i] - moments[mesh.prev(i)])
}

#[inline]
pub(crate) fn kinetic_coeff(p: &KineticStepParams, mesh: &PhaseMesh) -> f64 {
    p.dt / (p.eps * mesh.dx)
}

/// Discrete flux difference `T` over every control volume; `T / (dx dv^3)`
/// is the projected transport `T'(g)`.
pub fn transport_term(g: &MicroState, e: &[f64], mesh: &PhaseMesh) -> Result<MicroState> {
    Error::check_len(mesh.nx() * mesh.nv(), g.g.len())?;
    Error::check_len(mesh.nx(), e.len())?;
    let mut out = MicroState::zeros(mesh);
    let vol = mesh.dx * mesh.velocity.dv3;
    for i in 0..mesh.nx() {
        let o = out.interface_mut(i);
        transport_interface(&g.g, i, e[i], mesh, o);
        o.iter_mut().for_each(|v| *v *= vol);
    }
    Ok(out)
}

/// Micro update of every interface from the state at `t^n`.
pub fn micro_step(
    g: &MicroState,
    state: &MacroState,
    p: &KineticStepParams,
    mesh: &PhaseMesh,
) -> Result<MicroState> {
    Error::check_len(mesh.nx() * mesh.nv(), g.g.len())?;
    let mut flux = vec![0.0; mesh.nx()];
    fluid_flux_into(&state.rho, &state.e, mesh, &mut flux);
    let relax = p.relaxation();
    let mut next = MicroState::zeros(mesh);
    for i in 0..mesh.nx() {
        micro_update_interface(&g.g, i, state.e[i], flux[i], relax, mesh, next.interface_mut(i));
    }
    Ok(next)
}

/// Conservative density update from an already advanced perturbation.
pub fn macro_step(
    rho: &[f64],
    g_next: &MicroState,
    p: &KineticStepParams,
    mesh: &PhaseMesh,
) -> Result<Vec<f64>> {
    Error::check_len(mesh.nx(), rho.len())?;
    let moments = g_next.flux_moments(mesh);
    let c = kinetic_coeff(p, mesh);
    Ok((0..mesh.nx())
        .map(|i| kinetic_cell_update(rho[i], &moments, i, c, mesh))
        .collect())
}

/// Scratch buffers reused across kinetic steps.
#[derive(Clone, Debug)]
pub struct KineticWorkspace {
    pub(crate) g_next: Vec<f64>,
    pub(crate) flux: Vec<f64>,
    pub(crate) moments: Vec<f64>,
}

impl KineticWorkspace {
    pub fn new(mesh: &PhaseMesh) -> Self {
        Self {
            g_next: vec![0.0; mesh.nx() * mesh.nv()],
            flux: vec![0.0; mesh.nx()],
            moments: vec![0.0; mesh.nx()],
        }
    }
}

pub(crate) fn kinetic_step_in_place(
    state: &mut MacroState,
    micro: &mut MicroState,
    p: &KineticStepParams,
    mesh: &PhaseMesh,
    ws: &mut KineticWorkspace,
    poisson_tol: f64,
) -> Result<()> {
    solve_field_into(&state.rho, state.rho_bar, mesh, poisson_tol, &mut state.e)?;
    p.check(state.max_abs_field(), mesh)?;

    fluid_flux_into(&state.rho, &state.e, mesh, &mut ws.flux);
    let relax = p.relaxation();
    let nv = mesh.nv();
    for i in 0..mesh.nx() {
        micro_update_interface(
            &micro.g,
            i,
            state.e[i],
            ws.flux[i],
            relax,
            mesh,
            &mut ws.g_next[i * nv..(i + 1) * nv],
        );
    }
    std::mem::swap(&mut micro.g, &mut ws.g_next);

    for i in 0..mesh.nx() {
        ws.moments[i] = mesh.velocity.bracket_xi(micro.interface(i));
    }
    let c = kinetic_coeff(p, mesh);
    for i in 0..mesh.nx() {
        state.rho[i] = kinetic_cell_update(state.rho[i], &ws.moments, i, c, mesh);
    }
    solve_field_into(&state.rho, state.rho_bar, mesh, poisson_tol, &mut state.e)?;
    state.t += p.dt;
    Ok(())
}

/// One full step: refresh `E`, advance `g`, advance `rho`, refresh `E`.
pub fn kinetic_step(
    state: &MacroState,
    micro: &MicroState,
    p: &KineticStepParams,
    mesh: &PhaseMesh,
) -> Result<(MacroState, MicroState)> {
    Error::check_len(mesh.nx() * mesh.nv(), micro.g.len())?;
    let mut s = state.clone();
    let mut g = micro.clone();
    let mut ws = KineticWorkspace::new(mesh);
    kinetic_step_in_place(&mut s, &mut g, p, mesh, &mut ws, SOLVABILITY_TOLERANCE)?;
    Ok((s, g))
}

/// Repeated [`kinetic_step`] up to exactly `t_end`.
pub fn kinetic_propagate(
    state: &MacroState,
    micro: &MicroState,
    t_end: f64,
    p: &KineticStepParams,
    mesh: &PhaseMesh,
) -> Result<(MacroState, MicroState)> {
    let mut s = state.clone();
    let mut g = micro.clone();
    let mut ws = KineticWorkspace::new(mesh);
    for (h, t) in substeps(s.t, t_end, p.dt) {
        kinetic_step_in_place(
            &mut s,
            &mut g,
            &p.with_dt(h),
            mesh,
            &mut ws,
            SOLVABILITY_TOLERANCE,
        )?;
        s.t = t;
    }
    Ok((s, g))
}
