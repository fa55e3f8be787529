//! Spatially hybrid micro-macro stepper.
//!
//! Every step relabels the cells from the state at `t^n`, advances `g` on
//! kinetic interfaces with the relaxed micro update and zeroes it on fluid
//! ones, then updates each density with the flux of its own description:
//! `<xi g>` moments in kinetic cells, drift-diffusion fluxes in fluid cells.
//!
//! With [`Coupling::Matched`] a fluid cell next to a kinetic one takes the
//! kinetic flux on the shared interface, so every interface carries a single
//! flux and mass is conserved exactly. [`Coupling::CellWise`] keeps each
//! cell's own flux on both sides and leaves a small coupling defect.

use serde::{Deserialize, Serialize};

use crate::adaptation::{
    hybrid_perturbation_indicator, remainder_indicator, update_labels_with, DomainLabels, Label, LabelRule,
};
use crate::error::{Error, Result};
use crate::fluid::{fluid_cell_update, fluid_coeff, fluid_flux_into, FluidStepParams};
use crate::kinetic::{
    kinetic_cell_update, kinetic_coeff, micro_update_interface, KineticStepParams, KineticWorkspace,
};
use crate::lifting::{LiftOptions, LiftWorkspace};
use crate::mesh::PhaseMesh;
use crate::poisson::{solve_field_into, SOLVABILITY_TOLERANCE};
use crate::state::{MacroState, MicroState};
use crate::timestep::substeps;

/// Relative net-charge tolerance of the field solve under cell-wise coupling.
/// The coupling defect accumulates in the total mass, so the strict
/// tolerance of the conservative schemes would reject legitimate states.
pub const CELLWISE_SOLVABILITY_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PartitionMode {
    /// Labels recomputed from the indicators every step.
    #[default]
    Adaptive,
    AllKinetic,
    /// Every cell fluid; the stored `g` is left untouched.
    AllFluid,
}

/// How `g` is rebuilt on an interface that turns kinetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refill {
    #[default]
    Lift,
    Zero,
}

/// Flux used by a fluid cell on an interface it shares with a kinetic cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// The interface's own flux: kinetic interfaces carry `<xi g> / eps`.
    #[default]
    Matched,
    /// The cell's own drift-diffusion flux.
    CellWise,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridParams {
    pub step: KineticStepParams,
    pub mode: PartitionMode,
    pub rule: LabelRule,
    pub refill: Refill,
    pub coupling: Coupling,
    pub lift: LiftOptions,
}

impl HybridParams {
    pub fn new(step: KineticStepParams, mode: PartitionMode) -> Self {
        Self {
            step,
            mode,
            rule: LabelRule::default(),
            refill: Refill::default(),
            coupling: Coupling::default(),
            lift: LiftOptions::default(),
        }
    }

    /// Net-charge tolerance of the field solves.
    pub fn field_tolerance(&self) -> f64 {
        if self.mode == PartitionMode::Adaptive && self.coupling == Coupling::CellWise {
            CELLWISE_SOLVABILITY_TOLERANCE
        } else {
            SOLVABILITY_TOLERANCE
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    pub macro_state: MacroState,
    /// Meaningful on kinetic interfaces only.
    pub micro: MicroState,
    /// Labels used by the most recent step.
    pub labels: DomainLabels,
    /// Field one step back, for the time derivative in the remainder.
    pub e_prev: Vec<f64>,
    /// Length of that step; zero when no history is available.
    pub prev_dt: f64,
    /// Sum over steps of the kinetic-cell count.
    pub kinetic_cell_steps: usize,
    pub steps: usize,
}

impl HybridState {
    /// Fully kinetic state without field history.
    pub fn new(macro_state: MacroState, micro: MicroState) -> Self {
        let nx = macro_state.rho.len();
        let e_prev = macro_state.e.clone();
        Self {
            macro_state,
            micro,
            labels: DomainLabels::uniform(nx, Label::Kinetic),
            e_prev,
            prev_dt: 0.0,
            kinetic_cell_steps: 0,
            steps: 0,
        }
    }

    /// Mean kinetic-cell fraction over the steps taken so far.
    pub fn mean_kinetic_fraction(&self) -> f64 {
        if self.steps == 0 {
            self.labels.kinetic_fraction()
        } else {
            self.kinetic_cell_steps as f64 / (self.steps * self.labels.cells.len()) as f64
        }
    }
}

/// Scratch buffers for [`hybrid_step`] and [`hybrid_propagate`].
#[derive(Clone, Debug)]
pub struct HybridWorkspace {
    kinetic: KineticWorkspace,
    lift: LiftWorkspace,
    e_old: Vec<f64>,
}

impl HybridWorkspace {
    pub fn new(mesh: &PhaseMesh) -> Self {
        Self {
            kinetic: KineticWorkspace::new(mesh),
            lift: LiftWorkspace::new(mesh),
            e_old: vec![0.0; mesh.nx()],
        }
    }
}

fn relabel(st: &mut HybridState, p: &HybridParams, mesh: &PhaseMesh, ws: &mut HybridWorkspace) -> Result<()> {
    let nx = mesh.nx();
    let labels = match p.mode {
        PartitionMode::AllKinetic => DomainLabels::uniform(nx, Label::Kinetic),
        PartitionMode::AllFluid => DomainLabels::uniform(nx, Label::Fluid),
        PartitionMode::Adaptive => {
            let s = &st.macro_state;
            let r = remainder_indicator(&s.rho, &s.e, &st.e_prev, st.prev_dt, s.rho_bar, mesh)?;
            let flux = &mut ws.kinetic.flux;
            fluid_flux_into(&s.rho, &s.e, mesh, flux);
            let gnorm = hybrid_perturbation_indicator(&st.micro, &st.labels, flux, p.step.eps, mesh)?;
            let new = update_labels_with(&r, &gnorm, &p.rule, p.step.eps);

            let mut prepared = false;
            for i in 0..nx {
                match (st.labels.interfaces[i], new.interfaces[i]) {
                    (Label::Fluid, Label::Kinetic) => match p.refill {
                        Refill::Lift => {
                            if !prepared {
                                ws.lift.prepare(&s.rho, &s.e, s.rho_bar, &p.lift, mesh)?;
                                prepared = true;
                            }
                            ws.lift.fill_interface(
                                i,
                                s.e[i],
                                p.step.eps,
                                &p.lift,
                                mesh,
                                st.micro.interface_mut(i),
                            );
                        }
                        Refill::Zero => st.micro.interface_mut(i).fill(0.0),
                    },
                    (Label::Kinetic, Label::Fluid) => st.micro.interface_mut(i).fill(0.0),
                    _ => {}
                }
            }
            new
        }
    };
    st.labels = labels;
    Ok(())
}

pub(crate) fn hybrid_step_in_place(
    st: &mut HybridState,
    p: &HybridParams,
    mesh: &PhaseMesh,
    ws: &mut HybridWorkspace,
) -> Result<()> {
    let nx = mesh.nx();
    let nv = mesh.nv();
    {
        let s = &mut st.macro_state;
        solve_field_into(&s.rho, s.rho_bar, mesh, p.field_tolerance(), &mut s.e)?;
    }
    relabel(st, p, mesh, ws)?;

    let any_kinetic = st.labels.kinetic_cells() > 0;
    if any_kinetic {
        p.step.check(st.macro_state.max_abs_field(), mesh)?;
    } else {
        FluidStepParams::new(p.step.dt, mesh).check(mesh)?;
    }

    let s = &mut st.macro_state;
    let kw = &mut ws.kinetic;
    fluid_flux_into(&s.rho, &s.e, mesh, &mut kw.flux);

    let relax = p.step.relaxation();
    for i in 0..nx {
        let slot = &mut kw.g_next[i * nv..(i + 1) * nv];
        if st.labels.is_kinetic_interface(i) {
            micro_update_interface(&st.micro.g, i, s.e[i], kw.flux[i], relax, mesh, slot);
        } else if p.mode == PartitionMode::AllFluid {
            slot.copy_from_slice(st.micro.interface(i));
        } else {
            slot.fill(0.0);
        }
    }
    std::mem::swap(&mut st.micro.g, &mut kw.g_next);

    for i in 0..nx {
        kw.moments[i] = if st.labels.is_kinetic_interface(i) {
            mesh.velocity.bracket_xi(st.micro.interface(i))
        } else {
            0.0
        };
    }
    let ck = kinetic_coeff(&p.step, mesh);
    let cf = fluid_coeff(&FluidStepParams::new(p.step.dt, mesh), mesh);
    let matched = p.coupling == Coupling::Matched;
    for i in 0..nx {
        let (left, right) = (mesh.prev(i), i);
        s.rho[i] = if st.labels.is_kinetic_cell(i) {
            kinetic_cell_update(s.rho[i], &kw.moments, i, ck, mesh)
        } else if matched && (st.labels.is_kinetic_interface(left) || st.labels.is_kinetic_interface(right)) {
            let outflow = |k: usize| {
                if st.labels.is_kinetic_interface(k) {
                    kw.moments[k] / p.step.eps
                } else {
                    -mesh.velocity.m2 * kw.flux[k]
                }
            };
            s.rho[i] - p.step.dt / mesh.dx * (outflow(right) - outflow(left))
        } else {
            fluid_cell_update(s.rho[i], &kw.flux, i, cf, mesh)
        };
    }

    ws.e_old.copy_from_slice(&s.e);
    solve_field_into(&s.rho, s.rho_bar, mesh, p.field_tolerance(), &mut s.e)?;
    std::mem::swap(&mut st.e_prev, &mut ws.e_old);
    st.prev_dt = p.step.dt;
    s.t += p.step.dt;
    st.kinetic_cell_steps += st.labels.kinetic_cells();
    st.steps += 1;
    Ok(())
}

/// One hybrid step from `t^n` to `t^n + dt`.
pub fn hybrid_step(st: &HybridState, p: &HybridParams, mesh: &PhaseMesh) -> Result<HybridState> {
    check_shapes(st, mesh)?;
    let mut next = st.clone();
    let mut ws = HybridWorkspace::new(mesh);
    hybrid_step_in_place(&mut next, p, mesh, &mut ws)?;
    Ok(next)
}

/// Repeated [`hybrid_step`] up to exactly `t_end`.
pub fn hybrid_propagate(
    st: &HybridState,
    t_end: f64,
    p: &HybridParams,
    mesh: &PhaseMesh,
) -> Result<HybridState> {
    check_shapes(st, mesh)?;
    let mut next = st.clone();
    let mut ws = HybridWorkspace::new(mesh);
    hybrid_propagate_in_place(&mut next, t_end, p, mesh, &mut ws)?;
    Ok(next)
}

pub(crate) fn hybrid_propagate_in_place(
    st: &mut HybridState,
    t_end: f64,
    p: &HybridParams,
    mesh: &PhaseMesh,
    ws: &mut HybridWorkspace,
) -> Result<()> {
    for (h, t) in substeps(st.macro_state.t, t_end, p.step.dt) {
        let sub = HybridParams {
            step: KineticStepParams { dt: h, ..p.step },
            ..*p
        };
        hybrid_step_in_place(st, &sub, mesh, ws)?;
        st.macro_state.t = t;
    }
    Ok(())
}

fn check_shapes(st: &HybridState, mesh: &PhaseMesh) -> Result<()> {
    Error::check_len(mesh.nx(), st.macro_state.rho.len())?;
    Error::check_len(mesh.nx(), st.e_prev.len())?;
    Error::check_len(mesh.nx(), st.labels.cells.len())?;
    Error::check_len(mesh.nx() * mesh.nv(), st.micro.g.len())
}
