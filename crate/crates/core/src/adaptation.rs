//! Kinetic/fluid coupling indicators and the cell labels they drive.
//!
//! A cell may use the fluid description when the remainder of the
//! higher-order macroscopic model is small, or when the local perturbation
//! `g` is small. Interfaces inherit the kinetic label from either neighbour.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluid::fluid_flux_into;
use crate::mesh::PhaseMesh;
use crate::state::MicroState;
use crate::stencil::{Stencil7, STENCIL_WIDTH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Kinetic,
    Fluid,
}

/// Cell labels and the interface labels derived from them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainLabels {
    pub cells: Vec<Label>,
    /// Label of interface `i + 1/2`, kinetic iff cell `i` or `i + 1` is.
    pub interfaces: Vec<Label>,
}

impl DomainLabels {
    pub fn uniform(nx: usize, label: Label) -> Self {
        Self {
            cells: vec![label; nx],
            interfaces: vec![label; nx],
        }
    }

    pub fn from_cells(cells: Vec<Label>) -> Self {
        let n = cells.len();
        let interfaces = (0..n)
            .map(|i| {
                if cells[i] == Label::Kinetic || cells[(i + 1) % n] == Label::Kinetic {
                    Label::Kinetic
                } else {
                    Label::Fluid
                }
            })
            .collect();
        Self { cells, interfaces }
    }

    pub fn kinetic_cells(&self) -> usize {
        self.cells.iter().filter(|l| **l == Label::Kinetic).count()
    }

    pub fn kinetic_fraction(&self) -> f64 {
        self.kinetic_cells() as f64 / self.cells.len() as f64
    }

    pub fn is_kinetic_cell(&self, i: usize) -> bool {
        self.cells[i] == Label::Kinetic
    }

    pub fn is_kinetic_interface(&self, i: usize) -> bool {
        self.interfaces[i] == Label::Kinetic
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub delta0: f64,
    pub eta0: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            delta0: 1e-5,
            eta0: 1e-5,
        }
    }
}

impl Thresholds {
    pub fn new(delta0: f64, eta0: f64) -> Result<Self> {
        let th = Self { delta0, eta0 };
        th.validate()?;
        Ok(th)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(Error::invalid("delta0", "must be positive and finite"));
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(Error::invalid("eta0", "must be positive and finite"));
        }
        Ok(())
    }
}

/// How the two fluid conditions are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    /// Either small indicator admits the fluid description.
    #[default]
    Or,
    /// Both indicators must be small.
    And,
}

/// Quantity compared against `delta0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemainderScale {
    /// `|R|`
    #[default]
    Raw,
    /// `|eps^2 R|`
    EpsSquared,
}

/// Complete label-update rule.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LabelRule {
    pub thresholds: Thresholds,
    pub combine: Combine,
    pub scale: RemainderScale,
}

/// Cell-centered remainder of the higher-order macroscopic model,
///
/// ```text
/// R = -J''' + E J'' + (2 rho - 3 rho_bar) J' + 2 J rho' - rho' dE/dt
/// ```
///
/// with `J` and `E` averaged from interfaces to cell centers and `dE/dt`
/// the backward difference against `e_prev` (zero when `dt == 0`).
pub fn remainder_indicator(
    rho: &[f64],
    e: &[f64],
    e_prev: &[f64],
    dt: f64,
    rho_bar: f64,
    mesh: &PhaseMesh,
) -> Result<Vec<f64>> {
    let n = mesh.nx();
    if n < STENCIL_WIDTH {
        return Err(Error::MeshTooSmall {
            required: STENCIL_WIDTH,
            actual: n,
        });
    }
    Error::check_len(n, rho.len())?;
    Error::check_len(n, e.len())?;
    Error::check_len(n, e_prev.len())?;

    let mut flux = vec![0.0; n];
    fluid_flux_into(rho, e, mesh, &mut flux);
    let to_center = |a: &[f64], i: usize| 0.5 * (a[mesh.prev(i)] + a[i]);
    let jc: Vec<f64> = (0..n).map(|i| to_center(&flux, i)).collect();

    let d1 = Stencil7::new(1, mesh.dx)?;
    let d2 = Stencil7::new(2, mesh.dx)?;
    let d3 = Stencil7::new(3, mesh.dx)?;

    Ok((0..n)
        .map(|i| {
            let ec = to_center(e, i);
            let dtec = if dt > 0.0 {
                0.5 * ((e[mesh.prev(i)] - e_prev[mesh.prev(i)]) + (e[i] - e_prev[i])) / dt
            } else {
                0.0
            };
            let j1 = d1.apply_periodic(&jc, i);
            let j2 = d2.apply_periodic(&jc, i);
            let j3 = d3.apply_periodic(&jc, i);
            let r1 = d1.apply_periodic(rho, i);
            -j3 + ec * j2 + (2.0 * rho[i] - 3.0 * rho_bar) * j1 + 2.0 * jc[i] * r1 - r1 * dtec
        })
        .collect())
}

/// Per-cell L2 norm of `g`, averaging the squared norms of the two bounding
/// interfaces.
pub fn perturbation_indicator(g: &MicroState, mesh: &PhaseMesh) -> Result<Vec<f64>> {
    Error::check_len(mesh.nx() * mesh.nv(), g.g.len())?;
    let sq: Vec<f64> = (0..mesh.nx())
        .map(|i| mesh.velocity.bracket_sq(g.interface(i)))
        .collect();
    Ok(cell_norms(&sq, mesh))
}

/// As [`perturbation_indicator`], but interfaces that are currently fluid,
/// whose stored `g` is not maintained, contribute the first-order
/// equilibrium perturbation `-eps xi M J` instead.
pub fn hybrid_perturbation_indicator(
    g: &MicroState,
    labels: &DomainLabels,
    flux: &[f64],
    eps: f64,
    mesh: &PhaseMesh,
) -> Result<Vec<f64>> {
    Error::check_len(mesh.nx() * mesh.nv(), g.g.len())?;
    Error::check_len(mesh.nx(), flux.len())?;
    let norm = mesh.velocity.xi_maxwellian_norm;
    let sq: Vec<f64> = (0..mesh.nx())
        .map(|i| {
            if labels.is_kinetic_interface(i) {
                mesh.velocity.bracket_sq(g.interface(i))
            } else {
                let a = eps * flux[i] * norm;
                a * a
            }
        })
        .collect();
    Ok(cell_norms(&sq, mesh))
}

fn cell_norms(interface_sq: &[f64], mesh: &PhaseMesh) -> Vec<f64> {
    (0..mesh.nx())
        .map(|i| (0.5 * (interface_sq[mesh.prev(i)] + interface_sq[i])).sqrt())
        .collect()
}

/// Default rule: cell `i` is fluid iff `|R_i| < delta0` or `gnorm_i < eta0`.
pub fn update_labels(r: &[f64], gnorm: &[f64], th: &Thresholds) -> DomainLabels {
    update_labels_with(
        r,
        gnorm,
        &LabelRule {
            thresholds: *th,
            ..LabelRule::default()
        },
        1.0,
    )
}

pub fn update_labels_with(r: &[f64], gnorm: &[f64], rule: &LabelRule, eps: f64) -> DomainLabels {
    debug_assert_eq!(r.len(), gnorm.len());
    let scale = match rule.scale {
        RemainderScale::Raw => 1.0,
        RemainderScale::EpsSquared => eps * eps,
    };
    let cells = r
        .iter()
        .zip(gnorm)
        .map(|(ri, gi)| {
            let small_r = (scale * ri).abs() < rule.thresholds.delta0;
            let small_g = *gi < rule.thresholds.eta0;
            let fluid = match rule.combine {
                Combine::Or => small_r || small_g,
                Combine::And => small_r && small_g,
            };
            if fluid {
                Label::Fluid
            } else {
                Label::Kinetic
            }
        })
        .collect();
    DomainLabels::from_cells(cells)
}
