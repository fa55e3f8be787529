//! Chapman-Enskog lifting: reconstruction of an interface perturbation `g`
//! from a density.
//!
//! With `J = d_x rho - E rho`, the first two terms of the expansion are
//!
//! ```text
//! h1 = -xi M J
//! h2 = (xi^2 - 1) M (d_x J - E J)
//! ```
//!
//! and the lift of order `L` is `g = eps h1 (+ eps^2 h2)`, projected onto
//! zero discrete mass at every interface.

use serde::{Deserialize, Serialize};

use crate::adaptation::remainder_indicator;
use crate::error::{Error, Result};
use crate::fluid::fluid_flux_into;
use crate::mesh::PhaseMesh;
use crate::state::MicroState;
use crate::stencil::{Stencil7, STENCIL_WIDTH};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum LiftOrder {
    One,
    #[default]
    Two,
}

impl LiftOrder {
    pub fn from_int(l: u32) -> Result<Self> {
        match l {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            _ => Err(Error::invalid("lifting.order", format!("{l} is not 1 or 2"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Self::One => 1,
            Self::Two => 2,
        }
    }
}

impl TryFrom<u32> for LiftOrder {
    type Error = Error;

    fn try_from(l: u32) -> Result<Self> {
        Self::from_int(l)
    }
}

impl From<LiftOrder> for u32 {
    fn from(l: LiftOrder) -> u32 {
        l.as_int()
    }
}

/// How `d_t rho` is eliminated from the second-order term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeElimination {
    /// `d_t rho = d_x J`
    #[default]
    Leading,
    /// `d_t rho = d_x J - eps^2 R`, with `R` the cell remainder at frozen field.
    HigherOrder,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LiftOptions {
    pub order: LiftOrder,
    pub time_elim: TimeElimination,
}

/// Interface quantities the lift is assembled from.
#[derive(Clone, Debug)]
pub struct LiftWorkspace {
    pub(crate) flux: Vec<f64>,
    pub(crate) dflux: Vec<f64>,
    pub(crate) remainder: Vec<f64>,
}

impl LiftWorkspace {
    pub fn new(mesh: &PhaseMesh) -> Self {
        Self {
            flux: vec![0.0; mesh.nx()],
            dflux: vec![0.0; mesh.nx()],
            remainder: vec![0.0; mesh.nx()],
        }
    }

    /// Fills `J` and `d_x J` at every interface from the macroscopic state.
    pub(crate) fn prepare(
        &mut self,
        rho: &[f64],
        e: &[f64],
        rho_bar: f64,
        opts: &LiftOptions,
        mesh: &PhaseMesh,
    ) -> Result<()> {
        let n = mesh.nx();
        if n < STENCIL_WIDTH {
            return Err(Error::MeshTooSmall {
                required: STENCIL_WIDTH,
                actual: n,
            });
        }
        Error::check_len(n, rho.len())?;
        Error::check_len(n, e.len())?;
        fluid_flux_into(rho, e, mesh, &mut self.flux);
        // d_x J at cell centers from center-averaged J, then back to interfaces
        let d1 = Stencil7::new(1, mesh.dx)?;
        for i in 0..n {
            self.remainder[i] = 0.5 * (self.flux[mesh.prev(i)] + self.flux[i]);
        }
        for i in 0..n {
            self.dflux[i] = d1.apply_periodic(&self.remainder, i);
        }
        for i in 0..n {
            self.remainder[i] = 0.5 * (self.dflux[i] + self.dflux[mesh.next(i)]);
        }
        std::mem::swap(&mut self.dflux, &mut self.remainder);
        if opts.order == LiftOrder::Two && opts.time_elim == TimeElimination::HigherOrder {
            let r = remainder_indicator(rho, e, e, 0.0, rho_bar, mesh)?;
            for i in 0..n {
                self.remainder[i] = 0.5 * (r[i] + r[mesh.next(i)]);
            }
        }
        Ok(())
    }

    /// Writes the lift of interface `i` into `out`. [`prepare`](Self::prepare)
    /// must have been called for the current state.
    pub(crate) fn fill_interface(
        &self,
        i: usize,
        e_i: f64,
        eps: f64,
        opts: &LiftOptions,
        mesh: &PhaseMesh,
        out: &mut [f64],
    ) {
        let vg = &mesh.velocity;
        let j = self.flux[i];
        let first = -eps * j;
        for (o, xm) in out.iter_mut().zip(&vg.xi_maxwellian) {
            *o = first * xm;
        }
        if opts.order == LiftOrder::Two {
            let second = eps * eps * (self.dflux[i] - e_i * j);
            for ((o, x), m) in out.iter_mut().zip(&vg.xi).zip(&vg.maxwellian) {
                *o += second * (x * x - 1.0) * m;
            }
            if opts.time_elim == TimeElimination::HigherOrder {
                let c = eps.powi(4) * self.remainder[i];
                for (o, m) in out.iter_mut().zip(&vg.maxwellian) {
                    *o += c * m;
                }
            }
        }
        vg.project_mass_free(out);
    }
}

/// Lift of `(rho, E)` at every interface.
pub fn lift(
    rho: &[f64],
    e: &[f64],
    rho_bar: f64,
    eps: f64,
    opts: &LiftOptions,
    mesh: &PhaseMesh,
) -> Result<MicroState> {
    let mut out = MicroState::zeros(mesh);
    let mut ws = LiftWorkspace::new(mesh);
    lift_into(rho, e, rho_bar, eps, opts, mesh, &mut ws, &mut out)?;
    Ok(out)
}

/// As [`lift`], reusing caller-owned buffers.
#[allow(clippy::too_many_arguments)]
pub fn lift_into(
    rho: &[f64],
    e: &[f64],
    rho_bar: f64,
    eps: f64,
    opts: &LiftOptions,
    mesh: &PhaseMesh,
    ws: &mut LiftWorkspace,
    out: &mut MicroState,
) -> Result<()> {
    Error::check_len(mesh.nx() * mesh.nv(), out.g.len())?;
    ws.prepare(rho, e, rho_bar, opts, mesh)?;
    for i in 0..mesh.nx() {
        ws.fill_interface(i, e[i], eps, opts, mesh, out.interface_mut(i));
    }
    Ok(())
}

/// Largest interface mass of the unprojected lift; vanishes as the velocity
/// grid is refined.
pub fn projection_defect(
    rho: &[f64],
    e: &[f64],
    rho_bar: f64,
    eps: f64,
    opts: &LiftOptions,
    mesh: &PhaseMesh,
) -> Result<f64> {
    let mut ws = LiftWorkspace::new(mesh);
    ws.prepare(rho, e, rho_bar, opts, mesh)?;
    let vg = &mesh.velocity;
    let mut worst = 0.0f64;
    for i in 0..mesh.nx() {
        let j = ws.flux[i];
        let mut h: Vec<f64> = vg.xi_maxwellian.iter().map(|xm| -eps * j * xm).collect();
        if opts.order == LiftOrder::Two {
            let second = eps * eps * (ws.dflux[i] - e[i] * j);
            for ((o, x), m) in h.iter_mut().zip(&vg.xi).zip(&vg.maxwellian) {
                *o += second * (x * x - 1.0) * m;
            }
        }
        worst = worst.max(vg.bracket(&h).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::initial_state;
    use crate::kinetic::{kinetic_step, KineticStepParams};
    use crate::mesh::{build_mesh, MeshSpec};
    use crate::state::MacroState;

    fn mesh(nvx: usize) -> PhaseMesh {
        build_mesh(MeshSpec {
            nvx,
            nvy: 8,
            nvz: 8,
            ..MeshSpec::default()
        })
        .unwrap()
    }

    fn cosine(m: &PhaseMesh) -> MacroState {
        let rho: Vec<f64> = m.cell_centers().iter().map(|x| 1.0 + 0.9 * x.cos()).collect();
        MacroState::from_density(0.0, rho, 1.0, m).unwrap()
    }

    const L1: LiftOptions = LiftOptions {
        order: LiftOrder::One,
        time_elim: TimeElimination::Leading,
    };

    #[test]
    fn equilibrium_lifts_to_zero() {
        let m = mesh(16);
        for opts in [L1, LiftOptions::default()] {
            let g = lift(&[2.0; 32], &[0.0; 32], 2.0, 0.3, &opts, &m).unwrap();
            assert!(g.g.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn lifted_perturbation_is_mass_free() {
        let m = mesh(16);
        let s = cosine(&m);
        for eps in [1.0, 0.5, 1e-2, 1e-4] {
            for time_elim in [TimeElimination::Leading, TimeElimination::HigherOrder] {
                let opts = LiftOptions {
                    order: LiftOrder::Two,
                    time_elim,
                };
                let g = lift(&s.rho, &s.e, s.rho_bar, eps, &opts, &m).unwrap();
                for mass in g.interface_masses(&m) {
                    assert!(mass.abs() <= 1e-15, "eps {eps}: {mass:e}");
                }
            }
        }
    }

    #[test]
    fn first_order_matches_closed_form() {
        let m = mesh(16);
        // E = 0 frozen
        let rho: Vec<f64> = m.cell_centers().iter().map(|x| 1.0 + 0.9 * x.cos()).collect();
        let e = vec![0.0; 32];
        let g = lift(&rho, &e, 1.0, 0.5, &L1, &m).unwrap();
        let vg = &m.velocity;
        let gauss = |j: usize| {
            let [vx, vy, vz] = vg.center(j);
            (-0.5 * (vx * vx + vy * vy + vz * vz)).exp()
        };
        let norm: f64 = (0..vg.len()).map(gauss).sum::<f64>() * vg.dv3;
        for i in 0..32 {
            let slope = (rho[(i + 1) % 32] - rho[i]) / m.dx;
            for j in 0..vg.len() {
                let expect = -0.5 * vg.center(j)[0] * gauss(j) / norm * slope;
                let got = g.g[i * vg.len() + j];
                assert!((got - expect).abs() <= 1e-13, "{i},{j}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn first_order_is_linear_in_eps() {
        let m = mesh(16);
        let s = cosine(&m);
        let a = lift(&s.rho, &s.e, 1.0, 0.5, &L1, &m).unwrap();
        let b = lift(&s.rho, &s.e, 1.0, 0.05, &L1, &m).unwrap();
        for (x, y) in a.g.iter().zip(&b.g) {
            assert!((x - 10.0 * y).abs() <= 4.0 * f64::EPSILON * x.abs());
        }
    }

    #[test]
    fn time_elimination_variants_agree_after_projection() {
        let m = mesh(16);
        let s = cosine(&m);
        let a = lift(&s.rho, &s.e, 1.0, 0.5, &LiftOptions::default(), &m).unwrap();
        let hi = LiftOptions {
            order: LiftOrder::Two,
            time_elim: TimeElimination::HigherOrder,
        };
        let b = lift(&s.rho, &s.e, 1.0, 0.5, &hi, &m).unwrap();
        for (x, y) in a.g.iter().zip(&b.g) {
            assert!((x - y).abs() <= 1e-14);
        }
    }

    #[test]
    fn defect_shrinks_with_velocity_refinement() {
        let mut defects = Vec::new();
        for nvx in [16, 32, 64] {
            let m = mesh(nvx);
            let s = cosine(&m);
            defects.push(projection_defect(&s.rho, &s.e, 1.0, 0.5, &LiftOptions::default(), &m).unwrap());
        }
        // spectral decay down to the round-off floor of the bracket
        assert!(defects[0] < 1e-6, "{defects:?}");
        assert!(
            defects[1] < 1e-3 * defects[0] && defects[2] < 1e-12,
            "{defects:?}"
        );
    }

    #[test]
    fn lift_prepares_the_kinetic_solver() {
        let m = build_mesh(MeshSpec::default()).unwrap();
        let (s, _) = initial_state(&m).unwrap();
        let eps = 1e-2;
        let p = KineticStepParams::stable(eps, s.max_abs_field(), &m);
        let lifted = lift(&s.rho, &s.e, s.rho_bar, eps, &LiftOptions::default(), &m).unwrap();
        let zero = MicroState::zeros(&m);
        let (_, a) = kinetic_step(&s, &lifted, &p, &m).unwrap();
        let (_, b) = kinetic_step(&s, &zero, &p, &m).unwrap();
        let ratio = a.l2_distance(&lifted, &m) / b.l2_distance(&zero, &m);
        assert!(ratio < 1.0, "{ratio}");
    }

    #[test]
    fn small_mesh_is_rejected() {
        let m = build_mesh(MeshSpec {
            nx: 7,
            nvx: 4,
            nvy: 4,
            nvz: 4,
            ..MeshSpec::default()
        })
        .unwrap();
        assert!(lift(&[1.0; 7], &[0.0; 7], 1.0, 0.1, &L1, &m).is_ok());
        assert!(LiftOrder::from_int(3).is_err());
    }
}
