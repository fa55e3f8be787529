//! Macroscopic and microscopic unknowns of the micro-macro decomposition
//! `f = rho M + g`.

use crate::error::{Error, Result};
use crate::mesh::PhaseMesh;

/// Cell densities and interface electric field at one time level.
///
/// `rho_bar` is the background density that neutralizes the torus. It is fixed
/// once from the initial data and travels with the state unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroState {
    pub t: f64,
    pub rho: Vec<f64>,
    /// `E_{i+1/2}` at interface `i`.
    pub e: Vec<f64>,
    pub rho_bar: f64,
}

impl MacroState {
    /// Builds a state whose field is solved from `rho`.
    pub fn from_density(t: f64, rho: Vec<f64>, rho_bar: f64, mesh: &PhaseMesh) -> Result<Self> {
        Error::check_len(mesh.nx(), rho.len())?;
        let e = crate::poisson::solve_field(&rho, rho_bar, mesh)?;
        Ok(Self { t, rho, e, rho_bar })
    }

    pub fn mass(&self, mesh: &PhaseMesh) -> f64 {
        mesh.mass(&self.rho)
    }

    pub fn is_finite(&self) -> bool {
        self.rho.iter().chain(&self.e).all(|v| v.is_finite())
    }

    pub fn max_abs_field(&self) -> f64 {
        self.e.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Interface-staggered perturbation `g_{i+1/2, j}`, stored interface-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroState {
    pub g: Vec<f64>,
    nv: usize,
}

impl MicroState {
    pub fn zeros(mesh: &PhaseMesh) -> Self {
        Self {
            g: vec![0.0; mesh.nx() * mesh.nv()],
            nv: mesh.nv(),
        }
    }

    pub fn from_vec(g: Vec<f64>, mesh: &PhaseMesh) -> Result<Self> {
        Error::check_len(mesh.nx() * mesh.nv(), g.len())?;
        Ok(Self { g, nv: mesh.nv() })
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn interface(&self, i: usize) -> &[f64] {
        &self.g[i * self.nv..(i + 1) * self.nv]
    }

    pub fn interface_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.g[i * self.nv..(i + 1) * self.nv]
    }

    /// Moves the values out, leaving an empty perturbation behind.
    pub(crate) fn take(&mut self) -> MicroState {
        MicroState {
            g: std::mem::take(&mut self.g),
            nv: self.nv,
        }
    }

    pub fn fill(&mut self, v: f64) {
        self.g.iter_mut().for_each(|x| *x = v);
    }

    /// Discrete mass `<g_{i+1/2}>_Delta` of every interface.
    pub fn interface_masses(&self, mesh: &PhaseMesh) -> Vec<f64> {
        (0..mesh.nx())
            .map(|i| mesh.velocity.bracket(self.interface(i)))
            .collect()
    }

    /// Flux moments `<xi g_{i+1/2}>_Delta` of every interface.
    pub fn flux_moments(&self, mesh: &PhaseMesh) -> Vec<f64> {
        (0..mesh.nx())
            .map(|i| mesh.velocity.bracket_xi(self.interface(i)))
            .collect()
    }

    /// L2 distance to another perturbation over the whole phase space.
    pub fn l2_distance(&self, other: &MicroState, mesh: &PhaseMesh) -> f64 {
        let s: f64 = self.g.iter().zip(&other.g).map(|(a, b)| (a - b) * (a - b)).sum();
        (s * mesh.dx * mesh.velocity.dv3).sqrt()
    }
}
