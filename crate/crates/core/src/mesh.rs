//! Discretized phase space: a periodic spatial torus times a truncated,
//! tensor-product velocity box.
//!
//! Spatial cells `X_i` have centers `x_i = (i + 1/2) dx`; the interface
//! `x_{i+1/2}` carries index `i` and sits between cells `i` and `i + 1`
//! (periodically). Velocity cells are uniform on `[-v_star, v_star]` in each
//! direction, with midpoint centers placed symmetrically so that every
//! center `v` has a mirror `-v` with a bit-identical Maxwellian weight.
//!
//! Velocity-indexed arrays use the flat layout `j = (jx * nvy + jy) * nvz + jz`,
//! so that all nodes sharing the same `xi = v_x` form one contiguous block of
//! length `nvy * nvz`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stencil::STENCIL_WIDTH;

/// Smallest admissible velocity cell count per direction.
pub const MIN_VELOCITY_CELLS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    pub nx: usize,
    pub x_star: f64,
    pub nvx: usize,
    pub nvy: usize,
    pub nvz: usize,
    pub v_star: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            nx: 32,
            x_star: 2.0 * std::f64::consts::PI,
            nvx: 32,
            nvy: 16,
            nvz: 16,
            v_star: 8.0,
        }
    }
}

impl MeshSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < STENCIL_WIDTH {
            return Err(Error::MeshTooSmall {
                required: STENCIL_WIDTH,
                actual: self.nx,
            });
        }
        for (name, n) in [("nvx", self.nvx), ("nvy", self.nvy), ("nvz", self.nvz)] {
            if n < MIN_VELOCITY_CELLS {
                return Err(Error::InvalidMesh(format!(
                    "{name} = {n} must be at least {MIN_VELOCITY_CELLS}"
                )));
            }
        }
        if !(self.x_star > 0.0 && self.x_star.is_finite()) {
            return Err(Error::InvalidMesh(format!(
                "x_star = {} must be positive",
                self.x_star
            )));
        }
        if !(self.v_star > 0.0 && self.v_star.is_finite()) {
            return Err(Error::InvalidMesh(format!(
                "v_star = {} must be positive",
                self.v_star
            )));
        }
        Ok(())
    }
}

/// Unnormalized Maxwellian `exp(-|v|^2 / 2) / (2 pi)^{3/2}`.
pub fn gaussian(v: [f64; 3]) -> f64 {
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    (-0.5 * v2).exp() / (2.0 * std::f64::consts::PI).powf(1.5)
}

/// Symmetric midpoint centers of `n` uniform cells on `[-v_star, v_star]`.
fn symmetric_centers(n: usize, v_star: f64) -> (Vec<f64>, f64) {
    let dv = 2.0 * v_star / n as f64;
    let mut centers = vec![0.0; n];
    for j in 0..n / 2 {
        let c = -v_star + (j as f64 + 0.5) * dv;
        centers[j] = c;
        centers[n - 1 - j] = -c;
    }
    (centers, dv)
}

#[derive(Clone, Debug)]
pub struct VelocityGrid {
    pub nvx: usize,
    pub nvy: usize,
    pub nvz: usize,
    pub dvx: f64,
    pub dvy: f64,
    pub dvz: f64,
    /// 1D centers per direction.
    pub axis_x: Vec<f64>,
    pub axis_y: Vec<f64>,
    pub axis_z: Vec<f64>,
    /// `xi_j` per node (x component of each center).
    pub xi: Vec<f64>,
    /// Normalized discrete Maxwellian.
    pub maxwellian: Vec<f64>,
    /// `xi_j * M_j`.
    pub xi_maxwellian: Vec<f64>,
    /// Velocity cell volume `dvx * dvy * dvz`.
    pub dv3: f64,
    /// `<M>_Delta`, equal to one up to round-off.
    pub m0: f64,
    /// `<xi^2 M>_Delta`.
    pub m2: f64,
    /// `sqrt(<xi^2 M^2>_Delta)`: L2 norm of `xi M`.
    pub xi_maxwellian_norm: f64,
}

impl VelocityGrid {
    fn new(spec: &MeshSpec) -> Self {
        let (axis_x, dvx) = symmetric_centers(spec.nvx, spec.v_star);
        let (axis_y, dvy) = symmetric_centers(spec.nvy, spec.v_star);
        let (axis_z, dvz) = symmetric_centers(spec.nvz, spec.v_star);
        let dv3 = dvx * dvy * dvz;

        let n = spec.nvx * spec.nvy * spec.nvz;
        let mut xi = Vec::with_capacity(n);
        let mut raw = Vec::with_capacity(n);
        for &vx in &axis_x {
            for &vy in &axis_y {
                for &vz in &axis_z {
                    xi.push(vx);
                    raw.push(gaussian([vx, vy, vz]));
                }
            }
        }

        let mut grid = Self {
            nvx: spec.nvx,
            nvy: spec.nvy,
            nvz: spec.nvz,
            dvx,
            dvy,
            dvz,
            axis_x,
            axis_y,
            axis_z,
            xi,
            maxwellian: raw,
            xi_maxwellian: Vec::new(),
            dv3,
            m0: 0.0,
            m2: 0.0,
            xi_maxwellian_norm: 0.0,
        };

        let raw_mass = grid.bracket(&grid.maxwellian);
        for m in &mut grid.maxwellian {
            *m /= raw_mass;
        }
        grid.xi_maxwellian = grid.xi.iter().zip(&grid.maxwellian).map(|(x, m)| x * m).collect();
        grid.m0 = grid.bracket(&grid.maxwellian);
        grid.m2 = grid.bracket_xi(&grid.xi_maxwellian);
        let sq: Vec<f64> = grid.xi_maxwellian.iter().map(|q| q * q).collect();
        grid.xi_maxwellian_norm = grid.bracket(&sq).sqrt();
        grid
    }

    /// Number of velocity nodes.
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Length of one constant-`xi` block.
    pub fn block(&self) -> usize {
        self.nvy * self.nvz
    }

    pub fn center(&self, j: usize) -> [f64; 3] {
        let jz = j % self.nvz;
        let jy = (j / self.nvz) % self.nvy;
        let jx = j / (self.nvy * self.nvz);
        [self.axis_x[jx], self.axis_y[jy], self.axis_z[jz]]
    }

    /// Discrete velocity integral `sum_j q_j dv3`.
    ///
    /// Mirror nodes `xi` and `-xi` are added pairwise first, so any integrand
    /// of the form `xi * even(v)` sums to exactly zero.
    pub fn bracket(&self, q: &[f64]) -> f64 {
        debug_assert_eq!(q.len(), self.len());
        let b = self.block();
        let half = self.nvx / 2;
        let mut s = 0.0;
        for jx in 0..half {
            let lo = &q[jx * b..(jx + 1) * b];
            let hi = &q[(self.nvx - 1 - jx) * b..(self.nvx - jx) * b];
            for (a, c) in lo.iter().zip(hi) {
                s += a + c;
            }
        }
        if self.nvx % 2 == 1 {
            s += q[half * b..(half + 1) * b].iter().sum::<f64>();
        }
        s * self.dv3
    }

    /// Checked variant of [`bracket`](Self::bracket).
    pub fn try_bracket(&self, q: &[f64]) -> Result<f64> {
        Error::check_len(self.len(), q.len())?;
        Ok(self.bracket(q))
    }

    /// First `xi` moment `sum_j xi_j q_j dv3`, with the same mirror pairing.
    pub fn bracket_xi(&self, q: &[f64]) -> f64 {
        debug_assert_eq!(q.len(), self.len());
        let b = self.block();
        let mut s = 0.0;
        for jx in 0..self.nvx / 2 {
            let xi = self.axis_x[jx];
            let lo = &q[jx * b..(jx + 1) * b];
            let hi = &q[(self.nvx - 1 - jx) * b..(self.nvx - jx) * b];
            let mut d = 0.0;
            for (a, c) in lo.iter().zip(hi) {
                d += a - c;
            }
            s += xi * d;
        }
        s * self.dv3
    }

    /// Removes the discrete mass of `q` along `M`, in two passes so that the
    /// remaining mass sits at the round-off floor of the bracket itself.
    pub fn project_mass_free(&self, q: &mut [f64]) {
        for _ in 0..2 {
            let mass = self.bracket(q) / self.m0;
            if mass == 0.0 {
                break;
            }
            for (v, m) in q.iter_mut().zip(&self.maxwellian) {
                *v -= mass * m;
            }
        }
    }

    /// Squared discrete L2 norm `sum_j q_j^2 dv3`.
    pub fn bracket_sq(&self, q: &[f64]) -> f64 {
        let b = self.block();
        let mut s = 0.0;
        for jx in 0..self.nvx {
            for v in &q[jx * b..(jx + 1) * b] {
                s += v * v;
            }
        }
        s * self.dv3
    }
}

/// Phase-space mesh shared read-only by every solver.
#[derive(Clone, Debug)]
pub struct PhaseMesh {
    pub spec: MeshSpec,
    pub dx: f64,
    pub velocity: VelocityGrid,
}

impl PhaseMesh {
    pub fn new(spec: MeshSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            dx: spec.x_star / spec.nx as f64,
            velocity: VelocityGrid::new(&spec),
            spec,
        })
    }

    pub fn nx(&self) -> usize {
        self.spec.nx
    }

    /// Number of velocity nodes per interface.
    pub fn nv(&self) -> usize {
        self.velocity.len()
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    /// Position of interface `x_{i+1/2}`.
    pub fn interface(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.dx
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.nx()).map(|i| self.cell_center(i)).collect()
    }

    pub fn interfaces(&self) -> Vec<f64> {
        (0..self.nx()).map(|i| self.interface(i)).collect()
    }

    /// Total mass `sum_i rho_i dx`.
    pub fn mass(&self, rho: &[f64]) -> f64 {
        rho.iter().sum::<f64>() * self.dx
    }

    #[inline]
    pub(crate) fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.nx() - 1
        } else {
            i - 1
        }
    }

    #[inline]
    pub(crate) fn next(&self, i: usize) -> usize {
        if i + 1 == self.nx() {
            0
        } else {
            i + 1
        }
    }
}

/// Build a mesh from its spec.
pub fn build_mesh(spec: MeshSpec) -> Result<PhaseMesh> {
    PhaseMesh::new(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MeshSpec {
        MeshSpec {
            nx: 8,
            nvx: 8,
            nvy: 4,
            nvz: 4,
            ..MeshSpec::default()
        }
    }

    #[test]
    fn default_grid_spacings() {
        let mesh = build_mesh(MeshSpec::default()).unwrap();
        assert_eq!(mesh.dx, 2.0 * std::f64::consts::PI / 32.0);
        assert_eq!(mesh.velocity.dvx, 0.5);
        assert_eq!(mesh.velocity.dvy, 1.0);
        assert_eq!(mesh.nv(), 32 * 16 * 16);
    }

    #[test]
    fn gaussian_at_origin() {
        assert!((gaussian([0.0; 3]) - 0.063_493_635_934_240_97).abs() < 1e-15);
    }

    #[test]
    fn centers_are_mirrored_bitwise() {
        let mesh = build_mesh(MeshSpec::default()).unwrap();
        let vg = &mesh.velocity;
        for (a, b) in vg.axis_x.iter().zip(vg.axis_x.iter().rev()) {
            assert_eq!(*a, -*b);
        }
        let b = vg.block();
        for jx in 0..vg.nvx {
            let mirror = vg.nvx - 1 - jx;
            assert_eq!(
                &vg.maxwellian[jx * b..(jx + 1) * b],
                &vg.maxwellian[mirror * b..(mirror + 1) * b]
            );
        }
    }

    #[test]
    fn normalized_maxwellian_brackets() {
        let mesh = build_mesh(small()).unwrap();
        let vg = &mesh.velocity;
        assert!((vg.bracket(&vg.maxwellian) - 1.0).abs() < 1e-15);
        assert_eq!(vg.bracket(&vg.xi_maxwellian), 0.0);
        let direct: f64 = vg
            .xi
            .iter()
            .zip(&vg.maxwellian)
            .map(|(x, m)| x * x * m * vg.dv3)
            .sum();
        assert!((vg.m2 - direct).abs() < 1e-14);
        assert!(vg.maxwellian.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn odd_counts_keep_a_zero_center() {
        let mesh = build_mesh(MeshSpec { nvx: 9, ..small() }).unwrap();
        let vg = &mesh.velocity;
        assert_eq!(vg.axis_x[4], 0.0);
        assert_eq!(vg.bracket(&vg.xi_maxwellian), 0.0);
        assert!((vg.bracket(&vg.maxwellian) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(matches!(
            build_mesh(MeshSpec { nx: 6, ..small() }),
            Err(Error::MeshTooSmall { .. })
        ));
        assert!(build_mesh(MeshSpec { nvy: 3, ..small() }).is_err());
        assert!(build_mesh(MeshSpec {
            v_star: 0.0,
            ..small()
        })
        .is_err());
        assert!(build_mesh(MeshSpec {
            x_star: -1.0,
            ..small()
        })
        .is_err());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mesh = build_mesh(small()).unwrap();
        assert!(matches!(
            mesh.velocity.try_bracket(&[1.0; 3]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_mesh(MeshSpec::default()).unwrap();
        let b = build_mesh(MeshSpec::default()).unwrap();
        assert_eq!(a.velocity.maxwellian, b.velocity.maxwellian);
        assert_eq!(a.velocity.m2.to_bits(), b.velocity.m2.to_bits());
    }
}
