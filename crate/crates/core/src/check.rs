//! Fast invariant suite on a reduced mesh, run by `vpbgk check`.

use std::time::Instant;

use crate::error::Result;
use crate::fluid::{fluid_step, FluidStepParams};
use crate::hybrid::{hybrid_step, HybridParams, HybridState, PartitionMode};
use crate::init::initial_state;
use crate::kinetic::{kinetic_propagate, kinetic_step, KineticStepParams};
use crate::lifting::{lift, LiftOptions};
use crate::mesh::{build_mesh, MeshSpec, PhaseMesh};
use crate::parareal::{
    coarse_sweep, parareal_iterate, predict_cost, serial_fine_reference, PararealConfig, PerfModel,
};
use crate::poisson::{gauss_residual, solve_field};
use crate::state::{MacroState, MicroState};
use crate::stencil::Stencil7;
use crate::timestep::kinetic_bound;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn(&PhaseMesh) -> Result<(bool, String)>;

const CHECKS: [(&str, CheckFn); 10] = [
    ("stencil_monomials", stencil_monomials),
    ("poisson_residual", poisson_residual),
    ("initial_perturbation_mass_free", initial_mass_free),
    ("lift_mass_free", lift_mass_free),
    ("hybrid_all_kinetic_is_kinetic", all_kinetic),
    ("hybrid_all_fluid_is_fluid", all_fluid),
    ("kinetic_mass", kinetic_mass),
    ("asymptotic_preserving", asymptotic_preserving),
    ("parareal_prefix_and_mass", parareal_prefix),
    ("cost_model_example", cost_example),
];

/// Mesh used by the suite.
pub fn check_mesh() -> Result<PhaseMesh> {
    build_mesh(MeshSpec {
        nx: 16,
        nvx: 8,
        nvy: 4,
        nvz: 4,
        ..MeshSpec::default()
    })
}

/// Runs every check; a failing computation counts as a failed check.
pub fn run_checks() -> Result<Vec<CheckOutcome>> {
    let mesh = check_mesh()?;
    Ok(CHECKS
        .iter()
        .map(|(name, f)| {
            let t0 = Instant::now();
            let (passed, detail) = f(&mesh).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome {
                name,
                passed,
                detail,
                seconds: t0.elapsed().as_secs_f64(),
            }
        })
        .collect())
}

fn stencil_monomials(_: &PhaseMesh) -> Result<(bool, String)> {
    let dx = 0.125;
    let x: Vec<f64> = (0..15).map(|i| 0.5 + i as f64 * dx).collect();
    let mut worst = 0.0f64;
    for order in 1..=4u32 {
        let s = Stencil7::new(order, dx)?;
        for q in order as i32..=6 {
            let v: Vec<f64> = x.iter().map(|t| t.powi(q)).collect();
            let falling: f64 = (0..order as i32).map(|m| (q - m) as f64).product();
            for i in 3..x.len() - 3 {
                let exact = falling * x[i].powi(q - order as i32);
                worst = worst.max((s.apply_interior(&v, i) - exact).abs() / exact.abs());
            }
        }
    }
    Ok((worst <= 1e-9, format!("max relative error {worst:.2e}")))
}

fn poisson_residual(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (mut res, mut gauge) = (0.0f64, 0.0f64);
    for k in 1..=20 {
        let rho: Vec<f64> = mesh
            .cell_centers()
            .iter()
            .map(|x| 2.0 + (k as f64 * x).cos() + 0.5 * (3.0 * x + k as f64).sin())
            .collect();
        let rho_bar = rho.iter().sum::<f64>() / rho.len() as f64;
        let e = solve_field(&rho, rho_bar, mesh)?;
        res = res.max(gauss_residual(&rho, &e, rho_bar, mesh));
        gauge = gauge.max(e.iter().sum::<f64>().abs() / e.len() as f64);
    }
    Ok((
        res <= 1e-14 && gauge <= 1e-14,
        format!("residual {res:.2e}, mean field {gauge:.2e}"),
    ))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn initial_mass_free(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (_, g0) = initial_state(mesh)?;
    let m = max_abs(&g0.interface_masses(mesh));
    Ok((m <= 1e-14, format!("max interface mass {m:.2e}")))
}

fn lift_mass_free(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (s0, _) = initial_state(mesh)?;
    let mut worst = 0.0f64;
    for eps in [1.0, 1e-2, 1e-4] {
        let g = lift(&s0.rho, &s0.e, s0.rho_bar, eps, &LiftOptions::default(), mesh)?;
        worst = worst.max(max_abs(&g.interface_masses(mesh)));
    }
    Ok((worst <= 1e-15, format!("max interface mass {worst:.2e}")))
}

fn start(mesh: &PhaseMesh, eps: f64) -> Result<(MacroState, MicroState, KineticStepParams)> {
    let (s0, g0) = initial_state(mesh)?;
    let p = KineticStepParams::new(eps, kinetic_bound(mesh, eps, 1.5 * s0.max_abs_field()));
    Ok((s0, g0, p))
}

fn all_kinetic(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (s0, g0, p) = start(mesh, 0.1)?;
    let hp = HybridParams::new(p, PartitionMode::AllKinetic);
    let (mut s, mut g) = (s0.clone(), g0.clone());
    let mut h = HybridState::new(s0, g0);
    for _ in 0..10 {
        (s, g) = kinetic_step(&s, &g, &p, mesh)?;
        h = hybrid_step(&h, &hp, mesh)?;
    }
    let same = h.macro_state.rho == s.rho && h.micro.g == g.g && h.macro_state.e == s.e;
    Ok((same, format!("bitwise equal after 10 steps: {same}")))
}

fn all_fluid(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (s0, g0, p) = start(mesh, 0.1)?;
    let hp = HybridParams::new(p, PartitionMode::AllFluid);
    let fp = FluidStepParams::new(p.dt, mesh);
    let mut s = s0.clone();
    let mut h = HybridState::new(s0, g0);
    for _ in 0..10 {
        s = fluid_step(&s, &fp, mesh)?;
        h = hybrid_step(&h, &hp, mesh)?;
    }
    let same = h.macro_state.rho == s.rho;
    Ok((same, format!("bitwise equal after 10 steps: {same}")))
}

fn kinetic_mass(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (s0, g0, p) = start(mesh, 0.5)?;
    let (s, g) = kinetic_propagate(&s0, &g0, 0.1, &p, mesh)?;
    let drift = ((s.mass(mesh) - s0.mass(mesh)) / s0.mass(mesh)).abs();
    let gm = max_abs(&g.interface_masses(mesh));
    Ok((
        drift <= 1e-13 && gm <= 1e-13,
        format!("mass drift {drift:.2e}, max interface mass {gm:.2e}"),
    ))
}

fn asymptotic_preserving(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (s0, _, p) = start(mesh, 1e-6)?;
    let g = lift(&s0.rho, &s0.e, s0.rho_bar, p.eps, &LiftOptions::default(), mesh)?;
    let (s, _) = kinetic_propagate(&s0, &g, 0.05, &p, mesh)?;
    let f = crate::fluid::fluid_propagate(&s0, 0.05, &FluidStepParams::new(p.dt, mesh), mesh)?;
    let gap = s
        .rho
        .iter()
        .zip(&f.rho)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((
        gap <= 1e-5,
        format!("kinetic vs fluid gap {gap:.2e} at eps = 1e-6"),
    ))
}

fn parareal_prefix(mesh: &PhaseMesh) -> Result<(bool, String)> {
    let (s0, g0, p) = start(mesh, 0.5)?;
    let mut cfg = PararealConfig::new(HybridParams::new(p, PartitionMode::AllKinetic), 0.1, 4);
    cfg.workers = 2;
    let reference = serial_fine_reference(&s0, &g0, &cfg, mesh)?;
    let mut ledger = coarse_sweep(&s0, &cfg, mesh)?;
    let m0 = s0.mass(mesh);
    let (mut prefix, mut drift) = (0.0f64, 0.0f64);
    for k in 1..=cfg.ng {
        parareal_iterate(&mut ledger, &g0, &cfg, mesh)?;
        for n in 0..=k {
            let scale = max_abs(&reference[n]);
            let d = ledger.rows[k][n]
                .iter()
                .zip(&reference[n])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            prefix = prefix.max(d / scale);
        }
        for rho in &ledger.rows[k] {
            drift = drift.max((mesh.mass(rho) - m0).abs() / m0);
        }
    }
    Ok((
        prefix <= 1e-12 && drift <= 1e-12,
        format!("prefix deviation {prefix:.2e}, mass drift {drift:.2e}"),
    ))
}

fn cost_example(_: &PhaseMesh) -> Result<(bool, String)> {
    let c = predict_cost(&PerfModel {
        t_fluid: 1.0,
        t_hmm: 10.0,
        t_lift: 1.0,
        workers: 4,
        ng: 10,
        iterations: 2,
    });
    Ok((c.t_parareal == 81.0, format!("T_parareal = {}", c.t_parareal)))
}
