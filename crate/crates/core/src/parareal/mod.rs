//! Multiscale parareal iteration.
//!
//! The drift-diffusion scheme is the coarse propagator `G`, the hybrid
//! micro-macro scheme the fine propagator `F`. Only densities are corrected;
//! fine solves start from the Chapman-Enskog lift of the corrected density
//! (the first window from the true initial perturbation) and every field is
//! recomputed from its density.
//!
//! ```text
//! rho^{n,k+1} = G(rho^{n-1,k+1}) + F(rho^{n-1,k}) - G(rho^{n-1,k})
//! ```

pub mod cost;
pub mod pool;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::fluid::{fluid_propagate_in_place, FluidStepParams};
use crate::hybrid::{hybrid_propagate_in_place, HybridParams, HybridState, HybridWorkspace};
use crate::lifting::{lift_into, LiftWorkspace};
use crate::mesh::PhaseMesh;
use crate::poisson::solve_field_with_tolerance;
use crate::state::{MacroState, MicroState};

pub use cost::{predict_cost, CostPrediction, PerfModel};
pub use pool::{default_workers, run_indexed};

/// Propagator used for the fine solves. `Fluid` turns `F` into `G` and
/// exists to test the iteration itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FineModel {
    #[default]
    Hybrid,
    Fluid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PararealConfig {
    /// Number of windows.
    pub ng: usize,
    pub t_final: f64,
    pub k_max: usize,
    /// Successive-error tolerance.
    pub tol: f64,
    pub workers: usize,
    /// Fine propagator; its step is shared by the coarse propagator.
    pub fine: HybridParams,
    pub fine_model: FineModel,
}

impl PararealConfig {
    pub fn new(fine: HybridParams, t_final: f64, ng: usize) -> Self {
        Self {
            ng,
            t_final,
            k_max: 50,
            tol: 1e-10,
            workers: default_workers(),
            fine,
            fine_model: FineModel::Hybrid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ng == 0 {
            return Err(Error::invalid("parareal.ng", "must be at least 1"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid("time.t_final", "must be positive and finite"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("parareal.tol", "must be positive"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("parareal.workers", "must be at least 1"));
        }
        if !(self.fine.step.eps > 0.0) {
            return Err(Error::invalid("model.eps", "must be positive"));
        }
        if !(self.fine.step.dt > 0.0) {
            return Err(Error::invalid("time.dt", "must be positive"));
        }
        Ok(())
    }

    /// Window boundary `T^n = n T / Ng`.
    pub fn window_time(&self, n: usize) -> f64 {
        if n == self.ng {
            self.t_final
        } else {
            n as f64 * self.t_final / self.ng as f64
        }
    }

    pub fn window_times(&self) -> Vec<f64> {
        (0..=self.ng).map(|n| self.window_time(n)).collect()
    }

    fn coarse(&self, mesh: &PhaseMesh) -> FluidStepParams {
        FluidStepParams::new(self.fine.step.dt, mesh)
    }

    fn field_tol(&self) -> f64 {
        self.fine.field_tolerance()
    }
}

/// Wall-clock seconds spent in each propagation kind.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimes {
    pub lift: f64,
    pub fine: f64,
    pub coarse: f64,
}

impl PhaseTimes {
    fn max(self, o: PhaseTimes) -> PhaseTimes {
        PhaseTimes {
            lift: self.lift.max(o.lift),
            fine: self.fine.max(o.fine),
            coarse: self.coarse.max(o.coarse),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// Index of the row this iteration produced.
    pub k: usize,
    /// `max_n |rho^{n,k} - rho^{n,k-1}|_inf`
    pub err: f64,
    /// Mean kinetic-cell fraction over the fine solves of this iteration.
    pub kinetic_fraction: f64,
    pub parallel_wall: f64,
    pub correction_wall: f64,
    /// Per-window maxima inside this iteration.
    pub max_times: PhaseTimes,
}

/// Densities at every window boundary for every iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct PararealLedger {
    pub times: Vec<f64>,
    pub rho_bar: f64,
    /// `rows[k][n]`: density at `T^n` after iteration `k`.
    pub rows: Vec<Vec<Vec<f64>>>,
    pub iterations: Vec<IterationRecord>,
    /// Kinetic fraction of the latest fine solve of each window, index `n - 1`.
    pub window_fraction: Vec<f64>,
    pub coarse_wall: f64,
    /// Maxima over every propagation of the run.
    pub max_times: PhaseTimes,
}

impl PararealLedger {
    pub fn latest(&self) -> &[Vec<f64>] {
        self.rows.last().expect("ledger always holds the coarse row")
    }

    /// Number of parareal iterations performed.
    pub fn iteration_count(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn errors(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.err).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIterations,
}

fn macro_at(rho: &[f64], t: f64, rho_bar: f64, tol: f64, mesh: &PhaseMesh) -> Result<MacroState> {
    let e = solve_field_with_tolerance(rho, rho_bar, mesh, tol)?;
    Ok(MacroState {
        t,
        rho: rho.to_vec(),
        e,
        rho_bar,
    })
}

fn coarse_map(
    rho: &[f64],
    n: usize,
    rho_bar: f64,
    cfg: &PararealConfig,
    mesh: &PhaseMesh,
) -> Result<Vec<f64>> {
    let mut s = macro_at(rho, cfg.window_time(n - 1), rho_bar, cfg.field_tol(), mesh)?;
    fluid_propagate_in_place(
        &mut s,
        cfg.window_time(n),
        &cfg.coarse(mesh),
        mesh,
        cfg.field_tol(),
    )?;
    Ok(s.rho)
}

/// Coarse guess: `rho^{n,0} = G(rho^{n-1,0})`.
pub fn coarse_sweep(initial: &MacroState, cfg: &PararealConfig, mesh: &PhaseMesh) -> Result<PararealLedger> {
    cfg.validate()?;
    Error::check_len(mesh.nx(), initial.rho.len())?;
    let mut row = vec![initial.rho.clone()];
    let mut worst = 0.0f64;
    let start = Instant::now();
    for n in 1..=cfg.ng {
        let t0 = Instant::now();
        let next = coarse_map(&row[n - 1], n, initial.rho_bar, cfg, mesh)?;
        worst = worst.max(t0.elapsed().as_secs_f64());
        row.push(next);
    }
    Ok(PararealLedger {
        times: cfg.window_times(),
        rho_bar: initial.rho_bar,
        rows: vec![row],
        iterations: Vec::new(),
        window_fraction: vec![1.0; cfg.ng],
        coarse_wall: start.elapsed().as_secs_f64(),
        max_times: PhaseTimes {
            coarse: worst,
            ..PhaseTimes::default()
        },
    })
}

struct WindowScratch {
    hybrid: HybridWorkspace,
    lift: LiftWorkspace,
    g: MicroState,
}

impl WindowScratch {
    fn new(mesh: &PhaseMesh) -> Self {
        Self {
            hybrid: HybridWorkspace::new(mesh),
            lift: LiftWorkspace::new(mesh),
            g: MicroState::zeros(mesh),
        }
    }
}

struct FineResult {
    rho: Vec<f64>,
    kinetic_fraction: f64,
    times: PhaseTimes,
}

/// Fine solve over window `n` from the density at `T^{n-1}`.
fn fine_map(
    rho: &[f64],
    n: usize,
    rho_bar: f64,
    initial_micro: &MicroState,
    cfg: &PararealConfig,
    mesh: &PhaseMesh,
    scratch: &mut WindowScratch,
) -> Result<FineResult> {
    let tol = cfg.field_tol();
    let start = macro_at(rho, cfg.window_time(n - 1), rho_bar, tol, mesh)?;
    let mut times = PhaseTimes::default();
    match cfg.fine_model {
        FineModel::Fluid => {
            let t0 = Instant::now();
            let mut s = start;
            fluid_propagate_in_place(&mut s, cfg.window_time(n), &cfg.coarse(mesh), mesh, tol)?;
            times.fine = t0.elapsed().as_secs_f64();
            Ok(FineResult {
                rho: s.rho,
                kinetic_fraction: 0.0,
                times,
            })
        }
        FineModel::Hybrid => {
            let t0 = Instant::now();
            if n == 1 {
                scratch.g.g.copy_from_slice(&initial_micro.g);
            } else {
                lift_into(
                    &start.rho,
                    &start.e,
                    rho_bar,
                    cfg.fine.step.eps,
                    &cfg.fine.lift,
                    mesh,
                    &mut scratch.lift,
                    &mut scratch.g,
                )?;
            }
            times.lift = t0.elapsed().as_secs_f64();

            let t0 = Instant::now();
            let mut st = HybridState::new(start, scratch.g.take());
            let result =
                hybrid_propagate_in_place(&mut st, cfg.window_time(n), &cfg.fine, mesh, &mut scratch.hybrid);
            scratch.g = st.micro.take();
            result?;
            times.fine = t0.elapsed().as_secs_f64();
            Ok(FineResult {
                kinetic_fraction: st.mean_kinetic_fraction(),
                rho: st.macro_state.rho,
                times,
            })
        }
    }
}

/// Serial composition of fine window maps, each started as in the parareal
/// iteration. Row `k` of a parareal run matches it on windows `n <= k`.
pub fn serial_fine_reference(
    initial: &MacroState,
    initial_micro: &MicroState,
    cfg: &PararealConfig,
    mesh: &PhaseMesh,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let mut scratch = WindowScratch::new(mesh);
    let mut row = vec![initial.rho.clone()];
    for n in 1..=cfg.ng {
        let r = fine_map(
            &row[n - 1],
            n,
            initial.rho_bar,
            initial_micro,
            cfg,
            mesh,
            &mut scratch,
        )?;
        row.push(r.rho);
    }
    Ok(row)
}

/// One parareal iteration: appends the next row to the ledger and returns
/// its successive error.
pub fn parareal_iterate(
    ledger: &mut PararealLedger,
    initial_micro: &MicroState,
    cfg: &PararealConfig,
    mesh: &PhaseMesh,
) -> Result<f64> {
    let k = ledger.iteration_count();
    let ng = cfg.ng;
    if k >= ng {
        return Err(Error::invalid("parareal.k_max", "every window is already exact"));
    }
    Error::check_len(mesh.nx() * mesh.nv(), initial_micro.g.len())?;
    let rho_bar = ledger.rho_bar;
    let prev = ledger.rows[k].clone();

    // jumps for windows k+1..=Ng, independent of each other
    let first = k + 1;
    let t_par = Instant::now();
    let results = run_indexed(
        ng - k,
        cfg.workers,
        || WindowScratch::new(mesh),
        |task, scratch| -> Result<(Vec<f64>, f64, PhaseTimes)> {
            let n = first + task;
            let fine = fine_map(&prev[n - 1], n, rho_bar, initial_micro, cfg, mesh, scratch)?;
            let t0 = Instant::now();
            let coarse = coarse_map(&prev[n - 1], n, rho_bar, cfg, mesh)?;
            let mut times = fine.times;
            times.coarse = t0.elapsed().as_secs_f64();
            let jump = fine.rho.iter().zip(&coarse).map(|(f, g)| f - g).collect();
            Ok((jump, fine.kinetic_fraction, times))
        },
    );
    let parallel_wall = t_par.elapsed().as_secs_f64();

    let mut jumps = Vec::with_capacity(results.len());
    let mut max_times = PhaseTimes::default();
    let mut fraction = 0.0;
    for (task, r) in results.into_iter().enumerate() {
        let (jump, frac, times) = r?;
        ledger.window_fraction[first + task - 1] = frac;
        fraction += frac;
        max_times = max_times.max(times);
        jumps.push(jump);
    }
    fraction /= jumps.len() as f64;

    // sequential correction
    let t_cor = Instant::now();
    let mut row: Vec<Vec<f64>> = prev[..first].to_vec();
    for (task, jump) in jumps.iter().enumerate() {
        let n = first + task;
        let t0 = Instant::now();
        let mut next = coarse_map(&row[n - 1], n, rho_bar, cfg, mesh)?;
        max_times.coarse = max_times.coarse.max(t0.elapsed().as_secs_f64());
        for (r, d) in next.iter_mut().zip(jump) {
            *r += d;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState {
                window: n,
                iteration: k + 1,
            });
        }
        row.push(next);
    }
    let correction_wall = t_cor.elapsed().as_secs_f64();

    let err = row
        .iter()
        .zip(&prev)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    ledger.rows.push(row);
    ledger.max_times = ledger.max_times.max(max_times);
    ledger.iterations.push(IterationRecord {
        k: k + 1,
        err,
        kinetic_fraction: fraction,
        parallel_wall,
        correction_wall,
        max_times,
    });
    Ok(err)
}

/// Coarse sweep, then iterations until the successive error drops below
/// `tol`, `k_max` is reached, or every window is exact (`k = Ng`).
pub fn parareal_run(
    initial: &MacroState,
    initial_micro: &MicroState,
    cfg: &PararealConfig,
    mesh: &PhaseMesh,
) -> Result<(PararealLedger, RunStatus)> {
    let mut ledger = coarse_sweep(initial, cfg, mesh)?;
    loop {
        let k = ledger.iteration_count();
        if k >= cfg.ng {
            return Ok((ledger, RunStatus::Converged));
        }
        if k >= cfg.k_max {
            return Ok((ledger, RunStatus::MaxIterations));
        }
        let err = parareal_iterate(&mut ledger, initial_micro, cfg, mesh)?;
        if err < cfg.tol {
            return Ok((ledger, RunStatus::Converged));
        }
    }
}

/// Densities at the window boundaries of a serial (non-parareal) run.
#[derive(Clone, Debug, PartialEq)]
pub struct SerialRun {
    pub times: Vec<f64>,
    pub rho: Vec<Vec<f64>>,
    /// Mean kinetic fraction over the steps of each window.
    pub window_fraction: Vec<f64>,
    /// Longest window propagation.
    pub max_window: f64,
    pub wall: f64,
}

/// Serial fine solve carrying `g` and the labels across windows; the
/// classical baseline when adaptation is off.
pub fn serial_run(
    initial: &MacroState,
    initial_micro: &MicroState,
    cfg: &PararealConfig,
    mesh: &PhaseMesh,
) -> Result<SerialRun> {
    cfg.validate()?;
    let start = Instant::now();
    let mut ws = HybridWorkspace::new(mesh);
    let mut st = HybridState::new(initial.clone(), initial_micro.clone());
    let mut rho = vec![initial.rho.clone()];
    let mut window_fraction = Vec::with_capacity(cfg.ng);
    let mut max_window = 0.0f64;
    for n in 1..=cfg.ng {
        let t0 = Instant::now();
        let (k0, s0) = (st.kinetic_cell_steps, st.steps);
        hybrid_propagate_in_place(&mut st, cfg.window_time(n), &cfg.fine, mesh, &mut ws)?;
        max_window = max_window.max(t0.elapsed().as_secs_f64());
        if !st.macro_state.is_finite() {
            return Err(Error::NonFiniteState {
                window: n,
                iteration: 0,
            });
        }
        let steps = st.steps - s0;
        window_fraction.push(if steps == 0 {
            st.labels.kinetic_fraction()
        } else {
            (st.kinetic_cell_steps - k0) as f64 / (steps * mesh.nx()) as f64
        });
        rho.push(st.macro_state.rho.clone());
    }
    Ok(SerialRun {
        times: cfg.window_times(),
        rho,
        window_fraction,
        max_window,
        wall: start.elapsed().as_secs_f64(),
    })
}

/// Drift-diffusion solve alone, sampled at the window boundaries.
pub fn fluid_run(initial: &MacroState, cfg: &PararealConfig, mesh: &PhaseMesh) -> Result<SerialRun> {
    cfg.validate()?;
    let start = Instant::now();
    let p = FluidStepParams::stable(mesh);
    let mut s = initial.clone();
    let mut rho = vec![s.rho.clone()];
    let mut max_window = 0.0f64;
    for n in 1..=cfg.ng {
        let t0 = Instant::now();
        fluid_propagate_in_place(
            &mut s,
            cfg.window_time(n),
            &p,
            mesh,
            crate::poisson::SOLVABILITY_TOLERANCE,
        )?;
        max_window = max_window.max(t0.elapsed().as_secs_f64());
        rho.push(s.rho.clone());
    }
    Ok(SerialRun {
        times: cfg.window_times(),
        rho,
        window_fraction: vec![0.0; cfg.ng],
        max_window,
        wall: start.elapsed().as_secs_f64(),
    })
}
