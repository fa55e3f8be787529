//! Experiment driver and CSV artifacts.
//!
//! A run writes into its output directory:
//!
//! | file             | columns                                              |
//! |------------------|------------------------------------------------------|
//! | `snapshots.csv`  | `t, i, x, rho, x_interface, e`                       |
//! | `convergence.csv`| `k, err, kinetic_fraction`                           |
//! | `mass.csv`       | `k, n, t, delta_m, relative`                         |
//! | `labels.csv`     | `n, t, kinetic_fraction`                             |
//! | `linf_error.csv` | `n, t, error` (only with a baseline)                 |
//! | `iterations.csv` | `k, wall_parallel, wall_correction, t_lift, t_hmm, t_fluid` |
//! | `timings.csv`    | one row, see [`TIMING_COLUMNS`]                      |
//!
//! Floats are written with 17 significant digits. Everything except
//! `iterations.csv` and `timings.csv` is independent of the worker count.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{Model, RunConfig};
use crate::error::{Error, Result};
use crate::hybrid::PartitionMode;
use crate::init::initial_state;
use crate::mesh::PhaseMesh;
use crate::parareal::{
    fluid_run, parareal_run, predict_cost, serial_run, CostPrediction, PararealConfig, PerfModel, RunStatus,
};
use crate::poisson::solve_field_with_tolerance;

/// Columns of `timings.csv`.
pub const TIMING_COLUMNS: [&str; 19] = [
    "mode",
    "eps",
    "parareal",
    "adaptation",
    "workers",
    "ng",
    "iterations",
    "status",
    "wall",
    "wall_coarse_sweep",
    "wall_parallel",
    "wall_correction",
    "t_lift",
    "t_hmm",
    "t_fluid",
    "baseline_wall",
    "speedup",
    "predicted_t_parareal",
    "k_opt",
];

/// Exit status of a run: 0 converged, 2 iteration cap reached.
pub fn exit_code(status: RunStatus) -> i32 {
    match status {
        RunStatus::Converged => 0,
        RunStatus::MaxIterations => 2,
    }
}

/// Exit status for a failed run.
pub const EXIT_ERROR: i32 = 1;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Timings {
    pub wall: f64,
    pub coarse_sweep: f64,
    pub parallel: f64,
    pub correction: f64,
    /// Maxima over single window propagations.
    pub t_lift: f64,
    pub t_hmm: f64,
    pub t_fluid: f64,
    pub workers: usize,
    pub baseline_wall: Option<f64>,
    pub prediction: Option<CostPrediction>,
}

impl Timings {
    pub fn speedup(&self) -> Option<f64> {
        self.baseline_wall.map(|b| b / self.wall)
    }
}

/// Reference solution of the classical serial solver.
#[derive(Clone, Debug, PartialEq)]
pub struct Baseline {
    pub rho: Vec<Vec<f64>>,
    pub wall: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub status: RunStatus,
    /// Parareal iterations; zero for serial runs.
    pub iterations: usize,
    pub errors: Vec<f64>,
    /// Window boundaries `T^0..T^Ng`.
    pub times: Vec<f64>,
    /// Final density at every window boundary.
    pub rho: Vec<Vec<f64>>,
    pub window_fraction: Vec<f64>,
    /// Largest `|delta m| / m0` over every stored density.
    pub mass_drift: f64,
    /// Max-norm distance to the baseline per window boundary.
    pub baseline_error: Option<Vec<f64>>,
    pub timings: Timings,
    pub dir: PathBuf,
}

impl RunReport {
    pub fn max_baseline_error(&self) -> Option<f64> {
        self.baseline_error
            .as_ref()
            .map(|e| e.iter().copied().fold(0.0, f64::max))
    }

    pub fn baseline(&self) -> Baseline {
        Baseline {
            rho: self.rho.clone(),
            wall: self.timings.wall,
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn is_baseline(cfg: &RunConfig) -> bool {
    cfg.model.mode == Model::Hybrid && !cfg.parareal.enabled && !cfg.adaptation.enabled
}

/// Serial all-kinetic solve with the run's step and windows.
pub fn run_baseline(cfg: &RunConfig) -> Result<Baseline> {
    cfg.validate()?;
    let mesh = cfg.build_mesh()?;
    let (s0, g0) = initial_state(&mesh)?;
    let mut pc = cfg.parareal_config(&s0, &mesh);
    pc.fine.mode = PartitionMode::AllKinetic;
    let run = serial_run(&s0, &g0, &pc, &mesh)?;
    Ok(Baseline {
        rho: run.rho,
        wall: run.wall,
    })
}

/// Runs the configured experiment and writes its artifacts. With
/// `output.baseline` set, the classical serial solver is run as well.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunReport> {
    let baseline = if cfg.output.baseline && !is_baseline(cfg) {
        Some(run_baseline(cfg)?)
    } else {
        None
    };
    run_with_baseline(cfg, baseline.as_ref())
}

/// As [`run_experiment`], against a precomputed baseline.
pub fn run_with_baseline(cfg: &RunConfig, baseline: Option<&Baseline>) -> Result<RunReport> {
    cfg.validate()?;
    let mesh = cfg.build_mesh()?;
    let (s0, g0) = initial_state(&mesh)?;
    let pc = cfg.parareal_config(&s0, &mesh);
    let m0 = s0.mass(&mesh);

    let start = Instant::now();
    let mut timings = Timings {
        workers: pc.workers,
        ..Timings::default()
    };
    let (status, rows, errors, window_fraction, records) = match (cfg.model.mode, cfg.parareal.enabled) {
        (Model::Fluid, _) => {
            let run = fluid_run(&s0, &pc, &mesh)?;
            timings.t_fluid = run.max_window;
            (
                RunStatus::Converged,
                vec![run.rho],
                Vec::new(),
                run.window_fraction,
                Vec::new(),
            )
        }
        (Model::Hybrid, false) => {
            let run = serial_run(&s0, &g0, &pc, &mesh)?;
            timings.t_hmm = run.max_window;
            (
                RunStatus::Converged,
                vec![run.rho],
                Vec::new(),
                run.window_fraction,
                Vec::new(),
            )
        }
        (Model::Hybrid, true) => {
            let (ledger, status) = parareal_run(&s0, &g0, &pc, &mesh)?;
            timings.coarse_sweep = ledger.coarse_wall;
            timings.parallel = ledger.iterations.iter().map(|r| r.parallel_wall).sum();
            timings.correction = ledger.iterations.iter().map(|r| r.correction_wall).sum();
            timings.t_lift = ledger.max_times.lift;
            timings.t_hmm = ledger.max_times.fine;
            timings.t_fluid = ledger.max_times.coarse;
            let errors = ledger.errors();
            (
                status,
                ledger.rows,
                errors,
                ledger.window_fraction,
                ledger.iterations,
            )
        }
    };
    timings.wall = start.elapsed().as_secs_f64();
    let iterations = errors.len();
    if cfg.model.mode == Model::Hybrid && cfg.parareal.enabled {
        timings.prediction = Some(predict_cost(&PerfModel {
            t_hmm: timings.t_hmm,
            t_fluid: timings.t_fluid,
            t_lift: timings.t_lift,
            workers: pc.workers,
            ng: pc.ng,
            iterations,
        }));
    }
    timings.baseline_wall = baseline.map(|b| b.wall);

    let rho = rows.last().expect("at least one row").clone();
    let baseline_error = baseline.map(|b| {
        rho.iter()
            .zip(&b.rho)
            .map(|(a, r)| a.iter().zip(r).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            .collect::<Vec<f64>>()
    });

    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir)?;
    write_snapshots(&dir.join("snapshots.csv"), cfg, &pc, &rho, &mesh)?;
    write_convergence(&dir.join("convergence.csv"), &errors, &records)?;
    let mass_drift = write_mass(&dir.join("mass.csv"), &rows, &pc.window_times(), m0, &mesh)?;
    write_labels(&dir.join("labels.csv"), &pc.window_times(), &window_fraction)?;
    write_iterations(&dir.join("iterations.csv"), &records)?;
    if let Some(err) = &baseline_error {
        write_linf(&dir.join("linf_error.csv"), &pc.window_times(), err)?;
    }
    let report = RunReport {
        status,
        iterations,
        errors,
        times: pc.window_times(),
        rho,
        window_fraction,
        mass_drift,
        baseline_error,
        timings,
        dir,
    };
    write_timings(&report.dir.join("timings.csv"), cfg, &report)?;
    Ok(report)
}

fn write_snapshots(
    path: &Path,
    cfg: &RunConfig,
    pc: &PararealConfig,
    rho: &[Vec<f64>],
    mesh: &PhaseMesh,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "i", "x", "rho", "x_interface", "e"])?;
    let rho_bar = mesh.mass(&rho[0]) / mesh.spec.x_star;
    for n in cfg.snapshot_windows() {
        let e = solve_field_with_tolerance(&rho[n], rho_bar, mesh, pc.fine.field_tolerance())?;
        let t = pc.window_time(n);
        for i in 0..mesh.nx() {
            w.write_record([
                sci(t),
                i.to_string(),
                sci(mesh.cell_center(i)),
                sci(rho[n][i]),
                sci(mesh.interface(i)),
                sci(e[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_convergence(
    path: &Path,
    errors: &[f64],
    records: &[crate::parareal::IterationRecord],
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "err", "kinetic_fraction"])?;
    for (r, err) in records.iter().zip(errors) {
        w.write_record([r.k.to_string(), sci(*err), sci(r.kinetic_fraction)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_mass(path: &Path, rows: &[Vec<Vec<f64>>], times: &[f64], m0: f64, mesh: &PhaseMesh) -> Result<f64> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "n", "t", "delta_m", "relative"])?;
    let mut worst = 0.0f64;
    for (k, row) in rows.iter().enumerate() {
        for (n, rho) in row.iter().enumerate() {
            let dm = rho
                .iter()
                .zip(&rows[0][0])
                .map(|(a, b)| (a - b) * mesh.dx)
                .sum::<f64>();
            let rel = dm / m0;
            worst = worst.max(rel.abs());
            w.write_record([k.to_string(), n.to_string(), sci(times[n]), sci(dm), sci(rel)])?;
        }
    }
    w.flush()?;
    Ok(worst)
}

fn write_labels(path: &Path, times: &[f64], fraction: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "t", "kinetic_fraction"])?;
    for (n, f) in fraction.iter().enumerate() {
        w.write_record([(n + 1).to_string(), sci(times[n + 1]), sci(*f)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_linf(path: &Path, times: &[f64], err: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "t", "error"])?;
    for (n, e) in err.iter().enumerate() {
        w.write_record([n.to_string(), sci(times[n]), sci(*e)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_iterations(path: &Path, records: &[crate::parareal::IterationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "k",
        "wall_parallel",
        "wall_correction",
        "t_lift",
        "t_hmm",
        "t_fluid",
    ])?;
    for r in records {
        w.write_record([
            r.k.to_string(),
            sci(r.parallel_wall),
            sci(r.correction_wall),
            sci(r.max_times.lift),
            sci(r.max_times.fine),
            sci(r.max_times.coarse),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn status_name(s: RunStatus) -> &'static str {
    match s {
        RunStatus::Converged => "converged",
        RunStatus::MaxIterations => "max_iterations",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

fn write_timings(path: &Path, cfg: &RunConfig, r: &RunReport) -> Result<()> {
    let t = &r.timings;
    let mode = match cfg.model.mode {
        Model::Hybrid => "hybrid",
        Model::Fluid => "fluid",
    };
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TIMING_COLUMNS)?;
    w.write_record([
        mode.to_string(),
        sci(cfg.model.eps),
        on_off(cfg.parareal.enabled).to_string(),
        on_off(cfg.adaptation.enabled).to_string(),
        t.workers.to_string(),
        cfg.parareal.ng.to_string(),
        r.iterations.to_string(),
        status_name(r.status).to_string(),
        sci(t.wall),
        sci(t.coarse_sweep),
        sci(t.parallel),
        sci(t.correction),
        sci(t.t_lift),
        sci(t.t_hmm),
        sci(t.t_fluid),
        opt(t.baseline_wall),
        opt(t.speedup()),
        opt(t.prediction.map(|p| p.t_parareal)),
        t.prediction
            .and_then(|p| p.k_opt)
            .map(|k| k.to_string())
            .unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(())
}

/// Phase times recorded in a `timings.csv`, with the cost prediction they
/// imply and the measured wall time.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub model: PerfModel,
    pub cost: CostPrediction,
    pub measured_wall: f64,
}

/// Evaluates the cost model on the phase times of a `timings.csv`,
/// optionally for a different worker count.
pub fn predict_from_timings(path: &Path, workers: Option<usize>) -> Result<Prediction> {
    let file = path.display().to_string();
    let mut rd = csv::Reader::from_path(path)?;
    let headers = rd.headers()?.clone();
    let row = rd
        .records()
        .next()
        .ok_or_else(|| Error::invalid(file.clone(), "no data row"))??;
    let field = |name: &str| -> Result<&str> {
        let idx = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                file: file.clone(),
                column: name.to_string(),
            })?;
        row.get(idx).ok_or_else(|| Error::MissingColumn {
            file: file.clone(),
            column: name.to_string(),
        })
    };
    let num = |name: &str| -> Result<f64> {
        let v = field(name)?;
        v.trim()
            .parse()
            .map_err(|_| Error::invalid(format!("{file}:{name}"), format!("`{v}` is not a number")))
    };
    let model = PerfModel {
        t_hmm: num("t_hmm")?,
        t_fluid: num("t_fluid")?,
        t_lift: num("t_lift")?,
        workers: workers.unwrap_or(num("workers")? as usize),
        ng: num("ng")? as usize,
        iterations: num("iterations")? as usize,
    };
    Ok(Prediction {
        cost: predict_cost(&model),
        model,
        measured_wall: num("wall")?,
    })
}

/// Toggle pair `(parareal, adaptation)`.
pub type Toggles = (bool, bool);

/// Table-style sweep: every `eps` against every toggle pair, optionally
/// with a fluid-only run per `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub eps: Vec<f64>,
    pub toggles: Vec<Toggles>,
    pub fluid: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            eps: vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4],
            toggles: vec![(false, false), (false, true), (true, false), (true, true)],
            fluid: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub mode: Model,
    pub toggles: Toggles,
    pub report: RunReport,
}

pub fn cell_name(eps: f64, mode: Model, toggles: Toggles) -> String {
    match mode {
        Model::Fluid => format!("eps_{eps:e}_fluid"),
        Model::Hybrid => format!(
            "eps_{eps:e}_para_{}_adapt_{}",
            on_off(toggles.0),
            on_off(toggles.1)
        ),
    }
}

/// Runs the sweep below `base.output.dir`, one subdirectory per cell, and
/// writes `sweep.csv`. The `(off, off)` cell of each `eps` serves as the
/// baseline of the others.
pub fn run_sweep(base: &RunConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let root = base.output.dir.clone();
    fs::create_dir_all(&root)?;
    let mut rows = Vec::new();
    for &eps in &spec.eps {
        let mut cells: Vec<(Model, Toggles)> = spec.toggles.iter().map(|&t| (Model::Hybrid, t)).collect();
        // the baseline cell first
        cells.sort_by_key(|c| c.1 != (false, false));
        if spec.fluid {
            cells.push((Model::Fluid, (false, false)));
        }
        let mut baseline: Option<Baseline> = None;
        for (mode, toggles) in cells {
            let mut cfg = base.clone();
            cfg.model.eps = eps;
            cfg.model.mode = mode;
            cfg.parareal.enabled = toggles.0;
            cfg.adaptation.enabled = toggles.1;
            cfg.output.dir = root.join(cell_name(eps, mode, toggles));
            if baseline.is_none() && cfg.output.baseline && !is_baseline(&cfg) {
                baseline = Some(run_baseline(&cfg)?);
            }
            let report = run_with_baseline(&cfg, baseline.as_ref())?;
            if is_baseline(&cfg) {
                baseline = Some(report.baseline());
            }
            rows.push(SweepRow {
                eps,
                mode,
                toggles,
                report,
            });
        }
    }
    write_sweep(&root.join("sweep.csv"), &rows)?;
    Ok(rows)
}

fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "eps",
        "mode",
        "parareal",
        "adaptation",
        "status",
        "iterations",
        "final_err",
        "wall",
        "speedup",
        "max_linf_error",
        "mass_drift",
        "dir",
    ])?;
    for r in rows {
        let rep = &r.report;
        w.write_record([
            sci(r.eps),
            match r.mode {
                Model::Hybrid => "hybrid".to_string(),
                Model::Fluid => "fluid".to_string(),
            },
            on_off(r.toggles.0).to_string(),
            on_off(r.toggles.1).to_string(),
            status_name(rep.status).to_string(),
            rep.iterations.to_string(),
            opt(rep.errors.last().copied()),
            sci(rep.timings.wall),
            opt(rep.timings.speedup()),
            opt(rep.max_baseline_error()),
            sci(rep.mass_drift),
            rep.dir.display().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
