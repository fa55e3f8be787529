//! Run configuration: a sectioned TOML document, every key optional.
//!
//! ```toml
//! [mesh]
//! nx = 32
//! [model]
//! eps = 1e-4
//! mode = "hybrid"        # or "fluid"
//! [time]
//! t_final = 1.0
//! [parareal]
//! enabled = true
//! ng = 200
//! [adaptation]
//! enabled = true
//! delta0 = 1e-5
//! [lifting]
//! order = 2
//! [output]
//! dir = "out"
//! ```
//!
//! Command-line overrides address keys as `section.key=value`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adaptation::{Combine, LabelRule, RemainderScale, Thresholds};
use crate::error::{Error, Result};
use crate::hybrid::{Coupling, HybridParams, PartitionMode, Refill};
use crate::kinetic::KineticStepParams;
use crate::lifting::{LiftOptions, LiftOrder, TimeElimination};
use crate::mesh::{MeshSpec, PhaseMesh};
use crate::parareal::{default_workers, PararealConfig};
use crate::state::MacroState;
use crate::timestep::kinetic_bound;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "VPBGK_WORKERS";

/// Number of default snapshot times.
pub const DEFAULT_SNAPSHOTS: usize = 8;

/// Headroom on the initial field when sizing the shared step.
pub const FIELD_HEADROOM: f64 = 1.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Hybrid micro-macro solver, optionally accelerated by parareal.
    #[default]
    Hybrid,
    /// Drift-diffusion solver alone.
    Fluid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub eps: f64,
    pub mode: Model,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            mode: Model::Hybrid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: f64,
    /// Fixed step; derived from the stability bounds when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            dt: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PararealSection {
    pub enabled: bool,
    /// Number of time windows; also the snapshot lattice of serial runs.
    pub ng: usize,
    pub k_max: usize,
    pub tol: f64,
    /// Worker threads; the environment or the hardware decides when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for PararealSection {
    fn default() -> Self {
        Self {
            enabled: true,
            ng: 200,
            k_max: 50,
            tol: 1e-10,
            workers: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptationSection {
    pub enabled: bool,
    pub delta0: f64,
    pub eta0: f64,
    pub combine: Combine,
    pub remainder_scale: RemainderScale,
    pub refill: Refill,
    pub coupling: Coupling,
}

impl Default for AdaptationSection {
    fn default() -> Self {
        let th = Thresholds::default();
        Self {
            enabled: true,
            delta0: th.delta0,
            eta0: th.eta0,
            combine: Combine::default(),
            remainder_scale: RemainderScale::default(),
            refill: Refill::default(),
            coupling: Coupling::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiftingSection {
    pub order: LiftOrder,
    pub time_elim: TimeElimination,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Requested snapshot times in `(0, t_final]`, snapped to window
    /// boundaries. Defaults to log-spaced times.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    /// Also run the classical serial solver and report speedup and error
    /// against it.
    pub baseline: bool,
    /// Reserved; every method is deterministic.
    pub seed: u64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            snapshot_times: None,
            baseline: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    pub model: ModelSection,
    pub time: TimeSection,
    pub parareal: PararealSection,
    pub adaptation: AdaptationSection,
    pub lifting: LiftingSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Parses and validates configuration text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.mesh.validate()?;
        if !(self.model.eps > 0.0 && self.model.eps.is_finite()) {
            return Err(Error::invalid(
                "model.eps",
                format!(
                    "{} must be positive; use model.mode = \"fluid\" for the limit",
                    self.model.eps
                ),
            ));
        }
        if !(self.time.t_final > 0.0 && self.time.t_final.is_finite()) {
            return Err(Error::invalid("time.t_final", "must be positive and finite"));
        }
        if let Some(dt) = self.time.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::invalid("time.dt", "must be positive and finite"));
            }
        }
        if self.parareal.ng == 0 {
            return Err(Error::invalid("parareal.ng", "must be at least 1"));
        }
        if !(self.parareal.tol > 0.0) {
            return Err(Error::invalid("parareal.tol", "must be positive"));
        }
        if self.parareal.workers == Some(0) {
            return Err(Error::invalid("parareal.workers", "must be at least 1"));
        }
        Thresholds::new(self.adaptation.delta0, self.adaptation.eta0)?;
        if let Some(times) = &self.output.snapshot_times {
            for &t in times {
                if !(t > 0.0 && t <= self.time.t_final) {
                    return Err(Error::invalid(
                        "output.snapshot_times",
                        format!("{t} lies outside (0, {}]", self.time.t_final),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Sets `section.key` from its textual value and revalidates.
    /// `on`/`off` are accepted for booleans; bare words are strings.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (section, field) = key
            .split_once('.')
            .ok_or_else(|| Error::invalid(key, "expected `section.key`"))?;
        let parsed = parse_value(value);
        let mut doc = toml::Value::try_from(&*self).map_err(|e| Error::ConfigParse(e.to_string()))?;
        let table = doc
            .as_table_mut()
            .and_then(|t| t.get_mut(section))
            .and_then(|s| s.as_table_mut())
            .ok_or_else(|| Error::invalid(key, format!("unknown section `{section}`")))?;
        table.insert(field.to_string(), parsed);
        let next: RunConfig = doc
            .try_into()
            .map_err(|e: toml::de::Error| Error::invalid(key, e.message().to_string()))?;
        next.validate()?;
        *self = next;
        Ok(())
    }

    /// Applies [`WORKERS_ENV`] when set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(WORKERS_ENV, format!("`{v}` is not a count")))?;
            if n == 0 {
                return Err(Error::invalid(WORKERS_ENV, "must be at least 1"));
            }
            self.parareal.workers = Some(n);
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.parareal.workers.unwrap_or_else(default_workers)
    }

    pub fn build_mesh(&self) -> Result<PhaseMesh> {
        PhaseMesh::new(self.mesh)
    }

    pub fn partition_mode(&self) -> PartitionMode {
        if self.adaptation.enabled {
            PartitionMode::Adaptive
        } else {
            PartitionMode::AllKinetic
        }
    }

    pub fn label_rule(&self) -> LabelRule {
        LabelRule {
            thresholds: Thresholds {
                delta0: self.adaptation.delta0,
                eta0: self.adaptation.eta0,
            },
            combine: self.adaptation.combine,
            scale: self.adaptation.remainder_scale,
        }
    }

    /// Step shared by every propagator of the run: the configured one, or
    /// the kinetic bound at `FIELD_HEADROOM` times the initial field.
    pub fn step(&self, initial: &MacroState, mesh: &PhaseMesh) -> f64 {
        self.time
            .dt
            .unwrap_or_else(|| kinetic_bound(mesh, self.model.eps, FIELD_HEADROOM * initial.max_abs_field()))
    }

    pub fn hybrid_params(&self, initial: &MacroState, mesh: &PhaseMesh) -> HybridParams {
        let step = KineticStepParams::new(self.model.eps, self.step(initial, mesh));
        HybridParams {
            rule: self.label_rule(),
            refill: self.adaptation.refill,
            coupling: self.adaptation.coupling,
            lift: LiftOptions {
                order: self.lifting.order,
                time_elim: self.lifting.time_elim,
            },
            ..HybridParams::new(step, self.partition_mode())
        }
    }

    pub fn parareal_config(&self, initial: &MacroState, mesh: &PhaseMesh) -> PararealConfig {
        PararealConfig {
            k_max: self.parareal.k_max,
            tol: self.parareal.tol,
            workers: self.workers(),
            ..PararealConfig::new(
                self.hybrid_params(initial, mesh),
                self.time.t_final,
                self.parareal.ng,
            )
        }
    }

    /// Requested snapshot times, or `DEFAULT_SNAPSHOTS` log-spaced times
    /// from `1e-3 t_final` to `t_final`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        match &self.output.snapshot_times {
            Some(t) => t.clone(),
            None => {
                let t_final = self.time.t_final;
                let last = (DEFAULT_SNAPSHOTS - 1) as f64;
                (0..DEFAULT_SNAPSHOTS)
                    .map(|k| t_final * 10f64.powf(-3.0 * (last - k as f64) / last))
                    .collect()
            }
        }
    }

    /// Window indices `n >= 1` nearest to the snapshot times, sorted and
    /// deduplicated.
    pub fn snapshot_windows(&self) -> Vec<usize> {
        let ng = self.parareal.ng;
        let mut out: Vec<usize> = self
            .snapshot_times()
            .iter()
            .map(|t| ((t / self.time.t_final * ng as f64).round() as usize).clamp(1, ng))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn parse_value(text: &str) -> toml::Value {
    match text.trim() {
        "on" => return toml::Value::Boolean(true),
        "off" => return toml::Value::Boolean(false),
        _ => {}
    }
    // parse as the right-hand side of an assignment, else keep as string
    format!("v = {text}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}
