//! Vlasov-Poisson-BGK in the diffusive scaling, solved by a hybrid
//! kinetic/fluid micro-macro scheme accelerated with parareal.

pub mod adaptation;
pub mod check;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fluid;
pub mod hybrid;
pub mod init;
pub mod kinetic;
pub mod lifting;
pub mod mesh;
pub mod parareal;
pub mod poisson;
pub mod state;
pub mod stencil;
pub mod timestep;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use experiment::{run_experiment, run_sweep, RunReport, SweepSpec};
pub use mesh::{build_mesh, MeshSpec, PhaseMesh};
pub use parareal::{parareal_run, PararealConfig, PararealLedger, RunStatus};
pub use state::{MacroState, MicroState};
