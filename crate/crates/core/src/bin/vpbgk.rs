//! Command-line front end: `run`, `sweep`, `predict`, `check`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vpbgk::check::run_checks;
use vpbgk::experiment::{exit_code, predict_from_timings, run_experiment, run_sweep, SweepSpec, EXIT_ERROR};
use vpbgk::{RunConfig, RunStatus};

#[derive(Parser)]
#[command(
    name = "vpbgk",
    version,
    about = "Hybrid parareal solver for Vlasov-Poisson-BGK in the diffusive scaling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV artifacts.
    Run(ConfigArgs),
    /// Run an eps grid against the toggle matrix, one subdirectory per cell.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated eps values.
        #[arg(long, value_delimiter = ',', default_values_t = SweepSpec::default().eps)]
        eps_list: Vec<f64>,
        /// Comma-separated `parareal:adaptation` pairs, e.g. `off:off,on:on`.
        #[arg(long, value_delimiter = ',', default_value = "off:off,off:on,on:off,on:on")]
        toggles: Vec<String>,
        /// Skip the fluid-only run per eps.
        #[arg(long)]
        no_fluid: bool,
    },
    /// Evaluate the cost model on the phase times of a timings.csv.
    Predict {
        timings: PathBuf,
        /// Worker count to predict for; defaults to the recorded one.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the invariant suite on a reduced mesh.
    Check,
}

/// Flags mirror configuration keys and override the file.
#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Generic override `section.key=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    eps: Option<String>,
    /// `hybrid` or `fluid`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    /// `on` or `off`.
    #[arg(long)]
    parareal: Option<String>,
    /// `on` or `off`.
    #[arg(long)]
    adaptation: Option<String>,
    #[arg(long)]
    ng: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    delta0: Option<String>,
    #[arg(long)]
    eta0: Option<String>,
    #[arg(long)]
    lift_order: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    nvx: Option<String>,
    #[arg(long)]
    nvy: Option<String>,
    #[arg(long)]
    nvz: Option<String>,
    /// Output directory.
    #[arg(short, long)]
    out: Option<String>,
    /// `on` or `off`: also run the classical serial solver.
    #[arg(long)]
    baseline: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> vpbgk::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply_env()?;
        let named = [
            ("model.eps", &self.eps),
            ("model.mode", &self.mode),
            ("time.t_final", &self.t_final),
            ("time.dt", &self.dt),
            ("parareal.enabled", &self.parareal),
            ("adaptation.enabled", &self.adaptation),
            ("parareal.ng", &self.ng),
            ("parareal.k_max", &self.k_max),
            ("parareal.tol", &self.tol),
            ("parareal.workers", &self.workers),
            ("adaptation.delta0", &self.delta0),
            ("adaptation.eta0", &self.eta0),
            ("lifting.order", &self.lift_order),
            ("mesh.nx", &self.nx),
            ("mesh.nvx", &self.nvx),
            ("mesh.nvy", &self.nvy),
            ("mesh.nvz", &self.nvz),
            ("output.dir", &self.out),
            ("output.baseline", &self.baseline),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| vpbgk::Error::ConfigParse(format!("`{kv}` is not KEY=VALUE")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

fn parse_toggles(items: &[String]) -> vpbgk::Result<Vec<(bool, bool)>> {
    let flag = |s: &str| match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(vpbgk::Error::ConfigParse(format!("toggle `{s}` is not on/off"))),
    };
    items
        .iter()
        .map(|t| {
            let (p, a) = t
                .split_once(':')
                .ok_or_else(|| vpbgk::Error::ConfigParse(format!("`{t}` is not parareal:adaptation")))?;
            Ok((flag(p.trim())?, flag(a.trim())?))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn dispatch(cmd: Command) -> vpbgk::Result<i32> {
    match cmd {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let r = run_experiment(&cfg)?;
            println!(
                "status {:?}, iterations {}, final err {}, wall {:.3} s",
                r.status,
                r.iterations,
                r.errors.last().map_or("-".into(), |e| format!("{e:.3e}")),
                r.timings.wall
            );
            println!("max relative mass drift {:.3e}", r.mass_drift);
            if let Some(err) = r.max_baseline_error() {
                println!(
                    "baseline: max error {err:.3e}, speedup {:.2}",
                    r.timings.speedup().unwrap_or(f64::NAN)
                );
            }
            println!("artifacts in {}", r.dir.display());
            Ok(exit_code(r.status))
        }
        Command::Sweep {
            config,
            eps_list,
            toggles,
            no_fluid,
        } => {
            let cfg = config.resolve()?;
            let spec = SweepSpec {
                eps: eps_list,
                toggles: parse_toggles(&toggles)?,
                fluid: !no_fluid,
            };
            let rows = run_sweep(&cfg, &spec)?;
            let mut code = 0;
            for r in &rows {
                println!(
                    "{:<40} {:?} k={:<3} wall {:>9.3} s speedup {}",
                    r.report.dir.file_name().unwrap_or_default().to_string_lossy(),
                    r.report.status,
                    r.report.iterations,
                    r.report.timings.wall,
                    r.report
                        .timings
                        .speedup()
                        .map_or("-".into(), |s| format!("{s:.2}"))
                );
                if r.report.status == RunStatus::MaxIterations {
                    code = exit_code(RunStatus::MaxIterations);
                }
            }
            Ok(code)
        }
        Command::Predict { timings, workers } => {
            let p = predict_from_timings(&timings, workers)?;
            println!(
                "workers {}, windows {}, iterations {}",
                p.model.workers, p.model.ng, p.model.iterations
            );
            println!("predicted T_parareal {:.6e} s", p.cost.t_parareal);
            println!("measured wall        {:.6e} s", p.measured_wall);
            match p.cost.k_opt {
                Some(k) => println!("k_opt {k}"),
                None => println!("k_opt undefined"),
            }
            println!("beats serial fine solve: {}", p.cost.beats_serial);
            Ok(0)
        }
        Command::Check => {
            let mut failed = 0;
            for c in run_checks()? {
                println!(
                    "{} {:<32} {} ({:.2} s)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail,
                    c.seconds
                );
                failed += usize::from(!c.passed);
            }
            Ok(if failed == 0 { 0 } else { EXIT_ERROR })
        }
    }
}
