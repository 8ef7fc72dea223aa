//! `relamp`: run one experiment, write CSV tables and a manifest.

mod commands;
mod config;
mod error;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::{parse, BoostPositionConfig, CausalityConfig, DiracConfig, NwCheckConfig, TransformConfig};
use crate::error::CliError;
use crate::run::{config_hash, write_manifest, Manifest, Run};

#[derive(Parser, Debug)]
#[command(name = "relamp", version, about = "Relativistic amplitude experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment file; built-in defaults are used without it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files and manifest.json.
    #[arg(long, global = true, default_value = "relamp-out")]
    out: PathBuf,

    /// Worker threads for parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// One thread, fixed reduction order: CSV output is byte-stable.
    #[arg(long, global = true)]
    serial: bool,

    /// Multiply every check tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a list of Poincaré elements and inversions to an amplitude.
    Transform,
    /// Scan the light-cone ratio C(τ, ρ) of the scaled massless packet.
    Causality(CausalityArgs),
    /// Newton–Wigner identity and position-operator hermiticity.
    NwCheck,
    /// Boost a position amplitude; velocity law and average event.
    BoostPosition,
    /// Dirac spinor and field residuals.
    Dirac,
}

#[derive(Args, Debug)]
struct CausalityArgs {
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    rho_min: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    mass_ratio: Option<f64>,
    /// Also tabulate ψ by quadrature and closed form and compare them.
    #[arg(long)]
    both_paths: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Causality(_) => "causality",
            Command::NwCheck => "nw-check",
            Command::BoostPosition => "boost-position",
            Command::Dirac => "dirac",
        }
    }
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|source| CliError::ReadConfig { path: p.display().to_string(), source })?;
            parse(&text)
        }
    }
}

fn to_value<T: Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).expect("configs serialise")
}

/// Parse, validate and run; the effective config is reported even when the
/// run itself fails.
fn dispatch(cli: &Cli, run: &mut Run, effective: &mut Option<serde_json::Value>) -> Result<(), CliError> {
    let path = cli.config.as_deref();
    match &cli.command {
        Command::Transform => {
            let mut cfg: TransformConfig = load(path)?;
            if let Some(dir) = path.and_then(Path::parent) {
                cfg.rebase(dir);
            }
            *effective = Some(to_value(&cfg));
            if let Some(p) = &cfg.particle {
                p.build("particle")?;
            }
            cfg.elements()?;
            commands::transform::run(&cfg, run)
        }
        Command::Causality(args) => {
            let mut cfg: CausalityConfig = load(path)?;
            cfg.tau = args.tau.unwrap_or(cfg.tau);
            cfg.rho_min = args.rho_min.unwrap_or(cfg.rho_min);
            cfg.rho_max = args.rho_max.unwrap_or(cfg.rho_max);
            cfg.step = args.step.unwrap_or(cfg.step);
            cfg.mass_ratio = args.mass_ratio.unwrap_or(cfg.mass_ratio);
            cfg.both_paths |= args.both_paths;
            *effective = Some(to_value(&cfg));
            cfg.validate()?;
            commands::causality::run(&cfg, run)
        }
        Command::NwCheck => {
            let cfg: NwCheckConfig = load(path)?;
            *effective = Some(to_value(&cfg));
            cfg.validate()?;
            commands::nw_check::run(&cfg, run)
        }
        Command::BoostPosition => {
            let cfg: BoostPositionConfig = load(path)?;
            *effective = Some(to_value(&cfg));
            cfg.validate()?;
            commands::boost_position::run(&cfg, run)
        }
        Command::Dirac => {
            let cfg: DiracConfig = load(path)?;
            *effective = Some(to_value(&cfg));
            cfg.validate()?;
            commands::dirac::run(&cfg, run)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        eprintln!("error: --tol-scale must be positive, got {}", cli.tol_scale);
        return ExitCode::from(2);
    }
    let threads = if cli.serial { 1 } else { cli.threads.unwrap_or(0) };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        log::warn!("thread pool already initialised: {e}");
    }
    let threads = rayon::current_num_threads();

    let mut run = match Run::new(cli.out.clone(), cli.tol_scale) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let started_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);

    let mut effective = None;
    let outcome = dispatch(&cli, &mut run, &mut effective);
    let failed: Vec<String> = run.failed().into_iter().map(String::from).collect();
    let (status, code, error) = match &outcome {
        Ok(()) if failed.is_empty() => ("passed", 0, None),
        Ok(()) => ("checks_failed", 1, None),
        Err(e) if e.exit_code() == 2 => ("invalid_input", 2, Some(e.to_string())),
        Err(e) => ("numerical_error", 1, Some(e.to_string())),
    };

    for line in &run.summary {
        println!("{line}");
    }
    for c in &run.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        match c.tolerance {
            Some(t) => println!("{verdict} {}: {:.3e} (tolerance {t:.1e})", c.name, c.achieved),
            None => println!("{verdict} {}: {:.6e}", c.name, c.achieved),
        }
    }

    let config = effective.unwrap_or(serde_json::Value::Null);
    let manifest = Manifest {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(&config),
        config: &config,
        started_unix,
        wall_clock_seconds: run.elapsed(),
        threads,
        serial: cli.serial,
        tol_scale: cli.tol_scale,
        checks: &run.checks,
        outputs: &run.outputs,
        status,
        error: error.clone(),
    };
    if let Err(e) = write_manifest(&run.out, &manifest) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }

    if let Some(e) = error {
        eprintln!("error: {e}");
    }
    if !failed.is_empty() {
        eprintln!("failed checks: {}", failed.join(", "));
    }
    ExitCode::from(code)
}
