//! `predprey`: simulation and bifurcation analysis of the fear / herd /
//! interference predator-prey model.
//!
//! Exit codes: 0 success, 1 failed reproduction checks or I/O error,
//! 2 numerical failure (diagnostic JSON in `error.json`), 3 usage error.

mod commands;
mod config;
mod svg;
mod views;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use predprey_core::Param;
use serde_json::{json, Map, Value};

use config::{Overrides, SweepMode};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(predprey_core::Error),
    Io(String),
}

impl From<predprey_core::Error> for CliError {
    fn from(e: predprey_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "predprey", version, about = "Predator-prey model with fear, herd behaviour and predator interference")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized work orders.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Start from a figure preset (fig2, fig3a, ...).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Override a model parameter, e.g. `--set k=0.03`.
    #[arg(long = "set", global = true, value_parser = parse_assignment)]
    sets: Vec<(Param, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Range {
    /// Parameter to vary.
    #[arg(long)]
    param: Option<Param>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one orbit.
    Simulate {
        #[arg(long)]
        u0: Option<f64>,
        #[arg(long)]
        v0: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// All equilibria with their classification.
    Equilibria,
    /// Hopf points of the coexistence branch.
    Hopf(Range),
    /// Saddle-node points of the coexistence branch.
    SaddleNode(Range),
    /// First Lyapunov coefficient at the Hopf points.
    Lyapunov(Range),
    /// Separatrix W^s(E0) and unstable set W^u(E0).
    Separatrix {
        #[arg(long)]
        lines: Option<usize>,
        #[arg(long)]
        v_max: Option<f64>,
    },
    /// Bracket the parameter where W^u(E0) and W^s(E0) coincide.
    Homoclinic {
        #[command(flatten)]
        range: Range,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Classify a 2-D parameter grid.
    Sweep {
        #[command(flatten)]
        range: Range,
        #[arg(long)]
        param2: Option<Param>,
        #[arg(long, allow_hyphen_values = true)]
        lo2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi2: Option<f64>,
        /// Grid size `NX NY`.
        #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
        grid: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        mode: Option<SweepMode>,
    },
    /// Continue a Hopf point in two parameters.
    HopfCurve {
        #[command(flatten)]
        range: Range,
        /// Second continuation parameter.
        #[arg(long)]
        param2: Option<Param>,
        #[arg(long)]
        max_points: Option<usize>,
    },
    /// Recompute a figure and check it against its reference values.
    Reproduce { id: String },
}

fn parse_assignment(s: &str) -> Result<(Param, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let param: Param = name.trim().parse().map_err(|e: predprey_core::Error| e.to_string())?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad value '{value}': {e}"))?;
    Ok((param, value))
}

fn put<T: Into<Value>>(patch: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        patch.insert(key.into(), v.into());
    }
}

fn range_patch(patch: &mut Map<String, Value>, r: &Range, keys: (&str, &str)) -> Result<(), CliError> {
    put(patch, keys.0, r.param.map(|p| p.name()));
    match (r.lo, r.hi) {
        (Some(lo), Some(hi)) => {
            patch.insert(keys.1.into(), json!([lo, hi]));
        }
        (None, None) => {}
        _ => return Err(CliError::Usage("--lo and --hi must be given together".into())),
    }
    Ok(())
}

fn patch_for(command: &Command) -> Result<Map<String, Value>, CliError> {
    let mut patch = Map::new();
    match command {
        Command::Simulate { u0, v0, t_end } => {
            let mut initial = Map::new();
            put(&mut initial, "u", *u0);
            put(&mut initial, "v", *v0);
            if !initial.is_empty() {
                patch.insert("initial".into(), Value::Object(initial));
            }
            if let Some(t) = t_end {
                patch.insert("integrator".into(), json!({ "t_end": t }));
            }
        }
        Command::Hopf(r) | Command::SaddleNode(r) | Command::Lyapunov(r) => range_patch(&mut patch, r, ("param", "interval"))?,
        Command::Separatrix { lines, v_max } => {
            let mut scan = Map::new();
            put(&mut scan, "lines", *lines);
            put(&mut scan, "v_max", *v_max);
            if !scan.is_empty() {
                patch.insert("scan".into(), Value::Object(scan));
            }
        }
        Command::Homoclinic { range, depth } => {
            range_patch(&mut patch, range, ("param", "interval"))?;
            put(&mut patch, "homoclinic_depth", *depth);
        }
        Command::Sweep { range, param2, lo2, hi2, grid, mode } => {
            range_patch(&mut patch, range, ("param", "interval"))?;
            range_patch(&mut patch, &Range { param: *param2, lo: *lo2, hi: *hi2 }, ("param2", "interval2"))?;
            if let Some(g) = grid {
                patch.insert("grid".into(), json!(g));
            }
            if let Some(m) = mode {
                patch.insert("sweep_mode".into(), serde_json::to_value(m).expect("enum serializes"));
            }
        }
        Command::HopfCurve { range, param2, max_points } => {
            range_patch(&mut patch, range, ("param", "interval"))?;
            put(&mut patch, "param2", param2.map(|p| p.name()));
            if let Some(n) = max_points {
                patch.insert("curve".into(), json!({ "max_points": n }));
            }
        }
        Command::Equilibria | Command::Reproduce { .. } => {}
    }
    Ok(patch)
}

enum Status {
    Done,
    ChecksFailed,
}

fn run(cli: &Cli) -> Result<Status, CliError> {
    let overrides = Overrides {
        preset: cli.preset.clone(),
        sets: cli.sets.clone(),
        seed: cli.seed,
        threads: cli.threads,
        patch: patch_for(&cli.command)?,
    };
    let cfg = config::load(cli.config.as_deref(), overrides)?;
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // fails only if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut out = commands::Output::new(&cli.out)?;
    out.json("effective_config.json", &cfg)?;
    let result = match &cli.command {
        Command::Simulate { .. } => commands::simulate(&cfg, &mut out),
        Command::Equilibria => commands::equilibria(&cfg, &mut out),
        Command::Hopf(_) => commands::hopf(&cfg, &mut out),
        Command::SaddleNode(_) => commands::saddle_node(&cfg, &mut out),
        Command::Lyapunov(_) => commands::lyapunov(&cfg, &mut out),
        Command::Separatrix { .. } => commands::separatrix_cmd(&cfg, &mut out),
        Command::Homoclinic { .. } => commands::homoclinic(&cfg, &mut out),
        Command::Sweep { .. } => commands::sweep(&cfg, &mut out),
        Command::HopfCurve { .. } => commands::hopf_curve(&cfg, &mut out),
        Command::Reproduce { id } => {
            return match commands::reproduce_cmd(id, &cfg, &mut out) {
                Ok(true) => Ok(Status::Done),
                Ok(false) => Ok(Status::ChecksFailed),
                Err(CliError::Numerical(e)) => {
                    write_diagnostic(&cli.out, &e);
                    Err(CliError::Numerical(e))
                }
                Err(e) => Err(e),
            };
        }
    };
    if let Err(CliError::Numerical(e)) = &result {
        write_diagnostic(&cli.out, e);
    }
    result?;
    eprintln!("wrote {} to {}", out.written.join(", "), cli.out.display());
    Ok(Status::Done)
}

fn diagnostic(e: &predprey_core::Error) -> Value {
    let mut d = json!({ "error": e.kind(), "message": e.to_string() });
    match e {
        predprey_core::Error::StiffnessFailure { t, state } => {
            d["t"] = json!(t);
            d["state"] = json!(state);
        }
        predprey_core::Error::EvaluationFailure { t, .. } => d["t"] = json!(t),
        predprey_core::Error::Singular { u, v, .. } => d["state"] = json!({ "u": u, "v": v }),
        _ => {}
    }
    d
}

fn write_diagnostic(dir: &std::path::Path, e: &predprey_core::Error) {
    let text = serde_json::to_string_pretty(&diagnostic(e)).unwrap_or_default();
    let _ = std::fs::write(dir.join("error.json"), format!("{text}\n"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::ChecksFailed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("{}", serde_json::to_string(&diagnostic(&e)).unwrap_or_default());
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
