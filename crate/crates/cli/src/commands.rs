//! Subcommand bodies. Each writes its files into the output directory and
//! returns the list of names written.

use std::path::Path;

use predprey_core::bifurcation::{find_hopf, find_saddle_node, trace_hopf_curve, CurveOptions, HopfCurvePoint};
use predprey_core::dynamics::{classify_outcome, integrate};
use predprey_core::equilibria::{all_equilibria, find_coexistence, Equilibrium};
use predprey_core::manifolds::{default_offset, homoclinic_bracket, separatrix, sigma, unstable_set, ScanConfig};
use predprey_core::presets::{preset, reproduce};
use predprey_core::{BifurcationPoint, Criticality, HopfCurve, ModelParams, Param, State};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, SweepMode};
use crate::views;
use crate::CliError;

pub struct Output<'a> {
    dir: &'a Path,
    pub written: Vec<String>,
}

impl<'a> Output<'a> {
    pub fn new(dir: &'a Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output { dir, written: Vec::new() })
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        self.text(name, &s)
    }
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn simulate(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let tr = integrate(&cfg.params, cfg.initial, &cfg.integrator)?;
    out.text("trajectory.csv", &tr.to_csv())?;
    let (eqs, warnings) = all_equilibria(&cfg.params)?;
    warn(&warnings);
    out.text("phase.svg", &views::phase(&cfg.params, &eqs, &[("orbit", &tr.samples.iter().map(|s| (s.u, s.v)).collect::<Vec<_>>())]))?;
    let summary = serde_json::json!({
        "initial": cfg.initial,
        "termination": tr.termination,
        "final_state": tr.last_state(),
        "samples": tr.samples.len(),
        "accepted_steps": tr.stats.accepted,
        "rejected_steps": tr.stats.rejected,
    });
    out.json("summary.json", &summary)?;
    println!("termination: {}", tr.termination);
    Ok(())
}

pub fn equilibria(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let (eqs, warnings) = all_equilibria(&cfg.params)?;
    warn(&warnings);
    out.json("equilibria.json", &eqs)?;
    out.text("nullclines.svg", &views::phase(&cfg.params, &eqs, &[]))?;
    for e in &eqs {
        println!("({:.6}, {:.6}) {:?} {:?}", e.location.u, e.location.v, e.kind, e.classification);
    }
    Ok(())
}

/// Coexistence equilibria at evenly spaced values of `param`.
pub fn branch(cfg: &ExperimentConfig) -> Vec<(f64, Vec<Equilibrium>)> {
    let n = cfg.branch_points.max(2);
    let [lo, hi] = cfg.interval;
    (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let set = find_coexistence(&cfg.params.with(cfg.param, x)).ok()?;
            Some((x, set.equilibria))
        })
        .collect()
}

fn branch_csv(param: Param, branch: &[(f64, Vec<Equilibrium>)]) -> String {
    let mut s = format!("{param},u,v,trace,det,classification\n");
    for (x, eqs) in branch {
        for e in eqs {
            let j = e.jacobian.map(|j| (j.trace().to_string(), j.det().to_string())).unwrap_or_default();
            let class = serde_json::to_value(e.classification).ok().and_then(|v| v.as_str().map(String::from));
            s.push_str(&format!("{x},{},{},{},{},{}\n", e.location.u, e.location.v, j.0, j.1, class.unwrap_or_default()));
        }
    }
    s
}

fn points_summary(points: &[BifurcationPoint]) {
    for p in points {
        let l = p.l1().map(|l| format!(" L = {l:.6}")).unwrap_or_default();
        let c = p.criticality().map(|c| format!(" {c:?}")).unwrap_or_default();
        println!("{} = {:.7} at ({:.6}, {:.6}), det = {:.6}{l}{c}", p.param, p.value, p.equilibrium.u, p.equilibrium.v, p.det);
    }
}

pub fn hopf(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let found = find_hopf(&cfg.params, cfg.param, (cfg.interval[0], cfg.interval[1]))?;
    warn(&found.warnings);
    out.json("hopf.json", &found.points)?;
    let br = branch(cfg);
    out.text("branch.csv", &branch_csv(cfg.param, &br))?;
    out.text("bifurcation.svg", &views::bifurcation(cfg.param, &br, &found.points, "H"))?;
    points_summary(&found.points);
    Ok(())
}

pub fn saddle_node(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let found = find_saddle_node(&cfg.params, cfg.param, (cfg.interval[0], cfg.interval[1]))?;
    warn(&found.warnings);
    out.json("saddle_node.json", &found.points)?;
    let br = branch(cfg);
    out.text("branch.csv", &branch_csv(cfg.param, &br))?;
    out.text("bifurcation.svg", &views::bifurcation(cfg.param, &br, &found.points, "SN"))?;
    points_summary(&found.points);
    Ok(())
}

#[derive(Serialize)]
struct LyapunovRecord {
    param_name: Param,
    param_value: f64,
    u: f64,
    v: f64,
    omega: f64,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "L_printed_form")]
    printed: Option<f64>,
    criticality: Option<Criticality>,
    return_map_growth: Option<f64>,
}

pub fn lyapunov(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let found = find_hopf(&cfg.params, cfg.param, (cfg.interval[0], cfg.interval[1]))?;
    warn(&found.warnings);
    let records: Vec<_> = found
        .points
        .iter()
        .map(|p| LyapunovRecord {
            param_name: p.param,
            param_value: p.value,
            u: p.equilibrium.u,
            v: p.equilibrium.v,
            omega: p.det.sqrt(),
            l: p.l1(),
            printed: p.diagnostics.get("L_printed_form").copied(),
            criticality: p.criticality(),
            return_map_growth: p.diagnostics.get("return_map_growth").copied(),
        })
        .collect();
    out.json("lyapunov.json", &records)?;
    points_summary(&found.points);
    Ok(())
}

pub fn separatrix_cmd(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let sep = separatrix(&cfg.params, &cfg.scan, &cfg.integrator)?;
    out.text("separatrix.csv", &sep.to_csv())?;
    let wu = unstable_set(&cfg.params, default_offset(&cfg.params), &cfg.integrator)?;
    warn(&wu.warnings);
    out.text("unstable_set.csv", &wu.to_csv())?;
    let reading = sigma(&cfg.params, default_offset(&cfg.params), &cfg.integrator).ok();
    out.json(
        "separatrix.json",
        &serde_json::json!({
            "points": sep.polyline.len(),
            "skipped_lines": sep.skipped,
            "v_max": sep.v_max,
            "tol": sep.tol,
            "unstable_set_goes_extinct": wu.goes_extinct(),
            "sigma": reading,
        }),
    )?;
    let (eqs, _) = all_equilibria(&cfg.params)?;
    let s: Vec<_> = sep.polyline.iter().map(|p| (p.u, p.v)).collect();
    let w: Vec<_> = wu.trajectory.samples.iter().map(|p| (p.u, p.v)).collect();
    out.text("separatrix.svg", &views::phase(&cfg.params, &eqs, &[("W^s(E0) separatrix", &s), ("W^u(E0)", &w)]))?;
    println!("{} separatrix points", sep.polyline.len());
    if let Some(r) = reading {
        println!("sigma = {:.6e} on u = {:.6}", r.sigma, r.u_line);
    }
    Ok(())
}

fn sigma_samples(cfg: &ExperimentConfig) -> Vec<(f64, Option<f64>)> {
    let [lo, hi] = cfg.interval;
    (0..=10)
        .into_par_iter()
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 10.0;
            let p = cfg.params.with(cfg.param, x);
            (x, sigma(&p, default_offset(&p), &cfg.integrator).ok().map(|r| r.sigma))
        })
        .collect()
}

pub fn homoclinic(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let [lo, hi] = cfg.interval;
    let samples = sigma_samples(cfg);
    let mut csv = format!("{},sigma\n", cfg.param);
    for (x, s) in &samples {
        csv.push_str(&format!("{x},{}\n", s.map(|s| s.to_string()).unwrap_or_default()));
    }
    out.text("sigma.csv", &csv)?;
    out.text("sigma.svg", &views::sigma(cfg.param, &samples))?;
    let bracket = homoclinic_bracket(&cfg.params, cfg.param, lo, hi, cfg.homoclinic_depth, &cfg.integrator)?;
    out.json("homoclinic.json", &bracket)?;
    println!("{} in ({:.10}, {:.10})", cfg.param, bracket.lo, bracket.hi);
    Ok(())
}

fn axis(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (range[0] + range[1])];
    }
    (0..n).map(|i| range[0] + (range[1] - range[0]) * i as f64 / (n - 1) as f64).collect()
}

fn equilibrium_class(params: &ModelParams) -> String {
    match find_coexistence(params) {
        Ok(set) => {
            let n = set.simple_count();
            let stable = set.equilibria.iter().filter(|e| !e.fold_degenerate && e.classification.is_stable()).count();
            match (n, stable) {
                (0, _) => "none".into(),
                (1, 1) => "one_stable".into(),
                (1, _) => "one_unstable".into(),
                (2, 1) => "two_one_stable".into(),
                (2, _) => "two_unstable".into(),
                (n, s) => format!("{n}_with_{s}_stable"),
            }
        }
        Err(_) => "failed".into(),
    }
}

pub fn sweep(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    if cfg.param == cfg.param2 {
        return Err(CliError::Usage("sweep needs two distinct parameters".into()));
    }
    let [nx, ny] = cfg.grid;
    if nx == 0 || ny == 0 {
        return Err(CliError::Usage("grid dimensions must be positive".into()));
    }
    let xs = axis(cfg.interval, nx);
    let ys = axis(cfg.interval2, ny);
    let mut order: Vec<usize> = (0..nx * ny).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let mut cells: Vec<(usize, String)> = order
        .par_iter()
        .map(|&idx| {
            let (i, j) = (idx % nx, idx / nx);
            let params = cfg.params.with(cfg.param, xs[i]).with(cfg.param2, ys[j]);
            let class = if params.validate().is_err() {
                "invalid".to_string()
            } else {
                match cfg.sweep_mode {
                    SweepMode::Outcome => classify_outcome(&params, cfg.initial, &cfg.integrator)
                        .map(|c| c.label().to_string())
                        .unwrap_or_else(|_| "failed".into()),
                    SweepMode::Equilibria => equilibrium_class(&params),
                }
            };
            (idx, class)
        })
        .collect();
    cells.sort_by_key(|c| c.0);
    let mut csv = String::from("p1,p2,class\n");
    for (idx, class) in &cells {
        csv.push_str(&format!("{},{},{class}\n", xs[idx % nx], ys[idx / nx]));
    }
    out.text("sweep.csv", &csv)?;
    let labels: Vec<&str> = cells.iter().map(|c| c.1.as_str()).collect();
    out.text("sweep.svg", &views::sweep(cfg.param, cfg.param2, &xs, &ys, &labels))?;
    let mut counts = std::collections::BTreeMap::new();
    for l in &labels {
        *counts.entry(*l).or_insert(0usize) += 1;
    }
    println!("{counts:?}");
    Ok(())
}

pub fn hopf_curve(cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let found = find_hopf(&cfg.params, cfg.param, (cfg.interval[0], cfg.interval[1]))?;
    warn(&found.warnings);
    let seed = found.points.first().ok_or_else(|| {
        CliError::Numerical(predprey_core::Error::NotHopf(format!(
            "no Hopf point in {} on ({}, {}) to start from",
            cfg.param, cfg.interval[0], cfg.interval[1]
        )))
    })?;
    let run = |direction: f64| {
        trace_hopf_curve(&cfg.params, cfg.param, cfg.param2, seed, &CurveOptions { direction, ..cfg.curve })
    };
    let (fwd, bwd) = (run(1.0)?, run(-1.0)?);
    let mut points: Vec<HopfCurvePoint> = bwd.points.iter().rev().copied().collect();
    points.extend(fwd.points.iter().skip(1).copied());
    let mut gh = bwd.gh_points.clone();
    gh.extend(fwd.gh_points.iter().copied());
    let mut warnings = bwd.warnings.clone();
    warnings.extend(fwd.warnings.iter().cloned());
    warn(&warnings);
    let curve = HopfCurve {
        p1_name: cfg.param,
        p2_name: cfg.param2,
        points,
        gh_points: gh,
        truncated: None,
        warnings,
    };
    out.text("hopf_curve.csv", &curve.to_csv())?;
    out.json(
        "hopf_curve.json",
        &serde_json::json!({
            "curve": curve,
            "truncated_forward": fwd.truncated,
            "truncated_backward": bwd.truncated,
        }),
    )?;
    out.text("hopf_curve.svg", &views::hopf_curve(&curve))?;
    println!("{} points, {} generalized Hopf", curve.points.len(), curve.gh_points.len());
    for g in &curve.gh_points {
        println!("GH at {} = {:.6}, {} = {:.6}", cfg.param, g.p1, cfg.param2, g.p2);
    }
    Ok(())
}

/// Returns whether every check passed.
pub fn reproduce_cmd(id: &str, cfg: &ExperimentConfig, out: &mut Output) -> Result<bool, CliError> {
    let report = reproduce(id, &cfg.integrator)?;
    for (name, contents) in &report.artifacts {
        out.text(name, contents)?;
    }
    reproduce_figure(id, cfg, out)?;
    out.json("report.json", &report)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{id}: {}", if report.passed { "all checks passed" } else { "some checks failed" });
    Ok(report.passed)
}

/// The plot behind a reproduction: branch diagram, `σ` samples or phase
/// portraits.
fn reproduce_figure(id: &str, cfg: &ExperimentConfig, out: &mut Output) -> Result<(), CliError> {
    let p = preset(id)?;
    let cfg = ExperimentConfig {
        params: p.params,
        param: p.param,
        interval: [p.interval.0, p.interval.1],
        ..cfg.clone()
    };
    match id {
        "fig5" | "fig8" => out.text("sigma.svg", &views::sigma(cfg.param, &sigma_samples(&cfg))),
        "fig6" => {
            let start = State::new(4.8, 8.3);
            let scan = ScanConfig { v_max: Some(24.0), lines: 32, ..ScanConfig::default() };
            for k in [0.0, 0.03] {
                let params = cfg.params.with(Param::K, k);
                let tr = integrate(&params, start, &cfg.integrator)?;
                let sep = separatrix(&params, &scan, &cfg.integrator)?;
                let (eqs, _) = all_equilibria(&params)?;
                let orbit: Vec<_> = tr.samples.iter().map(|s| (s.u, s.v)).collect();
                let s: Vec<_> = sep.polyline.iter().map(|s| (s.u, s.v)).collect();
                out.text(&format!("phase_k{k}.svg"), &views::phase(&params, &eqs, &[("orbit", &orbit), ("W^s(E0) separatrix", &s)]))?;
            }
            Ok(())
        }
        "fig3a" | "fig3b" | "fig7" => {
            let found = find_hopf(&cfg.params, cfg.param, p.interval)?;
            out.text("bifurcation.svg", &views::bifurcation(cfg.param, &branch(&cfg), &found.points, "H"))
        }
        _ => {
            let found = find_saddle_node(&cfg.params, cfg.param, p.interval)?;
            out.text("bifurcation.svg", &views::bifurcation(cfg.param, &branch(&cfg), &found.points, "SN"))
        }
    }
}
