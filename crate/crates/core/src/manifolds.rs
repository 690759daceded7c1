//! The stable set `W^s(E₀)` of the non-smooth origin (the separatrix between
//! coexistence and prey extinction), its unstable set `W^u(E₀)`, and
//! brackets for parameters at which the two coincide (homoclinic loop).
//!
//! Backward-time solutions are not unique at the origin, so `W^s(E₀)` is
//! located by forward shooting: bisection on the outcome of trajectories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{classify_outcome_with, cycle_reference, integrate, Integrator, IntegratorConfig, OutcomeClass, StepEvent, Trajectory};
use crate::equilibria::find_coexistence;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Param, State};

/// Scan geometry for [`separatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    /// Number of vertical scan lines on `(0, u_max)`.
    pub lines: usize,
    /// Defaults to `1.2·a/b`.
    pub u_max: Option<f64>,
    /// Defaults to three times the largest coexistence `v*`.
    pub v_max: Option<f64>,
    /// Coarse samples per line before bisection.
    pub samples: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub tol: f64,
    /// Offset used to probe both sides of a boundary point.
    pub probe_offset: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { lines: 64, u_max: None, v_max: None, samples: 16, tol: 1e-6, probe_offset: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparatrixPoint {
    pub u: f64,
    pub v: f64,
    /// Index of the scan line.
    pub line: usize,
    /// Bisection steps taken on the line.
    pub depth: usize,
}

impl SeparatrixPoint {
    pub fn state(&self) -> State {
        State::new(self.u, self.v)
    }
}

/// Boundary between initial data that persist (coexistence or cycle, below)
/// and initial data whose prey goes extinct (above).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separatrix {
    pub polyline: Vec<SeparatrixPoint>,
    pub probe_offset: f64,
    pub tol: f64,
    pub v_max: f64,
    /// Scan lines that contributed no point, with the reason.
    pub skipped: Vec<(usize, String)>,
}

/// Position of a state relative to a separatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Persistence,
    Extinction,
}

impl Separatrix {
    /// CSV with header `u,v`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v\n");
        for p in &self.polyline {
            out.push_str(&format!("{},{}\n", p.u, p.v));
        }
        out
    }

    /// Boundary height at `u` by linear interpolation; `None` outside the
    /// scanned range.
    pub fn height_at(&self, u: f64) -> Option<f64> {
        let pts = &self.polyline;
        if pts.len() < 2 || u < pts[0].u || u > pts[pts.len() - 1].u {
            return None;
        }
        let i = pts.windows(2).position(|w| u <= w[1].u)?;
        let (a, b) = (pts[i], pts[i + 1]);
        let t = if b.u > a.u { (u - a.u) / (b.u - a.u) } else { 0.0 };
        Some(a.v + t * (b.v - a.v))
    }

    pub fn side_of(&self, s: State) -> Option<Side> {
        self.height_at(s.u).map(|h| if s.v < h { Side::Persistence } else { Side::Extinction })
    }
}

/// Outcome of a probe, with one horizon doubling for undecided runs.
fn probe(params: &ModelParams, s: State, cfg: &IntegratorConfig, reference: Option<State>) -> Result<OutcomeClass> {
    let out = classify_outcome_with(params, s, cfg, reference)?;
    if out != OutcomeClass::Undecided {
        return Ok(out);
    }
    let longer = cfg.with_t_end(2.0 * cfg.t_end);
    classify_outcome_with(params, s, &longer, reference)
}

enum LineResult {
    Point(SeparatrixPoint),
    Skipped(String),
}

fn scan_line(
    params: &ModelParams,
    line: usize,
    u: f64,
    v_max: f64,
    scan: &ScanConfig,
    cfg: &IntegratorConfig,
    reference: Option<State>,
) -> Result<LineResult> {
    let v_lo = 1e-3 * v_max;
    let n = scan.samples.max(2);
    let mut prev: Option<(f64, bool)> = None;
    for i in 0..n {
        let v = v_lo + (v_max - v_lo) * i as f64 / (n - 1) as f64;
        let out = probe(params, State::new(u, v), cfg, reference)?;
        if out == OutcomeClass::Undecided {
            return Ok(LineResult::Skipped(format!("undecided outcome at v = {v}")));
        }
        let persists = out.persists();
        if let Some((v0, true)) = prev {
            if !persists {
                return bisect_line(params, line, u, v0, v, scan, cfg, reference);
            }
        }
        prev = Some((v, persists));
    }
    Ok(LineResult::Skipped("uniform outcome".into()))
}

#[allow(clippy::too_many_arguments)]
fn bisect_line(
    params: &ModelParams,
    line: usize,
    u: f64,
    mut below: f64,
    mut above: f64,
    scan: &ScanConfig,
    cfg: &IntegratorConfig,
    reference: Option<State>,
) -> Result<LineResult> {
    let mut depth = 0;
    while above - below > scan.tol {
        let mid = 0.5 * (below + above);
        match probe(params, State::new(u, mid), cfg, reference)? {
            OutcomeClass::Undecided => {
                return Ok(LineResult::Skipped(format!("undecided outcome at v = {mid} during bisection")));
            }
            out if out.persists() => below = mid,
            _ => above = mid,
        }
        depth += 1;
    }
    Ok(LineResult::Point(SeparatrixPoint { u, v: 0.5 * (below + above), line, depth }))
}

/// Separatrix by outcome bisection on vertical scan lines. Lines are
/// processed in parallel; the result does not depend on the worker count.
pub fn separatrix(params: &ModelParams, scan: &ScanConfig, cfg: &IntegratorConfig) -> Result<Separatrix> {
    if scan.lines == 0 || !(scan.tol > 0.0) || !(scan.probe_offset > scan.tol) {
        return Err(Error::InvalidConfig("scan needs lines >= 1 and 0 < tol < probe_offset".into()));
    }
    let set = find_coexistence(params)?;
    let Some(top) = set.equilibria.iter().map(|e| e.location.v).reduce(f64::max) else {
        return Err(Error::NoSeparatrix("no coexistence equilibrium to separate toward".into()));
    };
    let u_max = scan.u_max.unwrap_or(1.2 * params.carrying_capacity());
    let v_max = scan.v_max.unwrap_or(3.0 * top);
    let reference = cycle_reference(params);

    let results: Vec<(usize, LineResult)> = (0..scan.lines)
        .into_par_iter()
        .map(|line| {
            let u = u_max * (line as f64 + 0.5) / scan.lines as f64;
            scan_line(params, line, u, v_max, scan, cfg, reference).map(|r| (line, r))
        })
        .collect::<Result<_>>()?;

    let mut polyline = Vec::new();
    let mut skipped = Vec::new();
    for (line, r) in results {
        match r {
            LineResult::Point(p) => polyline.push(p),
            LineResult::Skipped(why) => skipped.push((line, why)),
        }
    }
    if polyline.len() < 3 {
        return Err(Error::NoSeparatrix(format!("only {} boundary points found", polyline.len())));
    }
    Ok(Separatrix { polyline, probe_offset: scan.probe_offset, tol: scan.tol, v_max, skipped })
}

/// For every polyline point, whether probing `±probe_offset` vertically
/// gives persistence below and extinction above.
pub fn verify_two_sided(params: &ModelParams, sep: &Separatrix, cfg: &IntegratorConfig) -> Result<Vec<bool>> {
    let reference = cycle_reference(params);
    sep.polyline
        .par_iter()
        .map(|p| {
            let below = probe(params, State::new(p.u, p.v - sep.probe_offset), cfg, reference)?;
            let above = probe(params, State::new(p.u, p.v + sep.probe_offset), cfg, reference)?;
            Ok(below.persists() && matches!(above, OutcomeClass::Extinction { .. }))
        })
        .collect()
}

/// Numerical `W^u(E₀)`: the orbit from a seed next to the origin along the
/// prey axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnstableSet {
    pub seed: State,
    pub trajectory: Trajectory,
    pub warnings: Vec<String>,
}

impl UnstableSet {
    /// CSV with header `u,v`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v\n");
        for s in &self.trajectory.samples {
            out.push_str(&format!("{},{}\n", s.u, s.v));
        }
        out
    }

    pub fn goes_extinct(&self) -> bool {
        self.trajectory.extinction_time().is_some()
    }
}

/// Default seed offset `1e-5·a/b`.
pub fn default_offset(params: &ModelParams) -> f64 {
    1e-5 * params.carrying_capacity()
}

/// Seed point `δ·(1, δ²)`: the exit direction from the origin hugs the prey
/// axis.
pub fn unstable_seed(delta: f64) -> State {
    State::new(delta, delta * delta * delta)
}

pub fn unstable_set(params: &ModelParams, delta: f64, cfg: &IntegratorConfig) -> Result<UnstableSet> {
    if !(delta > 0.0) {
        return Err(Error::InvalidConfig(format!("offset must be > 0, got {delta}")));
    }
    let seed = unstable_seed(delta);
    let trajectory = integrate(params, seed, cfg)?;
    let mut warnings = Vec::new();
    if let Some(t_e) = trajectory.extinction_time() {
        if t_e <= 10.0 * cfg.h_min.max(cfg.h_init) {
            warnings.push(format!("seed went extinct immediately (t_e = {t_e})"));
        }
    }
    Ok(UnstableSet { seed, trajectory, warnings })
}

/// Relative position of `W^u(E₀)` and `W^s(E₀)` on the line `u = u*₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaReading {
    pub u_line: f64,
    /// Height at which `W^u` first crosses the line moving left.
    pub v_unstable: f64,
    /// Height of `W^s` on the line above the equilibrium.
    pub v_stable: f64,
    /// `v_unstable − v_stable`; positive when `W^s` lies below `W^u`.
    pub sigma: f64,
    pub unstable_goes_extinct: bool,
}

/// Whether a trajectory started on the line `u = u_line` (moving left)
/// loses its prey before crossing the line again moving right.
fn extinct_before_return(params: &ModelParams, s0: State, u_line: f64, cfg: &IntegratorConfig) -> Result<bool> {
    let mut it = Integrator::new(params, s0, *cfg)?;
    loop {
        let prev = it.state();
        match it.step()? {
            StepEvent::Finished => return Ok(false),
            StepEvent::Extinct { .. } => return Ok(true),
            StepEvent::Accepted => {}
        }
        let now = it.state();
        if prev.u < u_line && now.u >= u_line {
            return Ok(false);
        }
        let [du, dv] = it.derivative();
        if du.hypot(dv) < cfg.convergence_tol {
            return Ok(false);
        }
    }
}

/// Homoclinic indicator `σ` at `params`.
pub fn sigma(params: &ModelParams, delta: f64, cfg: &IntegratorConfig) -> Result<SigmaReading> {
    let set = find_coexistence(params)?;
    let eq = set
        .largest()
        .ok_or_else(|| Error::NoSeparatrix("no coexistence equilibrium for the reference line".into()))?
        .location;
    let u_line = eq.u;

    // W^u: first leftward crossing of the line
    let mut it = Integrator::new(params, unstable_seed(delta), *cfg)?;
    let mut v_unstable = None;
    loop {
        let (t0, s0, f0) = (it.t(), it.state(), it.derivative());
        match it.step()? {
            StepEvent::Finished | StepEvent::Extinct { .. } => break,
            StepEvent::Accepted => {}
        }
        let s1 = it.state();
        if s0.u > u_line && s1.u <= u_line {
            let (_, hit) = it.locate_crossing(t0, s0, f0, |s| s.u - u_line)?;
            v_unstable = Some(hit.v);
            break;
        }
    }
    let v_unstable = v_unstable
        .ok_or_else(|| Error::NoConvergence("W^u never crosses the reference line moving left".into()))?;
    let unstable_goes_extinct = integrate(params, unstable_seed(delta), cfg)?.extinction_time().is_some();

    // W^s: first-passage bisection above the equilibrium
    let mut lo = eq.v;
    let mut hi = 2.0 * eq.v.max(v_unstable);
    let mut grown = 0;
    while !extinct_before_return(params, State::new(u_line, hi), u_line, cfg)? {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > 8 {
            return Err(Error::NoSeparatrix("no extinction above the equilibrium on the reference line".into()));
        }
    }
    let tol = 1e-9 * hi.max(1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if extinct_before_return(params, State::new(u_line, mid), u_line, cfg)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let v_stable = 0.5 * (lo + hi);
    Ok(SigmaReading { u_line, v_unstable, v_stable, sigma: v_unstable - v_stable, unstable_goes_extinct })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomoclinicBracket {
    #[serde(rename = "param_name")]
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub sigma_lo: SigmaReading,
    pub sigma_hi: SigmaReading,
    pub evidence: Vec<String>,
}

fn describe(param: Param, x: f64, s: &SigmaReading) -> String {
    let relation = if s.sigma > 0.0 { "below" } else { "above" };
    let fate = if s.unstable_goes_extinct { "goes extinct" } else { "persists" };
    format!(
        "{param} = {x}: W^s is {relation} W^u on u = {:.6} (sigma = {:.3e}); W^u {fate}",
        s.u_line, s.sigma
    )
}

/// Bisect the sign change of `σ` on `(lo, hi)` `depth` times.
pub fn homoclinic_bracket(
    params: &ModelParams,
    param: Param,
    lo: f64,
    hi: f64,
    depth: usize,
    cfg: &IntegratorConfig,
) -> Result<HomoclinicBracket> {
    if !param.is_bifurcation_param() || !(lo < hi) {
        return Err(Error::InvalidConfig(format!("need a bifurcation parameter and lo < hi, got {param} ({lo}, {hi})")));
    }
    params.with(param, lo).validate()?;
    params.with(param, hi).validate()?;
    let reading = |x: f64| {
        let p = params.with(param, x);
        sigma(&p, default_offset(&p), cfg)
    };
    let (mut a, mut b) = (lo, hi);
    let (mut sa, mut sb) = (reading(a)?, reading(b)?);
    if sa.sigma.signum() == sb.sigma.signum() {
        return Err(Error::NoBracket(format!(
            "sigma has the same sign at {param} = {lo} ({:.3e}) and {hi} ({:.3e})",
            sa.sigma, sb.sigma
        )));
    }
    for _ in 0..depth {
        let mid = 0.5 * (a + b);
        let sm = reading(mid)?;
        if sm.sigma.signum() == sa.sigma.signum() {
            a = mid;
            sa = sm;
        } else {
            b = mid;
            sb = sm;
        }
    }
    let evidence = vec![describe(param, a, &sa), describe(param, b, &sb)];
    Ok(HomoclinicBracket { param, lo: a, hi: b, sigma_lo: sa, sigma_hi: sb, evidence })
}
