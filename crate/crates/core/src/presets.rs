//! Parameter sets of the published figures, their reference values, and a
//! runner that recomputes each figure and checks it against those values.

use serde::Serialize;

use crate::bifurcation::{find_hopf, find_saddle_node, BifurcationPoint, Criticality};
use crate::dynamics::{classify_outcome, integrate, IntegratorConfig, OutcomeClass, Termination};
use crate::equilibria::find_coexistence;
use crate::error::{Error, Result};
use crate::manifolds::{default_offset, homoclinic_bracket, separatrix, sigma, ScanConfig, Side};
use crate::model::{ModelParams, Param, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preset {
    pub id: &'static str,
    pub title: &'static str,
    pub params: ModelParams,
    /// Parameter varied in the figure, and the interval scanned for it.
    pub param: Param,
    pub interval: (f64, f64),
}

pub const IDS: [&str; 10] = ["fig2", "fig3a", "fig3b", "fig5", "fig6", "fig7", "fig8", "fig9b", "fig9c", "fig9d"];

/// `m=0.4, a=2.5, b=0.3, p=0.2, d=2, c=2.5, e=2.5`.
pub fn fig2_params(k: f64) -> ModelParams {
    ModelParams::new(2.5, 0.3, 2.5, 2.0, 2.5, k, 0.4, 0.2)
}

/// `m=0.9, a=2.5, b=0.3, p=0.5, d=2, c=2.5, e=2.5`.
pub fn fig3a_params(k: f64) -> ModelParams {
    ModelParams::new(2.5, 0.3, 2.5, 2.0, 2.5, k, 0.9, 0.5)
}

/// `m=0.6, a=2, b=0.2, p=0.4, c=1, e=0.8` with `d=0.7`.
pub fn fig3b_params(k: f64) -> ModelParams {
    ModelParams::new(2.0, 0.2, 1.0, 0.7, 0.8, k, 0.6, 0.4)
}

/// `m=0.7, a=3, b=0.3, p=0.6, d=0.75, c=1, e=0.8`.
pub fn fig5_params(k: f64) -> ModelParams {
    ModelParams::new(3.0, 0.3, 1.0, 0.75, 0.8, k, 0.7, 0.6)
}

/// Harvested model `m=0.6, a=3, k=0.08, b=0.2, p=0.5, d=1, c=2, e=1.1, r=1`.
pub fn harvest_params(q: f64) -> ModelParams {
    ModelParams::new(3.0, 0.2, 2.0, 1.0, 1.1, 0.08, 0.6, 0.5).with_harvesting(q, 1.0)
}

pub fn preset(id: &str) -> Result<Preset> {
    use Param::*;
    let (title, params, param, interval) = match id {
        "fig2" => ("saddle-node in k", fig2_params(0.0), K, (0.0, 0.1)),
        "fig3a" => ("subcritical Hopf in k, stability gained", fig3a_params(0.0), K, (10.0, 20.0)),
        "fig3b" => ("Hopf in k, stability lost", fig3b_params(0.0), K, (0.0, 0.1)),
        "fig5" => ("homoclinic loop in k", fig5_params(0.0), K, (1.0, 2.0)),
        "fig6" => ("fear-driven finite-time extinction", fig2_params(0.0), K, (0.0, 0.1)),
        "fig7" => ("Hopf in the harvesting effort q", harvest_params(0.0), Q, (0.0, 0.5)),
        "fig8" => ("homoclinic loop in q", harvest_params(0.0), Q, (0.3, 0.35)),
        "fig9b" => ("saddle-node in b", fig2_params(0.01), B, (0.2, 0.5)),
        "fig9c" => ("saddle-node in c", fig2_params(0.01), C, (2.0, 3.5)),
        "fig9d" => ("saddle-node in d", fig2_params(0.01), D, (1.0, 2.5)),
        other => return Err(Error::InvalidConfig(format!("unknown preset '{other}'; known: {}", IDS.join(", ")))),
    };
    let id = IDS.iter().find(|&&x| x == id).copied().unwrap_or("fig2");
    Ok(Preset { id, title, params, param, interval })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Expected {
    Near { value: f64, tol: f64 },
    Within { lo: f64, hi: f64 },
    Holds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Expected,
    pub computed: Option<f64>,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn near(name: &str, computed: f64, value: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            expected: Expected::Near { value, tol },
            computed: Some(computed),
            pass: (computed - value).abs() <= tol,
            detail: format!("|{computed:.7} - {value}| = {:.2e} (tol {tol:e})", (computed - value).abs()),
        }
    }

    pub fn within(name: &str, computed_lo: f64, computed_hi: f64, lo: f64, hi: f64) -> Check {
        Check {
            name: name.into(),
            expected: Expected::Within { lo, hi },
            computed: Some(0.5 * (computed_lo + computed_hi)),
            pass: lo <= computed_lo && computed_hi <= hi,
            detail: format!("computed ({computed_lo:.6}, {computed_hi:.6}) vs required ({lo}, {hi})"),
        }
    }

    pub fn holds(name: &str, pass: bool, detail: String) -> Check {
        Check { name: name.into(), expected: Expected::Holds, computed: None, pass, detail }
    }

    fn missing(name: &str, why: String) -> Check {
        Check { name: name.into(), expected: Expected::Holds, computed: None, pass: false, detail: why }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub id: String,
    pub title: String,
    pub params: ModelParams,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Data files `(name, CSV contents)` produced along the way.
    #[serde(skip)]
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    fn new(p: &Preset) -> Report {
        Report {
            id: p.id.into(),
            title: p.title.into(),
            params: p.params,
            checks: Vec::new(),
            passed: false,
            artifacts: Vec::new(),
        }
    }

    fn finish(mut self) -> Report {
        self.passed = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        self
    }
}

/// Recompute a figure and compare with its reference values.
pub fn reproduce(id: &str, cfg: &IntegratorConfig) -> Result<Report> {
    let p = preset(id)?;
    let mut report = Report::new(&p);
    match p.id {
        "fig2" => fig2(&p, &mut report)?,
        "fig3a" => hopf_k(&p, &mut report, p.interval, 15.093353, 1e-3, (0.43392, 0.14327), true)?,
        "fig3b" => hopf_k(&p, &mut report, p.interval, 0.061382, 1e-4, (2.26530, 3.16304), false)?,
        "fig5" => fig5(&p, &mut report, cfg)?,
        "fig6" => fig6(&p, &mut report, cfg)?,
        "fig7" => fig7(&p, &mut report)?,
        "fig8" => fig8(&p, &mut report, cfg)?,
        "fig9b" => fold_in(&p, &mut report, 0.35355)?,
        "fig9c" => fold_in(&p, &mut report, 2.78413)?,
        "fig9d" => fold_in(&p, &mut report, 1.72647)?,
        _ => unreachable!(),
    }
    Ok(report.finish())
}

fn points_json(points: &[BifurcationPoint]) -> String {
    serde_json::to_string_pretty(points).unwrap_or_default()
}

fn fold_in(p: &Preset, report: &mut Report, expected: f64) -> Result<()> {
    let (param, interval) = (p.param, p.interval);
    let found = find_saddle_node(&p.params, param, interval)?;
    report.artifacts.push((format!("saddle_node_{param}.json"), points_json(&found.points)));
    let name = format!("{param}_s");
    match found.points.first() {
        Some(sn) => {
            report.checks.push(Check::near(&name, sn.value, expected, 1e-3));
            let ok = matches!(sn.kind, crate::BifurcationKind::SaddleNode { sotomayor_ok: true });
            report.checks.push(Check::holds("sotomayor", ok, format!("{:?}", sn.diagnostics)));
        }
        None => report.checks.push(Check::missing(&name, format!("no fold of {param} on {interval:?}"))),
    }
    Ok(())
}

fn fig2(p: &Preset, report: &mut Report) -> Result<()> {
    fold_in(p, report, 0.042859)?;
    let Some(k_s) = report.checks.first().and_then(|c| c.computed) else { return Ok(()) };
    let below = find_coexistence(&p.params.with(Param::K, k_s - 0.01))?.simple_count();
    let above = find_coexistence(&p.params.with(Param::K, k_s + 0.01))?.simple_count();
    report.checks.push(Check::holds(
        "count 2 below, 0 above",
        below == 2 && above == 0,
        format!("{below} equilibria at k_s - 0.01, {above} at k_s + 0.01"),
    ));
    let at_zero = find_coexistence(&p.params)?;
    let kinds: Vec<_> = at_zero.equilibria.iter().map(|e| e.classification).collect();
    let ok = kinds.len() == 2 && kinds[0] == crate::Classification::Saddle && kinds[1].is_stable();
    report.checks.push(Check::holds("k=0: saddle and stable", ok, format!("{kinds:?}")));
    Ok(())
}

fn hopf_k(
    p: &Preset,
    report: &mut Report,
    interval: (f64, f64),
    expected: f64,
    tol: f64,
    eq: (f64, f64),
    gains_stability: bool,
) -> Result<()> {
    let found = find_hopf(&p.params, Param::K, interval)?;
    report.artifacts.push(("hopf_k.json".into(), points_json(&found.points)));
    let Some(h) = found.points.first() else {
        report.checks.push(Check::missing("k_h", format!("no Hopf point on {interval:?}")));
        return Ok(());
    };
    report.checks.push(Check::near("k_h", h.value, expected, tol));
    report.checks.push(Check::near("E2.u", h.equilibrium.u, eq.0, 1e-3));
    report.checks.push(Check::near("E2.v", h.equilibrium.v, eq.1, 1e-3));
    let l1 = h.l1().unwrap_or(f64::NAN);
    report.checks.push(Check::holds("L > 0", l1 > 0.0, format!("L = {l1:.6e}")));

    let eps = 1e-2 * h.value.max(1e-2);
    let side = |k: f64| -> Result<Option<bool>> {
        let set = find_coexistence(&p.params.with(Param::K, k))?;
        Ok(set.equilibria.iter().min_by(|a, b| {
            a.location.distance(&h.equilibrium).total_cmp(&b.location.distance(&h.equilibrium))
        }).map(|e| e.classification.is_stable()))
    };
    let (lo, hi) = (side(h.value - eps)?, side(h.value + eps)?);
    let ok = if gains_stability { lo == Some(false) && hi == Some(true) } else { lo == Some(true) && hi == Some(false) };
    let name = if gains_stability { "unstable -> stable" } else { "stable -> unstable" };
    report.checks.push(Check::holds(name, ok, format!("stable below: {lo:?}, above: {hi:?}")));
    Ok(())
}

fn fig7(p: &Preset, report: &mut Report) -> Result<()> {
    let found = find_hopf(&p.params, p.param, p.interval)?;
    report.artifacts.push(("hopf_q.json".into(), points_json(&found.points)));
    let Some(h) = found.points.first() else {
        report.checks.push(Check::missing("q_h", "no Hopf point in q on (0, 0.5)".into()));
        return Ok(());
    };
    report.checks.push(Check::near("q_h", h.value, 0.27068, 1e-3));
    report.checks.push(Check::near("E2.u", h.equilibrium.u, 2.54542, 1e-3));
    report.checks.push(Check::near("E2.v", h.equilibrium.v, 2.24175, 1e-3));
    report.checks.push(Check::near("det", h.det, 0.29264, 1e-3));
    let ds = h.diagnostics.get("dS_dparam").copied().unwrap_or(f64::NAN);
    report.checks.push(Check::holds("dS/dq < 0", ds < 0.0, format!("dS/dq = {ds:.6}")));
    let sub = h.criticality() == Some(Criticality::Sub);
    report.checks.push(Check::holds("subcritical", sub, format!("{:?}", h.criticality())));
    Ok(())
}

fn fig5(p: &Preset, report: &mut Report, cfg: &IntegratorConfig) -> Result<()> {
    let s0 = sigma(&p.params, default_offset(&p.params), cfg)?;
    report.checks.push(Check::holds(
        "k=0: W^s below W^u",
        s0.sigma > 0.0,
        format!("sigma = {:.6e}", s0.sigma),
    ));
    match homoclinic_bracket(&p.params, p.param, p.interval.0, p.interval.1, 24, cfg) {
        Ok(b) => {
            report.checks.push(Check::within("k* bracket", b.lo, b.hi, 1.548, 1.563));
            report.artifacts.push(("homoclinic_k.json".into(), serde_json::to_string_pretty(&b).unwrap_or_default()));
        }
        Err(e) => report.checks.push(Check::missing("k* bracket", e.to_string())),
    }
    Ok(())
}

fn fig8(p: &Preset, report: &mut Report, cfg: &IntegratorConfig) -> Result<()> {
    for (q, below) in [(0.0, true), (1.0, false)] {
        let params = p.params.with(Param::Q, q);
        let s = sigma(&params, default_offset(&params), cfg)?;
        let name = if below { format!("q={q}: W^s below W^u") } else { format!("q={q}: W^s above W^u") };
        let ok = if below { s.sigma > 0.0 } else { s.sigma < 0.0 };
        report.checks.push(Check::holds(&name, ok, format!("sigma = {:.6e}", s.sigma)));
    }
    match homoclinic_bracket(&p.params, p.param, p.interval.0, p.interval.1, 24, cfg) {
        Ok(b) => {
            report.checks.push(Check::within("q* bracket", b.lo, b.hi, 0.321, 0.323));
            report.artifacts.push(("homoclinic_q.json".into(), serde_json::to_string_pretty(&b).unwrap_or_default()));
        }
        Err(e) => report.checks.push(Check::missing("q* bracket", e.to_string())),
    }
    Ok(())
}

/// Largest relative deviation of post-extinction predator samples from
/// `v(t_e)·e^{−d(t−t_e)}`, over samples where that value exceeds `floor`.
pub fn prey_free_decay_error(trajectory: &crate::Trajectory, d: f64, floor: f64) -> Option<f64> {
    let t_e = trajectory.extinction_time()?;
    let anchor = trajectory.samples.iter().find(|s| s.t >= t_e)?;
    let mut worst: f64 = 0.0;
    for s in trajectory.samples.iter().filter(|s| s.t >= t_e) {
        let exact = anchor.v * (-d * (s.t - anchor.t)).exp();
        if exact > floor {
            worst = worst.max((s.v - exact).abs() / exact);
        }
    }
    Some(worst)
}

fn fig6(p: &Preset, report: &mut Report, cfg: &IntegratorConfig) -> Result<()> {
    let start = State::new(4.8, 8.3);
    let calm = integrate(&p.params, start, cfg)?;
    report.artifacts.push(("trajectory_k0.csv".into(), calm.to_csv()));
    report.checks.push(Check::holds(
        "k=0: converges to coexistence",
        matches!(calm.termination, Termination::ConvergedTo { .. }),
        calm.termination.to_string(),
    ));
    let afraid = p.params.with(Param::K, 0.03);
    let tr = integrate(&afraid, start, &cfg.with_t_end(cfg.t_end.min(50.0)))?;
    report.artifacts.push(("trajectory_k0.03.csv".into(), tr.to_csv()));
    match tr.extinction_time() {
        Some(t_e) => {
            report.checks.push(Check::holds("k=0.03: finite-time extinction", t_e.is_finite(), format!("t_e = {t_e:.6}")));
            let err = prey_free_decay_error(&tr, afraid.d, 1e-6).unwrap_or(f64::INFINITY);
            report.checks.push(Check::holds(
                "prey-free decay",
                err <= 1e-6,
                format!("max relative deviation {err:.3e}"),
            ));
        }
        None => report.checks.push(Check::missing("k=0.03: finite-time extinction", tr.termination.to_string())),
    }
    let outcomes = (classify_outcome(&p.params, start, cfg)?, classify_outcome(&afraid, start, cfg)?);
    report.checks.push(Check::holds(
        "outcome classes",
        matches!(outcomes, (OutcomeClass::Coexistence { .. }, OutcomeClass::Extinction { .. })),
        format!("k=0: {}, k=0.03: {}", outcomes.0.label(), outcomes.1.label()),
    ));
    let scan = ScanConfig { v_max: Some(24.0), lines: 32, ..ScanConfig::default() };
    for (k, params, side) in [(0.0, p.params, Side::Persistence), (0.03, afraid, Side::Extinction)] {
        let sep = separatrix(&params, &scan, cfg)?;
        report.artifacts.push((format!("separatrix_k{k}.csv"), sep.to_csv()));
        let got = sep.side_of(start);
        report.checks.push(Check::holds(
            &format!("k={k}: (4.8, 8.3) on {side:?} side"),
            got == Some(side),
            format!("{got:?}, boundary at u=4.8: {:?}", sep.height_at(start.u)),
        ));
    }
    Ok(())
}
