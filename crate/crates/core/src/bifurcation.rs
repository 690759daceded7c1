//! Local bifurcations of the coexistence equilibria: saddle-node (fold),
//! Hopf, and generalized Hopf points along two-parameter Hopf curves.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Integrator, IntegratorConfig, StepEvent};
use crate::equilibria::{find_coexistence, nullcline_residuals, refine_newton};
use crate::error::{Error, Result};
use crate::model::{jacobian, param_derivative, rhs, taylor_coeffs, Jacobian2, ModelParams, Param, State, TaylorCoeffs};

/// `|tr|` that a reported Hopf point must satisfy.
pub const HOPF_TRACE_TOL: f64 = 1e-9;
/// Minimum `|dS/dparam|` accepted as transversal.
pub const TRANSVERSALITY_TOL: f64 = 1e-10;
/// `|a10 + b01|` above which a point is not a Hopf candidate.
pub const CANDIDATE_TRACE_TOL: f64 = 1e-7;

const HOPF_SCAN_STEPS: usize = 400;
const FOLD_SCAN_STEPS: usize = 64;
const FOLD_BRACKET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criticality {
    Sub,
    Super,
}

impl Criticality {
    /// `Super` for negative, `Sub` for positive first Lyapunov coefficient.
    pub fn from_l1(l1: f64) -> Option<Self> {
        if l1 < 0.0 {
            Some(Criticality::Super)
        } else if l1 > 0.0 {
            Some(Criticality::Sub)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum BifurcationKind {
    SaddleNode {
        sotomayor_ok: bool,
    },
    /// `L` is absent for harvested models, whose criticality is measured
    /// from the return map.
    Hopf {
        #[serde(rename = "L")]
        l1: Option<f64>,
        omega: f64,
        criticality: Criticality,
    },
    GeneralizedHopf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationPoint {
    #[serde(rename = "param_name")]
    pub param: Param,
    #[serde(rename = "param_value")]
    pub value: f64,
    pub equilibrium: State,
    pub kind: BifurcationKind,
    pub trace: f64,
    pub det: f64,
    pub diagnostics: BTreeMap<&'static str, f64>,
}

impl BifurcationPoint {
    pub fn l1(&self) -> Option<f64> {
        match self.kind {
            BifurcationKind::Hopf { l1, .. } => l1,
            _ => None,
        }
    }

    pub fn criticality(&self) -> Option<Criticality> {
        match self.kind {
            BifurcationKind::Hopf { criticality, .. } => Some(criticality),
            _ => None,
        }
    }
}

/// Points found on an interval, with any continuation warnings.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Search {
    pub points: Vec<BifurcationPoint>,
    pub warnings: Vec<String>,
}

fn check_interval(params: &ModelParams, param: Param, (lo, hi): (f64, f64)) -> Result<()> {
    if !param.is_bifurcation_param() {
        return Err(Error::InvalidConfig(format!("{param} is not a bifurcation parameter (a,b,c,d,e,k,q)")));
    }
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!("search interval must satisfy lo < hi, got ({lo}, {hi})")));
    }
    params.with(param, lo).validate()?;
    params.with(param, hi).validate()
}

// ---------------------------------------------------------------------------
// equilibrium branches

/// Continue an equilibrium from `x0` to `x1`, subdividing when Newton fails
/// or jumps.
fn continue_to(params: &ModelParams, param: Param, x0: f64, s0: State, x1: f64, depth: u32) -> Option<State> {
    let target = params.with(param, x1);
    if let Some(s) = refine_newton(&target, s0) {
        if s.distance(&s0) <= 0.25 * (s0.u + s0.v) {
            return Some(s);
        }
    }
    if depth >= 16 {
        return None;
    }
    let xm = 0.5 * (x0 + x1);
    let sm = continue_to(params, param, x0, s0, xm, depth + 1)?;
    continue_to(params, param, xm, sm, x1, depth + 1)
}

type Branch = Vec<(f64, State)>;

fn track_branches(
    params: &ModelParams,
    param: Param,
    (lo, hi): (f64, f64),
    steps: usize,
) -> Result<(Vec<Branch>, Vec<String>)> {
    let start = find_coexistence(&params.with(param, lo))?;
    let mut warnings = start.warnings.clone();
    let mut branches = Vec::new();
    for eq in start.equilibria.iter().filter(|e| !e.fold_degenerate) {
        let mut branch = vec![(lo, eq.location)];
        for i in 1..=steps {
            let x = lo + (hi - lo) * i as f64 / steps as f64;
            let &(x0, s0) = branch.last().unwrap();
            match continue_to(params, param, x0, s0, x, 0) {
                Some(s) => branch.push((x, s)),
                None => {
                    warnings.push(format!(
                        "equilibrium branch starting at u = {:.6} lost near {param} = {x:.6}",
                        eq.location.u
                    ));
                    break;
                }
            }
        }
        branches.push(branch);
    }
    Ok((branches, warnings))
}

// ---------------------------------------------------------------------------
// first Lyapunov coefficient

/// The Perko-form expression for the first Lyapunov coefficient,
/// evaluated literally:
///
/// ```text
/// L = −3π / (2·a01·M^{3/2}) · { [a10 b10 (a11² + a11 b02 + a02 b11)
///       + a10 a01 (b11² + a20 b11 + a11 b02) + b10² (a11 a02 + 2 a02 b02)
///       − 2 a10 b10 (b02² − a20 a02) − 2 a10 a01 (a20² − b20 b02)
///       − a01² (2 a20 b20 + b11 b20) + (a01 b10 − 2 a10²)(b11 b02 − a11 a20)]
///     − (a10² + a01 b10) [3 (b10 b03 − a01 a30) + 2 a10 (a21 + b12)
///       + (b10 a12 − a01 b21)] }
/// ```
///
/// with `M = a10 b01 − a01 b10`. It agrees with the normal-form coefficient
/// only when `a10 = 0`; see [`first_lyapunov`].
pub fn perko_expression(t: &TaylorCoeffs) -> Result<f64> {
    let TaylorCoeffs {
        a10, a01, a20, a11, a02, a30, a21, a12, b10, b01, b20, b11, b02, b21, b12, b03, ..
    } = *t;
    let m = a10 * b01 - a01 * b10;
    if !(m > 0.0) {
        return Err(Error::NotHopf(format!("M = a10·b01 − a01·b10 = {m} is not positive")));
    }
    if a01 == 0.0 {
        return Err(Error::NotHopf("a01 = 0: the Lyapunov formula is singular".into()));
    }
    let bracket = a10 * b10 * (a11 * a11 + a11 * b02 + a02 * b11)
        + a10 * a01 * (b11 * b11 + a20 * b11 + a11 * b02)
        + b10 * b10 * (a11 * a02 + 2.0 * a02 * b02)
        - 2.0 * a10 * b10 * (b02 * b02 - a20 * a02)
        - 2.0 * a10 * a01 * (a20 * a20 - b20 * b02)
        - a01 * a01 * (2.0 * a20 * b20 + b11 * b20)
        + (a01 * b10 - 2.0 * a10 * a10) * (b11 * b02 - a11 * a20);
    let cubic = 3.0 * (b10 * b03 - a01 * a30) + 2.0 * a10 * (a21 + b12) + (b10 * a12 - a01 * b21);
    Ok(-3.0 * PI / (2.0 * a01 * m.powf(1.5)) * (bracket - (a10 * a10 + a01 * b10) * cubic))
}

/// Rewrite the expansion in coordinates `x = ξ`, `y = s·ξ + η` with
/// `s = −a10/a01`, which zeroes the `ξ` coefficient of `ξ̇`.
pub fn shear_to_zero_diagonal(t: &TaylorCoeffs) -> TaylorCoeffs {
    let s = -t.a10 / t.a01;
    let quad = |c20: f64, c11: f64, c02: f64| [c20 + c11 * s + c02 * s * s, c11 + 2.0 * c02 * s, c02];
    let cubic = |c30: f64, c21: f64, c12: f64, c03: f64| {
        [
            c30 + c21 * s + c12 * s * s + c03 * s * s * s,
            c21 + 2.0 * c12 * s + 3.0 * c03 * s * s,
            c12 + 3.0 * c03 * s,
            c03,
        ]
    };
    let p2 = quad(t.a20, t.a11, t.a02);
    let p3 = cubic(t.a30, t.a21, t.a12, t.a03);
    let q2 = quad(t.b20, t.b11, t.b02);
    let q3 = cubic(t.b30, t.b21, t.b12, t.b03);
    // η̇ = ẏ − s·ẋ
    TaylorCoeffs {
        a10: t.a10 + t.a01 * s,
        a01: t.a01,
        a20: p2[0],
        a11: p2[1],
        a02: p2[2],
        a30: p3[0],
        a21: p3[1],
        a12: p3[2],
        a03: p3[3],
        b10: t.b10 + t.b01 * s - s * (t.a10 + t.a01 * s),
        b01: t.b01 - s * t.a01,
        b20: q2[0] - s * p2[0],
        b11: q2[1] - s * p2[1],
        b02: q2[2] - s * p2[2],
        b30: q3[0] - s * p3[0],
        b21: q3[1] - s * p3[1],
        b12: q3[2] - s * p3[2],
        b03: q3[3] - s * p3[3],
    }
}

/// First Lyapunov coefficient at a Hopf candidate of the unharvested model.
///
/// The Perko-form expression is evaluated after [`shear_to_zero_diagonal`];
/// the result equals `3π·l₁` in Kuznetsov's normalisation.
pub fn first_lyapunov(params: &ModelParams, eq: State) -> Result<f64> {
    let t = taylor_coeffs(params, eq)?;
    let tr = t.a10 + t.b01;
    if tr.abs() >= CANDIDATE_TRACE_TOL {
        return Err(Error::NotHopf(format!("trace a10 + b01 = {tr:e} is not zero")));
    }
    perko_expression(&shear_to_zero_diagonal(&t))
}

/// Criticality of a Hopf point from the Poincaré return map on the
/// half-line `v = v*, u > u*`. Returns the mean relative amplitude change per
/// return (positive when orbits grow, i.e. subcritical).
pub fn empirical_criticality(params: &ModelParams, eq: State) -> Result<(Criticality, f64)> {
    let j = jacobian(params, eq)?;
    if !(j.det() > 0.0) {
        return Err(Error::NotHopf(format!("det = {} is not positive", j.det())));
    }
    let period = 2.0 * PI / j.det().sqrt();
    let amp0 = 0.02 * eq.u.min(eq.v);
    let cfg = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        h_init: 1e-4 * period,
        h_max: 0.05 * period,
        convergence_tol: f64::MIN_POSITIVE,
        t_end: 12.0 * period,
        ..IntegratorConfig::default()
    };
    let mut it = Integrator::new(params, State::new(eq.u + amp0, eq.v), cfg)?;
    let mut amps = vec![amp0];
    while amps.len() < 7 {
        let (t0, s0, f0) = (it.t(), it.state(), it.derivative());
        match it.step()? {
            StepEvent::Finished => break,
            StepEvent::Extinct { .. } => return Ok((Criticality::Sub, f64::INFINITY)),
            StepEvent::Accepted => {}
        }
        let s1 = it.state();
        if s0.v < eq.v && s1.v >= eq.v && s0.u > eq.u && s1.u > eq.u {
            let (_, hit) = it.locate_crossing(t0, s0, f0, |s| s.v - eq.v)?;
            amps.push(hit.u - eq.u);
        }
    }
    if amps.len() < 3 {
        return Err(Error::NoConvergence("return map did not complete two turns".into()));
    }
    let n = (amps.len() - 1) as f64;
    let growth = (amps[amps.len() - 1] / amps[0]).powf(1.0 / n) - 1.0;
    let crit = if growth > 0.0 { Criticality::Sub } else { Criticality::Super };
    Ok((crit, growth))
}

// ---------------------------------------------------------------------------
// Hopf points

fn trace_at(params: &ModelParams, param: Param, x: f64, s: State) -> Result<(f64, f64)> {
    let j = jacobian(&params.with(param, x), s)?;
    Ok((j.trace(), j.det()))
}

/// Hopf points of the coexistence equilibria for `param` in `interval`.
///
/// Each coexistence equilibrium present at the lower end is continued
/// across the interval and the trace is bracketed and bisected to zero on
/// the continued branch. A root is kept when `|tr| < 1e-9`, `det > 0` and
/// the secant estimate of `dtr/dparam` exceeds `1e-10`.
pub fn find_hopf(params: &ModelParams, param: Param, interval: (f64, f64)) -> Result<Search> {
    check_interval(params, param, interval)?;
    let (branches, mut warnings) = track_branches(params, param, interval, HOPF_SCAN_STEPS)?;
    let mut points = Vec::new();
    for branch in &branches {
        let traces: Vec<(f64, f64)> =
            branch.iter().map(|&(x, s)| trace_at(params, param, x, s)).collect::<Result<_>>()?;
        for i in 0..branch.len() - 1 {
            let ((s0, d0), (s1, d1)) = (traces[i], traces[i + 1]);
            if !(d0 > 0.0 && d1 > 0.0) || s0 == 0.0 || s0.signum() == s1.signum() && s1 != 0.0 {
                continue;
            }
            match refine_hopf(params, param, branch[i], s0, branch[i + 1].0)? {
                Ok(point) => points.push(point),
                Err(reason) => warnings.push(reason),
            }
        }
    }
    points.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(Search { points, warnings })
}

fn refine_hopf(
    params: &ModelParams,
    param: Param,
    (x0, st0): (f64, State),
    tr0: f64,
    x1: f64,
) -> Result<std::result::Result<BifurcationPoint, String>> {
    let (mut lo, mut hi) = (x0, x1);
    let (mut s_lo, mut best) = (st0, (x0, st0, tr0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let Some(s_mid) = continue_to(params, param, lo, s_lo, mid, 0) else {
            return Ok(Err(format!("equilibrium lost while refining Hopf point near {param} = {mid}")));
        };
        let (tr_mid, _) = trace_at(params, param, mid, s_mid)?;
        if tr_mid.abs() < best.2.abs() {
            best = (mid, s_mid, tr_mid);
        }
        if tr_mid == 0.0 {
            break;
        }
        if tr_mid.signum() == tr0.signum() {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    let (x, s, _) = best;
    let at = params.with(param, x);
    hopf_point(&at, param, x, s).map(Ok).or_else(|e| match e {
        Error::NotHopf(reason) => Ok(Err(reason)),
        other => Err(other),
    })
}

/// Verify and describe a Hopf point at `params` (with `param = x` already
/// set) and equilibrium `s`.
fn hopf_point(params: &ModelParams, param: Param, x: f64, s: State) -> Result<BifurcationPoint> {
    let j = jacobian(params, s)?;
    let (tr, det) = (j.trace(), j.det());
    if tr.abs() >= HOPF_TRACE_TOL {
        return Err(Error::NotHopf(format!("|trace| = {:e} at {param} = {x} exceeds {HOPF_TRACE_TOL:e}", tr.abs())));
    }
    if !(det > 0.0) {
        return Err(Error::NotHopf(format!("det = {det} at {param} = {x} is not positive")));
    }
    let mut diag = BTreeMap::new();

    // secant transversality on the continued branch
    let h = 1e-6 * x.abs().max(1e-3);
    let side = |dx: f64| -> Result<f64> {
        let s1 = continue_to(params, param, x, s, x + dx, 0)
            .ok_or_else(|| Error::NoConvergence(format!("branch lost at {param} = {}", x + dx)))?;
        Ok(jacobian(&params.with(param, x + dx), s1)?.trace())
    };
    let ds = (side(h)? - side(-h)?) / (2.0 * h);
    diag.insert("dS_dparam", ds);
    if ds.abs() <= TRANSVERSALITY_TOL {
        return Err(Error::NotHopf(format!("transversality fails at {param} = {x}: dS/d{param} = {ds:e}")));
    }

    let ModelParams { a, b, c, d, e, k, m, p, q, r } = *params;
    let (u, v) = (s.u, s.v);
    if !params.is_harvested() {
        let denom = 2.0 * b * u + c * p * u.powf(p - 1.0) * v.powf(m) + d * (1.0 - m);
        diag.insert(
            "identity_residual",
            a / (1.0 + k * v) - 2.0 * b * u - p * c * u.powf(p - 1.0) * v.powf(m) - d * (1.0 - m),
        );
        if param == Param::K {
            let closed = -a * v / (1.0 + k * v).powi(2);
            diag.insert("dS_dk_closed_form", closed);
            diag.insert("dS_dk_sign_agrees", f64::from(u8::from(closed.signum() == ds.signum())));
            diag.insert("k_h_closed_form", (a / denom - 1.0) / v);
        }
    } else if param == Param::Q {
        let qf = v.powf(1.0 - r) / r
            * (e * m * u.powf(p) * v.powf(m - 1.0) - b * u + c * (1.0 - p) * u.powf(p - 1.0) * v.powf(m) - d);
        diag.insert("q_h_formula_residual", qf - q);
        diag.insert("c22", -d * (1.0 - m) - q * (r - m) * v.powf(r - 1.0));
    }

    let omega = det.sqrt();
    let (l1, criticality) = if params.is_harvested() {
        let (crit, growth) = empirical_criticality(params, s)?;
        diag.insert("return_map_growth", growth);
        (None, crit)
    } else {
        let t = taylor_coeffs(params, s)?;
        diag.insert("L_printed_form", perko_expression(&t)?);
        let l1 = perko_expression(&shear_to_zero_diagonal(&t))?;
        let Some(crit) = Criticality::from_l1(l1) else {
            return Ok(BifurcationPoint {
                param,
                value: x,
                equilibrium: s,
                kind: BifurcationKind::GeneralizedHopf,
                trace: tr,
                det,
                diagnostics: diag,
            });
        };
        (Some(l1), crit)
    };
    Ok(BifurcationPoint {
        param,
        value: x,
        equilibrium: s,
        kind: BifurcationKind::Hopf { l1, omega, criticality },
        trace: tr,
        det,
        diagnostics: diag,
    })
}

// ---------------------------------------------------------------------------
// saddle-node points

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for c in row + 1..3 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn coexistence_count(params: &ModelParams, param: Param, x: f64) -> Result<usize> {
    Ok(find_coexistence(&params.with(param, x))?.simple_count())
}

fn fold_system(params: &ModelParams, param: Param, x: [f64; 3]) -> Option<[f64; 3]> {
    let s = State::new(x[0], x[1]);
    if !s.is_interior() {
        return None;
    }
    let at = params.with(param, x[2]);
    let g = nullcline_residuals(&at, s);
    let det = jacobian(&at, s).ok()?.det();
    let out = [g[0], g[1], det];
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Newton on `{g₁, g₂, det J}` in `(u, v, param)` with a finite-difference
/// Jacobian.
fn newton_fold(params: &ModelParams, param: Param, guess: [f64; 3]) -> Option<[f64; 3]> {
    let mut x = guess;
    for _ in 0..50 {
        let f = fold_system(params, param, x)?;
        if f.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-13 {
            return Some(x);
        }
        let mut jac = [[0.0; 3]; 3];
        for col in 0..3 {
            let h = 1e-7 * x[col].abs().max(1e-6);
            let (mut xp, mut xm) = (x, x);
            xp[col] += h;
            xm[col] -= h;
            let (fp, fm) = (fold_system(params, param, xp)?, fold_system(params, param, xm)?);
            for row in 0..3 {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        let dx = solve3(jac, [-f[0], -f[1], -f[2]])?;
        let mut lambda = 1.0;
        while x[0] + lambda * dx[0] <= 0.0 || x[1] + lambda * dx[1] <= 0.0 {
            lambda *= 0.5;
        }
        for i in 0..3 {
            x[i] += lambda * dx[i];
        }
        if dx.iter().zip(&x).all(|(d, v)| (lambda * d).abs() <= 1e-15 * v.abs().max(1.0)) {
            break;
        }
    }
    let f = fold_system(params, param, x)?;
    (f.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-9).then_some(x)
}

/// Unit left and right null vectors of a (nearly) singular 2×2 matrix.
fn null_vectors(j: &Jacobian2) -> ([f64; 2], [f64; 2]) {
    let unit = |x: [f64; 2]| {
        let n = x[0].hypot(x[1]);
        [x[0] / n, x[1] / n]
    };
    let pick = |a: [f64; 2], b: [f64; 2]| if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
    // Zᵀ J = 0 and J W = 0
    let z = pick([j.j21, -j.j11], [j.j22, -j.j12]);
    let w = pick([j.j12, -j.j11], [j.j22, -j.j21]);
    (unit(z), unit(w))
}

/// Fold points where the number of coexistence equilibria drops from two
/// to zero as `param` crosses a value in `interval`.
///
/// The count is sampled on a grid, each 2→0 transition is bisected to a
/// bracket narrower than `1e-6` and then polished by Newton iteration on
/// `{g₁, g₂, det J}`. Nondegeneracy is checked with Sotomayor's conditions.
pub fn find_saddle_node(params: &ModelParams, param: Param, interval: (f64, f64)) -> Result<Search> {
    check_interval(params, param, interval)?;
    let (lo, hi) = interval;
    let xs: Vec<f64> = (0..=FOLD_SCAN_STEPS).map(|i| lo + (hi - lo) * i as f64 / FOLD_SCAN_STEPS as f64).collect();
    let counts: Vec<usize> =
        xs.par_iter().map(|&x| coexistence_count(params, param, x)).collect::<Result<_>>()?;

    let mut search = Search::default();
    for i in 0..FOLD_SCAN_STEPS {
        let (c0, c1) = (counts[i], counts[i + 1]);
        if !((c0 >= 2 && c1 == 0) || (c0 == 0 && c1 >= 2)) {
            continue;
        }
        let (mut two, mut zero) = if c0 >= 2 { (xs[i], xs[i + 1]) } else { (xs[i + 1], xs[i]) };
        while (two - zero).abs() >= FOLD_BRACKET {
            let mid = 0.5 * (two + zero);
            if coexistence_count(params, param, mid)? >= 2 {
                two = mid;
            } else {
                zero = mid;
            }
        }
        match fold_point(params, param, two, zero)? {
            Ok(point) => search.points.push(point),
            Err(w) => search.warnings.push(w),
        }
    }
    Ok(search)
}

fn fold_point(
    params: &ModelParams,
    param: Param,
    two: f64,
    zero: f64,
) -> Result<std::result::Result<BifurcationPoint, String>> {
    let below = find_coexistence(&params.with(param, two))?;
    let pair: Vec<_> = below.equilibria.iter().filter(|e| !e.fold_degenerate).collect();
    let Some(w) = pair.windows(2).find(|w| {
        let (d0, d1) = (w[0].det().unwrap_or(0.0), w[1].det().unwrap_or(0.0));
        d0 * d1 < 0.0
    }) else {
        return Ok(Err(format!("no colliding pair with opposite det signs at {param} = {two}")));
    };
    let (e0, e1) = (w[0], w[1]);
    let guess = [0.5 * (e0.location.u + e1.location.u), 0.5 * (e0.location.v + e1.location.v), two];
    let width = (two - zero).abs();

    let mut diag = BTreeMap::new();
    diag.insert("bracket_width", width);
    diag.insert("det_below_lower", e0.det().unwrap_or(f64::NAN));
    diag.insert("det_below_upper", e1.det().unwrap_or(f64::NAN));

    let (x, s) = match newton_fold(params, param, guess) {
        Some(sol) if (sol[2] - 0.5 * (two + zero)).abs() <= 10.0 * width.max(1e-9) => {
            (sol[2], State::new(sol[0], sol[1]))
        }
        _ => {
            diag.insert("newton_fallback", 1.0);
            (0.5 * (two + zero), State::new(guess[0], guess[1]))
        }
    };
    let at = params.with(param, x);
    let j = jacobian(&at, s)?;
    let (z, wv) = null_vectors(&j);
    let fp = param_derivative(&at, s, param);
    let transversal = z[0] * fp[0] + z[1] * fp[1];
    let h = 1e-4 * s.u.min(s.v);
    let f = |st: State| rhs(&at, st.u, st.v);
    let (fp2, f0, fm2) = (
        f(State::new(s.u + h * wv[0], s.v + h * wv[1])),
        f(s),
        f(State::new(s.u - h * wv[0], s.v - h * wv[1])),
    );
    let quadratic = (0..2).map(|i| z[i] * (fp2[i] - 2.0 * f0[i] + fm2[i]) / (h * h)).sum::<f64>();
    diag.insert("sotomayor_transversality", transversal);
    diag.insert("sotomayor_quadratic", quadratic);
    let sotomayor_ok = transversal.abs() > 1e-8 && quadratic.abs() > 1e-8;
    Ok(Ok(BifurcationPoint {
        param,
        value: x,
        equilibrium: s,
        kind: BifurcationKind::SaddleNode { sotomayor_ok },
        trace: j.trace(),
        det: j.det(),
        diagnostics: diag,
    }))
}

// ---------------------------------------------------------------------------
// Hopf curves

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveOptions {
    /// Maximum number of accepted curve points.
    pub max_points: usize,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// `+1` or `−1`: initial direction of travel in `p1`.
    pub direction: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions { max_points: 200, h_init: 1e-2, h_min: 1e-8, h_max: 0.25, direction: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfCurvePoint {
    pub p1: f64,
    pub p2: f64,
    pub equilibrium: State,
    #[serde(rename = "L")]
    pub l1: Option<f64>,
    pub trace: f64,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfCurve {
    pub p1_name: Param,
    pub p2_name: Param,
    pub points: Vec<HopfCurvePoint>,
    /// Points where `L` changes sign, located to `|L| < 1e-6`.
    pub gh_points: Vec<HopfCurvePoint>,
    /// Why continuation stopped before the point budget, if it did.
    pub truncated: Option<String>,
    pub warnings: Vec<String>,
}

impl HopfCurve {
    /// CSV with header `p1,p2,u,v,L` (`L` empty when not available).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p1,p2,u,v,L\n");
        for pt in &self.points {
            let l = pt.l1.map(|l| l.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{}\n", pt.p1, pt.p2, pt.equilibrium.u, pt.equilibrium.v, l));
        }
        out
    }

    /// Parameters and Hopf seed at curve point `i`, for restarting the
    /// continuation there.
    pub fn seed_at(&self, base: &ModelParams, i: usize) -> Option<(ModelParams, BifurcationPoint)> {
        let pt = self.points.get(i)?;
        let params = base.with(self.p1_name, pt.p1).with(self.p2_name, pt.p2);
        let seed = BifurcationPoint {
            param: self.p1_name,
            value: pt.p1,
            equilibrium: pt.equilibrium,
            kind: BifurcationKind::GeneralizedHopf,
            trace: pt.trace,
            det: pt.det,
            diagnostics: BTreeMap::new(),
        };
        Some((params, seed))
    }
}

struct CurveSystem<'a> {
    base: &'a ModelParams,
    p1: Param,
    p2: Param,
}

impl CurveSystem<'_> {
    fn params(&self, x: &[f64; 4]) -> ModelParams {
        self.base.with(self.p1, x[2]).with(self.p2, x[3])
    }

    fn eval(&self, x: &[f64; 4]) -> Option<[f64; 3]> {
        let s = State::new(x[0], x[1]);
        if !s.is_interior() {
            return None;
        }
        let p = self.params(x);
        p.validate().ok()?;
        let g = nullcline_residuals(&p, s);
        let tr = jacobian(&p, s).ok()?.trace();
        let out = [g[0], g[1], tr];
        out.iter().all(|v| v.is_finite()).then_some(out)
    }

    fn jac(&self, x: &[f64; 4]) -> Option<[[f64; 4]; 3]> {
        let mut jac = [[0.0; 4]; 3];
        for col in 0..4 {
            let h = 1e-7 * x[col].abs().max(1e-4);
            let (mut xp, mut xm) = (*x, *x);
            xp[col] += h;
            xm[col] -= h;
            let (fp, fm) = (self.eval(&xp)?, self.eval(&xm)?);
            for row in 0..3 {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        Some(jac)
    }

    /// Unit null vector of the 3×4 Jacobian (via cofactors).
    fn tangent(&self, x: &[f64; 4]) -> Option<[f64; 4]> {
        let j = self.jac(x)?;
        let minor = |skip: usize| {
            let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
            let m = |r: usize, c: usize| j[r][cols[c]];
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        };
        let mut t = [0.0; 4];
        for (i, ti) in t.iter_mut().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *ti = sign * minor(i);
        }
        let n = t.iter().map(|v| v * v).sum::<f64>().sqrt();
        (n > 0.0 && n.is_finite()).then(|| t.map(|v| v / n))
    }

    /// Newton correction with component `fixed` held at its predicted value.
    /// Returns the corrected point and the iteration count.
    fn correct(&self, mut x: [f64; 4], fixed: usize) -> Option<([f64; 4], usize)> {
        let free: Vec<usize> = (0..4).filter(|&c| c != fixed).collect();
        for iter in 0..12 {
            let f = self.eval(&x)?;
            if f.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-12 {
                return Some((x, iter));
            }
            let j = self.jac(&x)?;
            let mut a = [[0.0; 3]; 3];
            for row in 0..3 {
                for (c, &col) in free.iter().enumerate() {
                    a[row][c] = j[row][col];
                }
            }
            let dx = solve3(a, [-f[0], -f[1], -f[2]])?;
            for (c, &col) in free.iter().enumerate() {
                x[col] += dx[c];
            }
        }
        let f = self.eval(&x)?;
        (f.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-10).then_some((x, 12))
    }

    fn point(&self, x: &[f64; 4]) -> Option<HopfCurvePoint> {
        let p = self.params(x);
        let s = State::new(x[0], x[1]);
        let j = jacobian(&p, s).ok()?;
        let l1 = if p.is_harvested() { None } else { first_lyapunov(&p, s).ok() };
        Some(HopfCurvePoint { p1: x[2], p2: x[3], equilibrium: s, l1, trace: j.trace(), det: j.det() })
    }
}

fn dominant(t: &[f64; 4]) -> usize {
    (0..4).max_by(|&i, &j| t[i].abs().total_cmp(&t[j].abs())).unwrap_or(0)
}

/// Continue a Hopf point in the `(p1, p2)` plane.
///
/// Unknowns are `(u, v, p1, p2)` subject to `{g₁, g₂, tr J} = 0`. Steps use a
/// secant predictor (tangent null vector for the first step) and a Newton
/// corrector that fixes the dominant tangent component, so turning points
/// in either parameter are passed. `L` is evaluated at every point and its
/// sign changes are bisected to generalized Hopf points.
pub fn trace_hopf_curve(
    params: &ModelParams,
    p1: Param,
    p2: Param,
    seed: &BifurcationPoint,
    opts: &CurveOptions,
) -> Result<HopfCurve> {
    if p1 == p2 || !p1.is_bifurcation_param() || !p2.is_bifurcation_param() {
        return Err(Error::InvalidConfig(format!("need two distinct bifurcation parameters, got {p1}, {p2}")));
    }
    if seed.param != p1 && seed.param != p2 {
        return Err(Error::InvalidConfig(format!("seed is in {}, not {p1} or {p2}", seed.param)));
    }
    let base = params.with(seed.param, seed.value);
    let sys = CurveSystem { base: &base, p1, p2 };
    let x0 = [seed.equilibrium.u, seed.equilibrium.v, base.get(p1), base.get(p2)];
    let (mut x, _) = sys
        .correct(x0, 2)
        .ok_or_else(|| Error::NoConvergence("seed does not lie on a Hopf curve".into()))?;

    let mut curve = HopfCurve {
        p1_name: p1,
        p2_name: p2,
        points: Vec::new(),
        gh_points: Vec::new(),
        truncated: None,
        warnings: Vec::new(),
    };
    let first = sys.point(&x).ok_or_else(|| Error::NotHopf("seed point is not interior".into()))?;
    if !(first.det > 0.0) {
        return Err(Error::NotHopf(format!("det = {} at the seed", first.det)));
    }
    curve.points.push(first);

    let mut dir = sys.tangent(&x).ok_or_else(|| Error::NoConvergence("no tangent at the seed".into()))?;
    if dir[2] * opts.direction < 0.0 || (dir[2] == 0.0 && opts.direction < 0.0) {
        dir = dir.map(|v| -v);
    }
    let mut h = opts.h_init;
    while curve.points.len() < opts.max_points {
        let pred = std::array::from_fn(|i| x[i] + h * dir[i]);
        let fixed = dominant(&dir);
        let next = sys.correct(pred, fixed);
        let Some((xn, iters)) = next else {
            h *= 0.5;
            if h < opts.h_min {
                let outside = sys.params(&pred).validate().is_err() || pred[0] <= 0.0 || pred[1] <= 0.0;
                curve.truncated = Some(if outside {
                    format!("left the parameter domain near p1 = {}, p2 = {}", x[2], x[3])
                } else {
                    format!("corrector diverged at step floor near p1 = {}, p2 = {}", x[2], x[3])
                });
                break;
            }
            continue;
        };
        let Some(pt) = sys.point(&xn) else {
            curve.truncated = Some("left the interior of the phase plane".into());
            break;
        };
        if !(pt.det > 0.0) {
            curve.truncated = Some(format!("det <= 0 at p1 = {}, p2 = {}: the Hopf curve ends", xn[2], xn[3]));
            break;
        }
        let step: [f64; 4] = std::array::from_fn(|i| xn[i] - x[i]);
        let len = step.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            curve.truncated = Some("zero-length step".into());
            break;
        }
        let secant = step.map(|v| v / len);
        if secant.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() <= 0.0 {
            // jumped backwards onto the curve
            h *= 0.5;
            if h < opts.h_min {
                curve.truncated = Some("continuation reversed at step floor".into());
                break;
            }
            continue;
        }
        let prev = *curve.points.last().unwrap();
        if let (Some(l0), Some(l1)) = (prev.l1, pt.l1) {
            if l0 * l1 < 0.0 {
                match bisect_gh(&sys, x, xn) {
                    Some(gh) => curve.gh_points.push(gh),
                    None => curve.warnings.push(format!(
                        "L changes sign between p1 = {} and {} but bisection did not reach |L| < 1e-6",
                        x[2], xn[2]
                    )),
                }
            }
        }
        curve.points.push(pt);
        x = xn;
        dir = secant;
        h = if iters <= 3 { (h * 1.5).min(opts.h_max) } else if iters >= 8 { h * 0.5 } else { h };
    }
    Ok(curve)
}

fn bisect_gh(sys: &CurveSystem<'_>, xa: [f64; 4], xb: [f64; 4]) -> Option<HopfCurvePoint> {
    let diff: [f64; 4] = std::array::from_fn(|i| xb[i] - xa[i]);
    let fixed = dominant(&diff);
    let eval = |lambda: f64| -> Option<HopfCurvePoint> {
        let guess = std::array::from_fn(|i| xa[i] + lambda * diff[i]);
        let (x, _) = sys.correct(guess, fixed)?;
        sys.point(&x)
    };
    let la = sys.point(&xa)?.l1?;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let pt = eval(mid)?;
        let l = pt.l1?;
        if l.abs() < 1e-6 && hi - lo < 1e-6 || l == 0.0 {
            return Some(pt);
        }
        if l.signum() == la.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pt = eval(0.5 * (lo + hi))?;
    (pt.l1?.abs() < 1e-6).then_some(pt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> ModelParams {
        ModelParams::new(2.5, 0.3, 2.5, 2.0, 2.5, 0.0, 0.4, 0.2)
    }

    fn fig3a() -> ModelParams {
        ModelParams::new(2.5, 0.3, 2.5, 2.0, 2.5, 0.0, 0.9, 0.5)
    }

    fn fig3b() -> ModelParams {
        ModelParams::new(2.0, 0.2, 1.0, 0.7, 0.8, 0.0, 0.6, 0.4)
    }

    #[test]
    fn hopf_in_k_fig3a() {
        let found = find_hopf(&fig3a(), Param::K, (10.0, 20.0)).unwrap();
        assert_eq!(found.points.len(), 1, "{found:?}");
        let h = &found.points[0];
        assert!((h.value - 15.093353).abs() < 1e-3, "{}", h.value);
        assert!(h.trace.abs() < HOPF_TRACE_TOL && h.det > 0.0);
        assert!(h.diagnostics["identity_residual"].abs() < 1e-8);
        assert!(h.diagnostics["dS_dparam"] < 0.0);
        assert_eq!(h.criticality(), Some(Criticality::Sub));
    }

    #[test]
    fn hopf_in_k_fig3b() {
        let found = find_hopf(&fig3b(), Param::K, (0.0, 0.1)).unwrap();
        assert_eq!(found.points.len(), 1, "{found:?}");
        let h = &found.points[0];
        assert!((h.value - 0.061382).abs() < 1e-4, "{}", h.value);
        assert!(h.diagnostics["dS_dparam"] > 0.0);
        assert!(h.l1().unwrap() > 0.0);
    }

    #[test]
    fn no_hopf_on_interval_without_sign_change() {
        let found = find_hopf(&fig3a(), Param::K, (0.0, 5.0)).unwrap();
        assert!(found.points.is_empty());
    }

    #[test]
    fn shear_preserves_linear_invariants() {
        let t = TaylorCoeffs {
            a10: 0.3, a01: -1.2, a20: 0.1, a11: -0.4, a02: 0.7, a30: 0.2, a21: -0.3, a12: 0.5, a03: 0.1,
            b10: 0.9, b01: -0.3, b20: 0.6, b11: 0.2, b02: -0.8, b30: 0.4, b21: 0.1, b12: -0.2, b03: 0.3,
        };
        let s = shear_to_zero_diagonal(&t);
        assert!(s.a10.abs() < 1e-15);
        let (lin, lin2) = (t.linear_part(), s.linear_part());
        assert!((lin.trace() - lin2.trace()).abs() < 1e-14);
        assert!((lin.det() - lin2.det()).abs() < 1e-14);
    }

    #[test]
    fn perko_expression_rejects_non_hopf() {
        let t = TaylorCoeffs { a10: 1.0, a01: 1.0, b10: 1.0, b01: -1.0, ..Default::default() };
        assert!(matches!(perko_expression(&t), Err(Error::NotHopf(_))));
        let t = TaylorCoeffs { a10: 0.0, a01: 0.0, b10: -1.0, b01: 0.0, ..Default::default() };
        assert!(perko_expression(&t).is_err());
    }

    #[test]
    fn saddle_node_in_k() {
        let found = find_saddle_node(&fig2(), Param::K, (0.0, 0.1)).unwrap();
        assert_eq!(found.points.len(), 1, "{found:?}");
        let sn = &found.points[0];
        assert!((sn.value - 0.042859).abs() < 1e-4, "{}", sn.value);
        assert!(sn.det.abs() < 1e-8);
        assert!(sn.trace < 0.0);
        assert_eq!(sn.kind, BifurcationKind::SaddleNode { sotomayor_ok: true });
        assert!(sn.diagnostics["det_below_lower"] * sn.diagnostics["det_below_upper"] < 0.0);
    }

    #[test]
    fn no_fold_on_short_interval() {
        assert!(find_saddle_node(&fig2(), Param::K, (0.0, 0.01)).unwrap().points.is_empty());
    }

    #[test]
    fn rejects_non_bifurcation_param() {
        assert!(find_hopf(&fig3a(), Param::M, (0.1, 0.9)).is_err());
        assert!(find_saddle_node(&fig2(), Param::K, (0.1, 0.0)).is_err());
    }

    #[test]
    fn solve3_identity() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = solve3(a, [3.0, 5.0, 5.0]).unwrap();
        for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - e).abs() < 1e-14);
        }
    }
}
