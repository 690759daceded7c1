//! SVG figures built from computed data.

use predprey_core::equilibria::{predator_nullcline_v, Equilibrium, EquilibriumKind};
use predprey_core::{BifurcationPoint, HopfCurve, ModelParams, Param};

use crate::svg::{bounds, Plot, NEUTRAL, STABLE, UNSTABLE};

const PALETTE: [&str; 8] = ["#2e86c1", "#e74c3c", "#27ae60", "#f39c12", "#8e44ad", "#7f8c8d", "#16a085", "#d35400"];

/// `v` on the prey nullcline above `u`, where `a/(1+kv) − bu − c·u^{p−1}vᵐ`
/// (strictly decreasing in `v`) vanishes.
fn prey_nullcline_v(params: &ModelParams, u: f64) -> Option<f64> {
    let ModelParams { a, b, c, k, m, p, .. } = *params;
    let g = |v: f64| a / (1.0 + k * v) - b * u - c * u.powf(p - 1.0) * v.powf(m);
    if !(u > 0.0 && g(0.0) > 0.0) {
        return None;
    }
    let mut hi = 1.0;
    while g(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 { lo = mid } else { hi = mid }
    }
    Some(0.5 * (lo + hi))
}

/// Phase plane with nullclines, equilibria and the given curves.
pub fn phase(params: &ModelParams, eqs: &[Equilibrium], curves: &[(&str, &[(f64, f64)])]) -> String {
    let cap = params.carrying_capacity();
    let xs = curves.iter().flat_map(|(_, c)| c.iter().map(|p| p.0)).chain([0.0, 1.1 * cap]);
    let x = bounds(xs);
    let ys = curves
        .iter()
        .flat_map(|(_, c)| c.iter().map(|p| p.1))
        .chain(eqs.iter().map(|e| 2.0 * e.location.v))
        .chain([0.0, 1.0]);
    let y = bounds(ys);
    let mut plot = Plot::new("phase plane", "prey u", "predator v", (x.0.max(-0.05 * x.1), x.1), (y.0.max(-0.05 * y.1), y.1));

    let n = 400;
    let us: Vec<f64> = (1..=n).map(|i| x.1 * i as f64 / n as f64).collect();
    let prey: Vec<_> = us.iter().map(|&u| (u, prey_nullcline_v(params, u).unwrap_or(f64::NAN))).collect();
    plot.line(&prey, "#999999", true);
    plot.legend("prey nullcline", "#999999", true);
    if params.q == 0.0 && params.m < 1.0 {
        let pred: Vec<_> = us.iter().map(|&u| (u, predator_nullcline_v(params, u).unwrap_or(f64::NAN))).collect();
        plot.line(&pred, "#bbbb55", true);
        plot.legend("predator nullcline", "#bbbb55", true);
    }
    for (i, (name, pts)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        plot.line(pts, color, false);
        plot.legend(name, color, false);
    }
    for e in eqs {
        let stable = e.classification.is_stable();
        let color = if e.kind == EquilibriumKind::Coexistence { if stable { STABLE } else { UNSTABLE } } else { NEUTRAL };
        plot.marker((e.location.u, e.location.v), color, stable, None);
    }
    plot.finish()
}

/// Equilibrium prey density against `param`; stable solid, unstable dashed.
pub fn bifurcation(param: Param, branch: &[(f64, Vec<Equilibrium>)], points: &[BifurcationPoint], tag: &str) -> String {
    let x = bounds(branch.iter().map(|b| b.0));
    let y = bounds(branch.iter().flat_map(|b| b.1.iter().map(|e| e.location.u)).chain([0.0]));
    let mut plot = Plot::new(&format!("equilibrium branch in {param}"), param.name(), "u*", x, y);
    let width = branch.iter().map(|b| b.1.len()).max().unwrap_or(0);
    for j in 0..width {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut run_stable = None;
        let mut prev_count = None;
        for (xv, eqs) in branch {
            let here = eqs.get(j).filter(|_| prev_count.map_or(true, |c| c == eqs.len()));
            let Some(e) = here else {
                if run.len() > 1 {
                    plot.line(&run, if run_stable == Some(true) { STABLE } else { UNSTABLE }, run_stable != Some(true));
                }
                run.clear();
                run_stable = None;
                prev_count = Some(eqs.len());
                continue;
            };
            let stable = e.classification.is_stable();
            let pt = (*xv, e.location.u);
            if run_stable.is_some() && run_stable != Some(stable) {
                run.push(pt);
                plot.line(&run, if run_stable == Some(true) { STABLE } else { UNSTABLE }, run_stable != Some(true));
                run = vec![pt];
            } else {
                run.push(pt);
            }
            run_stable = Some(stable);
            prev_count = Some(eqs.len());
        }
        if run.len() > 1 {
            plot.line(&run, if run_stable == Some(true) { STABLE } else { UNSTABLE }, run_stable != Some(true));
        }
    }
    for p in points {
        plot.marker((p.value, p.equilibrium.u), "black", true, Some(&format!("{tag} {}={:.5}", p.param, p.value)));
    }
    plot.legend("stable", STABLE, false);
    plot.legend("unstable", UNSTABLE, true);
    plot.finish()
}

pub fn sigma(param: Param, samples: &[(f64, Option<f64>)]) -> String {
    let pts: Vec<_> = samples.iter().map(|(x, s)| (*x, s.unwrap_or(f64::NAN))).collect();
    let x = bounds(pts.iter().map(|p| p.0));
    let y = bounds(pts.iter().map(|p| p.1).chain([0.0]));
    let mut plot = Plot::new("splitting of W^u and W^s on u = u2*", param.name(), "sigma = v_u - v_s", x, y);
    plot.line(&[(x.0, 0.0), (x.1, 0.0)], NEUTRAL, true);
    plot.line(&pts, STABLE, false);
    for p in pts.iter().filter(|p| p.1.is_finite()) {
        plot.marker(*p, STABLE, true, None);
    }
    plot.finish()
}

pub fn sweep(p1: Param, p2: Param, xs: &[f64], ys: &[f64], labels: &[&str]) -> String {
    let half = |v: &[f64]| if v.len() > 1 { 0.5 * (v[1] - v[0]) } else { 0.5 };
    let (hx, hy) = (half(xs), half(ys));
    let x = (xs[0] - hx, xs[xs.len() - 1] + hx);
    let y = (ys[0] - hy, ys[ys.len() - 1] + hy);
    let mut plot = Plot::new("parameter sweep", p1.name(), p2.name(), x, y);
    let mut classes: Vec<&str> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let color = |l: &str| PALETTE[classes.iter().position(|c| *c == l).unwrap_or(0) % PALETTE.len()];
    for (idx, l) in labels.iter().enumerate() {
        let (cx, cy) = (xs[idx % xs.len()], ys[idx / xs.len()]);
        plot.cell((cx - hx, cx + hx), (cy - hy, cy + hy), color(l));
    }
    for c in &classes {
        plot.legend(c, color(c), false);
    }
    plot.finish()
}

/// Hopf curve; subcritical stretches (`L > 0`) dashed.
pub fn hopf_curve(curve: &HopfCurve) -> String {
    let x = bounds(curve.points.iter().map(|p| p.p1));
    let y = bounds(curve.points.iter().map(|p| p.p2));
    let mut plot = Plot::new("Hopf curve", curve.p1_name.name(), curve.p2_name.name(), x, y);
    let mut run: Vec<(f64, f64)> = Vec::new();
    let mut sub = None;
    let flush = |plot: &mut Plot, run: &[(f64, f64)], sub: Option<bool>| {
        if run.len() > 1 {
            plot.line(run, if sub == Some(false) { STABLE } else { UNSTABLE }, sub != Some(false));
        }
    };
    for p in &curve.points {
        let s = p.l1.map(|l| l > 0.0);
        if sub.is_some() && s != sub {
            run.push((p.p1, p.p2));
            flush(&mut plot, &run, sub);
            run.clear();
        }
        run.push((p.p1, p.p2));
        sub = s;
    }
    flush(&mut plot, &run, sub);
    for g in &curve.gh_points {
        plot.marker((g.p1, g.p2), "black", true, Some("GH"));
    }
    plot.legend("supercritical (L < 0)", STABLE, false);
    plot.legend("subcritical (L > 0)", UNSTABLE, true);
    plot.finish()
}
