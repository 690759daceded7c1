//! Equilibria: the trivial and axial points and the coexistence points found
//! as intersections of the two nullclines.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{fear_factor, jacobian_at_coexistence, Jacobian2, ModelParams, State};

/// `|tr|` below which a focus with positive determinant is flagged as a
/// Hopf candidate.
pub const HOPF_TOL: f64 = 1e-7;

/// Number of geometrically spaced scan points on `(1e-6·a/b, a/b)`.
pub const SCAN_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Trivial,
    Axial,
    Coexistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Saddle,
    NonSmooth,
    CenterCandidate,
}

impl Classification {
    pub fn is_stable(self) -> bool {
        matches!(self, Classification::StableNode | Classification::StableFocus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub location: State,
    pub kind: EquilibriumKind,
    pub jacobian: Option<Jacobian2>,
    pub classification: Classification,
    /// Double root of the nullcline residual (saddle-node point).
    pub fold_degenerate: bool,
}

impl Equilibrium {
    pub fn trace(&self) -> Option<f64> {
        self.jacobian.map(|j| j.trace())
    }

    pub fn det(&self) -> Option<f64> {
        self.jacobian.map(|j| j.det())
    }
}

#[derive(Serialize)]
struct EquilibriumRecord {
    u: f64,
    v: f64,
    kind: EquilibriumKind,
    classification: Classification,
    trace: Option<f64>,
    det: Option<f64>,
}

impl Serialize for Equilibrium {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EquilibriumRecord {
            u: self.location.u,
            v: self.location.v,
            kind: self.kind,
            classification: self.classification,
            trace: self.trace(),
            det: self.det(),
        }
        .serialize(serializer)
    }
}

/// Coexistence equilibria sorted by `u`, plus any scan warnings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoexistenceSet {
    pub equilibria: Vec<Equilibrium>,
    pub warnings: Vec<String>,
}

impl CoexistenceSet {
    /// Number of simple (non-degenerate) roots.
    pub fn simple_count(&self) -> usize {
        self.equilibria.iter().filter(|e| !e.fold_degenerate).count()
    }

    pub fn largest(&self) -> Option<&Equilibrium> {
        self.equilibria.last()
    }
}

/// Predator nullcline `v = ((e/d)·uᵖ)^{1/(1−m)}` of the unharvested model.
pub fn predator_nullcline_v(params: &ModelParams, u: f64) -> Result<f64> {
    if params.m >= 1.0 {
        return Err(Error::Unsupported("predator nullcline is vertical for m = 1".into()));
    }
    if params.q != 0.0 {
        return Err(Error::Unsupported("no closed-form predator nullcline with harvesting".into()));
    }
    if u < 0.0 {
        return Err(Error::InvalidConfig(format!("negative prey density {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    Ok((params.e / params.d * u.powf(params.p)).powf(1.0 / (1.0 - params.m)))
}

/// Prey per-capita growth `a/(1+kv) − bu − c·u^{p−1}vᵐ` on the predator
/// nullcline. Its roots in `(0, a/b)` are the coexistence equilibria.
pub fn coexistence_residual(params: &ModelParams, u: f64) -> Result<f64> {
    if u <= 0.0 {
        return Err(Error::Singular { u, v: 0.0, what: "u^(p-1) is unbounded at u = 0" });
    }
    let v = predator_nullcline_v(params, u)?;
    Ok(residual_at(params, u, v))
}

fn residual_at(params: &ModelParams, u: f64, v: f64) -> f64 {
    let ModelParams { a, b, c, k, m, p, .. } = *params;
    a * fear_factor(k, v) - b * u - c * u.powf(p - 1.0) * v.powf(m)
}

/// `d/du` of [`coexistence_residual`].
pub fn coexistence_residual_derivative(params: &ModelParams, u: f64) -> Result<f64> {
    let v = predator_nullcline_v(params, u)?;
    if u <= 0.0 {
        return Err(Error::Singular { u, v, what: "u^(p-2) is unbounded at u = 0" });
    }
    let ModelParams { a, b, c, k, m, p, .. } = *params;
    let dv = p * v / ((1.0 - m) * u);
    let fear = fear_factor(k, v);
    Ok(-a * k * dv * fear * fear
        - b
        - c * ((p - 1.0) * u.powf(p - 2.0) * v.powf(m) + m * u.powf(p - 1.0) * v.powf(m - 1.0) * dv))
}

/// Stability class of an equilibrium from the trace and determinant of its
/// Jacobian.
pub fn classify_jacobian(j: &Jacobian2) -> Classification {
    let (tr, det) = (j.trace(), j.det());
    if det <= 0.0 {
        Classification::Saddle
    } else if tr.abs() < HOPF_TOL {
        Classification::CenterCandidate
    } else if tr < 0.0 {
        if j.discriminant() < 0.0 {
            Classification::StableFocus
        } else {
            Classification::StableNode
        }
    } else if j.discriminant() < 0.0 {
        Classification::UnstableFocus
    } else {
        Classification::UnstableNode
    }
}

/// Classify a coexistence equilibrium; points on the axes are `NonSmooth`.
pub fn classify(params: &ModelParams, eq: State) -> Classification {
    match jacobian_at_coexistence(params, eq) {
        Ok(j) => classify_jacobian(&j),
        Err(_) => Classification::NonSmooth,
    }
}

fn coexistence(params: &ModelParams, s: State, fold_degenerate: bool) -> Equilibrium {
    let j = jacobian_at_coexistence(params, s).ok();
    Equilibrium {
        location: s,
        kind: EquilibriumKind::Coexistence,
        jacobian: j,
        classification: j.map(|j| classify_jacobian(&j)).unwrap_or(Classification::NonSmooth),
        fold_degenerate,
    }
}

/// Nullcline residuals `(g₁, g₂)` at an interior point: prey per-capita
/// growth and predator per-capita growth (including harvesting).
pub fn nullcline_residuals(params: &ModelParams, s: State) -> [f64; 2] {
    let ModelParams { d, e, m, p, q, r, .. } = *params;
    let (u, v) = (s.u, s.v);
    let g2 = -d - q * v.powf(r - 1.0) + e * u.powf(p) * v.powf(m - 1.0);
    [residual_at(params, u, v), g2]
}

fn nullcline_jacobian(params: &ModelParams, s: State) -> Jacobian2 {
    let ModelParams { a, b, c, e, k, m, p, q, r, .. } = *params;
    let (u, v) = (s.u, s.v);
    let fear = fear_factor(k, v);
    Jacobian2 {
        j11: -b - c * (p - 1.0) * u.powf(p - 2.0) * v.powf(m),
        j12: -a * k * fear * fear - c * m * u.powf(p - 1.0) * v.powf(m - 1.0),
        j21: e * p * u.powf(p - 1.0) * v.powf(m - 1.0),
        j22: -q * (r - 1.0) * v.powf(r - 2.0) + e * (m - 1.0) * u.powf(p) * v.powf(m - 2.0),
    }
}

/// Damped Newton iteration on the nullcline residuals from `guess`. Steps
/// are cut so that the iterate stays in the open first quadrant.
pub fn refine_newton(params: &ModelParams, guess: State) -> Option<State> {
    if !guess.is_interior() {
        return None;
    }
    let mut s = guess;
    for _ in 0..100 {
        let g = nullcline_residuals(params, s);
        if !g[0].is_finite() || !g[1].is_finite() {
            return None;
        }
        let j = nullcline_jacobian(params, s);
        let step = j.solve([-g[0], -g[1]])?;
        let mut lambda = 1.0;
        for (x, dx) in [(s.u, step[0]), (s.v, step[1])] {
            if x + lambda * dx <= 0.0 {
                lambda = lambda.min(0.5 * x / -dx);
            }
        }
        let norm0 = g[0].hypot(g[1]);
        let mut next = State::new(s.u + lambda * step[0], s.v + lambda * step[1]);
        // backtrack on the residual norm
        for _ in 0..30 {
            let gn = nullcline_residuals(params, next);
            let n = gn[0].hypot(gn[1]);
            if n.is_finite() && (n < norm0 || norm0 < 1e-14) {
                break;
            }
            lambda *= 0.5;
            next = State::new(s.u + lambda * step[0], s.v + lambda * step[1]);
        }
        let moved = (next.u - s.u).abs() / s.u.max(1e-300) + (next.v - s.v).abs() / s.v.max(1e-300);
        s = next;
        if moved < 1e-15 {
            break;
        }
    }
    let g = nullcline_residuals(params, s);
    let scale = 1.0 + params.a + params.d;
    (g[0].abs() < 1e-10 * scale && g[1].abs() < 1e-10 * scale && s.is_interior()).then_some(s)
}

fn bisect_root(params: &ModelParams, mut lo: f64, mut hi: f64, mut r_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r_mid = coexistence_residual(params, mid)?;
        if r_mid == 0.0 {
            return Ok(mid);
        }
        if (r_mid < 0.0) == (r_lo < 0.0) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish inside the final bracket
    let mut u = 0.5 * (lo + hi);
    for _ in 0..3 {
        let r = coexistence_residual(params, u)?;
        let dr = coexistence_residual_derivative(params, u)?;
        if dr == 0.0 || !dr.is_finite() {
            break;
        }
        let next = u - r / dr;
        if !(next > lo - (hi - lo) && next < hi + (hi - lo)) {
            break;
        }
        u = next;
    }
    Ok(u)
}

/// Outcome of minimising `sign·r(u)` on an interval without a sign change.
enum Tangency {
    /// The sign flips at `at`: two simple roots either side.
    Split(f64),
    /// The minimum touches zero within tolerance: a double root.
    Double(f64),
    None,
}

fn golden_tangency(params: &ModelParams, lo: f64, hi: f64, sign: f64) -> Result<Tangency> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let f = |u: f64| coexistence_residual(params, u).map(|r| sign * r);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..300 {
        if f1 <= 0.0 {
            return Ok(Tangency::Split(x1));
        }
        if f2 <= 0.0 {
            return Ok(Tangency::Split(x2));
        }
        if b - a < 1e-13 * b.max(1.0) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    let (x, fx) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let scale = params.a + params.b * params.carrying_capacity();
    if fx.abs() <= 1e-12 * scale {
        Ok(Tangency::Double(x))
    } else {
        Ok(Tangency::None)
    }
}

fn scan_closed_form(params: &ModelParams) -> Result<CoexistenceSet> {
    let cap = params.carrying_capacity();
    let lo = 1e-6 * cap;
    let ratio = (cap / lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut grid = Vec::with_capacity(SCAN_POINTS);
    let mut u = lo;
    for i in 0..SCAN_POINTS {
        grid.push(if i + 1 == SCAN_POINTS { cap } else { u });
        u *= ratio;
    }
    let res: Vec<f64> = grid.iter().map(|&u| coexistence_residual(params, u)).collect::<Result<_>>()?;

    let mut roots: Vec<(f64, bool)> = Vec::new();
    let mut warnings = Vec::new();
    for i in 0..SCAN_POINTS - 1 {
        let (r0, r1) = (res[i], res[i + 1]);
        if r0 == 0.0 {
            roots.push((grid[i], false));
        } else if r0 * r1 < 0.0 {
            roots.push((bisect_root(params, grid[i], grid[i + 1], r0)?, false));
        }
    }
    // local extrema of |r| without a sign change may hide a root pair
    for i in 1..SCAN_POINTS - 1 {
        let (rm, r0, rp) = (res[i - 1], res[i], res[i + 1]);
        let same_sign = rm * r0 > 0.0 && r0 * rp > 0.0;
        if same_sign && r0.abs() <= rm.abs() && r0.abs() <= rp.abs() {
            let sign = r0.signum();
            match golden_tangency(params, grid[i - 1], grid[i + 1], sign)? {
                Tangency::Split(x) => {
                    let r_lo = res[i - 1];
                    roots.push((bisect_root(params, grid[i - 1], x, r_lo)?, false));
                    let r_x = coexistence_residual(params, x)?;
                    if r_x == 0.0 {
                        roots.push((x, false));
                    } else {
                        roots.push((bisect_root(params, x, grid[i + 1], r_x)?, false));
                    }
                    warnings.push(format!(
                        "root pair near u = {x:.6e} resolved below the scan grid spacing"
                    ));
                }
                Tangency::Double(x) => roots.push((x, true)),
                Tangency::None => {}
            }
        }
    }
    if res[SCAN_POINTS - 1] == 0.0 {
        roots.push((cap, false));
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    roots.dedup_by(|x, y| (x.0 - y.0).abs() <= 1e-10 * y.0.max(1e-300));

    let mut equilibria = Vec::with_capacity(roots.len());
    for (u, degenerate) in roots {
        let v = predator_nullcline_v(params, u)?;
        let mut s = State::new(u, v);
        if !degenerate {
            if let Some(polished) = refine_newton(params, s) {
                s = polished;
            }
        }
        equilibria.push(coexistence(params, s, degenerate));
    }
    Ok(CoexistenceSet { equilibria, warnings })
}

fn count_anomaly(params: &ModelParams, set: &CoexistenceSet) -> Option<String> {
    let n = set.simple_count();
    let pm = params.p + params.m;
    let expected = if pm >= 1.0 { n == 1 } else { n == 0 || n == 2 };
    (!expected && set.equilibria.iter().all(|e| !e.fold_degenerate)).then(|| {
        format!("anomaly: {n} coexistence equilibria with p + m = {pm}, expected {}", if pm >= 1.0 {
            "1"
        } else {
            "0 or 2"
        })
    })
}

/// Continue equilibria of `from` to `to` (same model, harvesting effort
/// raised) by damped Newton in `steps` increments of every parameter.
fn continue_equilibria(from: &ModelParams, starts: &[State], to: &ModelParams) -> Vec<State> {
    let mut out = Vec::new();
    'branch: for &start in starts {
        let mut s = start;
        let mut t = 0.0_f64;
        let mut dt = 1.0 / 16.0;
        while t < 1.0 {
            let t_next = (t + dt).min(1.0);
            let p = interpolate(from, to, t_next);
            match refine_newton(&p, s) {
                Some(next) if next.distance(&s) < 0.5 * (s.u + s.v).max(1e-6) => {
                    s = next;
                    t = t_next;
                    dt = (dt * 1.5).min(0.25);
                }
                _ => {
                    dt *= 0.5;
                    if dt < 1e-6 {
                        continue 'branch;
                    }
                }
            }
        }
        if !out.iter().any(|o: &State| o.distance(&s) < 1e-8 * (1.0 + s.u)) {
            out.push(s);
        }
    }
    out
}

fn interpolate(from: &ModelParams, to: &ModelParams, t: f64) -> ModelParams {
    let lerp = |x: f64, y: f64| x + t * (y - x);
    ModelParams {
        a: lerp(from.a, to.a),
        b: lerp(from.b, to.b),
        c: lerp(from.c, to.c),
        d: lerp(from.d, to.d),
        e: lerp(from.e, to.e),
        k: lerp(from.k, to.k),
        m: lerp(from.m, to.m),
        p: lerp(from.p, to.p),
        q: lerp(from.q, to.q),
        r: lerp(from.r, to.r),
    }
}

/// Coexistence equilibria, sorted by `u`.
///
/// Without harvesting the nullcline residual is scanned, sign changes are
/// bisected and tangencies resolved by golden-section search. With
/// harvesting the unharvested equilibria are continued in `q` by damped
/// Newton iteration.
pub fn find_coexistence(params: &ModelParams) -> Result<CoexistenceSet> {
    params.validate()?;
    if params.m >= 1.0 {
        return Err(Error::Unsupported("m = 1 (vertical predator nullcline)".into()));
    }
    if !params.is_harvested() {
        let mut set = scan_closed_form(params)?;
        if let Some(w) = count_anomaly(params, &set) {
            set.warnings.push(w);
        }
        return Ok(set);
    }
    let base = ModelParams { q: 0.0, ..*params };
    let start = scan_closed_form(&base)?;
    let seeds: Vec<State> = start.equilibria.iter().map(|e| e.location).collect();
    let mut found = continue_equilibria(&base, &seeds, params);
    found.sort_by(|x, y| x.u.total_cmp(&y.u));
    let mut warnings = start.warnings;
    if found.len() < seeds.len() {
        warnings.push(format!(
            "{} of {} branches lost while continuing in q",
            seeds.len() - found.len(),
            seeds.len()
        ));
    }
    Ok(CoexistenceSet {
        equilibria: found.into_iter().map(|s| coexistence(params, s, false)).collect(),
        warnings,
    })
}

/// `E₀`, `E₁` and every coexistence equilibrium.
pub fn all_equilibria(params: &ModelParams) -> Result<(Vec<Equilibrium>, Vec<String>)> {
    let set = find_coexistence(params)?;
    let boundary = |s: State, kind| Equilibrium {
        location: s,
        kind,
        jacobian: None,
        classification: Classification::NonSmooth,
        fold_degenerate: false,
    };
    let mut all = vec![
        boundary(State::new(0.0, 0.0), EquilibriumKind::Trivial),
        boundary(State::new(params.carrying_capacity(), 0.0), EquilibriumKind::Axial),
    ];
    all.extend(set.equilibria);
    Ok((all, set.warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2(k: f64) -> ModelParams {
        ModelParams::new(2.5, 0.3, 2.5, 2.0, 2.5, k, 0.4, 0.2)
    }

    fn fig3a(k: f64) -> ModelParams {
        ModelParams::new(2.5, 0.3, 2.5, 2.0, 2.5, k, 0.9, 0.5)
    }

    #[test]
    fn nullcline_values() {
        let p = fig3a(0.0);
        assert_eq!(predator_nullcline_v(&p, 0.0).unwrap(), 0.0);
        let p1 = ModelParams { e: 1.3, d: 1.3, m: 0.5, ..p };
        assert!((predator_nullcline_v(&p1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let u = 0.43392;
        let v = predator_nullcline_v(&p, u).unwrap();
        assert!((p.e * u.powf(p.p) * v.powf(p.m - 1.0) - p.d).abs() < 1e-8);
        let vertical = ModelParams { m: 1.0, ..p };
        assert!(predator_nullcline_v(&vertical, 1.0).is_err());
    }

    #[test]
    fn residual_is_singular_at_zero() {
        assert!(coexistence_residual(&fig2(0.0), 0.0).is_err());
        assert!(coexistence_residual(&fig2(0.0), 1e-3).unwrap() < 0.0);
    }

    #[test]
    fn residual_negative_at_carrying_capacity() {
        let p = fig2(0.0);
        assert!(coexistence_residual(&p, p.carrying_capacity()).unwrap() < 0.0);
    }

    #[test]
    fn residual_derivative_matches_central_difference() {
        let p = fig2(0.02);
        for u in [0.3, 1.0, 4.0, 7.5] {
            let h = 1e-6 * u;
            let fd = (coexistence_residual(&p, u + h).unwrap() - coexistence_residual(&p, u - h).unwrap())
                / (2.0 * h);
            let an = coexistence_residual_derivative(&p, u).unwrap();
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{u}: {fd} vs {an}");
        }
    }

    #[test]
    fn fig3a_residual_at_paper_point() {
        let r = coexistence_residual(&fig3a(15.093353), 0.43392).unwrap();
        assert!(r.abs() < 1e-3, "{r}");
    }

    #[test]
    fn fig2_two_then_none() {
        let set = find_coexistence(&fig2(0.0)).unwrap();
        assert_eq!(set.equilibria.len(), 2);
        assert_eq!(set.equilibria[0].classification, Classification::Saddle);
        assert!(set.equilibria[1].classification.is_stable());
        let e1 = set.equilibria[1].location;
        assert!((e1.u - 5.04667).abs() < 1e-4 && (e1.v - 2.48801).abs() < 1e-4);
        assert!(find_coexistence(&fig2(0.06)).unwrap().equilibria.is_empty());
    }

    #[test]
    fn fold_is_a_tangency() {
        // just past the fold the residual stays negative but nearly touches zero
        let p = fig2(0.042859);
        let best = (1..2000)
            .map(|i| coexistence_residual(&p, 0.5 + 5.0 * i as f64 / 2000.0).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best < 0.0 && best > -1e-4, "{best}");
    }

    #[test]
    fn fig3b_single_equilibrium() {
        let p = ModelParams::new(2.0, 0.2, 1.0, 0.7, 0.8, 0.061382, 0.6, 0.4);
        let set = find_coexistence(&p).unwrap();
        assert_eq!(set.equilibria.len(), 1);
        let s = set.equilibria[0].location;
        assert!((s.u - 2.26530).abs() < 1e-3 && (s.v - 3.16304).abs() < 1e-3, "{s:?}");
    }

    #[test]
    fn residuals_are_tight() {
        for p in [fig2(0.0), fig2(0.04), fig3a(15.0), fig3a(1.0)] {
            for e in find_coexistence(&p).unwrap().equilibria {
                let g = nullcline_residuals(&p, e.location);
                assert!(g[0].abs() < 1e-10 && g[1].abs() < 1e-10, "{g:?}");
                assert!(e.location.u > 0.0 && e.location.u < p.carrying_capacity());
            }
        }
    }

    #[test]
    fn hopf_flip_in_fig3a() {
        let below = find_coexistence(&fig3a(15.0)).unwrap().equilibria[0].classification;
        let above = find_coexistence(&fig3a(15.2)).unwrap().equilibria[0].classification;
        assert_eq!(below, Classification::UnstableFocus);
        assert_eq!(above, Classification::StableFocus);
    }

    #[test]
    fn harvesting_with_linear_term_shifts_death_rate() {
        let base = ModelParams::new(3.0, 0.2, 2.0, 1.0, 1.1, 0.08, 0.6, 0.5);
        let harvested = base.with_harvesting(0.2, 1.0);
        let shifted = ModelParams { d: 1.2, ..base };
        let h = find_coexistence(&harvested).unwrap().equilibria;
        let s = find_coexistence(&shifted).unwrap().equilibria;
        assert_eq!(h.len(), s.len());
        for (x, y) in h.iter().zip(&s) {
            assert!(x.location.distance(&y.location) < 1e-9, "{x:?} vs {y:?}");
        }
    }

    #[test]
    fn boundary_equilibria_are_non_smooth() {
        let p = fig2(0.0);
        let (all, _) = all_equilibria(&p).unwrap();
        assert_eq!(all[0].kind, EquilibriumKind::Trivial);
        assert_eq!(all[1].location, State::new(p.carrying_capacity(), 0.0));
        assert!(all[..2].iter().all(|e| e.classification == Classification::NonSmooth));
        assert_eq!(classify(&p, State::new(0.0, 1.0)), Classification::NonSmooth);
    }

    #[test]
    fn json_record_fields() {
        let set = find_coexistence(&fig2(0.0)).unwrap();
        let json = serde_json::to_value(&set.equilibria[0]).unwrap();
        for key in ["u", "v", "kind", "classification", "trace", "det"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["classification"], "saddle");
    }
}
