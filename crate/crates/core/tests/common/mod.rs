#![allow(dead_code)]

use predprey_core::bifurcation::find_hopf;
use predprey_core::dynamics::integrate;
use predprey_core::equilibria::{find_coexistence, nullcline_residuals, refine_newton};
use predprey_core::manifolds::{separatrix, verify_two_sided, ScanConfig};
use predprey_core::model::{jacobian, vector_field};
use predprey_core::presets::{fig2_params, fig3a_params, fig3b_params, fig5_params, harvest_params};
use predprey_core::{IntegratorConfig, ModelParams, Param, State};
use rand::Rng;

pub type Outcome = Result<(), String>;

/// Random parameter set across the model's admissible domain.
pub fn random_params<R: Rng>(rng: &mut R, harvest: bool) -> ModelParams {
    let p = ModelParams::new(
        rng.gen_range(0.5..4.0),
        rng.gen_range(0.1..1.0),
        rng.gen_range(0.3..3.0),
        rng.gen_range(0.2..2.5),
        rng.gen_range(0.3..3.0),
        rng.gen_range(0.0..2.0),
        rng.gen_range(0.1..1.0),
        rng.gen_range(0.1..1.0),
    );
    if harvest {
        p.with_harvesting(rng.gen_range(0.0..0.5), rng.gen_range(0.3..1.0))
    } else {
        p
    }
}

/// A family member from the figures with one parameter drawn at random.
pub fn random_family_member<R: Rng>(rng: &mut R) -> ModelParams {
    match rng.gen_range(0..5) {
        0 => fig2_params(rng.gen_range(0.0..0.2)),
        1 => fig3a_params(rng.gen_range(0.0..50.0)),
        2 => fig3b_params(rng.gen_range(0.0..1.0)),
        3 => fig5_params(rng.gen_range(0.0..3.0)),
        _ => harvest_params(0.0).with(Param::K, rng.gen_range(0.0..1.0)),
    }
}

pub fn check_nonnegative(params: &ModelParams, s0: State, cfg: &IntegratorConfig) -> Outcome {
    let tr = integrate(params, s0, cfg).map_err(|e| format!("{e} for {params:?} from {s0:?}"))?;
    for w in tr.samples.windows(2) {
        if !(w[1].t > w[0].t) {
            return Err(format!("times not increasing: {} then {}", w[0].t, w[1].t));
        }
    }
    match tr.samples.iter().find(|s| !(s.u >= 0.0 && s.v >= 0.0)) {
        Some(s) => Err(format!("negative sample {s:?} for {params:?} from {s0:?}")),
        None => Ok(()),
    }
}

/// `k = q = 0` and `u0 > a/b`: prey decreases while above `a/b` and never
/// climbs back past `a/b + 10·abs_tol`.
pub fn check_dissipative(params: &ModelParams, s0: State, cfg: &IntegratorConfig) -> Outcome {
    let cap = params.carrying_capacity();
    let bound = cap + 10.0 * cfg.abs_tol;
    let tr = integrate(params, s0, cfg).map_err(|e| e.to_string())?;
    for w in tr.samples.windows(2) {
        if w[0].u > bound && w[1].u > bound && w[1].u >= w[0].u {
            return Err(format!("u not decreasing above a/b: {} -> {} at t = {}", w[0].u, w[1].u, w[1].t));
        }
    }
    let Some(entry) = tr.samples.iter().position(|s| s.u <= bound) else {
        return Err(format!("u never fell to a/b = {cap}, last {:?}", tr.last_state()));
    };
    match tr.samples[entry..].iter().find(|s| s.u > bound) {
        Some(s) => Err(format!("u = {} exceeds a/b + 10 abs_tol = {bound} at t = {}", s.u, s.t)),
        None => Ok(()),
    }
}

pub fn check_jacobian_fd(params: &ModelParams, s: State) -> Outcome {
    let j = jacobian(params, s).map_err(|e| e.to_string())?;
    let f = |u: f64, v: f64| vector_field(params, State::new(u, v)).map(|(a, b)| [a, b]);
    let hu = 1e-5 * s.u;
    let hv = 1e-5 * s.v;
    let (up, um) = (f(s.u + hu, s.v).unwrap(), f(s.u - hu, s.v).unwrap());
    let (vp, vm) = (f(s.u, s.v + hv).unwrap(), f(s.u, s.v - hv).unwrap());
    let fd = [
        [(up[0] - um[0]) / (2.0 * hu), (vp[0] - vm[0]) / (2.0 * hv)],
        [(up[1] - um[1]) / (2.0 * hu), (vp[1] - vm[1]) / (2.0 * hv)],
    ];
    let exact = [[j.j11, j.j12], [j.j21, j.j22]];
    let scale = exact.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    let err = (0..4).map(|i| (exact[i / 2][i % 2] - fd[i / 2][i % 2]).abs()).fold(0.0, f64::max);
    if err <= 1e-5 * scale {
        Ok(())
    } else {
        Err(format!("jacobian {exact:?} vs fd {fd:?} at {s:?}: err {err:e}"))
    }
}

/// Nullcline residuals, location bounds and the coexistence forms of `j11`, `j22`.
pub fn check_coexistence_identities(params: &ModelParams) -> Outcome {
    let set = find_coexistence(params).map_err(|e| e.to_string())?;
    let ModelParams { b, c, d, m, p, .. } = *params;
    for eq in &set.equilibria {
        let s = eq.location;
        let res = nullcline_residuals(params, s);
        if res.iter().any(|r| r.abs() >= 1e-10) {
            return Err(format!("residuals {res:?} at {s:?}"));
        }
        if !(s.u > 0.0 && s.u < params.carrying_capacity() && s.v > 0.0) {
            return Err(format!("{s:?} outside (0, a/b) x (0, inf)"));
        }
        let j = jacobian(params, s).map_err(|e| e.to_string())?;
        let j22 = -d * (1.0 - m);
        let j11 = -s.u * (b - c * (1.0 - p) * s.u.powf(p - 2.0) * s.v.powf(m));
        if (j.j22 - j22).abs() > 1e-8 || (j.j11 - j11).abs() > 1e-8 {
            return Err(format!("j11 {} vs {j11}, j22 {} vs {j22} at {s:?}", j.j11, j.j22));
        }
    }
    Ok(())
}

/// Every Hopf point in `interval` passes the trace, det and identity tests.
pub fn check_hopf_points(params: &ModelParams, param: Param, interval: (f64, f64)) -> Result<usize, String> {
    let found = find_hopf(params, param, interval).map_err(|e| e.to_string())?;
    for h in &found.points {
        let ok_trace = h.trace.abs() < 1e-9 && h.det > 0.0;
        let residual = h.diagnostics.get("identity_residual").copied().unwrap_or(0.0);
        if !ok_trace || residual.abs() >= 1e-8 {
            return Err(format!("{param} = {}: trace {:e}, det {}, identity residual {residual:e}", h.value, h.trace, h.det));
        }
    }
    Ok(found.points.len())
}

pub fn check_two_sided(params: &ModelParams, scan: &ScanConfig, cfg: &IntegratorConfig) -> Result<usize, String> {
    let sep = separatrix(params, scan, cfg).map_err(|e| e.to_string())?;
    let flags = verify_two_sided(params, &sep, cfg).map_err(|e| e.to_string())?;
    match flags.iter().position(|ok| !ok) {
        Some(i) => Err(format!("point {:?} is one-sided", sep.polyline[i])),
        None => Ok(flags.len()),
    }
}

/// One equilibrium when `p + m ≥ 1`, none or two when `p + m < 1`.
pub fn check_equilibrium_count(params: &ModelParams) -> Outcome {
    let n = find_coexistence(params).map_err(|e| e.to_string())?.simple_count();
    let ok = if params.p + params.m >= 1.0 { n == 1 } else { n == 0 || n == 2 };
    if ok {
        Ok(())
    } else {
        Err(format!("{n} equilibria with p + m = {} for {params:?}", params.p + params.m))
    }
}

/// Polishing each closed-form equilibrium by 2-D Newton from a nearby guess
/// returns it to within 1e-9.
pub fn check_newton_agreement(params: &ModelParams) -> Outcome {
    let set = find_coexistence(params).map_err(|e| e.to_string())?;
    for eq in set.equilibria.iter().filter(|e| !e.fold_degenerate) {
        let s = eq.location;
        let guess = State::new(s.u * (1.0 + 1e-7), s.v * (1.0 - 1e-7));
        let polished = refine_newton(params, guess).ok_or_else(|| format!("newton failed near {s:?}"))?;
        if polished.distance(&s) > 1e-9 {
            return Err(format!("closed form {s:?} vs newton {polished:?}"));
        }
    }
    Ok(())
}

/// Halving both tolerances moves the terminal state by less than ten times
/// the coarse tolerance, measured in the integrator's mixed error norm.
pub fn check_tolerance_halving(params: &ModelParams, s0: State, tau: f64, t_end: f64) -> Outcome {
    let base = IntegratorConfig::default().with_t_end(t_end);
    let coarse = integrate(params, s0, &base.with_tolerances(tau, tau)).map_err(|e| e.to_string())?;
    let fine = integrate(params, s0, &base.with_tolerances(tau / 2.0, tau / 2.0)).map_err(|e| e.to_string())?;
    let (a, b) = (coarse.last_state(), fine.last_state());
    for (x, y) in [(a.u, b.u), (a.v, b.v)] {
        if (x - y).abs() >= 10.0 * tau * (1.0 + x.abs()) {
            return Err(format!("terminal {a:?} vs {b:?} at tolerance {tau:e}"));
        }
    }
    Ok(())
}

/// Extinction times at tolerance `tau` and `tau/10` agree within `100·tau`.
pub fn check_extinction_refinement(params: &ModelParams, s0: State, tau: f64) -> Result<f64, String> {
    let base = IntegratorConfig::default().with_t_end(50.0);
    let t = |tol: f64| -> Result<f64, String> {
        integrate(params, s0, &base.with_tolerances(tol, tol))
            .map_err(|e| e.to_string())?
            .extinction_time()
            .ok_or_else(|| format!("no extinction at tolerance {tol:e}"))
    };
    let (t1, t2) = (t(tau)?, t(tau / 10.0)?);
    if (t1 - t2).abs() < 100.0 * tau {
        Ok(t1)
    } else {
        Err(format!("t_e {t1} vs {t2} at tolerance {tau:e}"))
    }
}
