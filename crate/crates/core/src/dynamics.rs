//! Adaptive time integration of the (non-smooth) vector field.
//!
//! The scheme is the Dormand–Prince 5(4) pair with an embedded error
//! estimate. Any stage leaving the first quadrant rejects the step and halves
//! it. When the prey density falls below the extinction threshold the
//! crossing time is located by bisection on the step size, `u` is clamped to
//! exactly zero and integration continues on the prey-free flow
//! `dv/dt = −d·v − q·vʳ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equilibria;
use crate::error::{Error, Result};
use crate::model::{rhs, ModelParams, State};

/// Tolerances, step bounds and event thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Prey density below which the prey is declared extinct.
    pub extinction_threshold: f64,
    /// `‖f(u, v)‖` below which a step counts towards convergence.
    pub convergence_tol: f64,
    /// Number of consecutive calm accepted steps needed to report convergence.
    pub convergence_window: usize,
    pub t_end: f64,
    /// Relative return-map displacement below which an orbit is a cycle.
    pub cycle_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_init: 1e-4,
            h_min: 1e-14,
            h_max: 1.0,
            extinction_threshold: 1e-9,
            convergence_tol: 1e-8,
            convergence_window: 20,
            t_end: 500.0,
            cycle_tol: 1e-4,
            max_steps: 20_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("h_min", self.h_min),
            ("extinction_threshold", self.extinction_threshold),
            ("convergence_tol", self.convergence_tol),
            ("cycle_tol", self.cycle_tol),
        ];
        for (name, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {x}")));
            }
        }
        if !(self.h_min <= self.h_init && self.h_init <= self.h_max && self.h_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < h_min <= h_init <= h_max, got {} / {} / {}",
                self.h_min, self.h_init, self.h_max
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.convergence_window == 0 {
            return Err(Error::InvalidConfig("convergence_window must be >= 1".into()));
        }
        Ok(())
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Termination {
    HorizonReached,
    ConvergedTo { state: State, residual: f64 },
    PreyExtinct { t_e: f64 },
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::HorizonReached => write!(f, "HorizonReached"),
            Termination::ConvergedTo { state, residual } => {
                write!(f, "ConvergedTo(u={},v={},residual={})", state.u, state.v, residual)
            }
            Termination::PreyExtinct { t_e } => write!(f, "PreyExtinct(t_e={t_e})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

impl Sample {
    pub fn state(&self) -> State {
        State::new(self.u, self.v)
    }
}

/// A time-stamped orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn last_state(&self) -> State {
        self.samples.last().map(Sample::state).unwrap_or_default()
    }

    pub fn extinction_time(&self) -> Option<f64> {
        match self.termination {
            Termination::PreyExtinct { t_e } => Some(t_e),
            _ => None,
        }
    }

    /// CSV with header `t,u,v` and a trailing `# termination=...` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.samples.len() + 64);
        out.push_str("t,u,v\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.t, s.u, s.v));
        }
        out.push_str(&format!("# termination={}\n", self.termination));
        out
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Result of a single uncontrolled Runge–Kutta step.
#[derive(Debug, Clone, Copy)]
struct Attempt {
    y: [f64; 2],
    f: [f64; 2],
    err: [f64; 2],
}

fn attempt(params: &ModelParams, y: [f64; 2], f0: [f64; 2], h: f64) -> Result<Option<Attempt>> {
    let mut k = [[0.0; 2]; 7];
    k[0] = f0;
    for i in 1..7 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let aij = A[i][j];
            if aij != 0.0 {
                yi[0] += h * aij * kj[0];
                yi[1] += h * aij * kj[1];
            }
        }
        if yi[0] < 0.0 || yi[1] < 0.0 {
            return Ok(None);
        }
        let fi = rhs(params, yi[0], yi[1]);
        if !fi[0].is_finite() || !fi[1].is_finite() {
            return Err(Error::EvaluationFailure {
                t: f64::NAN,
                what: format!("stage {i} evaluated to {fi:?} at {yi:?}"),
            });
        }
        k[i] = fi;
    }
    // stage 7 is evaluated at the 5th-order solution (FSAL)
    let mut y_new = y;
    for (j, kj) in k.iter().enumerate().take(6) {
        y_new[0] += h * A[6][j] * kj[0];
        y_new[1] += h * A[6][j] * kj[1];
    }
    let mut err = [0.0; 2];
    for (j, kj) in k.iter().enumerate() {
        err[0] += h * E[j] * kj[0];
        err[1] += h * E[j] * kj[1];
    }
    Ok(Some(Attempt { y: y_new, f: k[6], err }))
}

/// Outcome of [`Integrator::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepEvent {
    Accepted,
    /// The prey crossed the extinction threshold at `t_e`; the current state
    /// is `(0, v(t_e))`.
    Extinct { t_e: f64 },
    /// `t_end` reached.
    Finished,
}

/// Step-by-step driver. [`integrate`] is built on it; other modules use it
/// directly to watch for section crossings.
#[derive(Debug, Clone)]
pub struct Integrator<'p> {
    params: &'p ModelParams,
    cfg: IntegratorConfig,
    t: f64,
    y: [f64; 2],
    f: [f64; 2],
    h: f64,
    stats: StepStats,
    extinct_at: Option<f64>,
}

impl<'p> Integrator<'p> {
    pub fn new(params: &'p ModelParams, s0: State, cfg: IntegratorConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        if !(s0.is_nonnegative() && s0.u.is_finite() && s0.v.is_finite()) {
            return Err(Error::InvalidConfig(format!("initial state must be >= 0, got {s0:?}")));
        }
        let mut y = [s0.u, s0.v];
        let mut extinct_at = None;
        if y[0] < cfg.extinction_threshold {
            y[0] = 0.0;
            extinct_at = Some(0.0);
        }
        let f = rhs(params, y[0], y[1]);
        if !f[0].is_finite() || !f[1].is_finite() {
            return Err(Error::EvaluationFailure { t: 0.0, what: format!("f(y0) = {f:?}") });
        }
        Ok(Integrator {
            params,
            cfg,
            t: 0.0,
            y,
            f,
            h: cfg.h_init,
            stats: StepStats::default(),
            extinct_at,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> State {
        State::new(self.y[0], self.y[1])
    }

    /// Vector field at the current state.
    pub fn derivative(&self) -> [f64; 2] {
        self.f
    }

    pub fn extinct_at(&self) -> Option<f64> {
        self.extinct_at
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    fn error_norm(&self, a: &Attempt) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            let sc = self.cfg.abs_tol + self.cfg.rel_tol * self.y[i].abs().max(a.y[i].abs());
            acc += (a.err[i] / sc).powi(2);
        }
        (acc / 2.0).sqrt()
    }

    fn stiffness(&self) -> Error {
        Error::StiffnessFailure { t: self.t, state: self.state() }
    }

    /// Advance by one accepted step.
    pub fn step(&mut self) -> Result<StepEvent> {
        let remaining = self.cfg.t_end - self.t;
        if remaining <= 1e-13 * self.cfg.t_end.abs().max(1.0) {
            return Ok(StepEvent::Finished);
        }
        if self.stats.accepted >= self.cfg.max_steps {
            return Err(self.stiffness());
        }
        // (0, 0) is stationary
        if self.y == [0.0, 0.0] {
            self.t = self.cfg.t_end;
            self.stats.accepted += 1;
            return Ok(StepEvent::Accepted);
        }
        loop {
            let clipped = self.h.min(remaining);
            let h = clipped;
            let Some(att) = attempt(self.params, self.y, self.f, h)? else {
                self.stats.rejected += 1;
                self.h = h * 0.5;
                if self.h < self.cfg.h_min {
                    return Err(self.stiffness());
                }
                continue;
            };
            if att.y[0] < 0.0 || att.y[1] < 0.0 {
                self.stats.rejected += 1;
                self.h = h * 0.5;
                if self.h < self.cfg.h_min {
                    return Err(self.stiffness());
                }
                continue;
            }
            let err = self.error_norm(&att);
            if !err.is_finite() {
                return Err(Error::EvaluationFailure {
                    t: self.t,
                    what: format!("non-finite error estimate from {:?}", self.y),
                });
            }
            if err > 1.0 {
                self.stats.rejected += 1;
                let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
                self.h = h * factor;
                if self.h < self.cfg.h_min {
                    return Err(self.stiffness());
                }
                continue;
            }

            let growth = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let next_h = (h * growth).min(self.cfg.h_max).max(self.cfg.h_min);

            if self.extinct_at.is_none() && att.y[0] < self.cfg.extinction_threshold {
                let (t_e, v_e) = self.locate_extinction(h)?;
                self.t = t_e;
                self.y = [0.0, v_e];
                self.clamp_predator();
                self.f = rhs(self.params, self.y[0], self.y[1]);
                self.h = next_h;
                self.extinct_at = Some(t_e);
                self.stats.accepted += 1;
                return Ok(StepEvent::Extinct { t_e });
            }

            self.t = if h == remaining { self.cfg.t_end } else { self.t + h };
            self.y = att.y;
            self.f = att.f;
            self.clamp_predator();
            self.h = next_h;
            self.stats.accepted += 1;
            return Ok(StepEvent::Accepted);
        }
    }

    /// Predator densities below the threshold are zeroed once prey is gone,
    /// and always under sublinear harvesting, which empties `v` in finite time.
    fn clamp_predator(&mut self) {
        let collapses = self.y[0] == 0.0 || (self.params.q > 0.0 && self.params.r < 1.0);
        if collapses && self.y[1] < self.cfg.extinction_threshold && self.y[1] != 0.0 {
            self.y[1] = 0.0;
            self.f = rhs(self.params, self.y[0], 0.0);
        }
    }

    /// Bisect the step size on `u(t + h') < ε`; returns the crossing time and
    /// the predator density there.
    fn locate_extinction(&self, h: f64) -> Result<(f64, f64)> {
        let eps = self.cfg.extinction_threshold;
        let (mut lo, mut hi) = (0.0_f64, h);
        let mut v_hi = None;
        for _ in 0..200 {
            if hi - lo <= self.cfg.h_min {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match attempt(self.params, self.y, self.f, mid)? {
                Some(a) if a.y[0] >= eps => lo = mid,
                Some(a) => {
                    hi = mid;
                    v_hi = Some(a.y[1]);
                }
                None => hi = mid,
            }
        }
        let v = match v_hi {
            Some(v) if hi - lo <= self.cfg.h_min * 4.0 => v,
            _ => match attempt(self.params, self.y, self.f, hi)? {
                Some(a) if a.y[1] >= 0.0 => a.y[1],
                _ => match attempt(self.params, self.y, self.f, lo)? {
                    Some(a) => a.y[1],
                    None => self.y[1],
                },
            },
        };
        Ok((self.t + hi, v.max(0.0)))
    }

    /// Take an uncontrolled step of size `h` from the current state without
    /// committing it. Returns `None` if a stage leaves the first quadrant.
    pub fn peek(&self, h: f64) -> Result<Option<State>> {
        Ok(attempt(self.params, self.y, self.f, h)?.map(|a| State::new(a.y[0], a.y[1])))
    }

    /// Given that `g` changes sign over the step just taken from
    /// `(t0, s0)` (with derivative `f0`) to the current state, bisect the
    /// step size to locate the crossing. Returns `(t, state)` at the crossing.
    pub fn locate_crossing<G>(&self, t0: f64, s0: State, f0: [f64; 2], g: G) -> Result<(f64, State)>
    where
        G: Fn(State) -> f64,
    {
        let h = self.t - t0;
        let g0 = g(s0);
        let (mut lo, mut hi) = (0.0_f64, h);
        let mut best = self.state();
        for _ in 0..100 {
            if hi - lo <= 1e-15 * h.max(1e-300) || hi - lo <= self.cfg.h_min * 1e-2 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match attempt(self.params, [s0.u, s0.v], f0, mid)? {
                Some(a) => {
                    let s = State::new(a.y[0], a.y[1]);
                    if g(s).signum() == g0.signum() && g(s) != 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                        best = s;
                    }
                }
                None => hi = mid,
            }
        }
        Ok((t0 + hi, best))
    }
}

/// Integrate from `s0` until `t_end`, convergence, or failure. Prey
/// extinction is recorded and integration continues on the prey-free flow.
pub fn integrate(params: &ModelParams, s0: State, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let mut it = Integrator::new(params, s0, *cfg)?;
    let mut samples = vec![Sample { t: 0.0, u: it.state().u, v: it.state().v }];
    let mut calm = 0usize;
    let mut termination = None;

    loop {
        match it.step()? {
            StepEvent::Finished => break,
            StepEvent::Accepted | StepEvent::Extinct { .. } => {
                let s = it.state();
                samples.push(Sample { t: it.t(), u: s.u, v: s.v });
            }
        }
        if it.extinct_at().is_none() {
            let [du, dv] = it.derivative();
            let residual = du.hypot(dv);
            if residual < cfg.convergence_tol {
                calm += 1;
                if calm >= cfg.convergence_window {
                    termination = Some(Termination::ConvergedTo { state: it.state(), residual });
                    break;
                }
            } else {
                calm = 0;
            }
        }
    }

    let termination = termination.unwrap_or_else(|| match it.extinct_at() {
        Some(t_e) => Termination::PreyExtinct { t_e },
        None => Termination::HorizonReached,
    });
    Ok(Trajectory { samples, termination, stats: it.stats() })
}

/// Long-time fate of an initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum OutcomeClass {
    Coexistence { state: State },
    Extinction { t_e: f64 },
    Cycle { amplitude: f64 },
    Undecided,
}

impl OutcomeClass {
    pub fn label(&self) -> &'static str {
        match self {
            OutcomeClass::Coexistence { .. } => "coexistence",
            OutcomeClass::Extinction { .. } => "extinction",
            OutcomeClass::Cycle { .. } => "cycle",
            OutcomeClass::Undecided => "undecided",
        }
    }

    /// Coexistence or cycle: the prey persists.
    pub fn persists(&self) -> bool {
        matches!(self, OutcomeClass::Coexistence { .. } | OutcomeClass::Cycle { .. })
    }
}

/// Interior equilibrium used as the centre of the cycle-detection section:
/// the largest-`u` coexistence equilibrium that is not a saddle.
pub fn cycle_reference(params: &ModelParams) -> Option<State> {
    let set = equilibria::find_coexistence(params).ok()?;
    set.equilibria
        .iter()
        .rev()
        .find(|e| e.classification != equilibria::Classification::Saddle)
        .map(|e| e.location)
}

/// Classify the fate of `s0`; see [`classify_outcome_with`].
pub fn classify_outcome(params: &ModelParams, s0: State, cfg: &IntegratorConfig) -> Result<OutcomeClass> {
    let reference = cycle_reference(params);
    classify_outcome_with(params, s0, cfg, reference)
}

/// Like [`classify_outcome`] with an explicit cycle-detection centre.
///
/// Cycles are detected on the half-line `v = v*, u > u*` through
/// `reference`, crossed upward. An orbit is a cycle when two consecutive
/// return displacements are below `cycle_tol` relative to the amplitude and
/// the geometric extrapolation of the amplitudes does not tend to zero.
pub fn classify_outcome_with(
    params: &ModelParams,
    s0: State,
    cfg: &IntegratorConfig,
    reference: Option<State>,
) -> Result<OutcomeClass> {
    let mut it = Integrator::new(params, s0, *cfg)?;
    if let Some(t_e) = it.extinct_at() {
        return Ok(OutcomeClass::Extinction { t_e });
    }
    let mut calm = 0usize;
    let mut returns: Vec<f64> = Vec::new();
    let mut small_moves = 0usize;

    loop {
        let (t0, s0, f0) = (it.t(), it.state(), it.derivative());
        match it.step()? {
            StepEvent::Finished => return Ok(OutcomeClass::Undecided),
            StepEvent::Extinct { t_e } => return Ok(OutcomeClass::Extinction { t_e }),
            StepEvent::Accepted => {}
        }
        let [du, dv] = it.derivative();
        let residual = du.hypot(dv);
        if residual < cfg.convergence_tol {
            calm += 1;
            if calm >= cfg.convergence_window {
                return Ok(OutcomeClass::Coexistence { state: it.state() });
            }
        } else {
            calm = 0;
        }

        let Some(eq) = reference else { continue };
        let s1 = it.state();
        if s0.v < eq.v && s1.v >= eq.v && s0.u > eq.u && s1.u > eq.u {
            let (_, hit) = it.locate_crossing(t0, s0, f0, |s| s.v - eq.v)?;
            returns.push(hit.u - eq.u);
            let n = returns.len();
            if n >= 3 {
                let (a0, a1, a2) = (returns[n - 3], returns[n - 2], returns[n - 1]);
                let (d1, d2) = (a1 - a0, a2 - a1);
                if d2.abs() < cfg.cycle_tol * a2.abs() && d1.abs() < cfg.cycle_tol * a1.abs() {
                    small_moves += 1;
                } else {
                    small_moves = 0;
                }
                if small_moves >= 1 {
                    let rho = if d1 != 0.0 { d2 / d1 } else { 0.0 };
                    let limit = if rho > 0.0 && rho < 1.0 { a2 + d2 * rho / (1.0 - rho) } else { a2 };
                    if limit > 0.5 * a2 {
                        return Ok(OutcomeClass::Cycle { amplitude: limit });
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2(k: f64) -> ModelParams {
        ModelParams::new(2.5, 0.3, 2.5, 2.0, 2.5, k, 0.4, 0.2)
    }

    #[test]
    fn zero_horizon_keeps_only_initial_sample() {
        let cfg = IntegratorConfig::default().with_t_end(0.0);
        let tr = integrate(&fig2(0.0), State::new(4.8, 8.3), &cfg).unwrap();
        assert_eq!(tr.samples.len(), 1);
        assert_eq!(tr.termination, Termination::HorizonReached);
    }

    #[test]
    fn prey_free_flow_decays_exponentially() {
        let p = fig2(0.0);
        let cfg = IntegratorConfig::default().with_t_end(5.0);
        let tr = integrate(&p, State::new(0.0, 3.0), &cfg).unwrap();
        assert_eq!(tr.extinction_time(), Some(0.0));
        for s in &tr.samples {
            assert_eq!(s.u, 0.0);
            let exact = 3.0 * (-p.d * s.t).exp();
            assert!((s.v - exact).abs() <= 1e-6 * exact, "{} vs {}", s.v, exact);
        }
    }

    #[test]
    fn fig6_outcomes() {
        let cfg = IntegratorConfig::default();
        let tr = integrate(&fig2(0.0), State::new(4.8, 8.3), &cfg).unwrap();
        assert!(matches!(tr.termination, Termination::ConvergedTo { .. }), "{}", tr.termination);
        let tr = integrate(&fig2(0.03), State::new(4.8, 8.3), &cfg).unwrap();
        let t_e = tr.extinction_time().expect("prey should go extinct");
        assert!(t_e > 0.0 && t_e < 10.0);
    }

    #[test]
    fn samples_strictly_increasing_and_nonnegative() {
        let tr = integrate(&fig2(0.03), State::new(4.8, 8.3), &IntegratorConfig::default().with_t_end(30.0))
            .unwrap();
        for w in tr.samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        let t_e = tr.extinction_time().unwrap();
        for s in &tr.samples {
            assert!(s.u >= 0.0 && s.v >= 0.0);
            if s.t >= t_e {
                assert_eq!(s.u, 0.0);
            }
        }
    }

    #[test]
    fn csv_has_header_and_trailer() {
        let tr = integrate(&fig2(0.03), State::new(4.8, 8.3), &IntegratorConfig::default().with_t_end(5.0))
            .unwrap();
        let csv = tr.to_csv();
        assert!(csv.starts_with("t,u,v\n"));
        assert!(csv.trim_end().lines().last().unwrap().starts_with("# termination=PreyExtinct(t_e="));
    }

    #[test]
    fn config_validation() {
        let bad = IntegratorConfig { h_min: 1.0, h_init: 0.1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(integrate(&fig2(0.0), State::new(-1.0, 1.0), &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn harvested_prey_free_flow_clamps_predator() {
        // r < 1: the predator reaches zero in finite time once the prey is gone
        let p = fig2(0.0).with_harvesting(0.5, 0.5);
        let tr = integrate(&p, State::new(0.0, 0.2), &IntegratorConfig::default().with_t_end(20.0)).unwrap();
        let last = tr.last_state();
        assert_eq!(last, State::new(0.0, 0.0));
        assert_eq!(tr.samples.last().unwrap().t, 20.0);
    }

    #[test]
    fn sublinear_harvest_empties_predator_with_prey_present() {
        let p = ModelParams::new(1.5, 0.9, 0.54, 2.1, 2.2, 0.7, 0.95, 0.99).with_harvesting(0.44, 0.54);
        let tr = integrate(&p, State::new(5.0, 1.3), &IntegratorConfig::default().with_t_end(30.0)).unwrap();
        let last = tr.last_state();
        assert_eq!(last.v, 0.0);
        assert!((last.u - p.carrying_capacity()).abs() < 1e-6);
    }
}
