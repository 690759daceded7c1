//! Closed-form evaluation of the model: vector field, fear factor, Jacobian
//! and the third-order Taylor expansion about a coexistence equilibrium.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ten scalar parameters of the (optionally harvested) model.
///
/// `q = 0` is the unharvested model; `r` is then irrelevant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Prey birth rate.
    pub a: f64,
    /// Prey intraspecific competition.
    pub b: f64,
    /// Predation rate.
    pub c: f64,
    /// Predator death rate.
    pub d: f64,
    /// Biomass conversion efficiency.
    pub e: f64,
    /// Strength of fear.
    pub k: f64,
    /// Mutual interference exponent.
    pub m: f64,
    /// Herd exponent.
    pub p: f64,
    /// Harvesting effort.
    #[serde(default)]
    pub q: f64,
    /// Harvesting exponent.
    #[serde(default = "default_r")]
    pub r: f64,
}

fn default_r() -> f64 {
    1.0
}

impl ModelParams {
    /// Unharvested parameter set (`q = 0`, `r = 1`).
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, k: f64, m: f64, p: f64) -> Self {
        ModelParams { a, b, c, d, e, k, m, p, q: 0.0, r: 1.0 }
    }

    pub fn with_harvesting(mut self, q: f64, r: f64) -> Self {
        self.q = q;
        self.r = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.a, self.b, self.c, self.d, self.e, self.k, self.m, self.p, self.q, self.r,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite value in {self:?}")));
        }
        for (name, x) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d), ("e", self.e)] {
            if x <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {x}")));
            }
        }
        if self.k < 0.0 {
            return Err(Error::InvalidParams(format!("k must be >= 0, got {}", self.k)));
        }
        if self.q < 0.0 {
            return Err(Error::InvalidParams(format!("q must be >= 0, got {}", self.q)));
        }
        for (name, x) in [("m", self.m), ("p", self.p), ("r", self.r)] {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::InvalidParams(format!("{name} must lie in (0, 1], got {x}")));
            }
        }
        Ok(())
    }

    /// Prey carrying capacity `a/b` (location of the axial equilibrium).
    pub fn carrying_capacity(&self) -> f64 {
        self.a / self.b
    }

    pub fn is_harvested(&self) -> bool {
        self.q != 0.0
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::A => self.a,
            Param::B => self.b,
            Param::C => self.c,
            Param::D => self.d,
            Param::E => self.e,
            Param::K => self.k,
            Param::M => self.m,
            Param::P => self.p,
            Param::Q => self.q,
            Param::R => self.r,
        }
    }

    pub fn set(&mut self, param: Param, value: f64) {
        match param {
            Param::A => self.a = value,
            Param::B => self.b = value,
            Param::C => self.c = value,
            Param::D => self.d = value,
            Param::E => self.e = value,
            Param::K => self.k = value,
            Param::M => self.m = value,
            Param::P => self.p = value,
            Param::Q => self.q = value,
            Param::R => self.r = value,
        }
    }

    /// Copy with one parameter replaced.
    pub fn with(&self, param: Param, value: f64) -> Self {
        let mut out = *self;
        out.set(param, value);
        out
    }
}

/// Parameter names, used to address a single parameter in scans and
/// continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    A,
    B,
    C,
    D,
    E,
    K,
    M,
    P,
    Q,
    R,
}

impl Param {
    pub const ALL: [Param; 10] = [
        Param::A,
        Param::B,
        Param::C,
        Param::D,
        Param::E,
        Param::K,
        Param::M,
        Param::P,
        Param::Q,
        Param::R,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::C => "c",
            Param::D => "d",
            Param::E => "e",
            Param::K => "k",
            Param::M => "m",
            Param::P => "p",
            Param::Q => "q",
            Param::R => "r",
        }
    }

    /// Parameters accepted by the one-parameter bifurcation detectors.
    pub fn is_bifurcation_param(self) -> bool {
        matches!(self, Param::A | Param::B | Param::C | Param::D | Param::E | Param::K | Param::Q)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownParam(s.to_string()))
    }
}

/// A point `(u, v)` of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub v: f64,
}

impl State {
    pub const fn new(u: f64, v: f64) -> Self {
        State { u, v }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.u >= 0.0 && self.v >= 0.0
    }

    pub fn is_interior(&self) -> bool {
        self.u > 0.0 && self.v > 0.0
    }

    pub fn distance(&self, other: &State) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// `x^e` with `0^e = 0` for `e > 0`, independent of the platform `powf`.
#[inline]
pub fn pow0(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// Fear factor `1/(1 + k·v)`.
#[inline]
pub fn fear_factor(k: f64, v: f64) -> f64 {
    1.0 / (1.0 + k * v)
}

/// Right-hand side without finiteness checks; used by the integrator.
#[inline]
pub(crate) fn rhs(params: &ModelParams, u: f64, v: f64) -> [f64; 2] {
    let ModelParams { a, b, c, d, e, k, m, p, q, r } = *params;
    let interaction = pow0(u, p) * pow0(v, m);
    let du = a * u * fear_factor(k, v) - b * u * u - c * interaction;
    let dv = -d * v - q * pow0(v, r) + e * interaction;
    [du, dv]
}

/// `(du/dt, dv/dt)` at `s`.
pub fn vector_field(params: &ModelParams, s: State) -> Result<(f64, f64)> {
    if !s.is_nonnegative() {
        return Err(Error::InvalidConfig(format!("state outside the first quadrant: {s:?}")));
    }
    let [du, dv] = rhs(params, s.u, s.v);
    if !du.is_finite() || !dv.is_finite() {
        return Err(Error::EvaluationFailure {
            t: f64::NAN,
            what: format!("vector field at {s:?} is ({du}, {dv})"),
        });
    }
    Ok((du, dv))
}

/// 2×2 real matrix `[[j11, j12], [j21, j22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub j11: f64,
    pub j12: f64,
    pub j21: f64,
    pub j22: f64,
}

/// One eigenvalue `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Jacobian2 {
    pub fn trace(&self) -> f64 {
        self.j11 + self.j22
    }

    pub fn det(&self) -> f64 {
        self.j11 * self.j22 - self.j12 * self.j21
    }

    /// `tr² − 4·det`; negative for a focus.
    pub fn discriminant(&self) -> f64 {
        let t = self.trace();
        t * t - 4.0 * self.det()
    }

    /// Roots of `η² − tr·η + det = 0`, larger real part first.
    pub fn eigenvalues(&self) -> [Eigenvalue; 2] {
        let t = self.trace();
        let disc = self.discriminant();
        if disc >= 0.0 {
            let s = disc.sqrt();
            // avoid cancellation in the smaller root
            let big = 0.5 * (t + t.signum() * s);
            let other = if big != 0.0 { self.det() / big } else { 0.5 * (t - s) };
            let (hi, lo) = if big >= other { (big, other) } else { (other, big) };
            [Eigenvalue { re: hi, im: 0.0 }, Eigenvalue { re: lo, im: 0.0 }]
        } else {
            let w = 0.5 * (-disc).sqrt();
            [
                Eigenvalue { re: 0.5 * t, im: w },
                Eigenvalue { re: 0.5 * t, im: -w },
            ]
        }
    }

    pub fn transpose(&self) -> Jacobian2 {
        Jacobian2 { j11: self.j11, j12: self.j21, j21: self.j12, j22: self.j22 }
    }

    pub fn mul_vec(&self, x: [f64; 2]) -> [f64; 2] {
        [self.j11 * x[0] + self.j12 * x[1], self.j21 * x[0] + self.j22 * x[1]]
    }

    /// Solve `J·x = rhs`; `None` if singular.
    pub fn solve(&self, rhs: [f64; 2]) -> Option<[f64; 2]> {
        let det = self.det();
        let scale = self.j11.abs().max(self.j12.abs()).max(self.j21.abs()).max(self.j22.abs());
        if det == 0.0 || det.abs() <= 1e-300 * scale * scale || !det.is_finite() {
            return None;
        }
        Some([
            (self.j22 * rhs[0] - self.j12 * rhs[1]) / det,
            (self.j11 * rhs[1] - self.j21 * rhs[0]) / det,
        ])
    }
}

fn require_interior(s: State, what: &'static str) -> Result<()> {
    if s.u > 0.0 && s.v > 0.0 && s.u.is_finite() && s.v.is_finite() {
        Ok(())
    } else {
        Err(Error::Singular { u: s.u, v: s.v, what })
    }
}

/// Jacobian of the vector field at an interior point (general form, valid
/// off the nullclines).
pub fn jacobian(params: &ModelParams, s: State) -> Result<Jacobian2> {
    require_interior(s, "Jacobian has u^(p-1) and v^(m-1) terms")?;
    let ModelParams { a, b, c, d, e, k, m, p, q, r } = *params;
    let (u, v) = (s.u, s.v);
    let fear = fear_factor(k, v);
    let up = u.powf(p);
    let vm = v.powf(m);
    Ok(Jacobian2 {
        j11: a * fear - 2.0 * b * u - c * p * u.powf(p - 1.0) * vm,
        j12: -k * a * u * fear * fear - c * m * up * v.powf(m - 1.0),
        j21: e * p * u.powf(p - 1.0) * vm,
        j22: -d - q * r * v.powf(r - 1.0) + e * m * up * v.powf(m - 1.0),
    })
}

/// Jacobian with the nullcline identities substituted into the diagonal:
/// `j11 = −u(b − c(1−p)u^{p−2}vᵐ)`, `j22 = −d(1−m) − q(r−m)v^{r−1}`.
///
/// Only meaningful at a coexistence equilibrium.
pub fn jacobian_at_coexistence(params: &ModelParams, s: State) -> Result<Jacobian2> {
    let general = jacobian(params, s)?;
    let ModelParams { b, c, d, m, p, q, r, .. } = *params;
    let (u, v) = (s.u, s.v);
    Ok(Jacobian2 {
        j11: -u * (b - c * (1.0 - p) * u.powf(p - 2.0) * v.powf(m)),
        j22: -d * (1.0 - m) - q * (r - m) * v.powf(r - 1.0),
        ..general
    })
}

/// Partial derivative of `(F, G)` with respect to one parameter at `s`.
pub fn param_derivative(params: &ModelParams, s: State, param: Param) -> [f64; 2] {
    let ModelParams { a, c, e, k, m, p, q, r, .. } = *params;
    let (u, v) = (s.u, s.v);
    let interaction = pow0(u, p) * pow0(v, m);
    let fear = fear_factor(k, v);
    match param {
        Param::A => [u * fear, 0.0],
        Param::B => [-u * u, 0.0],
        Param::C => [-interaction, 0.0],
        Param::D => [0.0, -v],
        Param::E => [0.0, interaction],
        Param::K => [-a * u * v * fear * fear, 0.0],
        Param::Q => [0.0, -pow0(v, r)],
        Param::R => {
            let dv = if v > 0.0 { -q * v.powf(r) * v.ln() } else { 0.0 };
            [0.0, dv]
        }
        Param::M => {
            let w = if v > 0.0 { interaction * v.ln() } else { 0.0 };
            [-c * w, e * w]
        }
        Param::P => {
            let w = if u > 0.0 { interaction * u.ln() } else { 0.0 };
            [-c * w, e * w]
        }
    }
}

/// Coefficients of the cubic Taylor expansion of the unharvested vector field
/// about an interior point, in the shifted coordinates `x = u − u*`,
/// `y = v − v*`:
///
/// ```text
/// ẋ = a10 x + a01 y + a20 x² + a11 xy + a02 y² + a30 x³ + a21 x²y + a12 xy² + a03 y³
/// ẏ = b10 x + b01 y + b20 x² + b11 xy + b02 y² + b30 x³ + b21 x²y + b12 xy² + b03 y³
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TaylorCoeffs {
    pub a10: f64,
    pub a01: f64,
    pub a20: f64,
    pub a11: f64,
    pub a02: f64,
    pub a30: f64,
    pub a21: f64,
    pub a12: f64,
    pub a03: f64,
    pub b10: f64,
    pub b01: f64,
    pub b20: f64,
    pub b11: f64,
    pub b02: f64,
    pub b30: f64,
    pub b21: f64,
    pub b12: f64,
    pub b03: f64,
}

impl TaylorCoeffs {
    pub fn linear_part(&self) -> Jacobian2 {
        Jacobian2 { j11: self.a10, j12: self.a01, j21: self.b10, j22: self.b01 }
    }
}

/// Taylor coefficients at `eq` for the unharvested model. `params.k` is
/// taken as given (callers pass the bifurcation value).
pub fn taylor_coeffs(params: &ModelParams, eq: State) -> Result<TaylorCoeffs> {
    require_interior(eq, "Taylor expansion needs u* > 0 and v* > 0")?;
    if params.is_harvested() {
        return Err(Error::Unsupported(
            "Taylor coefficients are only available for q = 0".into(),
        ));
    }
    let lin = jacobian(params, eq)?;
    let ModelParams { a, b, c, e, k, m, p, .. } = *params;
    let (u, v) = (eq.u, eq.v);
    let w = 1.0 + k * v;
    let upv = |i: f64, j: f64| u.powf(p - i) * v.powf(m - j);

    Ok(TaylorCoeffs {
        a10: lin.j11,
        a01: lin.j12,
        a20: -b - c / 2.0 * (p - 1.0) * p * upv(2.0, 0.0),
        a11: -a * k / (w * w) - c * m * p * upv(1.0, 1.0),
        a02: a * k * k * u / w.powi(3) - c / 2.0 * (m - 1.0) * m * upv(0.0, 2.0),
        a30: -c / 6.0 * (p - 2.0) * (p - 1.0) * p * upv(3.0, 0.0),
        a21: -c / 2.0 * m * (p - 1.0) * p * upv(2.0, 1.0),
        a12: a * k * k / w.powi(3) - c / 2.0 * (m - 1.0) * m * p * upv(1.0, 2.0),
        a03: -a * k.powi(3) * u / w.powi(4) - c / 6.0 * (m - 2.0) * (m - 1.0) * m * upv(0.0, 3.0),
        b10: lin.j21,
        b01: lin.j22,
        b20: e / 2.0 * (p - 1.0) * p * upv(2.0, 0.0),
        b11: e * m * p * upv(1.0, 1.0),
        b02: e / 2.0 * (m - 1.0) * m * upv(0.0, 2.0),
        b30: e / 6.0 * (p - 2.0) * (p - 1.0) * p * upv(3.0, 0.0),
        b21: e / 2.0 * m * (p - 1.0) * p * upv(2.0, 1.0),
        b12: e / 2.0 * (m - 1.0) * m * p * upv(1.0, 2.0),
        b03: e / 6.0 * (m - 2.0) * (m - 1.0) * m * upv(0.0, 3.0),
    })
}
