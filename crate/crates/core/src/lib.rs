//! Numerical toolkit for a planar predator-prey model with a fear factor on
//! prey reproduction, herd behaviour (`c·uᵖ`), mutual interference among
//! predators (`vᵐ`) and optional predator harvesting (`q·vʳ`):
//!
//! ```text
//! du/dt = a·u/(1 + k·v) − b·u² − c·uᵖ·vᵐ
//! dv/dt = −d·v − q·vʳ + e·uᵖ·vᵐ
//! ```
//!
//! The right-hand side is not Lipschitz on the axes (`0 < p, m < 1`), which
//! allows the prey to reach zero in finite time. Modules:
//!
//! * [`model`]: vector field, Jacobian, Taylor coefficients.
//! * [`dynamics`]: adaptive Dormand–Prince integration with extinction and
//!   convergence events, outcome classification.
//! * [`equilibria`]: nullcline root finding and stability classification.
//! * [`bifurcation`]: saddle-node, Hopf and generalized Hopf detection, first
//!   Lyapunov coefficient.
//! * [`manifolds`]: separatrix by shooting, unstable set of the origin,
//!   homoclinic brackets.
//! * [`presets`]: parameter sets and reference values for the published
//!   figures, and the `reproduce` runner.

pub mod bifurcation;
pub mod dynamics;
pub mod equilibria;
mod error;
pub mod manifolds;
pub mod model;
pub mod presets;

pub use bifurcation::{BifurcationKind, BifurcationPoint, Criticality, HopfCurve};
pub use dynamics::{IntegratorConfig, OutcomeClass, Termination, Trajectory};
pub use equilibria::{Classification, Equilibrium, EquilibriumKind};
pub use error::{Error, Result};
pub use manifolds::{HomoclinicBracket, Separatrix};
pub use model::{Jacobian2, ModelParams, Param, State, TaylorCoeffs};
