//! Shared inputs for the criterion benchmarks.

use predprey_core::presets;
use predprey_core::{ModelParams, State};

/// Bistable set with two coexistence equilibria at `k = 0`.
pub fn bistable(k: f64) -> ModelParams {
    presets::fig2_params(k)
}

/// Hopf point near `k = 15.09`.
pub fn focus(k: f64) -> ModelParams {
    presets::fig3a_params(k)
}

/// Harvested set whose homoclinic value lies in `(0.3, 0.35)`.
pub fn harvested(q: f64) -> ModelParams {
    presets::harvest_params(q)
}

pub const START: State = State::new(4.8, 8.3);
