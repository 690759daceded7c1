//! Run configuration: defaults, optional preset, JSON file, then flags.

use std::path::Path;

use predprey_core::bifurcation::CurveOptions;
use predprey_core::manifolds::ScanConfig;
use predprey_core::presets::{fig2_params, preset};
use predprey_core::{IntegratorConfig, ModelParams, Param, State};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Outcome of the orbit from `initial`.
    Outcome,
    /// Number and stability of coexistence equilibria.
    Equilibria,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub params: ModelParams,
    pub integrator: IntegratorConfig,
    pub initial: State,
    /// Parameter varied by one-parameter commands and by the sweep's x axis.
    pub param: Param,
    pub interval: [f64; 2],
    /// Second parameter for `sweep` (y axis) and `hopf-curve`.
    pub param2: Param,
    pub interval2: [f64; 2],
    pub grid: [usize; 2],
    pub sweep_mode: SweepMode,
    /// Samples of the equilibrium branch drawn in bifurcation diagrams.
    pub branch_points: usize,
    pub scan: ScanConfig,
    pub homoclinic_depth: usize,
    pub curve: CurveOptions,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: None,
            params: fig2_params(0.0),
            integrator: IntegratorConfig::default(),
            initial: State::new(4.8, 8.3),
            param: Param::K,
            interval: [0.0, 0.1],
            param2: Param::A,
            interval2: [2.0, 3.0],
            grid: [20, 20],
            sweep_mode: SweepMode::Outcome,
            branch_points: 200,
            scan: ScanConfig::default(),
            homoclinic_depth: 24,
            curve: CurveOptions::default(),
            seed: 0,
            threads: None,
        }
    }
}

/// Recursively overlay `top` on `base`; objects merge key by key.
pub fn merge(base: &mut Value, top: &Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

pub struct Overrides {
    pub preset: Option<String>,
    pub sets: Vec<(Param, f64)>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// Command-specific fields as a JSON patch.
    pub patch: Map<String, Value>,
}

pub fn load(path: Option<&Path>, over: Overrides) -> Result<ExperimentConfig, CliError> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", p.display())))?;
            if !v.is_object() {
                return Err(CliError::Usage("config must be a JSON object".into()));
            }
            v
        }
        None => Value::Object(Map::new()),
    };

    let mut cfg = serde_json::to_value(ExperimentConfig::default()).expect("defaults serialize");
    let preset_id = over.preset.clone().or_else(|| file.get("preset").and_then(Value::as_str).map(String::from));
    if let Some(id) = &preset_id {
        let p = preset(id).map_err(|e| CliError::Usage(e.to_string()))?;
        merge(
            &mut cfg,
            &serde_json::json!({
                "preset": id,
                "params": p.params,
                "param": p.param,
                "interval": [p.interval.0, p.interval.1],
            }),
        );
    }
    merge(&mut cfg, &file);
    if let Some(id) = &preset_id {
        cfg["preset"] = Value::String(id.clone());
    }
    for (param, value) in &over.sets {
        cfg["params"][param.name()] = serde_json::json!(value);
    }
    if let Some(seed) = over.seed {
        cfg["seed"] = seed.into();
    }
    if let Some(threads) = over.threads {
        cfg["threads"] = threads.into();
    }
    merge(&mut cfg, &Value::Object(over.patch));

    let cfg: ExperimentConfig =
        serde_json::from_value(cfg).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?;
    cfg.params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    cfg.integrator.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if !(cfg.interval[0] < cfg.interval[1]) || !(cfg.interval2[0] < cfg.interval2[1]) {
        return Err(CliError::Usage("intervals must satisfy lo < hi".into()));
    }
    if !cfg.initial.is_nonnegative() {
        return Err(CliError::Usage(format!("initial state {:?} is outside the first quadrant", cfg.initial)));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> Overrides {
        Overrides { preset: None, sets: vec![], seed: None, threads: None, patch: Map::new() }
    }

    #[test]
    fn merge_is_deep() {
        let mut a = serde_json::json!({"x": {"y": 1, "z": 2}, "w": 3});
        merge(&mut a, &serde_json::json!({"x": {"y": 5}}));
        assert_eq!(a, serde_json::json!({"x": {"y": 5, "z": 2}, "w": 3}));
    }

    #[test]
    fn preset_then_overrides() {
        let mut over = none();
        over.preset = Some("fig3a".into());
        over.sets = vec![(Param::K, 2.0)];
        let cfg = load(None, over).unwrap();
        assert_eq!(cfg.params.m, 0.9);
        assert_eq!(cfg.params.k, 2.0);
        assert_eq!(cfg.interval, [10.0, 20.0]);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_params() {
        let mut over = none();
        over.patch.insert("bogus".into(), 1.into());
        assert!(matches!(load(None, over), Err(CliError::Usage(_))));
        let mut over = none();
        over.sets = vec![(Param::A, -1.0)];
        assert!(matches!(load(None, over), Err(CliError::Usage(_))));
    }

    #[test]
    fn defaults_roundtrip() {
        let cfg = load(None, none()).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
