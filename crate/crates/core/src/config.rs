// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a TOML file, command-line overrides, and the fully
//! resolved form that is echoed next to every run's results.
//!
//! Frequencies and amplitudes in the file are plain frequencies in GHz. A
//! minimal file names a built-in case:
//!
//! ```toml
//! case = "QFT4"
//! t0 = 20.0
//! seed = 7
//!
//! [weights]
//! gamma = 1.0
//! ```
//!
//! A custom device replaces `case` with `[system]` and `[gate]` tables:
//!
//! ```toml
//! name = "X01"
//! knot_spacing = 0.5
//!
//! [system]
//! levels = [3]
//! transition_ghz = [5.0]
//! kerr_ghz = [0.3]
//! rot_ghz = 5.0
//! couplings = []
//!
//! [gate]
//! # row-major, each entry [re, im]
//! matrix = [[[0, 0], [1, 0], [0, 0]],
//!           [[1, 0], [0, 0], [0, 0]],
//!           [[0, 0], [0, 0], [1, 0]]]
//! ```

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cases::{builtin_case, TestCase};
use crate::error::{Error, Result};
use crate::model::{CMatrix, QuditSystem, C64};
use crate::objective::{TargetGate, Weights};
use crate::optimizer::OptimizerOptions;
use crate::sweep::duration_grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub p: usize,
    pub q: usize,
    pub j_ghz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub levels: Vec<usize>,
    pub transition_ghz: Vec<f64>,
    pub kerr_ghz: Vec<f64>,
    pub rot_ghz: f64,
    #[serde(default)]
    pub couplings: Vec<CouplingSpec>,
}

impl SystemSpec {
    pub fn build(&self) -> Result<QuditSystem> {
        let couplings: Vec<(usize, usize, f64)> = self.couplings.iter().map(|c| (c.p, c.q, c.j_ghz)).collect();
        QuditSystem::from_ghz(self.levels.clone(), &self.transition_ghz, &self.kerr_ghz, &couplings, self.rot_ghz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    /// Rows of `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl GateSpec {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.matrix.len();
        if n == 0 || self.matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Config { key: "gate.matrix".into(), message: "must be a non-empty square matrix".into() });
        }
        Ok(CMatrix::from_fn(n, n, |i, j| C64::new(self.matrix[i][j][0], self.matrix[i][j][1])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    pub gamma: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub memory: Option<usize>,
    pub grad_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub max_outer_iters: Option<usize>,
}

/// `start:stop:step` in ns, also accepted as a three-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DurationsRepr", into = "DurationsRepr")]
pub struct DurationRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DurationsRepr {
    Text(String),
    Triple([f64; 3]),
}

impl TryFrom<DurationsRepr> for DurationRange {
    type Error = String;

    fn try_from(r: DurationsRepr) -> std::result::Result<Self, String> {
        match r {
            DurationsRepr::Text(s) => s.parse(),
            DurationsRepr::Triple([start, stop, step]) => Ok(Self { start, stop, step }),
        }
    }
}

impl From<DurationRange> for DurationsRepr {
    fn from(d: DurationRange) -> Self {
        DurationsRepr::Triple([d.start, d.stop, d.step])
    }
}

impl std::str::FromStr for DurationRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("expected start:stop:step, got `{s}`"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number `{v}`: {e}"));
        Ok(Self { start: num(start)?, stop: num(stop)?, step: num(step)? })
    }
}

impl DurationRange {
    pub fn grid(&self) -> Result<Vec<f64>> {
        duration_grid(self.start, self.stop, self.step)
    }
}

/// Contents of a config file. Every field is optional; command-line flags
/// are applied on top before resolution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub case: Option<String>,
    /// Label for a custom system.
    pub name: Option<String>,
    pub system: Option<SystemSpec>,
    pub gate: Option<GateSpec>,
    /// Knot spacing in ns.
    pub knot_spacing: Option<f64>,
    pub t0: Option<f64>,
    /// Fixed duration for single optimizations, ns.
    pub duration: Option<f64>,
    pub durations: Option<DurationRange>,
    pub seed: Option<u64>,
    pub b_max_ghz: Option<f64>,
    pub delta_b_ghz: Option<f64>,
    pub restarts: Option<usize>,
    pub workers: Option<usize>,
    pub infidelity_target: Option<f64>,
    pub stop_at_target: Option<bool>,
    pub weights: Option<WeightsSpec>,
    pub optimizer: Option<OptimizerSpec>,
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let key = e.span().map(|s| text[s].trim().to_string()).unwrap_or_default();
            Error::Config { key, message: e.message().to_string() }
        })
    }
}

/// Everything a run needs, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    /// Built-in case name, if one was used.
    pub case: Option<String>,
    pub name: String,
    pub system: Option<SystemSpec>,
    pub gate: Option<GateSpec>,
    pub knot_spacing: f64,
    pub t0: f64,
    pub duration: f64,
    pub durations: DurationRange,
    pub seed: u64,
    pub b_max_ghz: f64,
    pub delta_b_ghz: f64,
    pub restarts: usize,
    pub workers: Option<usize>,
    pub infidelity_target: f64,
    pub stop_at_target: bool,
    pub weights: Weights,
    pub optimizer: OptimizerOptions,
    pub max_outer_iters: usize,
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config { key: key.into(), message: message.into() }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(key, format!("must be positive, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(key, format!("must be non-negative, got {v}")))
    }
}

impl ResolvedConfig {
    /// Resolves with the default penalty weights of the time-scaling runs.
    pub fn resolve(file: &ConfigFile) -> Result<Self> {
        Self::resolve_with_weights(file, Weights::default())
    }

    /// Resolves, filling unset penalty weights from `default_weights`.
    pub fn resolve_with_weights(file: &ConfigFile, default_weights: Weights) -> Result<Self> {
        let builtin = match &file.case {
            Some(name) => Some(builtin_case(name)?),
            None => None,
        };
        let (system, gate) = match (&file.system, &file.gate) {
            (Some(s), Some(g)) => (Some(s.clone()), Some(g.clone())),
            (None, None) if builtin.is_some() => (None, None),
            (None, None) => return Err(config_err("case", "name a built-in case or give [system] and [gate]")),
            (None, Some(_)) => return Err(config_err("system", "missing; required with [gate]")),
            (Some(_), None) => return Err(config_err("gate", "missing; required with [system]")),
        };
        let name = file
            .name
            .clone()
            .or_else(|| builtin.as_ref().map(|c| c.name.clone()))
            .unwrap_or_else(|| "custom".into());
        let knot_spacing = match (file.knot_spacing, &builtin) {
            (Some(v), _) => positive("knot_spacing", v)?,
            (None, Some(c)) => c.knot_spacing,
            (None, None) => return Err(config_err("knot_spacing", "required for a custom system")),
        };
        let durations = match (file.durations, &builtin) {
            (Some(d), _) => d,
            (None, Some(c)) => {
                let (start, stop, step) = c.sweep_durations;
                DurationRange { start, stop, step }
            }
            (None, None) => return Err(config_err("durations", "required for a custom system")),
        };
        durations.grid().map_err(|e| config_err("durations", e.to_string()))?;
        let t0 = positive("t0", file.t0.unwrap_or(0.5 * (durations.start + durations.stop)))?;
        let duration = positive("duration", file.duration.unwrap_or(t0))?;

        let w = file.weights.unwrap_or(WeightsSpec { gamma: None, gamma1: None, gamma2: None });
        let d = default_weights;
        let weights = Weights {
            energy: non_negative("weights.gamma", w.gamma.unwrap_or(d.energy))?,
            tikhonov: non_negative("weights.gamma1", w.gamma1.unwrap_or(d.tikhonov))?,
            population: non_negative("weights.gamma2", w.gamma2.unwrap_or(d.population))?,
        };

        let o = file.optimizer.unwrap_or(OptimizerSpec {
            memory: None,
            grad_tol: None,
            max_iters: None,
            c1: None,
            c2: None,
            max_outer_iters: None,
        });
        let od = OptimizerOptions::default();
        let optimizer = OptimizerOptions {
            memory: o.memory.unwrap_or(od.memory),
            grad_tol: o.grad_tol.unwrap_or(od.grad_tol),
            max_iters: o.max_iters.unwrap_or(od.max_iters),
            c1: o.c1.unwrap_or(od.c1),
            c2: o.c2.unwrap_or(od.c2),
            ..od
        };
        optimizer.validate().map_err(|e| config_err("optimizer", e.to_string()))?;

        let b_max_ghz = positive("b_max_ghz", file.b_max_ghz.unwrap_or(0.040))?;
        let delta_b_ghz = positive("delta_b_ghz", file.delta_b_ghz.unwrap_or(0.005))?;
        if delta_b_ghz >= b_max_ghz {
            return Err(config_err("delta_b_ghz", "must be smaller than b_max_ghz"));
        }
        let restarts = file.restarts.unwrap_or(10);
        if restarts == 0 {
            return Err(config_err("restarts", "must be at least 1"));
        }
        if file.workers == Some(0) {
            return Err(config_err("workers", "must be at least 1"));
        }
        let max_outer_iters = o.max_outer_iters.unwrap_or(20);
        if max_outer_iters == 0 {
            return Err(config_err("optimizer.max_outer_iters", "must be at least 1"));
        }

        let resolved = Self {
            case: builtin.as_ref().map(|c| c.name.clone()),
            name,
            system,
            gate,
            knot_spacing,
            t0,
            duration,
            durations,
            seed: file.seed.unwrap_or(0),
            b_max_ghz,
            delta_b_ghz,
            restarts,
            workers: file.workers,
            infidelity_target: positive("infidelity_target", file.infidelity_target.unwrap_or(1e-4))?,
            stop_at_target: file.stop_at_target.unwrap_or(false),
            weights,
            optimizer,
            max_outer_iters,
        };
        resolved.test_case()?;
        Ok(resolved)
    }

    /// System, target and knot spacing for the run.
    pub fn test_case(&self) -> Result<TestCase> {
        let (start, stop, step) = (self.durations.start, self.durations.stop, self.durations.step);
        match (&self.system, &self.gate) {
            (Some(s), Some(g)) => {
                let system = s.build().map_err(|e| config_err("system", e.to_string()))?;
                let target = TargetGate::new(self.name.clone(), g.to_matrix()?)
                    .map_err(|e| config_err("gate.matrix", e.to_string()))?;
                TestCase::new(self.name.clone(), system, target, self.knot_spacing, (start, stop, step))
                    .map_err(|e| config_err("gate.matrix", e.to_string()))
            }
            _ => {
                let name = self.case.as_deref().ok_or_else(|| config_err("case", "missing"))?;
                let mut case = builtin_case(name)?;
                case.knot_spacing = self.knot_spacing;
                case.sweep_durations = (start, stop, step);
                Ok(case)
            }
        }
    }

    pub fn b_max(&self) -> f64 {
        TAU * self.b_max_ghz
    }

    pub fn delta_b(&self) -> f64 {
        TAU * self.delta_b_ghz
    }

    /// The equivalent config file; loading it resolves to `self` again.
    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            case: self.case.clone(),
            name: Some(self.name.clone()),
            system: self.system.clone(),
            gate: self.gate.clone(),
            knot_spacing: Some(self.knot_spacing),
            t0: Some(self.t0),
            duration: Some(self.duration),
            durations: Some(self.durations),
            seed: Some(self.seed),
            b_max_ghz: Some(self.b_max_ghz),
            delta_b_ghz: Some(self.delta_b_ghz),
            restarts: Some(self.restarts),
            workers: self.workers,
            infidelity_target: Some(self.infidelity_target),
            stop_at_target: Some(self.stop_at_target),
            weights: Some(WeightsSpec {
                gamma: Some(self.weights.energy),
                gamma1: Some(self.weights.tikhonov),
                gamma2: Some(self.weights.population),
            }),
            optimizer: Some(OptimizerSpec {
                memory: Some(self.optimizer.memory),
                grad_tol: Some(self.optimizer.grad_tol),
                max_iters: Some(self.optimizer.max_iters),
                c1: Some(self.optimizer.c1),
                c2: Some(self.optimizer.c2),
                max_outer_iters: Some(self.max_outer_iters),
            }),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_file()).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Reads a TOML config file.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(&path.display().to_string(), e.to_string()))?;
    ConfigFile::from_toml(&text)
}
