// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Iterative time scaling: optimize at a fixed duration, then stretch or
//! compress the duration by `s = c_max / b_max` until the peak amplitude
//! lands in `[b_max - δ_b, b_max]`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::controls::{max_amplitude, scale_control, splines_for_duration, ControlSpline, DEFAULT_OVERSAMPLE};
use crate::error::{Error, Result};
use crate::model::QuditSystem;
use crate::objective::{GateProblem, ObjectiveBreakdown, TargetGate, Weights};
use crate::optimizer::{lbfgs_minimize, OptimizerOptions, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeScaleOptions {
    /// Amplitude bound, rad/ns.
    pub b_max: f64,
    /// Width of the acceptance band below `b_max`, rad/ns.
    pub delta_b: f64,
    pub max_outer_iters: usize,
    /// Starting duration, ns.
    pub t0: f64,
    pub seed: u64,
    pub optimizer: OptimizerOptions,
}

impl TimeScaleOptions {
    pub fn new(t0: f64) -> Self {
        Self {
            b_max: TAU * 0.040,
            delta_b: TAU * 0.005,
            max_outer_iters: 20,
            t0,
            seed: 0,
            optimizer: OptimizerOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.delta_b && self.delta_b < self.b_max && self.b_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < delta_b < b_max, got delta_b={} b_max={}",
                self.delta_b, self.b_max
            )));
        }
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidArgument(format!("initial duration must be positive, got {}", self.t0)));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidArgument("need at least one outer iteration".into()));
        }
        self.optimizer.validate()
    }

    pub fn in_band(&self, c_max: f64) -> bool {
        c_max >= self.b_max - self.delta_b && c_max <= self.b_max
    }
}

/// One outer iteration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeScaleRecord {
    pub k: usize,
    /// Duration optimized at, ns.
    pub duration: f64,
    pub coeffs: Vec<f64>,
    pub c_max: f64,
    /// `c_max / b_max`.
    pub scale: f64,
    pub breakdown: ObjectiveBreakdown,
    pub inner_iters: usize,
    pub inner_termination: Termination,
}

impl TimeScaleRecord {
    /// The inner solve stopped on the gradient tolerance.
    pub fn inner_converged(&self) -> bool {
        self.inner_termination == Termination::GradientTol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeScaleStatus {
    Converged,
    MaxOuterIters,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeScaleResult {
    pub status: TimeScaleStatus,
    pub records: Vec<TimeScaleRecord>,
}

impl TimeScaleResult {
    pub fn last(&self) -> &TimeScaleRecord {
        self.records.last().expect("at least one outer iteration")
    }

    pub fn converged(&self) -> bool {
        self.status == TimeScaleStatus::Converged
    }

    pub fn final_duration(&self) -> f64 {
        self.last().duration
    }

    pub fn outer_iterations(&self) -> usize {
        self.records.len()
    }
}

/// Result of one inner solve as seen by the outer loop.
#[derive(Debug, Clone)]
pub struct InnerSolve {
    pub coeffs: Vec<f64>,
    pub c_max: f64,
    pub breakdown: ObjectiveBreakdown,
    pub iterations: usize,
    pub termination: Termination,
}

/// I.i.d. uniform draws on `[-0.9 b_max, 0.9 b_max]`.
pub fn initial_guess(n_coeffs: usize, b_max: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    uniform_vector(&mut rng, n_coeffs, 0.9 * b_max)
}

pub(crate) fn uniform_vector(rng: &mut impl Rng, n: usize, half_width: f64) -> Vec<f64> {
    if half_width <= 0.0 {
        return vec![0.0; n];
    }
    (0..n).map(|_| rng.random_range(-half_width..=half_width)).collect()
}

/// Peak `|c_q(t)|` over all qudits.
pub fn peak_amplitude(controls: &[ControlSpline]) -> f64 {
    controls.iter().map(|c| max_amplitude(c, DEFAULT_OVERSAMPLE)).fold(0.0, f64::max)
}

/// Outer loop, with the inner solve supplied by the caller as
/// `inner(k, duration, start) -> InnerSolve`.
pub fn run_time_scaling<F>(opts: &TimeScaleOptions, x0: Vec<f64>, mut inner: F) -> Result<TimeScaleResult>
where
    F: FnMut(usize, f64, &[f64]) -> Result<InnerSolve>,
{
    opts.validate()?;
    let mut duration = opts.t0;
    let mut start = x0;
    let mut records = Vec::new();
    for k in 0..opts.max_outer_iters {
        let solve = inner(k, duration, &start)?;
        let scale = solve.c_max / opts.b_max;
        let done = opts.in_band(solve.c_max);
        if !done && !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Numerical(format!("cannot rescale with c_max = {}", solve.c_max)));
        }
        records.push(TimeScaleRecord {
            k,
            duration,
            coeffs: solve.coeffs.clone(),
            c_max: solve.c_max,
            scale,
            breakdown: solve.breakdown,
            inner_iters: solve.iterations,
            inner_termination: solve.termination,
        });
        if done {
            return Ok(TimeScaleResult { status: TimeScaleStatus::Converged, records });
        }
        duration *= scale;
        start = solve.coeffs.iter().map(|a| a / scale).collect();
    }
    Ok(TimeScaleResult { status: TimeScaleStatus::MaxOuterIters, records })
}

/// Minimal-duration search for `target` on `system`.
///
/// The spline count is fixed from `opts.t0` and `knot_spacing` and kept for
/// every outer iteration, so the knots stretch with the duration.
pub fn minimize_gate_duration(
    system: &QuditSystem,
    target: &TargetGate,
    knot_spacing: f64,
    weights: Weights,
    opts: &TimeScaleOptions,
) -> Result<TimeScaleResult> {
    opts.validate()?;
    let n_splines = splines_for_duration(opts.t0, knot_spacing);
    let n_coeffs = 2 * system.n_qudits() * n_splines;
    let x0 = initial_guess(n_coeffs, opts.b_max, opts.seed);
    run_time_scaling(opts, x0, |k, duration, start| {
        let problem = GateProblem::new(system.clone(), target.clone(), duration, n_splines, weights)?;
        match lbfgs_minimize(|x: &[f64]| problem.evaluate_with_gradient(x), start, &opts.optimizer) {
            Ok(r) => {
                let c_max = peak_amplitude(&problem.controls(&r.x)?);
                let mut breakdown = r.eval;
                breakdown.gradient.clear();
                Ok(InnerSolve { coeffs: r.x, c_max, breakdown, iterations: r.iterations, termination: r.termination })
            }
            Err(e) if k == 0 => Err(e),
            // keep going from the rescaled guess itself
            Err(_) => {
                let breakdown = problem.evaluate(start)?;
                let c_max = peak_amplitude(&problem.controls(start)?);
                Ok(InnerSolve {
                    coeffs: start.to_vec(),
                    c_max,
                    breakdown,
                    iterations: 0,
                    termination: Termination::LineSearchFailure,
                })
            }
        }
    })
}

/// Rescales a whole set of controls by `s` (see [`scale_control`]).
pub fn rescale_controls(controls: &[ControlSpline], s: f64) -> Result<Vec<ControlSpline>> {
    controls.iter().map(|c| scale_control(c, s)).collect()
}
