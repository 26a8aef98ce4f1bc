// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed-duration studies: the box-constrained brute-force baseline with
//! random restarts, and the unconstrained peak-amplitude scan.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controls::splines_for_duration;
use crate::error::{Error, Result};
use crate::model::QuditSystem;
use crate::objective::{GateProblem, ObjectiveBreakdown, TargetGate, Weights};
use crate::optimizer::{lbfgs_minimize_until, projected_lbfgs_minimize, Bounds, OptimizerOptions, Termination};
use crate::timescale::{peak_amplitude, uniform_vector};

/// Evenly spaced durations `start, start + step, ...` up to and including `stop`.
pub fn duration_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && step > 0.0 && stop >= start && stop.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad duration range {start}:{stop}:{step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// RNG for restart `restart` at duration index `duration_index`. Streams are
/// independent, so adding durations or restarts leaves existing runs intact.
pub fn restart_rng(seed: u64, duration_index: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((duration_index as u64) << 32) | restart as u64);
    rng
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedSweepOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Per-coordinate bound on every coefficient, rad/ns.
    pub bound: f64,
    /// Initial coefficients are uniform on `±init_fraction * bound`.
    pub init_fraction: f64,
    pub weights: Weights,
    pub optimizer: OptimizerOptions,
    /// `None` uses all cores.
    pub workers: Option<usize>,
}

impl Default for ConstrainedSweepOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            seed: 0,
            bound: TAU * 0.040,
            init_fraction: 0.9,
            weights: Weights::NONE,
            optimizer: OptimizerOptions::default(),
            workers: None,
        }
    }
}

/// One restart at one duration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRun {
    pub duration: f64,
    pub duration_index: usize,
    pub restart: usize,
    pub infidelity: f64,
    pub c_max: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub feasible: bool,
    pub breakdown: ObjectiveBreakdown,
    pub coeffs: Vec<f64>,
}

/// Order statistics of the final infidelity over the restarts at one duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationStats {
    pub duration: f64,
    pub restarts: usize,
    pub min_infidelity: f64,
    pub median_infidelity: f64,
    pub max_infidelity: f64,
    pub feasible: usize,
    pub best_c_max: f64,
}

impl DurationStats {
    pub fn best_fidelity(&self) -> f64 {
        1.0 - self.min_infidelity
    }

    fn from_runs(duration: f64, runs: &[&SweepRun]) -> Self {
        let mut inf: Vec<f64> = runs.iter().map(|r| r.infidelity).collect();
        inf.sort_by(f64::total_cmp);
        let n = inf.len();
        let median = if n % 2 == 1 { inf[n / 2] } else { 0.5 * (inf[n / 2 - 1] + inf[n / 2]) };
        let best = runs.iter().min_by(|a, b| a.infidelity.total_cmp(&b.infidelity)).expect("at least one restart");
        Self {
            duration,
            restarts: n,
            min_infidelity: inf[0],
            median_infidelity: median,
            max_infidelity: inf[n - 1],
            feasible: runs.iter().filter(|r| r.feasible).count(),
            best_c_max: best.c_max,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstrainedSweep {
    /// Ordered by `(duration, restart)`.
    pub runs: Vec<SweepRun>,
    pub stats: Vec<DurationStats>,
}

/// Projected L-BFGS from `restarts` random starts at each duration.
pub fn sweep_constrained(
    system: &QuditSystem,
    target: &TargetGate,
    knot_spacing: f64,
    durations: &[f64],
    opts: &ConstrainedSweepOptions,
) -> Result<ConstrainedSweep> {
    if opts.restarts < 1 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    if !(opts.bound > 0.0) {
        return Err(Error::InvalidArgument(format!("coefficient bound must be positive, got {}", opts.bound)));
    }
    let problems = durations
        .iter()
        .map(|&t| {
            let n_splines = splines_for_duration(t, knot_spacing);
            GateProblem::new(system.clone(), target.clone(), t, n_splines, opts.weights)
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..durations.len()).flat_map(|d| (0..opts.restarts).map(move |r| (d, r))).collect();

    let run_one = |&(di, restart): &(usize, usize)| -> Result<SweepRun> {
        let problem = &problems[di];
        let n = problem.n_coeffs();
        let bounds = Bounds::uniform(n, -opts.bound, opts.bound);
        let x0 = uniform_vector(&mut restart_rng(opts.seed, di, restart), n, opts.init_fraction * opts.bound);
        let optimizer = OptimizerOptions { bounds: Some(bounds.clone()), ..opts.optimizer.clone() };
        let r = projected_lbfgs_minimize(|x: &[f64]| problem.evaluate_with_gradient(x), &x0, &optimizer)?;
        let mut breakdown = r.eval;
        breakdown.gradient.clear();
        Ok(SweepRun {
            duration: problem.duration(),
            duration_index: di,
            restart,
            infidelity: breakdown.infidelity,
            c_max: peak_amplitude(&problem.controls(&r.x)?),
            iterations: r.iterations,
            termination: r.termination,
            feasible: bounds.contains(&r.x),
            breakdown,
            coeffs: r.x,
        })
    };
    let runs = thread_pool(opts.workers)?.install(|| jobs.par_iter().map(run_one).collect::<Result<Vec<_>>>())?;

    let stats = durations
        .iter()
        .enumerate()
        .map(|(di, &t)| {
            let group: Vec<&SweepRun> = runs.iter().filter(|r| r.duration_index == di).collect();
            DurationStats::from_runs(t, &group)
        })
        .collect();
    Ok(ConstrainedSweep { runs, stats })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmaxScanOptions {
    /// Rows ending below this infidelity are marked as reached.
    pub infidelity_target: f64,
    /// End a run as soon as the target is reached instead of at the gradient tolerance.
    pub stop_at_target: bool,
    pub seed: u64,
    pub b_max: f64,
    /// Initial coefficients are uniform on `±init_fraction * b_max`.
    pub init_fraction: f64,
    pub weights: Weights,
    pub optimizer: OptimizerOptions,
    pub workers: Option<usize>,
}

impl Default for CmaxScanOptions {
    fn default() -> Self {
        Self {
            infidelity_target: 1e-4,
            stop_at_target: false,
            seed: 0,
            b_max: TAU * 0.040,
            init_fraction: 0.9,
            weights: Weights { energy: 1.0, tikhonov: 0.0, population: 0.0 },
            optimizer: OptimizerOptions::default(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CmaxRow {
    pub duration: f64,
    pub c_max: f64,
    pub infidelity: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Infidelity ended below the target.
    pub reached: bool,
    pub breakdown: ObjectiveBreakdown,
    pub coeffs: Vec<f64>,
}

/// Unconstrained penalized optimization at each duration, recording the peak amplitude.
pub fn sweep_unconstrained_cmax(
    system: &QuditSystem,
    target: &TargetGate,
    knot_spacing: f64,
    durations: &[f64],
    opts: &CmaxScanOptions,
) -> Result<Vec<CmaxRow>> {
    let run_one = |(di, &t): (usize, &f64)| -> Result<CmaxRow> {
        let problem = GateProblem::new(system.clone(), target.clone(), t, splines_for_duration(t, knot_spacing), opts.weights)?;
        let x0 = uniform_vector(&mut restart_rng(opts.seed, di, 0), problem.n_coeffs(), opts.init_fraction * opts.b_max);
        let r = lbfgs_minimize_until(
            |x: &[f64]| problem.evaluate_with_gradient(x),
            &x0,
            &opts.optimizer,
            |e: &ObjectiveBreakdown| opts.stop_at_target && e.infidelity < opts.infidelity_target,
        )?;
        let mut breakdown = r.eval;
        breakdown.gradient.clear();
        Ok(CmaxRow {
            duration: t,
            c_max: peak_amplitude(&problem.controls(&r.x)?),
            infidelity: breakdown.infidelity,
            iterations: r.iterations,
            termination: r.termination,
            reached: breakdown.infidelity < opts.infidelity_target,
            breakdown,
            coeffs: r.x,
        })
    };
    thread_pool(opts.workers)?.install(|| durations.par_iter().enumerate().map(run_one).collect())
}

/// Least-squares slope of `ln c_max` against `ln T`.
pub fn loglog_slope(rows: &[(f64, f64)]) -> Result<f64> {
    if rows.len() < 2 || rows.iter().any(|&(t, c)| !(t > 0.0 && c > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive (T, c_max) points".into()));
    }
    let n = rows.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().map(|&(t, c)| (t.ln(), c.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("durations must not all be equal".into()));
    }
    Ok(sxy / sxx)
}
