// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! The `mintime` command line.
//!
//! Every run writes `config.toml` (the resolved configuration, loadable with
//! `--config`), `summary.json`, `history.csv` and `pulse.json` into `--out`.

use std::ffi::OsString;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::check::run_checks;
use crate::config::{load_config, ConfigFile, DurationRange, OptimizerSpec, ResolvedConfig, WeightsSpec};
use crate::error::{Error, Result};
use crate::objective::{GateProblem, Weights};
use crate::optimizer::{lbfgs_minimize, OptimizerOptions};
use crate::report::{fmt_f64, write_csv, write_json, PulseFile};
use crate::sweep::{loglog_slope, sweep_constrained, sweep_unconstrained_cmax, CmaxScanOptions, ConstrainedSweepOptions};
use crate::timescale::{initial_guess, minimize_gate_duration, peak_amplitude, TimeScaleOptions};
use crate::controls::splines_for_duration;

#[derive(Debug, Parser)]
#[command(name = "mintime", version, about = "Minimal-duration, amplitude-bounded gate pulses for coupled qudits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterative time scaling towards the shortest duration within the amplitude band.
    MinTime(RunArgs),
    /// Box-constrained optimization with random restarts over a duration grid.
    Sweep(RunArgs),
    /// Unconstrained penalized optimization over a duration grid, recording peak amplitudes.
    CmaxScan(RunArgs),
    /// One penalized optimization at a fixed duration.
    Optimize(RunArgs),
    /// Self-test of the numerical invariants.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Built-in case: QFT4, SWAP02, CNOT, CCNOT or SWAP_CHAIN.
    #[arg(long)]
    case: Option<String>,
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial duration for min-time, ns.
    #[arg(long)]
    t0: Option<f64>,
    /// Fixed duration for optimize, ns (defaults to t0).
    #[arg(long)]
    duration: Option<f64>,
    /// Amplitude bound, GHz [default: 0.040].
    #[arg(long)]
    bmax_ghz: Option<f64>,
    /// Width of the acceptance band, GHz [default: 0.005].
    #[arg(long)]
    delta_b_ghz: Option<f64>,
    /// Energy penalty weight.
    #[arg(long)]
    gamma: Option<f64>,
    /// Tikhonov weight.
    #[arg(long)]
    gamma1: Option<f64>,
    /// Population-curvature weight.
    #[arg(long)]
    gamma2: Option<f64>,
    /// Gradient-norm stopping threshold [default: 1e-5].
    #[arg(long)]
    grad_tol: Option<f64>,
    /// Iteration cap per optimization [default: 500].
    #[arg(long)]
    max_iters: Option<usize>,
    /// Outer-iteration cap for min-time [default: 20].
    #[arg(long)]
    max_outer_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "mintime-out")]
    out: PathBuf,
    /// Worker threads for sweeps [default: all cores].
    #[arg(long)]
    workers: Option<usize>,
    /// Duration grid `start:stop:step` in ns.
    #[arg(long)]
    durations: Option<DurationRange>,
    /// Random restarts per duration for sweep [default: 10].
    #[arg(long)]
    restarts: Option<usize>,
    /// Infidelity target for cmax-scan [default: 1e-4].
    #[arg(long)]
    infidelity_target: Option<f64>,
    /// In cmax-scan, stop each run as soon as the target is reached.
    #[arg(long)]
    stop_at_target: bool,
}

impl RunArgs {
    fn config_file(&self) -> Result<ConfigFile> {
        let mut f = match &self.config {
            Some(path) => load_config(path)?,
            None => ConfigFile::default(),
        };
        if let Some(case) = &self.case {
            f.case = Some(case.clone());
            f.system = None;
            f.gate = None;
            f.name = None;
        }
        macro_rules! set {
            ($($field:ident),*) => { $( if self.$field.is_some() { f.$field = self.$field.clone(); } )* };
        }
        set!(t0, duration, seed, workers, durations, restarts, infidelity_target);
        if self.bmax_ghz.is_some() {
            f.b_max_ghz = self.bmax_ghz;
        }
        if self.delta_b_ghz.is_some() {
            f.delta_b_ghz = self.delta_b_ghz;
        }
        if self.stop_at_target {
            f.stop_at_target = Some(true);
        }
        if self.gamma.is_some() || self.gamma1.is_some() || self.gamma2.is_some() {
            let w = f.weights.get_or_insert(WeightsSpec { gamma: None, gamma1: None, gamma2: None });
            w.gamma = self.gamma.or(w.gamma);
            w.gamma1 = self.gamma1.or(w.gamma1);
            w.gamma2 = self.gamma2.or(w.gamma2);
        }
        if self.grad_tol.is_some() || self.max_iters.is_some() || self.max_outer_iters.is_some() {
            let o = f.optimizer.get_or_insert(OptimizerSpec {
                memory: None,
                grad_tol: None,
                max_iters: None,
                c1: None,
                c2: None,
                max_outer_iters: None,
            });
            o.grad_tol = self.grad_tol.or(o.grad_tol);
            o.max_iters = self.max_iters.or(o.max_iters);
            o.max_outer_iters = self.max_outer_iters.or(o.max_outer_iters);
        }
        Ok(f)
    }
}

/// Failure with its process exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(e: Error) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

fn runtime(e: Error) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

/// Parses `argv` (program name first), runs the command and returns the exit code:
/// 0 on success, 1 when the run fails, 2 on usage or configuration errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Check { seed } => check(seed),
        Command::MinTime(args) => prepare(&args, Weights::default()).and_then(|cfg| min_time(&cfg, &args.out)),
        Command::Sweep(args) => prepare(&args, Weights::NONE).and_then(|cfg| sweep(&cfg, &args.out)),
        Command::CmaxScan(args) => {
            prepare(&args, CmaxScanOptions::default().weights).and_then(|cfg| cmax_scan(&cfg, &args.out))
        }
        Command::Optimize(args) => prepare(&args, Weights::default()).and_then(|cfg| optimize(&cfg, &args.out)),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn prepare(args: &RunArgs, default_weights: Weights) -> std::result::Result<ResolvedConfig, Failure> {
    let file = args.config_file().map_err(usage)?;
    let cfg = ResolvedConfig::resolve_with_weights(&file, default_weights).map_err(usage)?;
    std::fs::create_dir_all(&args.out).map_err(|e| runtime(e.into()))?;
    std::fs::write(args.out.join("config.toml"), cfg.to_toml().map_err(runtime)?).map_err(|e| runtime(e.into()))?;
    Ok(cfg)
}

fn summary(cfg: &ResolvedConfig, mode: &str, result: impl Serialize) -> serde_json::Value {
    json!({
        "tool": "mintime",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": mode,
        "seed": cfg.seed,
        "config": cfg,
        "result": result,
    })
}

fn ghz(rad_per_ns: f64) -> f64 {
    rad_per_ns / TAU
}

fn optimizer_options(cfg: &ResolvedConfig) -> OptimizerOptions {
    cfg.optimizer.clone()
}

fn check(seed: u64) -> std::result::Result<i32, Failure> {
    let outcomes = run_checks(seed).map_err(runtime)?;
    for c in &outcomes {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(if outcomes.iter().all(|c| c.passed) { 0 } else { 1 })
}

fn min_time(cfg: &ResolvedConfig, out: &Path) -> std::result::Result<i32, Failure> {
    let case = cfg.test_case().map_err(usage)?;
    let opts = TimeScaleOptions {
        b_max: cfg.b_max(),
        delta_b: cfg.delta_b(),
        max_outer_iters: cfg.max_outer_iters,
        t0: cfg.t0,
        seed: cfg.seed,
        optimizer: optimizer_options(cfg),
    };
    let result = minimize_gate_duration(&case.system, &case.target, case.knot_spacing, cfg.weights, &opts)
        .map_err(runtime)?;

    let rows: Vec<Vec<String>> = result
        .records
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                fmt_f64(r.duration),
                fmt_f64(ghz(r.c_max)),
                fmt_f64(r.scale),
                fmt_f64(r.breakdown.infidelity),
                fmt_f64(r.breakdown.energy),
                fmt_f64(r.breakdown.tikhonov),
                fmt_f64(r.breakdown.population),
                fmt_f64(r.breakdown.total),
                r.inner_iters.to_string(),
                r.inner_termination.to_string(),
                if opts.in_band(r.c_max) { "in-band" } else { "rescaled" }.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out.join("history.csv"),
        &[
            "k", "T_ns", "c_max_ghz", "s", "infidelity", "energy", "tikhonov", "population", "objective",
            "inner_iters", "inner_status", "status",
        ],
        &rows,
    )
    .map_err(runtime)?;

    let last = result.last();
    let n_splines = splines_for_duration(cfg.t0, case.knot_spacing);
    write_json(
        &out.join("pulse.json"),
        &PulseFile::from_coefficients(&last.coeffs, case.system.n_qudits(), last.duration).map_err(runtime)?,
    )
    .map_err(runtime)?;
    write_json(
        &out.join("summary.json"),
        &summary(
            cfg,
            "min-time",
            json!({
                "status": result.status,
                "converged": result.converged(),
                "outer_iterations": result.outer_iterations(),
                "final_duration_ns": last.duration,
                "final_c_max_ghz": ghz(last.c_max),
                "final_infidelity": last.breakdown.infidelity,
                "final_fidelity": 1.0 - last.breakdown.infidelity,
                "n_splines": n_splines,
                "breakdown": last.breakdown,
            }),
        ),
    )
    .map_err(runtime)?;
    println!(
        "{}: {} after {} outer iterations, T = {:.4} ns, c_max/2pi = {:.2} MHz, infidelity = {:.3e}",
        case.name,
        if result.converged() { "converged" } else { "not converged" },
        result.outer_iterations(),
        last.duration,
        ghz(last.c_max) * 1e3,
        last.breakdown.infidelity
    );
    Ok(if result.converged() { 0 } else { 1 })
}

fn sweep(cfg: &ResolvedConfig, out: &Path) -> std::result::Result<i32, Failure> {
    let case = cfg.test_case().map_err(usage)?;
    let durations = cfg.durations.grid().map_err(usage)?;
    let opts = ConstrainedSweepOptions {
        restarts: cfg.restarts,
        seed: cfg.seed,
        bound: cfg.b_max(),
        weights: cfg.weights,
        optimizer: optimizer_options(cfg),
        workers: cfg.workers,
        ..Default::default()
    };
    let result = sweep_constrained(&case.system, &case.target, case.knot_spacing, &durations, &opts).map_err(runtime)?;

    let rows: Vec<Vec<String>> = result
        .runs
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.duration),
                r.restart.to_string(),
                fmt_f64(r.infidelity),
                fmt_f64(1.0 - r.infidelity),
                fmt_f64(ghz(r.c_max)),
                r.iterations.to_string(),
                r.termination.to_string(),
                r.feasible.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out.join("history.csv"),
        &["T_ns", "restart", "infidelity", "fidelity", "c_max_ghz", "iterations", "termination", "feasible"],
        &rows,
    )
    .map_err(runtime)?;

    let mut pulses = Vec::new();
    for (di, _) in durations.iter().enumerate() {
        let best = result
            .runs
            .iter()
            .filter(|r| r.duration_index == di)
            .min_by(|a, b| a.infidelity.total_cmp(&b.infidelity))
            .expect("restarts >= 1");
        pulses.push(PulseFile::from_coefficients(&best.coeffs, case.system.n_qudits(), best.duration).map_err(runtime)?);
    }
    write_json(&out.join("pulse.json"), &pulses).map_err(runtime)?;
    let stats: Vec<serde_json::Value> = result
        .stats
        .iter()
        .map(|s| {
            json!({
                "T_ns": s.duration,
                "restarts": s.restarts,
                "min_infidelity": s.min_infidelity,
                "median_infidelity": s.median_infidelity,
                "max_infidelity": s.max_infidelity,
                "best_fidelity": s.best_fidelity(),
                "feasible": s.feasible,
                "best_c_max_ghz": ghz(s.best_c_max),
            })
        })
        .collect();
    write_json(&out.join("summary.json"), &summary(cfg, "sweep", json!({ "durations": stats }))).map_err(runtime)?;
    for s in &result.stats {
        println!(
            "T = {:8.3} ns  best fidelity {:.6}  median infidelity {:.3e}  ({} restarts)",
            s.duration,
            s.best_fidelity(),
            s.median_infidelity,
            s.restarts
        );
    }
    Ok(0)
}

fn cmax_scan(cfg: &ResolvedConfig, out: &Path) -> std::result::Result<i32, Failure> {
    let case = cfg.test_case().map_err(usage)?;
    let durations = cfg.durations.grid().map_err(usage)?;
    let opts = CmaxScanOptions {
        infidelity_target: cfg.infidelity_target,
        stop_at_target: cfg.stop_at_target,
        seed: cfg.seed,
        b_max: cfg.b_max(),
        weights: cfg.weights,
        optimizer: optimizer_options(cfg),
        workers: cfg.workers,
        ..Default::default()
    };
    let rows = sweep_unconstrained_cmax(&case.system, &case.target, case.knot_spacing, &durations, &opts)
        .map_err(runtime)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.duration),
                fmt_f64(ghz(r.c_max)),
                fmt_f64(r.infidelity),
                fmt_f64(r.breakdown.energy),
                r.iterations.to_string(),
                r.termination.to_string(),
                r.reached.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out.join("history.csv"),
        &["T_ns", "c_max_ghz", "infidelity", "energy", "iterations", "termination", "reached"],
        &table,
    )
    .map_err(runtime)?;
    let pulses = rows
        .iter()
        .map(|r| PulseFile::from_coefficients(&r.coeffs, case.system.n_qudits(), r.duration))
        .collect::<Result<Vec<_>>>()
        .map_err(runtime)?;
    write_json(&out.join("pulse.json"), &pulses).map_err(runtime)?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.duration, r.c_max)).collect();
    let slope = loglog_slope(&points).ok();
    write_json(
        &out.join("summary.json"),
        &summary(
            cfg,
            "cmax-scan",
            json!({
                "loglog_slope": slope,
                "rows": rows.len(),
                "unreached": rows.iter().filter(|r| !r.reached).count(),
            }),
        ),
    )
    .map_err(runtime)?;
    for r in &rows {
        println!(
            "T = {:8.3} ns  c_max/2pi = {:8.3} MHz  infidelity {:.3e}{}",
            r.duration,
            ghz(r.c_max) * 1e3,
            r.infidelity,
            if r.reached { "" } else { "  (target not reached)" }
        );
    }
    if let Some(s) = slope {
        println!("log-log slope {s:.3}");
    }
    Ok(0)
}

fn optimize(cfg: &ResolvedConfig, out: &Path) -> std::result::Result<i32, Failure> {
    let case = cfg.test_case().map_err(usage)?;
    let n_splines = splines_for_duration(cfg.duration, case.knot_spacing);
    let problem =
        GateProblem::new(case.system.clone(), case.target.clone(), cfg.duration, n_splines, cfg.weights).map_err(runtime)?;
    let x0 = initial_guess(problem.n_coeffs(), cfg.b_max(), cfg.seed);
    let r = lbfgs_minimize(|x: &[f64]| problem.evaluate_with_gradient(x), &x0, &optimizer_options(cfg))
        .map_err(runtime)?;
    let c_max = peak_amplitude(&problem.controls(&r.x).map_err(runtime)?);
    let rows: Vec<Vec<String>> = r
        .history
        .iter()
        .map(|h| {
            vec![
                h.iteration.to_string(),
                fmt_f64(h.objective),
                fmt_f64(h.grad_norm),
                fmt_f64(h.step_length),
                h.evaluations.to_string(),
            ]
        })
        .collect();
    write_csv(&out.join("history.csv"), &["iteration", "objective", "grad_norm", "step_length", "evaluations"], &rows)
        .map_err(runtime)?;
    write_json(
        &out.join("pulse.json"),
        &PulseFile::from_coefficients(&r.x, case.system.n_qudits(), cfg.duration).map_err(runtime)?,
    )
    .map_err(runtime)?;
    write_json(
        &out.join("summary.json"),
        &summary(
            cfg,
            "optimize",
            json!({
                "termination": r.termination,
                "iterations": r.iterations,
                "grad_norm": r.grad_norm,
                "c_max_ghz": ghz(c_max),
                "n_splines": n_splines,
                "step_count": problem.step_count(),
                "breakdown": r.eval,
            }),
        ),
    )
    .map_err(runtime)?;
    println!(
        "{} at T = {} ns: {} after {} iterations, infidelity {:.3e}, c_max/2pi = {:.2} MHz",
        case.name,
        cfg.duration,
        r.termination,
        r.iterations,
        r.eval.infidelity,
        ghz(c_max) * 1e3
    );
    Ok(0)
}
