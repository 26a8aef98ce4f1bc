// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Every criterion writes one `ACCEPTANCE <name>: PASS|FAIL`
//! line to stdout (bypassing the test harness capture), followed by indented
//! detail lines.
//!
//! Exact-arithmetic criteria (gradients, unitarity, energy, invariances) fail
//! the test when they fail. Reproduction criteria (durations, slopes, trends)
//! depend on a nonconvex optimization; their verdict is reported but only
//! fails the test when `ACCEPTANCE_STRICT=1` is set. The three-qubit cases are
//! `#[ignore]`d; run them with `cargo test --test acceptance -- --ignored`.

use std::f64::consts::TAU;
use std::io::Write;

use qudit_mintime::cases::{builtin_case, TestCase};
use qudit_mintime::controls::{
    control_integral, energy_norm, eval_control, scale_control, splines_for_duration, ControlSpline,
};
use qudit_mintime::model::{max_abs_diff, unitarity_residual, CMatrix, C64};
use qudit_mintime::objective::{
    displacement_infidelity, displacement_invariance_check, pure_drive_infidelity, GateProblem, TargetGate, Weights,
};
use qudit_mintime::optimizer::{lbfgs_minimize, OptimizerOptions};
use qudit_mintime::propagator::propagate_exact_steps;
use qudit_mintime::sweep::{loglog_slope, sweep_constrained, sweep_unconstrained_cmax, CmaxScanOptions, ConstrainedSweepOptions};
use qudit_mintime::timescale::{initial_guess, minimize_gate_duration, peak_amplitude, TimeScaleOptions, TimeScaleResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0;
const UNITARITY_TOL: f64 = 1e-9;

enum Kind {
    Exact,
    Reproduction,
}

fn report(name: &str, kind: Kind, passed: bool, details: &[String]) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "ACCEPTANCE {name}: {}", if passed { "PASS" } else { "FAIL" }).unwrap();
    for d in details {
        writeln!(out, "    {d}").unwrap();
    }
    drop(out);
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    match kind {
        Kind::Exact => assert!(passed, "{name} failed"),
        Kind::Reproduction => assert!(passed || !strict, "{name} failed"),
    }
}

fn case(name: &str) -> TestCase {
    builtin_case(name).unwrap()
}

fn ghz(rad_per_ns: f64) -> f64 {
    rad_per_ns / TAU
}

fn final_unitarity(case: &TestCase, duration: f64, coeffs: &[f64], weights: Weights) -> f64 {
    let n_splines = coeffs.len() / (2 * case.system.n_qudits());
    let problem = GateProblem::new(case.system.clone(), case.target.clone(), duration, n_splines, weights).unwrap();
    unitarity_residual(&problem.final_unitary(coeffs).unwrap())
}

/// Composite Simpson rule of `(1/T) ∫ |c|²`, sampling only through `eval_control`.
fn simpson_oracle(spline: &ControlSpline, intervals: usize) -> f64 {
    let t = spline.duration();
    let h = t / intervals as f64;
    let f = |i: usize| eval_control(spline, (i as f64 * h).min(t)).unwrap().norm_sqr();
    let mut sum = f(0) + f(intervals);
    for i in 1..intervals {
        sum += if i % 2 == 1 { 4.0 * f(i) } else { 2.0 * f(i) };
    }
    sum * h / 3.0 / t
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut details = Vec::new();
    let mut passed = true;
    // short durations with dense knots keep many coefficients per point cheap
    for (name, duration, n_splines) in [("QFT4", 5.0, 15), ("SWAP02", 5.0, 15), ("CNOT", 12.0, 22)] {
        let case = case(name);
        let problem =
            GateProblem::new(case.system.clone(), case.target.clone(), duration, n_splines, Weights::default()).unwrap();
        let n = problem.n_coeffs();
        let (mut worst_rel, mut checked) = (0.0f64, 0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.3..0.3)).collect();
            let g = problem.evaluate_with_gradient(&x).unwrap().gradient;
            let mut coords: Vec<usize> = (0..8).map(|_| rng.random_range(0..n)).collect();
            coords.sort_unstable();
            coords.dedup();
            for i in coords {
                let h = 1e-6 * x[i].abs().max(1.0);
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[i] += h;
                xm[i] -= h;
                let fd = (problem.evaluate(&xp).unwrap().total - problem.evaluate(&xm).unwrap().total) / (2.0 * h);
                let err = (fd - g[i]).abs();
                if err > 1e-9 {
                    worst_rel = worst_rel.max(err / fd.abs().max(g[i].abs()));
                }
                checked += 1;
            }
            // directional derivative along a random unit direction exercises every coordinate
            let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter_mut().for_each(|v| *v /= norm);
            let h = 1e-6;
            let shifted = |s: f64| -> Vec<f64> { x.iter().zip(&d).map(|(a, b)| a + s * b).collect() };
            let fd = (problem.evaluate(&shifted(h)).unwrap().total - problem.evaluate(&shifted(-h)).unwrap().total)
                / (2.0 * h);
            let an: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let err = (fd - an).abs();
            if err > 1e-9 {
                worst_rel = worst_rel.max(err / fd.abs().max(an.abs()));
            }
        }
        passed &= worst_rel <= 1e-5;
        details.push(format!(
            "{name}: T = {duration} ns, N_s = {n_splines}, 20 points, {checked} coordinates + 20 directions, worst relative error {worst_rel:.2e}"
        ));
    }
    report("gradient correctness", Kind::Exact, passed, &details);
}

#[test]
fn propagation_is_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (name, duration) in [("QFT4", 25.0), ("SWAP02", 25.0), ("CNOT", 80.0), ("CCNOT", 220.0), ("SWAP_CHAIN", 220.0)] {
        let case = case(name);
        let n_splines = splines_for_duration(duration, case.knot_spacing);
        let problem =
            GateProblem::new(case.system.clone(), case.target.clone(), duration, n_splines, Weights::NONE).unwrap();
        let mut case_worst = 0.0f64;
        for _ in 0..3 {
            let x: Vec<f64> = (0..problem.n_coeffs()).map(|_| rng.random_range(-0.25..0.25)).collect();
            case_worst = case_worst.max(unitarity_residual(&problem.final_unitary(&x).unwrap()));
        }
        worst = worst.max(case_worst);
        details.push(format!("{name}: T = {duration} ns, {} steps, max |U†U - I| = {case_worst:.2e}", problem.step_count()));
    }
    details.push("optimized pulses are also checked inside each reproduction criterion".into());
    report("unitarity", Kind::Exact, worst <= UNITARITY_TOL, &details);
}

#[test]
fn energy_norm_matches_simpson() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(4..=48);
        let duration = rng.random_range(2.0..100.0);
        let re = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let im = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spline = ControlSpline::new(re, im, duration).unwrap();
        let exact = energy_norm(&spline);
        // 512 Simpson intervals per knot interval: each piece of |c|² is a quartic
        let quad = simpson_oracle(&spline, (n + 2) * 512);
        worst = worst.max((exact - quad).abs() / exact);
    }
    report(
        "energy-norm oracle",
        Kind::Exact,
        worst <= 1e-10,
        &[format!("100 splines, N_s in 4..=48, worst relative difference {worst:.2e}")],
    );
}

fn x_gate() -> TargetGate {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    TargetGate::new("X", CMatrix::from_row_slice(2, 2, &[o, l, l, o])).unwrap()
}

/// Random spline of the given size whose complex integral equals `area`, with
/// all coefficients sharing the phase of `area`.
fn aligned_spline(rng: &mut ChaCha8Rng, n: usize, duration: f64, area: C64) -> ControlSpline {
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let delta = duration / (n as f64 + 2.0);
    let scale = area.norm() / (delta * w.iter().sum::<f64>());
    w.iter_mut().for_each(|v| *v *= scale);
    let phase = area / area.norm();
    ControlSpline::new(w.iter().map(|v| v * phase.re).collect(), w.iter().map(|v| v * phase.im).collect(), duration)
        .unwrap()
}

#[test]
fn pure_drive_infidelity_depends_only_on_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let target = x_gate();
    let (mut worst_pair, mut worst_disp) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let area = C64::from_polar(rng.random_range(0.2..2.5), rng.random_range(0.0..TAU));
        let (n1, n2) = (rng.random_range(4..30), rng.random_range(4..30));
        let (t1, t2) = (rng.random_range(2.0..20.0), rng.random_range(2.0..20.0));
        let c1 = aligned_spline(&mut rng, n1, t1, area);
        let c2 = aligned_spline(&mut rng, n2, t2, area);
        // the two areas agree to rounding; snap the second to the first exactly
        let fix = control_integral(&c1) / control_integral(&c2);
        let c2 = ControlSpline::new(
            c2.alpha_real().iter().map(|v| v * fix.norm()).collect(),
            c2.alpha_imag().iter().map(|v| v * fix.norm()).collect(),
            t2,
        )
        .unwrap();
        worst_pair = worst_pair.max(displacement_invariance_check(&c1, &c2, &target).unwrap());
        for c in [&c1, &c2] {
            worst_disp =
                worst_disp.max((pure_drive_infidelity(c, &target).unwrap() - displacement_infidelity(c, &target).unwrap()).abs());
        }
    }

    // Diagnostic only: a pair whose phase varies in time does not commute with itself
    // at different times, so its area alone does not fix the gate.
    let mut general = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(6..20);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| rng.random_range(-0.4..0.4)).collect() };
        let c1 = ControlSpline::new(draw(&mut rng), draw(&mut rng), 8.0).unwrap();
        let mut re2 = draw(&mut rng);
        let mut im2 = draw(&mut rng);
        let shift = (control_integral(&c1) - control_integral(&ControlSpline::new(re2.clone(), im2.clone(), 8.0).unwrap()))
            / (8.0 / (n as f64 + 2.0) * n as f64);
        re2.iter_mut().for_each(|v| *v += shift.re);
        im2.iter_mut().for_each(|v| *v += shift.im);
        let c2 = ControlSpline::new(re2, im2, 8.0).unwrap();
        general = general.max(
            (pure_drive_infidelity(&c1, &target).unwrap() - pure_drive_infidelity(&c2, &target).unwrap()).abs(),
        );
    }

    report(
        "pure-drive area invariance",
        Kind::Exact,
        worst_pair <= 1e-7 && worst_disp <= 1e-7,
        &[
            format!("50 common-phase pairs with equal complex area: max infidelity difference {worst_pair:.2e}"),
            format!("propagated vs displacement-operator infidelity: max difference {worst_disp:.2e}"),
            format!("(diagnostic) 10 time-varying-phase pairs with equal area: max difference {general:.2e}"),
        ],
    );
}

#[test]
fn time_scaling_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (name, duration) in [("QFT4", 20.0), ("SWAP02", 20.0), ("CNOT", 40.0)] {
        let case = case(name);
        let n_splines = splines_for_duration(duration, case.knot_spacing);
        let steps = GateProblem::new(case.system.clone(), case.target.clone(), duration, n_splines, Weights::NONE)
            .unwrap()
            .step_count();
        let controls: Vec<ControlSpline> = (0..case.system.n_qudits())
            .map(|_| {
                let draw = |rng: &mut ChaCha8Rng| (0..n_splines).map(|_| rng.random_range(-0.25..0.25)).collect();
                ControlSpline::new(draw(&mut rng), draw(&mut rng), duration).unwrap()
            })
            .collect();
        let u = propagate_exact_steps(&case.system, &controls, duration, steps).unwrap();
        for s in [0.5, 1.3, 2.0] {
            let scaled: Vec<ControlSpline> = controls.iter().map(|c| scale_control(c, s).unwrap()).collect();
            let v = propagate_exact_steps(&case.system.time_scaled(s).unwrap(), &scaled, s * duration, steps).unwrap();
            let diff = max_abs_diff(u.u_final(), v.u_final());
            worst = worst.max(diff);
            details.push(format!("{name}: s = {s}, max |U_s(sT) - U(T)| = {diff:.2e}"));
        }
    }
    report("scaling exactness", Kind::Exact, worst <= 1e-8, &details);
}

#[test]
fn cmax_scales_inversely_with_duration() {
    let case = case("QFT4");
    let durations: Vec<f64> = (0..=10).map(|i| 10.0 + 5.0 * i as f64).collect();
    let opts = CmaxScanOptions { infidelity_target: 1e-4, seed: SEED, ..Default::default() };
    let rows = sweep_unconstrained_cmax(&case.system, &case.target, case.knot_spacing, &durations, &opts).unwrap();
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.duration, r.c_max)).collect();
    let slope = loglog_slope(&points).unwrap();
    let mut details: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "T = {:4} ns: c_max/2pi = {:7.2} MHz, infidelity {:.2e}{}",
                r.duration,
                ghz(r.c_max) * 1e3,
                r.infidelity,
                if r.reached { "" } else { " (above target)" }
            )
        })
        .collect();
    let unitarity = rows
        .iter()
        .map(|r| final_unitarity(&case, r.duration, &r.coeffs, opts.weights))
        .fold(0.0, f64::max);
    details.push(format!("log-log slope {slope:.3}, required [-1.25, -0.80]; max unitarity drift {unitarity:.1e}"));
    assert!(unitarity <= UNITARITY_TOL);
    report("c_max vs duration slope", Kind::Reproduction, (-1.25..=-0.80).contains(&slope), &details);
}

struct MinTimeCheck {
    passed: bool,
    line: String,
}

fn run_min_time(case: &TestCase, t0: f64, band: (f64, f64)) -> MinTimeCheck {
    let opts = TimeScaleOptions { seed: SEED, ..TimeScaleOptions::new(t0) };
    let weights = Weights::default();
    let r: TimeScaleResult =
        minimize_gate_duration(&case.system, &case.target, case.knot_spacing, weights, &opts).unwrap();
    let last = r.last();
    let c_mhz = ghz(last.c_max) * 1e3;
    let fidelity = 1.0 - last.breakdown.infidelity;
    let unitarity = final_unitarity(case, last.duration, &last.coeffs, weights);
    assert!(unitarity <= UNITARITY_TOL, "unitarity drift {unitarity:e}");
    let outer_ok = r.converged() && r.outer_iterations() <= 8;
    let band_ok = (35.0..=40.0).contains(&c_mhz);
    let fid_ok = fidelity >= 0.999;
    let dur_ok = (band.0..=band.1).contains(&last.duration);
    let flag = |ok: bool| if ok { "" } else { "!" };
    MinTimeCheck {
        passed: outer_ok && band_ok && fid_ok && dur_ok,
        line: format!(
            "{} T0 = {t0:3} ns: {}{} outer, c_max/2pi = {}{c_mhz:.2} MHz, fidelity {}{fidelity:.5}, T* = {}{:.2} ns",
            case.name,
            flag(outer_ok),
            r.outer_iterations(),
            flag(band_ok),
            flag(fid_ok),
            flag(dur_ok),
            last.duration,
        ),
    }
}

#[test]
fn min_time_small_cases() {
    let mut details = Vec::new();
    let mut passed = true;
    for (name, band) in [("QFT4", (17.0, 25.0)), ("SWAP02", (16.0, 25.0))] {
        let case = case(name);
        for t0 in [10.0, 15.0, 25.0, 35.0, 50.0] {
            let c = run_min_time(&case, t0, band);
            passed &= c.passed;
            details.push(c.line);
        }
    }
    details.push("`!` marks the quantity that misses its requirement".into());
    report("minimal duration, QFT4 and SWAP02", Kind::Reproduction, passed, &details);
}

#[test]
fn min_time_cnot() {
    let c = run_min_time(&case("CNOT"), 70.0, (64.0, 82.0));
    report("minimal duration, CNOT", Kind::Reproduction, c.passed, &[c.line]);
}

#[test]
#[ignore = "hours of runtime"]
fn min_time_three_qubit_cases() {
    let mut details = Vec::new();
    let mut passed = true;
    for (name, t0, band) in [("CCNOT", 210.0, (185.0, 240.0)), ("SWAP_CHAIN", 220.0, (190.0, 255.0))] {
        let c = run_min_time(&case(name), t0, band);
        passed &= c.passed;
        details.push(c.line);
    }
    report("minimal duration, three-qubit cases", Kind::Reproduction, passed, &details);
}

#[test]
fn constrained_sweep_baseline() {
    let case = case("SWAP02");
    let opts = ConstrainedSweepOptions { restarts: 10, seed: SEED, ..Default::default() };
    let sweep = sweep_constrained(&case.system, &case.target, case.knot_spacing, &[10.0, 25.0], &opts).unwrap();
    let unitarity = sweep
        .runs
        .iter()
        .map(|r| final_unitarity(&case, r.duration, &r.coeffs, opts.weights))
        .fold(0.0, f64::max);
    assert!(unitarity <= UNITARITY_TOL);
    assert!(sweep.runs.iter().all(|r| r.feasible), "box constraints violated");
    let short = &sweep.stats[0];
    let long = &sweep.stats[1];
    let details: Vec<String> = sweep
        .stats
        .iter()
        .map(|s| {
            format!(
                "T = {} ns: best fidelity {:.6}, median infidelity {:.2e}, {} restarts",
                s.duration,
                s.best_fidelity(),
                s.median_infidelity,
                s.restarts
            )
        })
        .collect();
    let passed = long.best_fidelity() >= 0.999 && short.best_fidelity() < 0.999;
    report("box-constrained baseline, SWAP02", Kind::Reproduction, passed, &details);
}

/// Number of pairs `i < j` ordered against the expected direction.
fn inversions(values: &[f64], increasing: bool) -> usize {
    let mut count = 0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let bad = if increasing { values[j] < values[i] } else { values[j] > values[i] };
            count += usize::from(bad);
        }
    }
    count
}

#[test]
fn energy_weight_trend() {
    let case = case("QFT4");
    let duration = 20.0;
    let n_splines = splines_for_duration(duration, case.knot_spacing);
    let b_max = TAU * 0.040;
    let gammas: Vec<f64> = (-3..=3).map(|e| 10f64.powi(e)).collect();
    let (mut cmax, mut infid) = (Vec::new(), Vec::new());
    let mut details = Vec::new();
    let mut unitarity = 0.0f64;
    for &gamma in &gammas {
        let weights = Weights { energy: gamma, tikhonov: 0.0, population: 0.0 };
        let problem = GateProblem::new(case.system.clone(), case.target.clone(), duration, n_splines, weights).unwrap();
        let x0 = initial_guess(problem.n_coeffs(), 0.9 * b_max, SEED);
        let r = lbfgs_minimize(|x: &[f64]| problem.evaluate_with_gradient(x), &x0, &OptimizerOptions::default()).unwrap();
        let c = peak_amplitude(&problem.controls(&r.x).unwrap());
        unitarity = unitarity.max(unitarity_residual(&problem.final_unitary(&r.x).unwrap()));
        details.push(format!(
            "gamma = {gamma:7.0e}: c_max/2pi = {:7.2} MHz, infidelity {:.2e}, {} after {} iterations",
            ghz(c) * 1e3,
            r.eval.infidelity,
            r.termination,
            r.iterations
        ));
        cmax.push(c);
        infid.push(r.eval.infidelity);
    }
    assert!(unitarity <= UNITARITY_TOL);
    let (ci, ii) = (inversions(&cmax, false), inversions(&infid, true));
    let at_one = infid[3];
    let adjacent = cmax.windows(2).filter(|w| w[1] > w[0]).count();
    details.push(format!(
        "rank inversions (discordant pairs): c_max {ci}, infidelity {ii}, at most 1 each; infidelity at gamma = 1: {at_one:.2e}"
    ));
    details.push(format!("(diagnostic) adjacent increases of c_max: {adjacent}"));
    report("energy-weight trend, QFT4", Kind::Reproduction, ci <= 1 && ii <= 1 && at_one <= 1e-3, &details);
}
