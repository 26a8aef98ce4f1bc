// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Quick self-test of the numerical invariants, run by `mintime check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cases::builtin_case;
use crate::controls::{control_integral, energy_norm, scale_control, splines_for_duration, ControlSpline};
use crate::error::Result;
use crate::model::{control_hamiltonian, max_abs_diff, system_hamiltonian, unitarity_residual, CMatrix, C64};
use crate::objective::{
    displacement_infidelity, displacement_invariance_check, infidelity, pure_drive_infidelity, GateProblem,
    TargetGate, Weights,
};
use crate::propagator::propagate_exact_steps;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, value: f64, tol: f64) -> CheckOutcome {
    CheckOutcome { name, passed: value <= tol, detail: format!("{value:.3e} (tolerance {tol:.0e})") }
}

fn random_spline(rng: &mut ChaCha8Rng, n: usize, duration: f64, amp: f64) -> ControlSpline {
    let mut draw = |_| rng.random_range(-amp..amp);
    let re = (0..n).map(&mut draw).collect();
    let im = (0..n).map(&mut draw).collect();
    ControlSpline::new(re, im, duration).expect("valid random spline")
}

/// Composite Simpson rule of `(1/T) ∫ |c|²` with `per_knot` panels per knot interval.
pub fn simpson_energy(spline: &ControlSpline, per_knot: usize) -> f64 {
    let intervals = (spline.n_splines() + 2) * per_knot * 2;
    let h = spline.duration() / intervals as f64;
    let f = |i: usize| spline.value_unchecked((i as f64 * h).min(spline.duration())).norm_sqr();
    let mut sum = f(0) + f(intervals);
    for i in 1..intervals {
        sum += if i % 2 == 1 { 4.0 * f(i) } else { 2.0 * f(i) };
    }
    sum * h / 3.0 / spline.duration()
}

fn hermiticity(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for name in crate::cases::CASE_NAMES {
        let case = builtin_case(name)?;
        let drives: Vec<C64> =
            (0..case.system.n_qudits()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let h = &system_hamiltonian(&case.system).matrix + &control_hamiltonian(&case.system, &drives)?.matrix;
        worst = worst.max(max_abs_diff(&h, &h.adjoint()));
    }
    Ok(outcome("hamiltonian hermiticity", worst, 1e-12))
}

fn unitarity(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for (name, t) in [("QFT4", 20.0), ("SWAP02", 20.0), ("CNOT", 60.0)] {
        let case = builtin_case(name)?;
        let ns = splines_for_duration(t, case.knot_spacing);
        let controls: Vec<ControlSpline> =
            (0..case.system.n_qudits()).map(|_| random_spline(rng, ns, t, 0.25)).collect();
        let problem = GateProblem::new(case.system.clone(), case.target.clone(), t, ns, Weights::NONE)?;
        let u = propagate_exact_steps(&case.system, &controls, t, problem.step_count())?;
        worst = worst.max(unitarity_residual(u.u_final()));
    }
    Ok(outcome("propagator unitarity", worst, 1e-9))
}

fn energy(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(4..=48);
        let duration = rng.random_range(5.0..50.0);
        let spline = random_spline(rng, n, duration, 1.0);
        let exact = energy_norm(&spline);
        worst = worst.max((exact - simpson_energy(&spline, 256)).abs() / exact);
    }
    outcome("energy norm vs quadrature", worst, 1e-10)
}

fn gradient(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let case = builtin_case("SWAP02")?;
    let (t, ns) = (8.0, 10);
    let problem = GateProblem::new(case.system, case.target, t, ns, Weights::default())?;
    let x: Vec<f64> = (0..problem.n_coeffs()).map(|_| rng.random_range(-0.2..0.2)).collect();
    let g = problem.evaluate_with_gradient(&x)?.gradient;
    let mut worst = 0.0f64;
    for i in (0..x.len()).step_by(3) {
        let h = 1e-6 * x[i].abs().max(1.0);
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        let fd = (problem.evaluate(&xp)?.total - problem.evaluate(&xm)?.total) / (2.0 * h);
        let err = (fd - g[i]).abs();
        worst = worst.max(if err <= 1e-9 { 0.0 } else { err / fd.abs().max(g[i].abs()) });
    }
    Ok(outcome("adjoint gradient vs finite differences", worst, 1e-5))
}

fn scaling(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let case = builtin_case("QFT4")?;
    let (t, ns) = (10.0, 20);
    let spline = random_spline(rng, ns, t, 0.25);
    let steps = GateProblem::new(case.system.clone(), case.target.clone(), t, ns, Weights::NONE)?.step_count();
    let u = propagate_exact_steps(&case.system, std::slice::from_ref(&spline), t, steps)?;
    let mut worst = 0.0f64;
    for s in [0.5, 1.3, 2.0] {
        let scaled = scale_control(&spline, s)?;
        let v = propagate_exact_steps(&case.system.time_scaled(s)?, &[scaled], s * t, steps)?;
        worst = worst.max(max_abs_diff(u.u_final(), v.u_final()));
    }
    Ok(outcome("time-scaling exactness", worst, 1e-8))
}

fn displacement(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let x = TargetGate::new("X", CMatrix::from_row_slice(2, 2, &[o, l, l, o]))?;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        // common constant phase: the drive Hamiltonians commute
        let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let a: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..0.3)).collect();
        let mut b: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..0.3)).collect();
        let shift = (a.iter().sum::<f64>() - b.iter().sum::<f64>()) / 12.0;
        b.iter_mut().for_each(|v| *v += shift);
        let spline = |w: &[f64]| {
            ControlSpline::new(w.iter().map(|v| v * phase.re).collect(), w.iter().map(|v| v * phase.im).collect(), 6.0)
        };
        let (c1, c2) = (spline(&a)?, spline(&b)?);
        if (control_integral(&c1) - control_integral(&c2)).norm() > 1e-12 {
            continue;
        }
        worst = worst.max(displacement_invariance_check(&c1, &c2, &x)?);
        worst = worst.max((pure_drive_infidelity(&c1, &x)? - displacement_infidelity(&c1, &x)?).abs());
    }
    Ok(outcome("pure-drive area invariance", worst, 1e-7))
}

fn phase_invariance(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let case = builtin_case("QFT4")?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let u = case.target.matrix() * C64::from_polar(1.0, theta);
        worst = worst.max(infidelity(&u, &case.target)?);
    }
    Ok(outcome("infidelity global-phase invariance", worst, 1e-12))
}

/// Runs every check; the outcome list is in a fixed order.
pub fn run_checks(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        hermiticity(&mut rng)?,
        unitarity(&mut rng)?,
        energy(&mut rng),
        gradient(&mut rng)?,
        scaling(&mut rng)?,
        displacement(&mut rng)?,
        phase_invariance(&mut rng)?,
    ])
}
