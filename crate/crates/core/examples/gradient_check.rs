// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Compares the adjoint gradient of the full penalized objective with central
//! finite differences on a random CNOT pulse.
//!
//!     cargo run --release --example gradient_check

use qudit_mintime::cases::builtin_case;
use qudit_mintime::objective::{GateProblem, Weights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qudit_mintime::Result<()> {
    let case = builtin_case("CNOT")?;
    let problem = GateProblem::new(case.system, case.target, 20.0, 12, Weights::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<f64> = (0..problem.n_coeffs()).map(|_| rng.random_range(-0.3..0.3)).collect();
    let value = problem.evaluate_with_gradient(&x)?;
    println!(
        "objective {:.6e} = infidelity {:.3e} + energy {:.3e} + tikhonov {:.3e} + population {:.3e} (weighted)",
        value.total, value.infidelity, value.energy, value.tikhonov, value.population
    );
    println!("{} steps, {} coefficients", problem.step_count(), problem.n_coeffs());
    println!("  i        adjoint     finite diff   rel. error");
    for i in (0..x.len()).step_by(7) {
        let h = 1e-6;
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        let fd = (problem.evaluate(&xp)?.total - problem.evaluate(&xm)?.total) / (2.0 * h);
        let g = value.gradient[i];
        println!("{i:3}  {g:13.6e}  {fd:13.6e}  {:.1e}", (g - fd).abs() / g.abs().max(fd.abs()));
    }
    Ok(())
}
