// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! A user-defined system and gate from a TOML configuration: a single
//! transmon-like qutrit performing an X gate on its lowest two levels while
//! leaving level 2 alone. The configuration is resolved exactly as the CLI
//! would, then optimized at a fixed duration.
//!
//!     cargo run --release --example custom_system

use std::f64::consts::TAU;

use qudit_mintime::config::{ConfigFile, ResolvedConfig};
use qudit_mintime::controls::splines_for_duration;
use qudit_mintime::objective::GateProblem;
use qudit_mintime::optimizer::lbfgs_minimize;
use qudit_mintime::timescale::{initial_guess, peak_amplitude};

const CONFIG: &str = r#"
name = "qutrit-X01"
knot_spacing = 0.5
duration = 15.0
durations = "10:20:5"

[system]
levels = [3]
transition_ghz = [5.0]
kerr_ghz = [0.3]
rot_ghz = 5.0

[gate]
matrix = [
  [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
  [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
  [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
]

[weights]
gamma = 0.1
"#;

fn main() -> qudit_mintime::Result<()> {
    let cfg = ResolvedConfig::resolve(&ConfigFile::from_toml(CONFIG)?)?;
    let case = cfg.test_case()?;
    let n_splines = splines_for_duration(cfg.duration, case.knot_spacing);
    let problem = GateProblem::new(case.system, case.target, cfg.duration, n_splines, cfg.weights)?;
    let x0 = initial_guess(problem.n_coeffs(), 0.5 * cfg.b_max(), cfg.seed);
    let r = lbfgs_minimize(|x: &[f64]| problem.evaluate_with_gradient(x), &x0, &cfg.optimizer)?;
    println!(
        "{}: T = {} ns, {} splines, {} after {} iterations",
        case.name, cfg.duration, n_splines, r.termination, r.iterations
    );
    println!(
        "infidelity {:.3e}, peak amplitude {:.2} MHz",
        r.eval.infidelity,
        peak_amplitude(&problem.controls(&r.x)?) / TAU * 1e3
    );
    println!("\nresolved configuration:\n{}", cfg.to_toml()?);
    Ok(())
}
