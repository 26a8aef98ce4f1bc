// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Stretching a pulse in time: amplitude drops by the scale factor, the pulse
//! area is unchanged, and the stretched pulse under the correspondingly slowed
//! drift Hamiltonian produces the same gate.
//!
//!     cargo run --release --example spline_scaling

use qudit_mintime::cases::builtin_case;
use qudit_mintime::controls::{control_integral, energy_norm, max_amplitude, scale_control, ControlSpline, DEFAULT_OVERSAMPLE};
use qudit_mintime::model::max_abs_diff;
use qudit_mintime::propagator::propagate_exact_steps;

fn main() -> qudit_mintime::Result<()> {
    let case = builtin_case("QFT4")?;
    let re = vec![0.0, 0.1, 0.25, 0.3, 0.2, 0.05, -0.1, -0.2, -0.1, 0.0];
    let im = vec![0.05, 0.0, -0.05, 0.1, 0.15, 0.1, 0.0, 0.0, 0.05, 0.0];
    let pulse = ControlSpline::new(re, im, 4.0)?;
    let steps = 1200;
    let u = propagate_exact_steps(&case.system, std::slice::from_ref(&pulse), pulse.duration(), steps)?;

    for s in [1.0, 0.5, 2.0, 3.0] {
        let scaled = scale_control(&pulse, s)?;
        let v = propagate_exact_steps(&case.system.time_scaled(s)?, std::slice::from_ref(&scaled), scaled.duration(), steps)?;
        println!(
            "s = {s}: T = {:4} ns  max|c| = {:.4}  energy = {:.5}  area = {:.4}  gate change = {:.1e}",
            scaled.duration(),
            max_amplitude(&scaled, DEFAULT_OVERSAMPLE),
            energy_norm(&scaled),
            control_integral(&scaled),
            max_abs_diff(u.u_final(), v.u_final())
        );
    }
    Ok(())
}
