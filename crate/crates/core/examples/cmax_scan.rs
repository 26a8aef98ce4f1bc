// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Peak amplitude of energy-penalized QFT4 pulses over a range of durations,
//! with the fitted log-log slope (close to -1 for a c_max ~ 1/T law).
//!
//!     cargo run --release --example cmax_scan

use std::f64::consts::TAU;

use qudit_mintime::cases::builtin_case;
use qudit_mintime::sweep::{duration_grid, loglog_slope, sweep_unconstrained_cmax, CmaxScanOptions};

fn main() -> qudit_mintime::Result<()> {
    let case = builtin_case("QFT4")?;
    let durations = duration_grid(10.0, 40.0, 10.0)?;
    let rows = sweep_unconstrained_cmax(&case.system, &case.target, case.knot_spacing, &durations, &CmaxScanOptions::default())?;
    for r in &rows {
        println!(
            "T = {:4} ns   c_max/2pi = {:7.2} MHz   c_max*T = {:5.2}   infidelity {:.2e}",
            r.duration,
            r.c_max / TAU * 1e3,
            r.c_max * r.duration,
            r.infidelity
        );
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.duration, r.c_max)).collect();
    println!("log-log slope: {:.3}", loglog_slope(&points)?);
    Ok(())
}
