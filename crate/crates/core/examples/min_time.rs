// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Shortest SWAP02 gate whose drive stays inside the amplitude band.
//!
//!     cargo run --release --example min_time -- [T0_NS]

use std::f64::consts::TAU;

use qudit_mintime::cases::builtin_case;
use qudit_mintime::objective::Weights;
use qudit_mintime::timescale::{minimize_gate_duration, TimeScaleOptions};

fn main() -> qudit_mintime::Result<()> {
    let t0: f64 = std::env::args().nth(1).map_or(Ok(30.0), |s| s.parse()).expect("T0 in ns");
    let case = builtin_case("SWAP02")?;
    let opts = TimeScaleOptions::new(t0);
    let result = minimize_gate_duration(&case.system, &case.target, case.knot_spacing, Weights::default(), &opts)?;

    println!(" k   T (ns)   c_max/2pi (MHz)   infidelity   inner");
    for r in &result.records {
        println!(
            "{:2}  {:7.3}   {:15.3}   {:10.3e}   {} iters, {}",
            r.k,
            r.duration,
            r.c_max / TAU * 1e3,
            r.breakdown.infidelity,
            r.inner_iters,
            r.inner_termination
        );
    }
    println!(
        "{:?}: T* = {:.3} ns after {} outer iterations (band {:.0}-{:.0} MHz)",
        result.status,
        result.final_duration(),
        result.outer_iterations(),
        (opts.b_max - opts.delta_b) / TAU * 1e3,
        opts.b_max / TAU * 1e3
    );
    Ok(())
}
