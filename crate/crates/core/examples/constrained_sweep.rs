// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Box-constrained baseline: for each duration, several random restarts of a
//! projected L-BFGS run with every coefficient bounded by b_max.
//!
//!     cargo run --release --example constrained_sweep

use qudit_mintime::cases::builtin_case;
use qudit_mintime::sweep::{duration_grid, sweep_constrained, ConstrainedSweepOptions};

fn main() -> qudit_mintime::Result<()> {
    let case = builtin_case("SWAP02")?;
    let durations = duration_grid(10.0, 25.0, 5.0)?;
    let opts = ConstrainedSweepOptions { restarts: 4, ..Default::default() };
    let sweep = sweep_constrained(&case.system, &case.target, case.knot_spacing, &durations, &opts)?;
    for s in &sweep.stats {
        println!(
            "T = {:4} ns   best fidelity {:.6}   median infidelity {:.2e}   feasible {}/{}",
            s.duration,
            s.best_fidelity(),
            s.median_infidelity,
            s.feasible,
            s.restarts
        );
    }
    Ok(())
}
