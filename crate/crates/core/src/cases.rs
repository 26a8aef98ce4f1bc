// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Built-in benchmark gates and the devices they run on.

use crate::error::{Error, Result};
use crate::model::{CMatrix, QuditSystem, C64};
use crate::objective::TargetGate;

pub const CASE_NAMES: [&str; 5] = ["QFT4", "SWAP02", "CNOT", "CCNOT", "SWAP_CHAIN"];

#[derive(Debug, Clone)]
pub struct TestCase {
    pub name: String,
    pub system: QuditSystem,
    pub target: TargetGate,
    /// Target knot spacing in ns; sets the spline count for a duration.
    pub knot_spacing: f64,
    /// Default `(start, stop, step)` in ns for duration sweeps.
    pub sweep_durations: (f64, f64, f64),
}

impl TestCase {
    pub fn new(
        name: impl Into<String>,
        system: QuditSystem,
        target: TargetGate,
        knot_spacing: f64,
        sweep_durations: (f64, f64, f64),
    ) -> Result<Self> {
        if target.dim() != system.dim() {
            return Err(Error::InvalidDimension(format!(
                "target gate is {}-dimensional, system is {}-dimensional",
                target.dim(),
                system.dim()
            )));
        }
        if !(knot_spacing > 0.0 && knot_spacing.is_finite()) {
            return Err(Error::InvalidArgument(format!("knot spacing must be positive, got {knot_spacing}")));
        }
        Ok(Self { name: name.into(), system, target, knot_spacing, sweep_durations })
    }
}

fn real_matrix(n: usize, rows: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(n, n, rows.iter().map(|&x| C64::new(x, 0.0)))
}

/// Permutation matrix with `P |k> = |perm(k)>`.
fn permutation_matrix(n: usize, perm: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n {
        m[(perm(k), k)] = C64::new(1.0, 0.0);
    }
    m
}

pub fn qft4_gate() -> CMatrix {
    let n = 4;
    let omega = C64::new(0.0, 1.0);
    CMatrix::from_fn(n, n, |j, k| omega.powu((j * k) as u32) * 0.5)
}

pub fn swap02_gate() -> CMatrix {
    real_matrix(3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0])
}

pub fn cnot_gate() -> CMatrix {
    permutation_matrix(4, |k| if k >= 2 { k ^ 1 } else { k })
}

pub fn ccnot_gate() -> CMatrix {
    permutation_matrix(8, |k| if k >= 6 { k ^ 1 } else { k })
}

/// Exchanges the outer qubits of a three-qubit register.
pub fn swap_chain_gate() -> CMatrix {
    permutation_matrix(8, |k| {
        let (b1, b2, b3) = (k >> 2 & 1, k >> 1 & 1, k & 1);
        b3 << 2 | b2 << 1 | b1
    })
}

/// Looks up one of [`CASE_NAMES`] (case-insensitive; `-` and `_` interchangeable).
pub fn builtin_case(name: &str) -> Result<TestCase> {
    let key = name.trim().to_ascii_uppercase().replace('-', "_");
    let chain = |gate: CMatrix, label: &str| -> Result<TestCase> {
        let system = QuditSystem::from_ghz(
            vec![2, 2, 2],
            &[5.18, 5.12, 5.06],
            &[0.34, 0.34, 0.34],
            &[(0, 1, 0.005), (0, 2, 0.0), (1, 2, 0.005)],
            5.12,
        )?;
        TestCase::new(label, system, TargetGate::new(label, gate)?, 1.65, (150.0, 260.0, 10.0))
    };
    match key.as_str() {
        "QFT4" => TestCase::new(
            "QFT4",
            QuditSystem::from_ghz(vec![4], &[4.914], &[0.33], &[], 4.584)?,
            TargetGate::new("QFT4", qft4_gate())?,
            0.3,
            (10.0, 30.0, 2.0),
        ),
        "SWAP02" => TestCase::new(
            "SWAP02",
            QuditSystem::from_ghz(vec![3], &[5.12], &[0.34], &[], 4.78)?,
            TargetGate::new("SWAP02", swap02_gate())?,
            0.3,
            (10.0, 30.0, 2.0),
        ),
        "CNOT" => TestCase::new(
            "CNOT",
            QuditSystem::from_ghz(vec![2, 2], &[5.12, 5.06], &[0.34, 0.34], &[(0, 1, 0.005)], 5.09)?,
            TargetGate::new("CNOT", cnot_gate())?,
            1.65,
            (50.0, 90.0, 5.0),
        ),
        "CCNOT" => chain(ccnot_gate(), "CCNOT"),
        "SWAP_CHAIN" | "SWAPCHAIN" => chain(swap_chain_gate(), "SWAP_CHAIN"),
        _ => Err(Error::NotFound { name: name.to_string(), valid: CASE_NAMES.join(", ") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{max_abs_diff, unitarity_residual};
    use std::f64::consts::TAU;

    #[test]
    fn all_targets_unitary() {
        for name in CASE_NAMES {
            let case = builtin_case(name).unwrap();
            assert!(unitarity_residual(case.target.matrix()) <= 1e-12, "{name}");
            assert_eq!(case.target.dim(), case.system.dim());
        }
    }

    #[test]
    fn qft4_fourth_power_is_identity() {
        let v = qft4_gate();
        let v4 = &v * &v * &v * &v;
        // F² is the index-reversal permutation, so F⁴ = I exactly.
        assert!(max_abs_diff(&v4, &CMatrix::identity(4, 4)) < 1e-14);
        assert!((v[(1, 1)] - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((v[(3, 1)] - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn swap_chain_is_involution_and_bit_swap() {
        let v = swap_chain_gate();
        assert!(max_abs_diff(&(&v * &v), &CMatrix::identity(8, 8)) < 1e-15);
        for k in 0..8usize {
            let bits = [k >> 2 & 1, k >> 1 & 1, k & 1];
            let swapped = bits[2] << 2 | bits[1] << 1 | bits[0];
            assert_eq!(v[(swapped, k)].re, 1.0);
        }
        // nonzero pattern of the permutation, 0-based
        for &(r, c) in &[(0, 0), (1, 4), (2, 2), (3, 6), (4, 1), (5, 5), (6, 3), (7, 7)] {
            assert_eq!(v[(r, c)].re, 1.0);
        }
        for &(r, c) in &[(1, 1), (3, 3), (4, 4), (6, 6)] {
            assert_eq!(v[(r, c)].re, 0.0);
        }
    }

    #[test]
    fn ccnot_swaps_last_two_states() {
        let v = ccnot_gate();
        for k in 0..6 {
            assert_eq!(v[(k, k)].re, 1.0);
        }
        assert_eq!(v[(6, 7)].re, 1.0);
        assert_eq!(v[(7, 6)].re, 1.0);
        assert_eq!(v[(6, 6)].re, 0.0);
        assert_eq!(v.iter().filter(|x| x.norm() > 0.0).count(), 8);
    }

    #[test]
    fn system_parameters() {
        let cnot = builtin_case("CNOT").unwrap();
        assert!((cnot.system.coupling(0, 1) - TAU * 0.005).abs() < 1e-15);
        assert!((cnot.system.rot_freq() - TAU * 5.09).abs() < 1e-12);
        let chain = builtin_case("swap-chain").unwrap();
        assert_eq!(chain.system.coupling(0, 2), 0.0);
        assert!((chain.system.coupling(1, 2) - TAU * 0.005).abs() < 1e-15);
        assert_eq!(chain.knot_spacing, 1.65);
        assert_eq!(builtin_case("qft4").unwrap().knot_spacing, 0.3);
    }

    #[test]
    fn unknown_case_lists_names() {
        let err = builtin_case("BOGUS").unwrap_err();
        let msg = err.to_string();
        for name in CASE_NAMES {
            assert!(msg.contains(name));
        }
    }
}
