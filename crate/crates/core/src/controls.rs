// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Quadratic B-spline pulse envelopes.
//!
//! A pulse of duration `T` with `N_s` coefficients uses the knot spacing
//! `Δ = T / (N_s + 2)` and basis centers `t_s = (s + 1.5) Δ` for the 0-based
//! index `s`. Each basis function is the wavelet [`eval_wavelet`] evaluated
//! at `(t - t_s) / (3 Δ)`, so it is supported on `[t_s - 1.5 Δ, t_s + 1.5 Δ]`
//! and the envelope vanishes at both ends of the pulse.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::C64;

/// Default grid refinement used by [`max_amplitude`].
pub const DEFAULT_OVERSAMPLE: usize = 16;

/// Normalized quadratic B-spline wavelet, supported on `[-1/2, 1/2)`.
pub fn eval_wavelet(tau: f64) -> f64 {
    const SIXTH: f64 = 1.0 / 6.0;
    if (-0.5..-SIXTH).contains(&tau) {
        1.125 + 4.5 * tau + 4.5 * tau * tau
    } else if (-SIXTH..SIXTH).contains(&tau) {
        0.75 - 9.0 * tau * tau
    } else if (SIXTH..0.5).contains(&tau) {
        1.125 - 4.5 * tau + 4.5 * tau * tau
    } else {
        0.0
    }
}

/// One qudit's complex pulse envelope `c(t) = p(t) + i q(t)` in rad/ns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSpline {
    alpha_real: Vec<f64>,
    alpha_imag: Vec<f64>,
    duration: f64,
}

impl ControlSpline {
    pub fn new(alpha_real: Vec<f64>, alpha_imag: Vec<f64>, duration: f64) -> Result<Self> {
        if alpha_real.is_empty() {
            return Err(Error::InvalidArgument("spline needs at least one coefficient".into()));
        }
        if alpha_real.len() != alpha_imag.len() {
            return Err(Error::InvalidArgument(format!(
                "{} real but {} imaginary coefficients",
                alpha_real.len(),
                alpha_imag.len()
            )));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
        }
        Ok(Self { alpha_real, alpha_imag, duration })
    }

    pub fn zeros(n_splines: usize, duration: f64) -> Result<Self> {
        Self::new(vec![0.0; n_splines], vec![0.0; n_splines], duration)
    }

    pub fn n_splines(&self) -> usize {
        self.alpha_real.len()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn alpha_real(&self) -> &[f64] {
        &self.alpha_real
    }

    pub fn alpha_imag(&self) -> &[f64] {
        &self.alpha_imag
    }

    pub fn knot_spacing(&self) -> f64 {
        self.duration / (self.n_splines() as f64 + 2.0)
    }

    /// Center of the 0-based basis function `s`.
    pub fn center(&self, s: usize) -> f64 {
        (s as f64 + 1.5) * self.knot_spacing()
    }

    /// Calls `f(s, B_s(t))` for every basis function that can be nonzero at `t`
    /// (at most three).
    pub fn for_each_basis(&self, t: f64, mut f: impl FnMut(usize, f64)) {
        let delta = self.knot_spacing();
        let m = (t / delta).floor() as isize;
        let n = self.n_splines() as isize;
        for s in (m - 2).max(0)..(m + 1).min(n) {
            let s = s as usize;
            let b = eval_wavelet((t - self.center(s)) / (3.0 * delta));
            if b != 0.0 {
                f(s, b);
            }
        }
    }

    /// Envelope value without the range check; used on interior grids.
    pub(crate) fn value_unchecked(&self, t: f64) -> C64 {
        let mut p = 0.0;
        let mut q = 0.0;
        self.for_each_basis(t, |s, b| {
            p += self.alpha_real[s] * b;
            q += self.alpha_imag[s] * b;
        });
        C64::new(p, q)
    }
}

/// `c(t)` for `0 <= t <= T`.
pub fn eval_control(spline: &ControlSpline, t: f64) -> Result<C64> {
    if !(0.0..=spline.duration).contains(&t) {
        return Err(Error::OutOfRange { t, duration: spline.duration });
    }
    Ok(spline.value_unchecked(t))
}

/// Stretches the pulse to duration `sT` and divides its amplitude by `s`,
/// so that `c̃(τ) = c(τ/s) / s` and the time integral of `c` is preserved.
pub fn scale_control(spline: &ControlSpline, s: f64) -> Result<ControlSpline> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale factor must be positive, got {s}")));
    }
    ControlSpline::new(
        spline.alpha_real.iter().map(|a| a / s).collect(),
        spline.alpha_imag.iter().map(|a| a / s).collect(),
        spline.duration * s,
    )
}

/// `∫₀^T c(t) dt`; every basis function integrates to the knot spacing.
pub fn control_integral(spline: &ControlSpline) -> C64 {
    let delta = spline.knot_spacing();
    C64::new(
        delta * spline.alpha_real.iter().sum::<f64>(),
        delta * spline.alpha_imag.iter().sum::<f64>(),
    )
}

/// Grid estimate of `max_t |c(t)|` over `oversample * 3 * N_s + 1` uniform points.
pub fn max_amplitude(spline: &ControlSpline, oversample: usize) -> f64 {
    let points = oversample.max(1) * 3 * spline.n_splines();
    (0..=points)
        .map(|i| {
            let t = spline.duration * i as f64 / points as f64;
            spline.value_unchecked(t).norm()
        })
        .fold(0.0, f64::max)
}

/// Gram matrix of the basis in the wavelet's own time unit: penta-diagonal,
/// `11/60 * (1/66, 26/66, 1, 26/66, 1/66)` in the interior, truncated at the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMatrix {
    n: usize,
}

impl EnergyMatrix {
    pub const PREFACTOR: f64 = 11.0 / 60.0;
    pub const DIAG: f64 = 1.0;
    pub const FIRST_OFF: f64 = 26.0 / 66.0;
    pub const SECOND_OFF: f64 = 1.0 / 66.0;

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let stencil = match i.abs_diff(j) {
            0 => Self::DIAG,
            1 => Self::FIRST_OFF,
            2 => Self::SECOND_OFF,
            _ => 0.0,
        };
        Self::PREFACTOR * stencil
    }

    /// `W x` using the band structure.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "energy matrix size mismatch");
        let n = self.n;
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(2);
                let hi = (i + 3).min(n);
                (lo..hi).map(|j| self.entry(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// `xᵀ W x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j))
    }
}

pub fn energy_matrix(n_splines: usize) -> Result<EnergyMatrix> {
    if n_splines < 1 {
        return Err(Error::InvalidArgument("energy matrix needs N_s >= 1".into()));
    }
    Ok(EnergyMatrix { n: n_splines })
}

/// `(1/T) ∫ |c|² dt`, evaluated exactly as `(3Δ/T) (α_rᵀ W α_r + α_iᵀ W α_i)`.
pub fn energy_norm(spline: &ControlSpline) -> f64 {
    let w = EnergyMatrix { n: spline.n_splines() };
    energy_weight(spline) * (w.quadratic_form(&spline.alpha_real) + w.quadratic_form(&spline.alpha_imag))
}

/// Gradient of [`energy_norm`], laid out as `[∂/∂α_real..., ∂/∂α_imag...]`.
pub fn energy_gradient(spline: &ControlSpline) -> Vec<f64> {
    let w = EnergyMatrix { n: spline.n_splines() };
    let k = 2.0 * energy_weight(spline);
    w.apply(&spline.alpha_real)
        .into_iter()
        .chain(w.apply(&spline.alpha_imag))
        .map(|v| k * v)
        .collect()
}

/// The prefactor `3Δ/T`.
fn energy_weight(spline: &ControlSpline) -> f64 {
    3.0 * spline.knot_spacing() / spline.duration
}

/// Flattens per-qudit splines into one optimization vector: for each qudit
/// in order, all real coefficients followed by all imaginary ones.
pub fn pack_coefficients(controls: &[ControlSpline]) -> Vec<f64> {
    controls
        .iter()
        .flat_map(|c| c.alpha_real.iter().chain(&c.alpha_imag).copied())
        .collect()
}

/// Inverse of [`pack_coefficients`].
pub fn unpack_coefficients(
    x: &[f64],
    n_qudits: usize,
    n_splines: usize,
    duration: f64,
) -> Result<Vec<ControlSpline>> {
    if x.len() != 2 * n_qudits * n_splines {
        return Err(Error::InvalidArgument(format!(
            "coefficient vector has length {} but {n_qudits} qudits x {n_splines} splines need {}",
            x.len(),
            2 * n_qudits * n_splines
        )));
    }
    x.chunks(2 * n_splines)
        .map(|chunk| {
            let (re, im) = chunk.split_at(n_splines);
            ControlSpline::new(re.to_vec(), im.to_vec(), duration)
        })
        .collect()
}

/// Spline count for a duration and target knot spacing, `round(T/Δ) - 2`, at least 1.
pub fn splines_for_duration(duration: f64, knot_spacing: f64) -> usize {
    ((duration / knot_spacing).round() as i64 - 2).max(1) as usize
}
