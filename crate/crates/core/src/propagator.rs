// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Time integration of `dU/dt = -i H(t) U`, `U(0) = I`.
//!
//! Each step applies the exact exponential of the midpoint Hamiltonian,
//! `U_{k+1} = exp(-i dt H(t_k + dt/2)) U_k`, on a uniform grid of `K` steps.
//! The scheme is second order and unitary to rounding. The eigendecomposition
//! of every step is kept so the objective can run an exact discrete adjoint.

use nalgebra::linalg::SymmetricEigen;

use crate::controls::ControlSpline;
use crate::error::{Error, Result};
use crate::model::{control_quadratures, row_sum_norm, system_hamiltonian, CMatrix, QuadraturePair, QuditSystem, C64};

/// Rules that fix the number of time steps for a given problem.
///
/// The count depends only on the system, the duration and the spline count,
/// never on the coefficient values, so the discrete objective is a smooth
/// function of the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    /// Upper bound on `dt * ‖H‖` per step.
    pub max_phase_per_step: f64,
    /// Minimum number of steps per knot spacing.
    pub steps_per_knot: usize,
    /// Drive amplitude (rad/ns) assumed when bounding `‖H_c‖`.
    pub reference_amplitude: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            max_phase_per_step: 0.1,
            steps_per_knot: 20,
            reference_amplitude: std::f64::consts::TAU * 0.1,
        }
    }
}

impl StepPolicy {
    pub fn step_count(&self, system: &QuditSystem, duration: f64, n_splines: usize, steps_hint: usize) -> usize {
        let drive_bound: f64 = system
            .levels()
            .iter()
            .map(|&d| 2.0 * ((d - 1) as f64).sqrt() * self.reference_amplitude)
            .sum();
        let norm = row_sum_norm(&system_hamiltonian(system).matrix) + drive_bound;
        let by_phase = (duration * norm / self.max_phase_per_step).ceil() as usize;
        let knots = n_splines + 2;
        let needed = (self.steps_per_knot * knots).max(by_phase).max(1);
        // whole steps per knot interval, so every spline breakpoint is a grid point
        let aligned = needed.div_ceil(knots) * knots;
        steps_hint.max(aligned)
    }
}

/// Final unitary plus the unitary after every step.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    /// `U(t_k)` for `k = 0..=K`; the first entry is the identity.
    pub trajectory: Vec<CMatrix>,
    pub dt: f64,
    pub step_count: usize,
}

impl PropagationResult {
    pub fn u_final(&self) -> &CMatrix {
        self.trajectory.last().expect("trajectory holds at least U(0)")
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.step_count as f64
    }

    /// `|U_ij(t_k)|²` for every sample, flattened row-major per sample.
    pub fn populations(&self) -> Vec<Vec<f64>> {
        self.trajectory.iter().map(populations_of).collect()
    }
}

pub(crate) fn populations_of(u: &CMatrix) -> Vec<f64> {
    let n = u.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(u[(i, j)].norm_sqr());
        }
    }
    out
}

/// Eigendecomposition `H = V diag(λ) V†` of one step's midpoint Hamiltonian.
#[derive(Debug, Clone)]
pub(crate) struct StepEigen {
    pub vectors: CMatrix,
    pub values: Vec<f64>,
    pub propagator: CMatrix,
}

/// `exp(-i dt H)` for Hermitian `H`, with its eigendata.
pub(crate) fn expm_hermitian(h: CMatrix, dt: f64) -> Result<StepEigen> {
    if h.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Numerical("non-finite Hamiltonian entry".into()));
    }
    let eig = SymmetricEigen::new(h);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let vectors = eig.eigenvectors;
    let mut scaled = vectors.clone();
    for (k, &lam) in values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -dt * lam);
        scaled.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    let propagator = &scaled * vectors.adjoint();
    Ok(StepEigen { vectors, values, propagator })
}

/// Everything the adjoint needs from a forward sweep.
pub(crate) struct ForwardSweep {
    pub result: PropagationResult,
    pub steps: Vec<StepEigen>,
    pub quadratures: Vec<QuadraturePair>,
    /// Midpoint times `t_k + dt/2`.
    pub midpoints: Vec<f64>,
}

pub(crate) fn check_controls(system: &QuditSystem, controls: &[ControlSpline], duration: f64) -> Result<()> {
    if controls.len() != system.n_qudits() {
        return Err(Error::InvalidArgument(format!(
            "{} control splines for {} qudits",
            controls.len(),
            system.n_qudits()
        )));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
    }
    for c in controls {
        if (c.duration() - duration).abs() > 1e-12 * duration {
            return Err(Error::InvalidArgument(format!(
                "control duration {} differs from propagation duration {duration}",
                c.duration()
            )));
        }
    }
    Ok(())
}

pub(crate) fn forward_sweep(
    system: &QuditSystem,
    controls: &[ControlSpline],
    duration: f64,
    step_count: usize,
) -> Result<ForwardSweep> {
    check_controls(system, controls, duration)?;
    if step_count < 1 {
        return Err(Error::InvalidArgument("need at least one time step".into()));
    }
    let n = system.dim();
    let h_sys = system_hamiltonian(system).matrix;
    let quadratures = control_quadratures(system);
    let dt = duration / step_count as f64;

    let mut trajectory = Vec::with_capacity(step_count + 1);
    let mut steps = Vec::with_capacity(step_count);
    let mut midpoints = Vec::with_capacity(step_count);
    trajectory.push(CMatrix::identity(n, n));
    for k in 0..step_count {
        let t_mid = (k as f64 + 0.5) * dt;
        let mut h = h_sys.clone();
        for (ctrl, quad) in controls.iter().zip(&quadratures) {
            let c = ctrl.value_unchecked(t_mid);
            if c.re != 0.0 {
                h += &quad.real_part * C64::from(c.re);
            }
            if c.im != 0.0 {
                h += &quad.imag_part * C64::from(c.im);
            }
        }
        let step = expm_hermitian(h, dt)?;
        let next = &step.propagator * trajectory.last().expect("non-empty");
        trajectory.push(next);
        steps.push(step);
        midpoints.push(t_mid);
    }
    Ok(ForwardSweep {
        result: PropagationResult { trajectory, dt, step_count },
        steps,
        quadratures,
        midpoints,
    })
}

/// Propagates the full unitary basis under `H_sys + H_c(t)` over `[0, T]`.
///
/// The step count is the larger of `steps_hint` and the default
/// [`StepPolicy`] minimum.
pub fn propagate(
    system: &QuditSystem,
    controls: &[ControlSpline],
    duration: f64,
    steps_hint: usize,
) -> Result<PropagationResult> {
    if steps_hint < 1 {
        return Err(Error::InvalidArgument("steps_hint must be at least 1".into()));
    }
    check_controls(system, controls, duration)?;
    let n_splines = controls.iter().map(ControlSpline::n_splines).max().unwrap_or(1);
    let steps = StepPolicy::default().step_count(system, duration, n_splines, steps_hint);
    Ok(forward_sweep(system, controls, duration, steps)?.result)
}

/// Like [`propagate`] but with exactly `step_count` steps.
pub fn propagate_exact_steps(
    system: &QuditSystem,
    controls: &[ControlSpline],
    duration: f64,
    step_count: usize,
) -> Result<PropagationResult> {
    Ok(forward_sweep(system, controls, duration, step_count)?.result)
}

/// `(1/2T) ∫ Σ_ij (d²/dt² |U_ij|²)² dt` from a propagation result.
pub fn population_penalty(result: &PropagationResult, duration: f64) -> Result<f64> {
    let samples = result.populations();
    Ok(population_penalty_samples(&samples, result.dt, duration, false)?.0)
}

/// Population penalty of uniformly spaced samples; optionally returns the
/// gradient with respect to every sample entry.
///
/// Second derivatives use the 3-point central stencil in the interior and the
/// second-order 4-point one-sided stencil at both ends; the time integral uses
/// the trapezoid rule on the sample grid.
pub fn population_penalty_samples(
    samples: &[Vec<f64>],
    dt: f64,
    duration: f64,
    with_gradient: bool,
) -> Result<(f64, Option<Vec<Vec<f64>>>)> {
    let len = samples.len();
    if len < 5 {
        return Err(Error::InvalidArgument(format!(
            "population penalty needs at least 5 samples, got {len}"
        )));
    }
    let width = samples[0].len();
    let inv_dt2 = 1.0 / (dt * dt);
    let last = len - 1;
    let mut grad = with_gradient.then(|| vec![vec![0.0; width]; len]);
    let mut total = 0.0;
    let mut d2 = vec![0.0; width];
    for k in 0..len {
        let stencil = second_derivative_stencil(k, last);
        for (e, v) in d2.iter_mut().enumerate() {
            *v = stencil.iter().map(|&(m, c)| c * samples[m][e]).sum::<f64>() * inv_dt2;
        }
        let w = if k == 0 || k == last { 0.5 * dt } else { dt };
        total += w * d2.iter().map(|x| x * x).sum::<f64>();
        if let Some(g) = grad.as_mut() {
            let scale = w / duration * inv_dt2;
            for &(m, c) in stencil.iter() {
                for (gm, &v) in g[m].iter_mut().zip(&d2) {
                    *gm += scale * c * v;
                }
            }
        }
    }
    Ok((total / (2.0 * duration), grad))
}

fn second_derivative_stencil(k: usize, last: usize) -> [(usize, f64); 4] {
    if k == 0 {
        [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)]
    } else if k == last {
        [(last, 2.0), (last - 1, -5.0), (last - 2, 4.0), (last - 3, -1.0)]
    } else {
        [(k - 1, 1.0), (k, -2.0), (k + 1, 1.0), (k, 0.0)]
    }
}
