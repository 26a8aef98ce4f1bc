// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Penalized gate objective and its exact discrete gradient.
//!
//! The objective is
//!
//! ```text
//! J = infidelity(U(T)) + γ Σ_q (1/T)∫|c_q|² + γ₁ ‖α‖² + γ₂ population_penalty
//! ```
//!
//! The gradient is the reverse-mode derivative of the discretized objective:
//! a backward sweep over the stored per-step eigendecompositions, with the
//! derivative of each step exponential taken through the Daleckii–Krein
//! formula. It agrees with finite differences of [`GateProblem::evaluate`]
//! to rounding.

use serde::{Deserialize, Serialize};

use crate::controls::{
    control_integral, energy_gradient, energy_norm, pack_coefficients, unpack_coefficients, ControlSpline,
};
use crate::error::{Error, Result};
use crate::model::{unitarity_residual, CMatrix, QuditSystem, C64};
use crate::propagator::{
    expm_hermitian, forward_sweep, population_penalty_samples, populations_of, ForwardSweep, StepPolicy,
};

/// Penalty weights `γ` (energy), `γ₁` (Tikhonov) and `γ₂` (population curvature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub energy: f64,
    pub tikhonov: f64,
    pub population: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self { energy: 1.0, tikhonov: 1e-2, population: 1e-2 }
    }
}

impl Weights {
    /// Pure infidelity.
    pub const NONE: Weights = Weights { energy: 0.0, tikhonov: 0.0, population: 0.0 };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub infidelity: f64,
    pub energy: f64,
    pub tikhonov: f64,
    pub population: f64,
    pub total: f64,
    pub weights: Weights,
    /// Empty unless requested.
    #[serde(skip)]
    pub gradient: Vec<f64>,
}

impl ObjectiveBreakdown {
    fn assemble(infidelity: f64, energy: f64, tikhonov: f64, population: f64, weights: Weights) -> Self {
        let total = infidelity + weights.energy * energy + weights.tikhonov * tikhonov + weights.population * population;
        Self { infidelity, energy, tikhonov, population, total, weights, gradient: Vec::new() }
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

/// Target unitary with a display name.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetGate {
    pub name: String,
    matrix: CMatrix,
}

impl TargetGate {
    /// Largest accepted `max |V†V - I|`.
    pub const UNITARITY_TOL: f64 = 1e-10;

    pub fn new(name: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "target gate must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = unitarity_residual(&matrix);
        if !(residual <= Self::UNITARITY_TOL) {
            return Err(Error::InvalidArgument(format!("target gate is not unitary (residual {residual:.3e})")));
        }
        Ok(Self { name: name.into(), matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Normalized trace overlap `Tr(V† U) / N`.
fn overlap(u: &CMatrix, v: &CMatrix) -> C64 {
    let n = u.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += v[(i, j)].conj() * u[(i, j)];
        }
    }
    acc / n as f64
}

/// `1 - |Tr(U† V) / N|²`.
pub fn infidelity(u_final: &CMatrix, target: &TargetGate) -> Result<f64> {
    if u_final.shape() != target.matrix.shape() {
        return Err(Error::InvalidArgument(format!(
            "unitary is {}x{} but target is {}x{}",
            u_final.nrows(),
            u_final.ncols(),
            target.dim(),
            target.dim()
        )));
    }
    Ok((1.0 - overlap(u_final, &target.matrix).norm_sqr()).max(0.0))
}

/// Squared Euclidean norm.
pub fn tikhonov(coeffs: &[f64]) -> f64 {
    coeffs.iter().map(|a| a * a).sum()
}

/// One fixed-duration optimal control problem over the packed coefficient vector.
#[derive(Debug, Clone)]
pub struct GateProblem {
    system: QuditSystem,
    target: TargetGate,
    duration: f64,
    n_splines: usize,
    weights: Weights,
    step_count: usize,
}

impl GateProblem {
    pub fn new(
        system: QuditSystem,
        target: TargetGate,
        duration: f64,
        n_splines: usize,
        weights: Weights,
    ) -> Result<Self> {
        if target.dim() != system.dim() {
            return Err(Error::InvalidDimension(format!(
                "target is {}-dimensional but the system has dimension {}",
                target.dim(),
                system.dim()
            )));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
        }
        if n_splines < 1 {
            return Err(Error::InvalidArgument("need at least one spline".into()));
        }
        let step_count = StepPolicy::default().step_count(&system, duration, n_splines, 1);
        Ok(Self { system, target, duration, n_splines, weights, step_count })
    }

    /// Overrides the number of time steps.
    pub fn with_step_count(mut self, step_count: usize) -> Self {
        self.step_count = step_count.max(1);
        self
    }

    pub fn system(&self) -> &QuditSystem {
        &self.system
    }

    pub fn target(&self) -> &TargetGate {
        &self.target
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn n_splines(&self) -> usize {
        self.n_splines
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    /// Length of the packed coefficient vector.
    pub fn n_coeffs(&self) -> usize {
        2 * self.system.n_qudits() * self.n_splines
    }

    pub fn controls(&self, x: &[f64]) -> Result<Vec<ControlSpline>> {
        unpack_coefficients(x, self.system.n_qudits(), self.n_splines, self.duration)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<ObjectiveBreakdown> {
        let controls = self.controls(x)?;
        objective_core(&self.system, &controls, &self.target, self.duration, self.weights, self.step_count, false)
    }

    /// Objective value with its gradient in [`ObjectiveBreakdown::gradient`].
    pub fn evaluate_with_gradient(&self, x: &[f64]) -> Result<ObjectiveBreakdown> {
        let controls = self.controls(x)?;
        objective_core(&self.system, &controls, &self.target, self.duration, self.weights, self.step_count, true)
    }

    /// Final unitary for the coefficients `x`.
    pub fn final_unitary(&self, x: &[f64]) -> Result<CMatrix> {
        let controls = self.controls(x)?;
        let sweep = forward_sweep(&self.system, &controls, self.duration, self.step_count)?;
        Ok(sweep.result.u_final().clone())
    }
}

fn common_spline_count(controls: &[ControlSpline]) -> Result<usize> {
    let n = controls.first().map(ControlSpline::n_splines).ok_or_else(|| {
        Error::InvalidArgument("need one control spline per qudit".into())
    })?;
    if controls.iter().any(|c| c.n_splines() != n) {
        return Err(Error::InvalidArgument("all qudits must use the same spline count".into()));
    }
    Ok(n)
}

/// All four objective terms for explicit control splines, using the default
/// step policy.
pub fn evaluate(
    system: &QuditSystem,
    controls: &[ControlSpline],
    target: &TargetGate,
    duration: f64,
    weights: Weights,
) -> Result<ObjectiveBreakdown> {
    let n_splines = common_spline_count(controls)?;
    let steps = StepPolicy::default().step_count(system, duration, n_splines, 1);
    objective_core(system, controls, target, duration, weights, steps, false)
}

/// Gradient of [`evaluate`]'s total with respect to the packed coefficients.
pub fn gradient(
    system: &QuditSystem,
    controls: &[ControlSpline],
    target: &TargetGate,
    duration: f64,
    weights: Weights,
) -> Result<Vec<f64>> {
    let n_splines = common_spline_count(controls)?;
    let steps = StepPolicy::default().step_count(system, duration, n_splines, 1);
    Ok(objective_core(system, controls, target, duration, weights, steps, true)?.gradient)
}

fn objective_core(
    system: &QuditSystem,
    controls: &[ControlSpline],
    target: &TargetGate,
    duration: f64,
    weights: Weights,
    step_count: usize,
    want_gradient: bool,
) -> Result<ObjectiveBreakdown> {
    if target.dim() != system.dim() {
        return Err(Error::InvalidDimension("target and system dimensions differ".into()));
    }
    common_spline_count(controls)?;
    let sweep = forward_sweep(system, controls, duration, step_count)?;
    let u_final = sweep.result.u_final();
    let n = system.dim();

    let z = overlap(u_final, target.matrix());
    let infid = (1.0 - z.norm_sqr()).max(0.0);
    let energy: f64 = controls.iter().map(energy_norm).sum();
    let coeffs = pack_coefficients(controls);
    let tik = tikhonov(&coeffs);

    let want_pop_grad = want_gradient && weights.population != 0.0;
    let (population, pop_grad) = if step_count >= 4 {
        let samples: Vec<Vec<f64>> = sweep.result.trajectory.iter().map(populations_of).collect();
        population_penalty_samples(&samples, sweep.result.dt, duration, want_pop_grad)?
    } else if weights.population != 0.0 {
        return Err(Error::InvalidArgument("population penalty needs at least 4 time steps".into()));
    } else {
        (0.0, None)
    };

    let mut out = ObjectiveBreakdown::assemble(infid, energy, tik, population, weights);
    if !out.total.is_finite() {
        return Err(Error::Numerical("objective is not finite".into()));
    }
    if !want_gradient {
        return Ok(out);
    }

    // dJ = Re Tr(Λ† dU); for the infidelity Λ = -2 z V / N.
    let seed = target.matrix() * (z * (-2.0 / n as f64));
    let pop_seed = |k: usize, lambda: &mut CMatrix| {
        if let Some(g) = &pop_grad {
            let u = &sweep.result.trajectory[k];
            let scale = 2.0 * weights.population;
            for i in 0..n {
                for j in 0..n {
                    lambda[(i, j)] += u[(i, j)] * (scale * g[k][i * n + j]);
                }
            }
        }
    };
    let pulse_grad = adjoint_pulse_gradient(&sweep, seed, pop_seed);

    let mut grad = Vec::with_capacity(coeffs.len());
    for (q, ctrl) in controls.iter().enumerate() {
        let mut g_re = vec![0.0; ctrl.n_splines()];
        let mut g_im = vec![0.0; ctrl.n_splines()];
        for (k, &t_mid) in sweep.midpoints.iter().enumerate() {
            let (dp, dq) = pulse_grad[k][q];
            ctrl.for_each_basis(t_mid, |s, b| {
                g_re[s] += b * dp;
                g_im[s] += b * dq;
            });
        }
        let g_energy = energy_gradient(ctrl);
        let offset = grad.len();
        grad.extend(g_re.into_iter().chain(g_im));
        for (g, e) in grad[offset..].iter_mut().zip(g_energy) {
            *g += weights.energy * e;
        }
    }
    for (g, a) in grad.iter_mut().zip(&coeffs) {
        *g += 2.0 * weights.tikhonov * a;
    }
    out.gradient = grad;
    Ok(out)
}

/// `sin(x)/x` with its Taylor expansion near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Reverse sweep. Returns `∂J/∂p_{q,k}` and `∂J/∂q_{q,k}` for every step `k`
/// and qudit `q`, where `c_q(t_k + dt/2) = p + i q`.
fn adjoint_pulse_gradient(
    sweep: &ForwardSweep,
    final_seed: CMatrix,
    mut add_state_seed: impl FnMut(usize, &mut CMatrix),
) -> Vec<Vec<(f64, f64)>> {
    let dt = sweep.result.dt;
    let trajectory = &sweep.result.trajectory;
    let k_steps = sweep.steps.len();
    let n = final_seed.nrows();
    let mut out = vec![Vec::new(); k_steps];

    let mut lambda = final_seed;
    add_state_seed(k_steps, &mut lambda);
    let mut divided = CMatrix::zeros(n, n);
    for k in (0..k_steps).rev() {
        let step = &sweep.steps[k];
        let v = &step.vectors;
        let u_prev = &trajectory[k];

        // Divided differences of f(λ) = exp(-i dt λ).
        for j in 0..n {
            for l in 0..n {
                let (lj, ll) = (step.values[j], step.values[l]);
                let mean = 0.5 * (lj + ll);
                let half_gap = 0.5 * dt * (lj - ll);
                divided[(j, l)] = C64::from_polar(1.0, -dt * mean) * C64::new(0.0, -dt) * sinc(half_gap);
            }
        }
        // G = V† U_prev Λ† V;  X = Gᵀ ∘ F;  Y = V Xᵀ V†;  ∂J/∂θ = Re Tr(Y E_θ).
        let g = v.adjoint() * (u_prev * lambda.adjoint()) * v;
        let mut xt = CMatrix::zeros(n, n);
        for j in 0..n {
            for l in 0..n {
                // (Gᵀ ∘ F)ᵀ_{lj} = G_{lj} F_{jl}
                xt[(l, j)] = g[(l, j)] * divided[(j, l)];
            }
        }
        let y = v * xt * v.adjoint();
        out[k] = sweep
            .quadratures
            .iter()
            .map(|quad| (trace_product_re(&y, &quad.real_part), trace_product_re(&y, &quad.imag_part)))
            .collect();

        lambda = step.propagator.adjoint() * lambda;
        add_state_seed(k, &mut lambda);
    }
    out
}

/// `Re Tr(A B)`.
fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for l in 0..n {
            let e = b[(l, j)];
            if e.re != 0.0 || e.im != 0.0 {
                acc += (a[(j, l)] * e).re;
            }
        }
    }
    acc
}

/// `D(β) = exp(β a† - β* a)` on a two-level system.
pub fn displacement_operator(beta: C64) -> CMatrix {
    // i (β a† - β* a) is Hermitian, so D = exp(-i H) with H = i (β a† - β* a).
    let i = C64::new(0.0, 1.0);
    let h = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i * beta.conj(), i * beta, C64::new(0.0, 0.0)]);
    expm_hermitian(h, 1.0).expect("finite displacement").propagator
}

/// The resonantly driven qubit with `H(t) = c(t) a + c*(t) a†` and no drift.
pub fn pure_drive_qubit() -> QuditSystem {
    QuditSystem::new(vec![2], vec![0.0], vec![0.0], vec![], 0.0).expect("valid qubit")
}

/// Infidelity of a single pulse on [`pure_drive_qubit`].
pub fn pure_drive_infidelity(control: &ControlSpline, target: &TargetGate) -> Result<f64> {
    let system = pure_drive_qubit();
    let steps = StepPolicy::default().step_count(&system, control.duration(), control.n_splines(), 1);
    let sweep = forward_sweep(&system, std::slice::from_ref(control), control.duration(), steps)?;
    infidelity(sweep.result.u_final(), target)
}

/// Infidelity predicted from the pulse area alone: with this crate's drive
/// convention the pure-drive propagator is `D(β)` with `β = -i conj(∫c dt)`
/// whenever the Hamiltonians at different times commute.
pub fn displacement_infidelity(control: &ControlSpline, target: &TargetGate) -> Result<f64> {
    let beta = C64::new(0.0, -1.0) * control_integral(control).conj();
    infidelity(&displacement_operator(beta), target)
}

/// Largest accepted mismatch of the complex pulse areas.
pub const AREA_MATCH_TOL: f64 = 1e-10;

/// `|infidelity(c1) - infidelity(c2)|` on the pure-drive qubit for two pulses
/// of equal complex area.
///
/// The area alone fixes the gate when the drive Hamiltonians at different
/// times commute, i.e. for envelopes with a common constant phase, and for any
/// pair related by [`crate::controls::scale_control`]. Pulses whose phase
/// varies in time pick up additional rotation that the area does not capture.
pub fn displacement_invariance_check(c1: &ControlSpline, c2: &ControlSpline, target: &TargetGate) -> Result<f64> {
    if target.dim() != 2 {
        return Err(Error::InvalidDimension("displacement check runs on a two-level system".into()));
    }
    let (a1, a2) = (control_integral(c1), control_integral(c2));
    if (a1 - a2).norm() > AREA_MATCH_TOL {
        return Err(Error::InvalidArgument(format!(
            "pulse areas differ: {a1} vs {a2} (tolerance {AREA_MATCH_TOL:e})"
        )));
    }
    Ok((pure_drive_infidelity(c1, target)? - pure_drive_infidelity(c2, target)?).abs())
}
