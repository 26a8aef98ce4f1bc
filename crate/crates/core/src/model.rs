// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Rotating-frame Hamiltonians for chains of coupled qudits.
//!
//! All frequencies are angular frequencies in rad/ns. Qudit 0 is the
//! leftmost (most significant) factor of every Kronecker product, so a basis
//! index `k` decomposes into digits `k = i_0 * (d_1 ... d_{Q-1}) + ... + i_{Q-1}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Exchange coupling `J (a_p† a_q + a_p a_q†)` between two distinct qudits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub p: usize,
    pub q: usize,
    /// Coupling strength in rad/ns.
    pub strength: f64,
}

/// Physical parameters of a chain of coupled qudits in a shared rotating frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuditSystem {
    levels: Vec<usize>,
    transition_freqs: Vec<f64>,
    kerr_coeffs: Vec<f64>,
    couplings: Vec<Coupling>,
    rot_freq: f64,
}

impl QuditSystem {
    /// Builds a validated system. Couplings are normalized to `p < q`; listing
    /// the same pair twice is an error unless the strengths agree.
    pub fn new(
        levels: Vec<usize>,
        transition_freqs: Vec<f64>,
        kerr_coeffs: Vec<f64>,
        couplings: Vec<Coupling>,
        rot_freq: f64,
    ) -> Result<Self> {
        let n_qudits = levels.len();
        if n_qudits == 0 {
            return Err(Error::InvalidDimension("system needs at least one qudit".into()));
        }
        if let Some(d) = levels.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(format!("qudit with {d} levels (need >= 2)")));
        }
        if transition_freqs.len() != n_qudits || kerr_coeffs.len() != n_qudits {
            return Err(Error::InvalidDimension(format!(
                "{n_qudits} qudits but {} transition frequencies and {} Kerr coefficients",
                transition_freqs.len(),
                kerr_coeffs.len()
            )));
        }
        let all_finite = transition_freqs
            .iter()
            .chain(&kerr_coeffs)
            .chain(std::iter::once(&rot_freq))
            .chain(couplings.iter().map(|c| &c.strength))
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidArgument("system frequencies must be finite".into()));
        }

        let mut normalized: Vec<Coupling> = Vec::with_capacity(couplings.len());
        for c in couplings {
            if c.p == c.q || c.p >= n_qudits || c.q >= n_qudits {
                return Err(Error::InvalidArgument(format!(
                    "coupling ({}, {}) does not name two distinct qudits of {n_qudits}",
                    c.p, c.q
                )));
            }
            let (p, q) = if c.p < c.q { (c.p, c.q) } else { (c.q, c.p) };
            match normalized.iter().find(|e| e.p == p && e.q == q) {
                Some(e) if e.strength != c.strength => {
                    return Err(Error::InvalidArgument(format!(
                        "coupling ({p}, {q}) given twice with different strengths"
                    )))
                }
                Some(_) => {}
                None => normalized.push(Coupling { p, q, strength: c.strength }),
            }
        }
        normalized.sort_by_key(|c| (c.p, c.q));

        Ok(Self { levels, transition_freqs, kerr_coeffs, couplings: normalized, rot_freq })
    }

    /// Same system built from plain frequencies in GHz (multiplied by 2π).
    pub fn from_ghz(
        levels: Vec<usize>,
        transition_ghz: &[f64],
        kerr_ghz: &[f64],
        couplings_ghz: &[(usize, usize, f64)],
        rot_ghz: f64,
    ) -> Result<Self> {
        let w = |x: f64| x * std::f64::consts::TAU;
        Self::new(
            levels,
            transition_ghz.iter().copied().map(w).collect(),
            kerr_ghz.iter().copied().map(w).collect(),
            couplings_ghz.iter().map(|&(p, q, j)| Coupling { p, q, strength: w(j) }).collect(),
            w(rot_ghz),
        )
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn n_qudits(&self) -> usize {
        self.levels.len()
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.levels.iter().product()
    }

    pub fn transition_freqs(&self) -> &[f64] {
        &self.transition_freqs
    }

    pub fn kerr_coeffs(&self) -> &[f64] {
        &self.kerr_coeffs
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn rot_freq(&self) -> f64 {
        self.rot_freq
    }

    /// Coupling strength between `p` and `q` (zero when not listed).
    pub fn coupling(&self, p: usize, q: usize) -> f64 {
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        self.couplings.iter().find(|c| c.p == p && c.q == q).map_or(0.0, |c| c.strength)
    }

    /// The system whose rotating-frame Hamiltonian is `H_sys / s`.
    pub fn time_scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {s}")));
        }
        let rot = self.rot_freq;
        Self::new(
            self.levels.clone(),
            self.transition_freqs.iter().map(|w| rot + (w - rot) / s).collect(),
            self.kerr_coeffs.iter().map(|x| x / s).collect(),
            self.couplings.iter().map(|c| Coupling { strength: c.strength / s, ..*c }).collect(),
            rot,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorRole {
    Lowering,
    SystemHamiltonian,
    ControlHamiltonian,
    ControlQuadrature,
    Unitary,
    Generic,
}

/// Dense complex matrix tagged with what it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub matrix: CMatrix,
    pub role: OperatorRole,
}

impl Operator {
    pub fn new(matrix: CMatrix, role: OperatorRole) -> Self {
        Self { matrix, role }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest element-wise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }
}

/// Largest element-wise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |U†U - I|` element-wise.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

/// Ladder operator with `sqrt(k)` on the superdiagonal.
pub fn lowering_operator(d: usize) -> Result<Operator> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("lowering operator needs d >= 2, got {d}")));
    }
    let mut a = CMatrix::zeros(d, d);
    for k in 1..d {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Ok(Operator::new(a, OperatorRole::Lowering))
}

/// Places a single-qudit operator at position `q` of the full tensor product.
pub fn embed_subsystem_op(system: &QuditSystem, q: usize, op: &Operator) -> Result<Operator> {
    let levels = system.levels();
    let d = *levels.get(q).ok_or_else(|| {
        Error::InvalidDimension(format!("qudit index {q} out of range for {} qudits", levels.len()))
    })?;
    if op.matrix.nrows() != d || op.matrix.ncols() != d {
        return Err(Error::InvalidDimension(format!(
            "operator is {}x{} but qudit {q} has {d} levels",
            op.matrix.nrows(),
            op.matrix.ncols()
        )));
    }
    let left: usize = levels[..q].iter().product();
    let right: usize = levels[q + 1..].iter().product();
    let m = CMatrix::identity(left, left)
        .kronecker(&op.matrix)
        .kronecker(&CMatrix::identity(right, right));
    Ok(Operator::new(m, op.role))
}

/// Lowering operators `a_q` embedded in the full space, one per qudit.
pub fn embedded_lowering_ops(system: &QuditSystem) -> Vec<CMatrix> {
    (0..system.n_qudits())
        .map(|q| {
            let a = lowering_operator(system.levels()[q]).expect("validated levels");
            embed_subsystem_op(system, q, &a).expect("validated dims").matrix
        })
        .collect()
}

/// `H_sys = Σ (ω_q - ω_rot) a†a - (ξ_q/2) a†a†aa + Σ_{p>q} J_pq (a_p† a_q + a_p a_q†)`.
pub fn system_hamiltonian(system: &QuditSystem) -> Operator {
    let n = system.dim();
    let lowers = embedded_lowering_ops(system);
    let mut h = CMatrix::zeros(n, n);
    for (q, a) in lowers.iter().enumerate() {
        let ad = a.adjoint();
        let number = &ad * a;
        let kerr = &ad * &ad * a * a;
        let detuning = system.transition_freqs()[q] - system.rot_freq();
        h += number * C64::from(detuning) - kerr * C64::from(0.5 * system.kerr_coeffs()[q]);
    }
    for c in system.couplings() {
        let (ap, aq) = (&lowers[c.q], &lowers[c.p]);
        let hop = ap.adjoint() * aq + ap * aq.adjoint();
        h += hop * C64::from(c.strength);
    }
    Operator::new(h, OperatorRole::SystemHamiltonian)
}

/// `H_c = Σ c_q a_q + c_q* a_q†` for one complex drive value per qudit.
pub fn control_hamiltonian(system: &QuditSystem, drive_values: &[C64]) -> Result<Operator> {
    if drive_values.len() != system.n_qudits() {
        return Err(Error::InvalidArgument(format!(
            "{} drive values for {} qudits",
            drive_values.len(),
            system.n_qudits()
        )));
    }
    let n = system.dim();
    let mut h = CMatrix::zeros(n, n);
    for (a, &c) in embedded_lowering_ops(system).iter().zip(drive_values) {
        h += a * c + a.adjoint() * c.conj();
    }
    Ok(Operator::new(h, OperatorRole::ControlHamiltonian))
}

/// Hermitian generators of the two drive quadratures of one qudit:
/// `H_c = p * real_part + q * imag_part` for `c = p + i q`.
#[derive(Debug, Clone)]
pub struct QuadraturePair {
    /// `a + a†`
    pub real_part: CMatrix,
    /// `i (a - a†)`
    pub imag_part: CMatrix,
}

pub fn control_quadratures(system: &QuditSystem) -> Vec<QuadraturePair> {
    let i = C64::new(0.0, 1.0);
    embedded_lowering_ops(system)
        .into_iter()
        .map(|a| {
            let ad = a.adjoint();
            QuadraturePair { real_part: &a + &ad, imag_part: (&a - &ad) * i }
        })
        .collect()
}

/// Maximum absolute row sum, an upper bound on the spectral radius.
pub fn row_sum_norm(m: &CMatrix) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max)
}
