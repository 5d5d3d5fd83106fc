//! Distances between unitaries and the detection probabilities they induce.
//!
//! * average-case distance `D(U, Ũ) = sqrt(1 − |Tr(U†Ũ)/2^n|²)`, which is what
//!   the swap test on Choi states sees;
//! * worst-case distance `D^max(U, Ũ) = max_φ sqrt(1 − |⟨φ|U†Ũ|φ⟩|²)`, which is
//!   what we actually want to bound.
//!
//! `D^max` is computed exactly from the spectrum of `W = U†Ũ` (see
//! [`crate::numerical_range`]). Both are blind to a global phase on `Ũ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, Matrix};
use crate::dense::{circuit_unitary, DenseConfig, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::numerical_range::min_numerical_radius;

fn check_dims(u: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<()> {
    if u.dim() != ut.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: ut.dim(),
        });
    }
    Ok(())
}

fn clamp01(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// `(1/2^n) Tr(U†Ũ)`, which equals the overlap of the two Choi states.
pub fn trace_overlap(u: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<Complex64> {
    check_dims(u, ut)?;
    let sum: Complex64 = u
        .matrix()
        .iter()
        .zip(ut.matrix().iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum / u.dim() as f64)
}

fn distance_from_overlap(modulus: f64) -> f64 {
    (1.0 - modulus * modulus).max(0.0).sqrt()
}

pub fn avg_distance(u: &UnitaryMatrix, ut: &UnitaryMatrix) -> Result<f64> {
    Ok(distance_from_overlap(trace_overlap(u, ut)?.norm()))
}

/// `μ = min_φ |⟨φ|U†Ũ|φ⟩|`.
pub fn min_overlap(u: &UnitaryMatrix, ut: &UnitaryMatrix, cfg: &DenseConfig) -> Result<f64> {
    check_dims(u, ut)?;
    cfg.check("worst_distance", u.n_qubits())?;
    let w: Matrix = u.matrix().adjoint() * ut.matrix();
    Ok(min_numerical_radius(&w).min(1.0))
}

pub fn worst_distance(u: &UnitaryMatrix, ut: &UnitaryMatrix, cfg: &DenseConfig) -> Result<f64> {
    Ok(distance_from_overlap(min_overlap(u, ut, cfg)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceReport {
    pub trace_overlap: Complex64,
    pub avg_distance: f64,
    pub worst_distance: f64,
    /// `|Tr(U†Ũ)/2^n|²`
    pub ent_fidelity: f64,
    /// Per-shot probability that the swap test on Choi states outputs 1.
    pub p_swap: f64,
    /// Per-shot probability that the conditional-application test outputs 1.
    pub p_conditional: f64,
}

pub fn detection_probabilities(u: &UnitaryMatrix, ut: &UnitaryMatrix, cfg: &DenseConfig) -> Result<DistanceReport> {
    let overlap = trace_overlap(u, ut)?;
    let avg = distance_from_overlap(overlap.norm());
    Ok(DistanceReport {
        trace_overlap: overlap,
        avg_distance: avg,
        worst_distance: worst_distance(u, ut, cfg)?,
        ent_fidelity: clamp01(overlap.norm_sqr()),
        p_swap: clamp01(avg * avg / 2.0),
        p_conditional: clamp01(0.5 - overlap.re / 2.0),
    })
}

/// Worst case against `2^{(n+1)/2}` times the average case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCaseBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `D^max ≤ 2^{(n+1)/2} · D` (with `1e-9` slack).
pub fn check_worst_case_bound(u: &UnitaryMatrix, ut: &UnitaryMatrix, cfg: &DenseConfig) -> Result<WorstCaseBound> {
    let lhs = worst_distance(u, ut, cfg)?;
    let rhs = 2f64.powf((u.n_qubits() as f64 + 1.0) / 2.0) * avg_distance(u, ut)?;
    Ok(WorstCaseBound {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

/// `(base, base with gate `position` replaced)`.
///
/// The replacement must act on the same set of qubits, so the pair factors
/// as `U₁(G ⊗ I)U₂` and `U₁(G̃ ⊗ I)U₂`.
pub fn one_gate_pair(base: &Circuit, position: usize, replacement: Gate) -> Result<(Circuit, Circuit)> {
    let original = base.gates().get(position).ok_or(Error::PositionOutOfRange {
        position,
        len: base.len(),
    })?;
    let mut a = original.targets().to_vec();
    let mut b = replacement.targets().to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(Error::TargetMismatch {
            original: original.targets().to_vec(),
            replacement: replacement.targets().to_vec(),
        });
    }
    let faulty = base.splice(position, [replacement])?;
    Ok((base.clone(), faulty))
}

/// `C^{n-1}NOT` on all `n` qubits: flips qubit `n-1` when qubits `0..n-1` are all 1.
pub fn multi_controlled_x(n: usize) -> Gate {
    let dim = 1usize << n;
    let mut m = Matrix::identity(dim, dim);
    let (a, b) = (dim - 2, dim - 1);
    m[(a, a)] = Complex64::new(0.0, 0.0);
    m[(b, b)] = Complex64::new(0.0, 0.0);
    m[(a, b)] = Complex64::new(1.0, 0.0);
    m[(b, a)] = Complex64::new(1.0, 0.0);
    Gate::custom((0..n).collect(), m).expect("permutation matrix is unitary")
}

/// Two faults that hide a large worst-case distance from the average case.
///
/// `U = H_{n-1} · C^{n-1}NOT · H_{n-1}` and `Ũ` is the same circuit with both
/// Hadamards replaced by identities. `Tr(U†Ũ) = 2^n − 2` while `D^max = 1`.
pub fn two_fault_example(n: usize, cfg: &DenseConfig) -> Result<(Circuit, Circuit)> {
    if n < 2 {
        return Err(Error::Domain(format!("two-fault example needs n >= 2, got {n}")));
    }
    cfg.check("two_fault_example", n)?;
    let last = n - 1;
    let v = multi_controlled_x(n);
    let u = Circuit::from_gates(n, [Gate::h(last), v.clone(), Gate::h(last)])?;
    let ut = Circuit::from_gates(n, [Gate::i(last), v, Gate::i(last)])?;
    Ok((u, ut))
}

/// Identity against identity with the `|1…1⟩` diagonal entry negated.
///
/// `D^max = 1` while `D = sqrt(4/2^n − 4/2^{2n})`.
pub fn needle_example(n: usize, cfg: &DenseConfig) -> Result<(Circuit, Circuit)> {
    cfg.check("needle_example", n)?;
    let dim = 1usize << n;
    let mut m = Matrix::identity(dim, dim);
    m[(dim - 1, dim - 1)] = Complex64::new(-1.0, 0.0);
    let flipped = Gate::custom((0..n).collect(), m)?;
    Ok((Circuit::new(n), Circuit::from_gates(n, [flipped])?))
}

/// Dense unitaries of both circuits.
pub fn unitaries(u: &Circuit, ut: &Circuit, cfg: &DenseConfig) -> Result<(UnitaryMatrix, UnitaryMatrix)> {
    Ok((circuit_unitary(u, cfg)?, circuit_unitary(ut, cfg)?))
}
