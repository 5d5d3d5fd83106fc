//! Stabilizer machinery: signed Pauli strings and Clifford tableaux.
//!
//! A Pauli string is stored as `i^phase · ∏ X^x Z^z` with the `x` and `z`
//! bits packed into words. A Clifford `U` is stored as its `2n` generator
//! images; everything else (conjugation, composition, the symplectic matrix
//! `M_U`) is derived from those.

mod bitmatrix;
mod pauli;
mod random;
mod tableau;

pub use bitmatrix::BitMatrix;
pub use pauli::{pauli_multiply, Letter, PauliString};
pub use random::{random_clifford_circuit, single_qubit_cliffords};
pub use tableau::{
    conjugate_pauli, differing_fraction, pauli_correction, symplectic_matrix, symplectic_rank_diff, tableau_compose,
    tableau_dagger, tableau_equal, tableau_from_circuit, CliffordTableau,
};

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// `U p U†`, applying the gate rules directly. Costs `O(gates)` regardless of `n`.
pub fn conjugate_through_circuit(circuit: &Circuit, p: &PauliString) -> Result<PauliString> {
    if circuit.n_qubits() != p.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: circuit.n_qubits(),
            right: p.n_qubits(),
        });
    }
    let mut out = p.clone();
    for gate in circuit.gates() {
        out.conjugate_by_gate(gate)?;
    }
    Ok(out)
}

/// `U† p U`.
pub fn conjugate_through_dagger(circuit: &Circuit, p: &PauliString) -> Result<PauliString> {
    if circuit.n_qubits() != p.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: circuit.n_qubits(),
            right: p.n_qubits(),
        });
    }
    let mut out = p.clone();
    for gate in circuit.gates().iter().rev() {
        out.conjugate_by_gate(&gate.dagger())?;
    }
    Ok(out)
}
