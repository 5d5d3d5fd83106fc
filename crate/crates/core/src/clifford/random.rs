use rand::Rng;

use crate::circuit::{Circuit, Gate};

/// `length` gates drawn i.i.d. from {H, S, CNOT, X, Y, Z} on uniformly random
/// qubits (no CNOT when `n == 1`).
///
/// Cheap and well spread, but not uniform over the Clifford group.
pub fn random_clifford_circuit(n: usize, length: usize, rng: &mut impl Rng) -> Circuit {
    let kinds = if n >= 2 { 6 } else { 5 };
    let gates = (0..length).map(|_| {
        let q = rng.random_range(0..n);
        match rng.random_range(0..kinds) {
            0 => Gate::h(q),
            1 => Gate::s(q),
            2 => Gate::x(q),
            3 => Gate::y(q),
            4 => Gate::z(q),
            _ => {
                let t = (q + rng.random_range(1..n)) % n;
                Gate::cnot(q, t)
            }
        }
    });
    Circuit::from_gates(n, gates.collect::<Vec<_>>()).expect("targets drawn in range")
}

type Word = &'static [fn(usize) -> Gate];

/// The 24 single-qubit Cliffords modulo global phase, as words in H and S.
pub fn single_qubit_cliffords() -> Vec<Circuit> {
    // S^k fixes Z and cycles the image of X; the suffix then sends Z to each
    // of ±X, ±Y, ±Z
    let suffixes: [Word; 6] = [
        &[],
        &[Gate::h],
        &[Gate::h, Gate::s],
        &[Gate::h, Gate::s, Gate::s],
        &[Gate::h, Gate::s, Gate::s, Gate::s],
        &[Gate::h, Gate::s, Gate::s, Gate::h],
    ];
    let mut out = Vec::with_capacity(24);
    for suffix in suffixes {
        for s_power in 0..4 {
            let gates = std::iter::repeat_n(Gate::s(0), s_power).chain(suffix.iter().map(|g| g(0)));
            out.push(Circuit::from_gates(1, gates.collect::<Vec<_>>()).unwrap());
        }
    }
    out
}
