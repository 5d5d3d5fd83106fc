//! Exact dense simulation: state vectors, unitaries, and gate embedding.
//!
//! Everything here is `O(2^n)` or `O(4^n)` in memory, so each entry point
//! checks the qubit count against a [`DenseConfig`] cap first.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate, GateKind, Matrix};
use crate::error::{Error, Result};

/// Tolerance for unitarity and normalization of derived objects.
pub const DERIVED_TOL: f64 = 1e-9;

pub const DEFAULT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseConfig {
    /// Largest qubit count a dense routine will allocate for.
    pub cap: usize,
}

impl Default for DenseConfig {
    fn default() -> Self {
        DenseConfig { cap: DEFAULT_CAP }
    }
}

impl DenseConfig {
    pub fn with_cap(cap: usize) -> Self {
        DenseConfig { cap }
    }

    pub fn check(&self, what: &'static str, requested: usize) -> Result<()> {
        if requested > self.cap {
            Err(Error::CapExceeded {
                what,
                requested,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> StateVector {
        StateVector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> StateVector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amplitudes }
    }

    /// Checks the length is a power of two and the norm is 1 within `1e-10`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<StateVector> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Domain(format!("state length {len} is not a power of two")));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Product state from one `[a0, a1]` pair per qubit (qubit 0 first).
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<StateVector> {
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
        }
        StateVector::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        same_dim(self.amplitudes.len(), other.amplitudes.len())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn prob_one(&self, qubit: usize) -> f64 {
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check_fits(self.n_qubits)?;
        GateKernel::new(gate, self.n_qubits, None).apply(&mut self.amplitudes);
        Ok(())
    }

    /// Applies `gate` only on the branch where `control` reads `value`.
    pub fn apply_gate_controlled(&mut self, gate: &Gate, control: usize, value: bool) -> Result<()> {
        gate.check_fits(self.n_qubits)?;
        if control >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                index: control,
                n_qubits: self.n_qubits,
            });
        }
        if gate.targets().contains(&control) {
            return Err(Error::DuplicateTarget(control));
        }
        GateKernel::new(gate, self.n_qubits, Some((control, value))).apply(&mut self.amplitudes);
        Ok(())
    }

    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// Precomputed index arithmetic for one gate on one register width.
struct GateKernel {
    dim: usize,
    target_mask: usize,
    offsets: Vec<usize>,
    // nonzero entries (row, col, value) of the local matrix
    entries: Vec<(usize, usize, Complex64)>,
    control: Option<(usize, bool)>,
}

impl GateKernel {
    fn new(gate: &Gate, n_qubits: usize, control: Option<(usize, bool)>) -> GateKernel {
        let k = gate.targets().len();
        let positions: Vec<usize> = gate.targets().iter().map(|&t| n_qubits - 1 - t).collect();
        let offsets = (0..1usize << k)
            .map(|local| {
                (0..k)
                    .filter(|m| local >> (k - 1 - m) & 1 == 1)
                    .map(|m| 1usize << positions[m])
                    .sum()
            })
            .collect();
        let m = gate.matrix();
        let mut entries = Vec::new();
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                let v = m[(row, col)];
                if v != Complex64::new(0.0, 0.0) {
                    entries.push((row, col, v));
                }
            }
        }
        GateKernel {
            dim: 1 << n_qubits,
            target_mask: positions.iter().map(|p| 1usize << p).sum(),
            offsets,
            entries,
            control: control.map(|(q, v)| (1usize << (n_qubits - 1 - q), v)),
        }
    }

    fn apply(&self, amps: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), self.dim);
        let local = self.offsets.len();
        let mut input = vec![Complex64::new(0.0, 0.0); local];
        let mut output = vec![Complex64::new(0.0, 0.0); local];
        for base in 0..self.dim {
            if base & self.target_mask != 0 {
                continue;
            }
            if let Some((bit, value)) = self.control {
                if (base & bit != 0) != value {
                    continue;
                }
            }
            for (slot, off) in input.iter_mut().zip(&self.offsets) {
                *slot = amps[base | off];
            }
            output.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
            for &(r, c, v) in &self.entries {
                output[r] += v * input[c];
            }
            for (o, off) in output.iter().zip(&self.offsets) {
                amps[base | off] = *o;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    n_qubits: usize,
    matrix: Matrix,
}

impl UnitaryMatrix {
    pub fn identity(n_qubits: usize) -> UnitaryMatrix {
        UnitaryMatrix {
            n_qubits,
            matrix: Matrix::identity(1 << n_qubits, 1 << n_qubits),
        }
    }

    /// Checks shape and unitarity within `1e-10`.
    pub fn from_matrix(matrix: Matrix) -> Result<UnitaryMatrix> {
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_power_of_two() || matrix.ncols() != dim {
            return Err(Error::Domain(format!(
                "{}x{} is not a 2^n square matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = crate::circuit::unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > crate::circuit::INPUT_UNITARITY_TOL {
            return Err(Error::NonUnitaryCustomGate { deviation });
        }
        Ok(UnitaryMatrix {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other`.
    pub fn mul(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        same_dim(self.dim(), other.dim())?;
        Ok(UnitaryMatrix {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `e^{iθ} · self`.
    pub fn with_phase(&self, theta: f64) -> UnitaryMatrix {
        UnitaryMatrix {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * Complex64::from_polar(1.0, theta),
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        same_dim(self.dim(), state.amplitudes.len())?;
        let v = nalgebra::DVector::from_column_slice(&state.amplitudes);
        let out = &self.matrix * v;
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes: out.as_slice().to_vec(),
        })
    }

    pub fn unitarity_deviation(&self) -> f64 {
        crate::circuit::unitarity_deviation(&self.matrix)
    }

    /// `max_ij |self_ij − other_ij|`.
    pub fn max_deviation(&self, other: &UnitaryMatrix) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The `2^n` unitary acting as `gate` on its targets and as identity elsewhere.
pub fn embed_gate(gate: &Gate, n_qubits: usize) -> Result<UnitaryMatrix> {
    gate.check_fits(n_qubits)?;
    let g = gate.matrix();
    let k = gate.targets().len();
    let positions: Vec<usize> = gate.targets().iter().map(|&t| n_qubits - 1 - t).collect();
    let scatter = |local: usize| -> usize {
        (0..k)
            .filter(|m| local >> (k - 1 - m) & 1 == 1)
            .map(|m| 1usize << positions[m])
            .sum()
    };
    let gather = |full: usize| -> usize { (0..k).fold(0, |acc, m| (acc << 1) | (full >> positions[m] & 1)) };
    let mask: usize = positions.iter().map(|p| 1usize << p).sum();
    let dim = 1usize << n_qubits;
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let local_in = gather(col);
        let rest = col & !mask;
        for local_out in 0..1usize << k {
            out[(rest | scatter(local_out), col)] = g[(local_out, local_in)];
        }
    }
    Ok(UnitaryMatrix { n_qubits, matrix: out })
}

/// Product of the circuit's gates in application order.
pub fn circuit_unitary(circuit: &Circuit, cfg: &DenseConfig) -> Result<UnitaryMatrix> {
    let n = circuit.n_qubits();
    cfg.check("circuit_unitary", n)?;
    let dim = 1usize << n;
    let mut m = Matrix::identity(dim, dim);
    for gate in circuit.gates() {
        let kernel = GateKernel::new(gate, n, None);
        for column in m.as_mut_slice().chunks_mut(dim) {
            kernel.apply(column);
        }
    }
    Ok(UnitaryMatrix { n_qubits: n, matrix: m })
}

/// Runs `circuit` on `state` gate by gate, without forming the full unitary.
pub fn apply_circuit(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    same_dim(circuit.n_qubits(), state.n_qubits)?;
    let mut out = state.clone();
    for gate in circuit.gates() {
        out.apply_gate(gate)?;
    }
    Ok(out)
}

/// Applies `circuit` to qubits `offset..offset + circuit.n_qubits()` of a wider state.
pub fn apply_circuit_at(circuit: &Circuit, state: &mut StateVector, offset: usize) -> Result<()> {
    apply_circuit_at_controlled(circuit, state, offset, None)
}

pub(crate) fn apply_circuit_at_controlled(
    circuit: &Circuit,
    state: &mut StateVector,
    offset: usize,
    control: Option<(usize, bool)>,
) -> Result<()> {
    if offset + circuit.n_qubits() > state.n_qubits {
        return Err(Error::DimensionMismatch {
            left: offset + circuit.n_qubits(),
            right: state.n_qubits,
        });
    }
    for gate in circuit.gates() {
        let moved = gate.remapped(|t| t + offset);
        match control {
            None => state.apply_gate(&moved)?,
            Some((q, v)) => state.apply_gate_controlled(&moved, q, v)?,
        }
    }
    Ok(())
}

/// The circuit that prepares `(1/√2^n) Σ_i |i⟩|i⟩` from `|0^{2n}⟩`: `H` on
/// qubits `0..n`, then `CNOT(j, n + j)`.
pub fn bell_preparation(n: usize) -> Circuit {
    let gates = (0..n).map(Gate::h).chain((0..n).map(|j| Gate::cnot(j, n + j)));
    Circuit::from_gates(2 * n, gates).expect("preparation gates fit 2n qubits")
}

/// Maximally entangled state on `2n` qubits; qubit `j` is paired with `n + j`.
pub fn maximally_entangled_state(n: usize, cfg: &DenseConfig) -> Result<StateVector> {
    cfg.check("maximally_entangled_state", 2 * n)?;
    apply_circuit(&bell_preparation(n), &StateVector::zero(2 * n))
}

/// Haar-random unitary on `n` qubits (QR of a complex Ginibre matrix with
/// the phases of `R`'s diagonal divided out).
pub fn haar_unitary(n_qubits: usize, rng: &mut impl Rng) -> UnitaryMatrix {
    let dim = 1usize << n_qubits;
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix { n_qubits, matrix: q }
}

/// Haar-random pure state on `n` qubits.
pub fn haar_state(n_qubits: usize, rng: &mut impl Rng) -> StateVector {
    let mut amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector {
        n_qubits,
        amplitudes: amps,
    }
}

/// Haar-random gate on `targets` (in the listed order).
pub fn haar_gate(targets: Vec<usize>, rng: &mut impl Rng) -> Result<Gate> {
    let m = haar_unitary(targets.len(), rng).into_matrix();
    Gate::custom(targets, m)
}

/// Random circuit of `length` gates: named one-qubit gates, CNOTs, and Haar
/// gates on one or two (not necessarily adjacent) qubits.
pub fn random_circuit(n_qubits: usize, length: usize, rng: &mut impl Rng) -> Circuit {
    const NAMED: [GateKind; 8] = [
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
    ];
    let mut c = Circuit::new(n_qubits);
    for _ in 0..length {
        let two = n_qubits > 1 && rng.random_bool(0.4);
        let targets = if two {
            let a = rng.random_range(0..n_qubits);
            let b = (a + rng.random_range(1..n_qubits)) % n_qubits;
            vec![a, b]
        } else {
            vec![rng.random_range(0..n_qubits)]
        };
        let gate = match (rng.random_range(0..3), two) {
            (0, _) => haar_gate(targets, rng).expect("Haar matrix is unitary"),
            (_, true) => Gate::cnot(targets[0], targets[1]),
            (_, false) => Gate::new(NAMED[rng.random_range(0..NAMED.len())], targets).expect("one-qubit kind"),
        };
        c.push(gate).expect("targets in range");
    }
    c
}
