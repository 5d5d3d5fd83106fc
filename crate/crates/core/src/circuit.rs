//! Gates and circuits.
//!
//! Qubit 0 is the most significant bit of a basis-state index throughout the
//! crate: on `n` qubits, qubit `q` of basis state `i` is `(i >> (n - 1 - q)) & 1`.
//! A gate's own matrix is indexed the same way over its target list, so the
//! first listed target is the most significant local bit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;

/// Tolerance on `‖M†M − I‖_max` for user-supplied gate matrices.
pub const INPUT_UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Cnot,
    Custom,
}

impl GateKind {
    pub const NAMED: [GateKind; 10] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Cnot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::Cnot => "CNOT",
            GateKind::Custom => "CUSTOM",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        let upper = name.to_ascii_uppercase();
        GateKind::NAMED
            .into_iter()
            .chain([GateKind::Custom])
            .find(|k| k.name() == upper)
    }

    /// Number of targets, or `None` for custom gates.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cnot => Some(2),
            GateKind::Custom => None,
            _ => Some(1),
        }
    }

    /// Member of {I, X, Y, Z, H, S, Sdg, CNOT}.
    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::T | GateKind::Tdg | GateKind::Custom)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    matrix: Option<Matrix>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_distinct(targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// `‖M†M − I‖_max`.
pub fn unitarity_deviation(m: &Matrix) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for (idx, v) in prod.iter().enumerate() {
        let (i, j) = (idx % prod.nrows(), idx / prod.nrows());
        let expect = if i == j { 1.0 } else { 0.0 };
        worst = worst.max((v - c(expect, 0.0)).norm());
    }
    worst
}

impl Gate {
    /// A named gate. Use [`Gate::custom`] for explicit matrices.
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Gate> {
        let expected = match kind.arity() {
            Some(a) => a,
            None => return Err(Error::Domain("custom gates need a matrix; use Gate::custom".into())),
        };
        if targets.len() != expected {
            return Err(Error::Arity {
                gate: kind.name(),
                expected,
                got: targets.len(),
            });
        }
        check_distinct(&targets)?;
        Ok(Gate {
            kind,
            targets,
            matrix: None,
        })
    }

    pub fn custom(targets: Vec<usize>, matrix: Matrix) -> Result<Gate> {
        if targets.is_empty() {
            return Err(Error::Arity {
                gate: "CUSTOM",
                expected: 1,
                got: 0,
            });
        }
        check_distinct(&targets)?;
        let dim = 1usize << targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::CustomShape {
                targets: targets.len(),
                expected: dim,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > INPUT_UNITARITY_TOL {
            return Err(Error::NonUnitaryCustomGate { deviation });
        }
        Ok(Gate {
            kind: GateKind::Custom,
            targets,
            matrix: Some(matrix),
        })
    }

    fn one(kind: GateKind, q: usize) -> Gate {
        Gate {
            kind,
            targets: vec![q],
            matrix: None,
        }
    }

    pub fn i(q: usize) -> Gate {
        Gate::one(GateKind::I, q)
    }
    pub fn x(q: usize) -> Gate {
        Gate::one(GateKind::X, q)
    }
    pub fn y(q: usize) -> Gate {
        Gate::one(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Gate {
        Gate::one(GateKind::Z, q)
    }
    pub fn h(q: usize) -> Gate {
        Gate::one(GateKind::H, q)
    }
    pub fn s(q: usize) -> Gate {
        Gate::one(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Gate {
        Gate::one(GateKind::Sdg, q)
    }
    pub fn t(q: usize) -> Gate {
        Gate::one(GateKind::T, q)
    }
    pub fn tdg(q: usize) -> Gate {
        Gate::one(GateKind::Tdg, q)
    }

    /// # Panics
    /// If `control == target`.
    pub fn cnot(control: usize, target: usize) -> Gate {
        assert_ne!(control, target, "CNOT control and target must differ");
        Gate {
            kind: GateKind::Cnot,
            targets: vec![control, target],
            matrix: None,
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The explicit matrix of a custom gate.
    pub fn custom_matrix(&self) -> Option<&Matrix> {
        self.matrix.as_ref()
    }

    /// Dense `2^k × 2^k` matrix over the target list.
    pub fn matrix(&self) -> Matrix {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let ph = |theta: f64| Complex64::from_polar(1.0, theta);
        let r = FRAC_1_SQRT_2;
        let quarter = std::f64::consts::FRAC_PI_4;
        match self.kind {
            GateKind::I => Matrix::identity(2, 2),
            GateKind::X => Matrix::from_row_slice(2, 2, &[z, o, o, z]),
            GateKind::Y => Matrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
            GateKind::Z => Matrix::from_row_slice(2, 2, &[o, z, z, -o]),
            GateKind::H => Matrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]),
            GateKind::S => Matrix::from_row_slice(2, 2, &[o, z, z, c(0.0, 1.0)]),
            GateKind::Sdg => Matrix::from_row_slice(2, 2, &[o, z, z, c(0.0, -1.0)]),
            GateKind::T => Matrix::from_row_slice(2, 2, &[o, z, z, ph(quarter)]),
            GateKind::Tdg => Matrix::from_row_slice(2, 2, &[o, z, z, ph(-quarter)]),
            GateKind::Cnot => {
                let mut m = Matrix::zeros(4, 4);
                m[(0, 0)] = o;
                m[(1, 1)] = o;
                m[(2, 3)] = o;
                m[(3, 2)] = o;
                m
            }
            GateKind::Custom => self.matrix.clone().expect("custom gate carries its matrix"),
        }
    }

    /// The inverse gate on the same targets.
    pub fn dagger(&self) -> Gate {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            other => other,
        };
        Gate {
            kind,
            targets: self.targets.clone(),
            matrix: self.matrix.as_ref().map(|m| m.adjoint()),
        }
    }

    /// Same gate with targets renamed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            targets: self.targets.iter().map(|&t| map(t)).collect(),
            matrix: self.matrix.clone(),
        }
    }

    pub(crate) fn check_fits(&self, n_qubits: usize) -> Result<()> {
        match self.targets.iter().find(|&&t| t >= n_qubits) {
            Some(&index) => Err(Error::IndexOutOfRange { index, n_qubits }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.kind == GateKind::Custom {
            write!(f, " {}", self.targets.len())?;
        }
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// An ordered gate list on a fixed number of qubits. Gates apply first to last.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// The empty circuit on `n_qubits ≥ 1` qubits.
    pub fn new(n_qubits: usize) -> Circuit {
        assert!(n_qubits > 0, "a circuit needs at least one qubit");
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        if n_qubits == 0 {
            return Err(Error::Domain("a circuit needs at least one qubit".into()));
        }
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check_fits(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Builder-style [`Circuit::push`].
    pub fn with(mut self, gate: Gate) -> Result<Circuit> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `other` appended after `self`; as operators, `other · self`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        Ok(out)
    }

    /// Copy with gate `position` replaced by the gates in `with`.
    pub fn splice(&self, position: usize, with: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        if position >= self.gates.len() {
            return Err(Error::PositionOutOfRange {
                position,
                len: self.gates.len(),
            });
        }
        let mut gates = Vec::with_capacity(self.gates.len() + 1);
        gates.extend_from_slice(&self.gates[..position]);
        gates.extend(with);
        gates.extend_from_slice(&self.gates[position + 1..]);
        Circuit::from_gates(self.n_qubits, gates)
    }

    /// The inverse circuit: gates reversed and individually inverted.
    pub fn dagger(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::dagger).collect(),
        }
    }

    /// First gate outside the Clifford set, if any.
    pub fn first_non_clifford(&self) -> Option<&Gate> {
        self.gates.iter().find(|g| !g.kind.is_clifford())
    }

    pub fn is_clifford(&self) -> bool {
        self.first_non_clifford().is_none()
    }
}
