use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::circuit::{Gate, GateKind, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    /// `(x, z)`: I = 00, X = 10, Z = 01, Y = 11.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Matrix {
        match self {
            Letter::I => Gate::i(0).matrix(),
            Letter::X => Gate::x(0).matrix(),
            Letter::Y => Gate::y(0).matrix(),
            Letter::Z => Gate::z(0).matrix(),
        }
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

/// `i^phase · ∏_j X_j^{x_j} Z_j^{z_j}`, with the factors for each qubit in
/// that order. Bits are packed 64 to a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> PauliString {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            phase: 0,
        }
    }

    /// `letter` on qubit `q`, identity elsewhere, sign +.
    pub fn single(n: usize, q: usize, letter: Letter) -> PauliString {
        let mut p = PauliString::identity(n);
        p.set_letter(q, letter);
        p
    }

    /// Hermitian string with sign + and the given letters.
    pub fn from_letters(letters: &[Letter]) -> PauliString {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Uniformly random letters, sign +.
    pub fn random(n: usize, rng: &mut impl Rng) -> PauliString {
        let mut p = PauliString::identity(n);
        for w in 0..words(n) {
            p.x[w] = rng.random();
            p.z[w] = rng.random();
        }
        if !n.is_multiple_of(64) {
            let mask = (1u64 << (n % 64)) - 1;
            let last = words(n) - 1;
            p.x[last] &= mask;
            p.z[last] &= mask;
        }
        p.phase = (p.y_count() % 4) as u8;
        p
    }

    /// The `index`-th string in base-4 order (qubit 0 most significant,
    /// digits I X Y Z), sign +. Enumerates all `4^n` strings for `index < 4^n`.
    pub fn from_index(n: usize, index: u64) -> PauliString {
        let letters: Vec<Letter> = (0..n)
            .map(|q| Letter::ALL[((index >> (2 * (n - 1 - q))) & 3) as usize])
            .collect();
        PauliString::from_letters(&letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn z(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x(q), self.z(q))
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Sets qubit `q` to `letter`, keeping the sign (and Hermiticity).
    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let was_y = self.letter(q) == Letter::Y;
        let (x, z) = letter.bits();
        self.set_bits(q, x, z);
        let is_y = letter == Letter::Y;
        self.phase = (self.phase + 4 + is_y as u8 - was_y as u8) % 4;
    }

    fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, q % 64);
        self.x[w] = self.x[w] & !(1 << b) | (x as u64) << b;
        self.z[w] = self.z[w] & !(1 << b) | (z as u64) << b;
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + self.y_count()).is_multiple_of(2)
    }

    /// The factor `i^k` in front of the product of letters.
    pub fn letter_phase(&self) -> u8 {
        ((self.phase as u32 + 4 - self.y_count() % 4) % 4) as u8
    }

    /// `+1` or `-1` for Hermitian strings.
    ///
    /// # Panics
    /// If the string is not Hermitian.
    pub fn sign(&self) -> i8 {
        match self.letter_phase() {
            0 => 1,
            2 => -1,
            _ => panic!("sign() of non-Hermitian Pauli string {self}"),
        }
    }

    /// Same letters, sign `s` (`±1`).
    pub fn with_sign(&self, s: i8) -> PauliString {
        let mut p = self.clone();
        p.phase = ((self.y_count() + if s < 0 { 2 } else { 0 }) % 4) as u8;
        p
    }

    /// Multiplies by `i^k`.
    pub fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k % 4) % 4;
    }

    pub fn negated(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = (p.phase + 2) % 4;
        p
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Equal up to phase.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let odd: u32 = (0..self.x.len())
            .map(|w| ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones())
            .sum();
        odd.is_multiple_of(2)
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    // self ← self · other
    pub(crate) fn mul_assign_unchecked(&mut self, other: &PauliString) {
        // Z^a X^b = (−1)^{ab} X^b Z^a on each qubit
        let swaps: u32 = (0..self.x.len()).map(|w| (self.z[w] & other.x[w]).count_ones()).sum();
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * swaps) % 4) as u8;
        for w in 0..self.x.len() {
            self.x[w] ^= other.x[w];
            self.z[w] ^= other.z[w];
        }
    }

    /// Replaces `self` by `G · self · G†` for a Clifford gate `G`.
    pub fn conjugate_by_gate(&mut self, gate: &Gate) -> Result<()> {
        let t = gate.targets();
        let add = |p: &mut u8, k: u8| *p = (*p + k) % 4;
        match gate.kind() {
            GateKind::I => {}
            GateKind::X => {
                let z = self.z(t[0]) as u8;
                add(&mut self.phase, 2 * z);
            }
            GateKind::Z => {
                let x = self.x(t[0]) as u8;
                add(&mut self.phase, 2 * x);
            }
            GateKind::Y => {
                let xz = (self.x(t[0]) ^ self.z(t[0])) as u8;
                add(&mut self.phase, 2 * xz);
            }
            GateKind::H => {
                let (x, z) = (self.x(t[0]), self.z(t[0]));
                self.set_bits(t[0], z, x);
                add(&mut self.phase, 2 * (x && z) as u8);
            }
            GateKind::S | GateKind::Sdg => {
                let (x, z) = (self.x(t[0]), self.z(t[0]));
                self.set_bits(t[0], x, z ^ x);
                let k = if gate.kind() == GateKind::S { 1 } else { 3 };
                add(&mut self.phase, k * x as u8);
            }
            GateKind::Cnot => {
                let (c, tg) = (t[0], t[1]);
                let (xc, zc, xt, zt) = (self.x(c), self.z(c), self.x(tg), self.z(tg));
                self.set_bits(c, xc, zc ^ zt);
                self.set_bits(tg, xt ^ xc, zt);
            }
            kind @ (GateKind::T | GateKind::Tdg | GateKind::Custom) => {
                return Err(Error::NonCliffordGate { gate: kind.name() });
            }
        }
        Ok(())
    }

    /// Dense `2^n × 2^n` matrix (qubit 0 most significant).
    pub fn matrix(&self) -> Matrix {
        let body = self
            .letters()
            .iter()
            .fold(Matrix::identity(1, 1), |acc, l| acc.kronecker(&l.matrix()));
        let i_k = Complex64::i().powu(self.letter_phase() as u32);
        body * i_k
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.letter_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

/// Parses `+XIZY`, `-IYZI`, or unsigned `XIZY`.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<PauliString> {
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if body.is_empty() {
            return Err(Error::Domain(format!("empty Pauli literal `{s}`")));
        }
        let letters = body
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                _ => Err(Error::Domain(format!("bad Pauli letter `{c}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let p = PauliString::from_letters(&letters);
        Ok(if negative { p.negated() } else { p })
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.multiply(b)
}
