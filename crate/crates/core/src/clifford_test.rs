//! Randomized equality test for Clifford circuits.
//!
//! One run: draw a uniformly random Pauli `P`, compute `Q = U†PU` from the
//! known circuit, prepare a product state `|ψ⟩` with `Q|ψ⟩ = λ|ψ⟩`, run the
//! black box `Ũ` on it and measure `P`. If `Ũ = U` the outcome is always `λ`.
//! Otherwise it is `−λ` with constant probability.
//!
//! On qubits where `Q` acts as the identity the input is `T|+⟩`, which is not
//! an eigenstate of any of X, Y, Z and so exposes a nontrivial `Q̃` there.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::clifford::{conjugate_through_dagger, tableau_dagger, CliffordTableau, Letter, PauliString};
use crate::dense::{apply_circuit, DenseConfig, StateVector};
use crate::error::{Error, Result};
use crate::protocols::Verdict;
use crate::rng;

/// What to put on qubits where `Q` is the identity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityFill {
    /// `(|0⟩ + e^{iπ/4}|1⟩)/√2` on every such qubit.
    #[default]
    TPlus,
    /// A uniformly random one of the six X, Y, Z eigenstates.
    SixStateMixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepEntry {
    /// The `sign`-eigenstate of `letter`.
    Eigen {
        letter: Letter,
        sign: i8,
    },
    TPlus,
    /// An identity position filled from the six-state mixture; does not
    /// contribute to `λ`.
    Filler {
        letter: Letter,
        sign: i8,
    },
}

impl PrepEntry {
    /// Single-qubit state vector.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let r = FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            PrepEntry::TPlus => [c(r, 0.0), Complex64::from_polar(r, std::f64::consts::FRAC_PI_4)],
            PrepEntry::Eigen { letter, sign } | PrepEntry::Filler { letter, sign } => {
                let s = sign as f64;
                match letter {
                    Letter::X => [c(r, 0.0), c(s * r, 0.0)],
                    Letter::Y => [c(r, 0.0), c(0.0, s * r)],
                    Letter::Z if sign > 0 => [c(1.0, 0.0), c(0.0, 0.0)],
                    Letter::Z => [c(0.0, 0.0), c(1.0, 0.0)],
                    Letter::I => panic!("no eigenstate entry for the identity"),
                }
            }
        }
    }
}

/// `⟨ψ|σ|ψ⟩` for a prepared single-qubit state `ψ` and letter `σ`.
pub fn single_qubit_expectation(entry: PrepEntry, letter: Letter) -> f64 {
    match (entry, letter) {
        (_, Letter::I) => 1.0,
        (PrepEntry::TPlus, Letter::X | Letter::Y) => FRAC_1_SQRT_2,
        (PrepEntry::TPlus, Letter::Z) => 0.0,
        (PrepEntry::Eigen { letter: a, sign } | PrepEntry::Filler { letter: a, sign }, b) => {
            if a == b {
                sign as f64
            } else {
                0.0
            }
        }
    }
}

/// A product state together with the eigenvalue `λ` of `Q` on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenstatePrep {
    pub entries: Vec<PrepEntry>,
    pub lambda: i8,
}

impl EigenstatePrep {
    pub fn n_qubits(&self) -> usize {
        self.entries.len()
    }

    /// Dense product state.
    pub fn state(&self, cfg: &DenseConfig) -> Result<StateVector> {
        cfg.check("eigenstate_prep", self.entries.len())?;
        let qubits: Vec<[Complex64; 2]> = self.entries.iter().map(|e| e.amplitudes()).collect();
        StateVector::product(&qubits)
    }

    /// `⟨ψ|O|ψ⟩` for a Hermitian Pauli string `O`, using the product structure.
    pub fn expectation(&self, observable: &PauliString) -> Result<f64> {
        if observable.n_qubits() != self.entries.len() {
            return Err(Error::DimensionMismatch {
                left: self.entries.len(),
                right: observable.n_qubits(),
            });
        }
        let mut e = observable.sign() as f64;
        for (q, &entry) in self.entries.iter().enumerate() {
            e *= single_qubit_expectation(entry, observable.letter(q));
            if e == 0.0 {
                break;
            }
        }
        Ok(e)
    }
}

/// Product eigenstate of `q` with uniformly random per-qubit signs.
pub fn prepare_input(q: &PauliString, fill: IdentityFill, rng: &mut impl Rng) -> EigenstatePrep {
    let mut lambda = q.sign();
    let entries = (0..q.n_qubits())
        .map(|j| match q.letter(j) {
            Letter::I => match fill {
                IdentityFill::TPlus => PrepEntry::TPlus,
                IdentityFill::SixStateMixture => PrepEntry::Filler {
                    letter: [Letter::X, Letter::Y, Letter::Z][rng.random_range(0..3)],
                    sign: if rng.random() { 1 } else { -1 },
                },
            },
            letter => {
                let sign: i8 = if rng.random() { 1 } else { -1 };
                lambda *= sign;
                PrepEntry::Eigen { letter, sign }
            }
        })
        .collect();
    EigenstatePrep { entries, lambda }
}

/// How a [`CliffordBlackBox`] computes its measurement statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Backend {
    /// Conjugate the observable back through the circuit and take the
    /// product of single-qubit expectations. Polynomial in `n`.
    #[default]
    Analytic,
    /// Dense state vector simulation (small `n` only).
    Dense(DenseConfig),
}

/// A Clifford circuit that can be run and measured but not read.
#[derive(Clone)]
pub struct CliffordBlackBox {
    circuit: Circuit,
    backend: Backend,
}

impl std::fmt::Debug for CliffordBlackBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CliffordBlackBox")
            .field("n_qubits", &self.circuit.n_qubits())
            .field("backend", &self.backend)
            .finish_non_exhaustive()
    }
}

fn require_clifford(c: &Circuit) -> Result<()> {
    match c.first_non_clifford() {
        Some(g) => Err(Error::NonCliffordGate { gate: g.kind().name() }),
        None => Ok(()),
    }
}

impl CliffordBlackBox {
    pub fn new(circuit: Circuit) -> Result<CliffordBlackBox> {
        CliffordBlackBox::with_backend(circuit, Backend::Analytic)
    }

    pub fn with_backend(circuit: Circuit, backend: Backend) -> Result<CliffordBlackBox> {
        require_clifford(&circuit)?;
        Ok(CliffordBlackBox { circuit, backend })
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    // ⟨ψ|Ũ† O Ũ|ψ⟩
    fn expectation(&self, prep: &EigenstatePrep, observable: &PauliString) -> Result<f64> {
        match self.backend {
            Backend::Analytic => prep.expectation(&conjugate_through_dagger(&self.circuit, observable)?),
            Backend::Dense(cfg) => dense_expectation(&self.circuit, prep, observable, &cfg),
        }
    }

    /// Prepares `prep`, runs the circuit, measures `observable`; returns `±1`.
    pub fn run_and_measure(&self, prep: &EigenstatePrep, observable: &PauliString, rng: &mut impl Rng) -> Result<i8> {
        let e = self.expectation(prep, observable)?;
        let p_plus = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
        Ok(if rng.random_bool(p_plus) { 1 } else { -1 })
    }
}

/// `⟨ψ|U† O U|ψ⟩` by dense simulation.
pub fn dense_expectation(
    circuit: &Circuit,
    prep: &EigenstatePrep,
    observable: &PauliString,
    cfg: &DenseConfig,
) -> Result<f64> {
    let psi = apply_circuit(circuit, &prep.state(cfg)?)?;
    let o = observable.matrix();
    let amps = nalgebra::DVector::from_column_slice(psi.amplitudes());
    Ok((amps.adjoint() * o * &amps)[(0, 0)].re)
}

/// `Pr[outcome = λ]` when `P = U Q U†` is measured on `Ũ|ψ⟩`.
///
/// `(1 + λ⟨ψ|Q̃|ψ⟩)/2` with `Q̃ = Ũ†PŨ` from the tableaux.
pub fn acceptance_probability(
    u: &CliffordTableau,
    ut: &CliffordTableau,
    q: &PauliString,
    prep: &EigenstatePrep,
) -> Result<f64> {
    let p = u.conjugate(q)?;
    let q_tilde = ut.inverse().conjugate(&p)?;
    acceptance_from_conjugate(&q_tilde, prep)
}

fn acceptance_from_conjugate(q_tilde: &PauliString, prep: &EigenstatePrep) -> Result<f64> {
    Ok(((1.0 + prep.lambda as f64 * prep.expectation(q_tilde)?) / 2.0).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRun {
    pub p: PauliString,
    pub q: PauliString,
    pub lambda: i8,
    pub outcome: i8,
}

impl TestRun {
    pub fn rejected(&self) -> bool {
        self.outcome != self.lambda
    }
}

/// Known circuit `u` with its `U†` tableau built once.
#[derive(Debug, Clone)]
pub struct KnownClifford {
    dagger: CliffordTableau,
}

impl KnownClifford {
    pub fn new(u: &Circuit) -> Result<KnownClifford> {
        require_clifford(u)?;
        Ok(KnownClifford {
            dagger: tableau_dagger(u)?,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.dagger.n_qubits()
    }

    /// `U† p U`.
    pub fn pull_back(&self, p: &PauliString) -> Result<PauliString> {
        self.dagger.conjugate(p)
    }

    pub fn run_once(&self, ut: &CliffordBlackBox, fill: IdentityFill, rng: &mut impl Rng) -> Result<TestRun> {
        let n = self.n_qubits();
        if ut.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: ut.n_qubits(),
            });
        }
        let p = PauliString::random(n, rng);
        let q = self.pull_back(&p)?;
        let prep = prepare_input(&q, fill, rng);
        let outcome = ut.run_and_measure(&prep, &p, rng)?;
        Ok(TestRun {
            p,
            q,
            lambda: prep.lambda,
            outcome,
        })
    }
}

pub fn run_test_once(u: &Circuit, ut: &CliffordBlackBox, rng: &mut impl Rng) -> Result<TestRun> {
    KnownClifford::new(u)?.run_once(ut, IdentityFill::TPlus, rng)
}

pub const DETECTION_ENUMERATION_CAP: usize = 7;

/// Exact per-run `Pr[outcome ≠ λ]` for the TPlus recipe, averaged over all
/// `4^n` Paulis and all `2^{|Q|}` sign draws.
pub fn detection_probability_exact(u: &Circuit, ut: &Circuit) -> Result<f64> {
    let n = u.n_qubits();
    if n > DETECTION_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "detection_probability_exact",
            requested: n,
            cap: DETECTION_ENUMERATION_CAP,
        });
    }
    if ut.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: ut.n_qubits(),
        });
    }
    require_clifford(ut)?;
    let known = KnownClifford::new(u)?;
    let ut_dagger = tableau_dagger(ut)?;
    let mut total = 0.0;
    for index in 0..1u64 << (2 * n) {
        let p = PauliString::from_index(n, index);
        let q = known.pull_back(&p)?;
        let q_tilde = ut_dagger.conjugate(&p)?;
        let support: Vec<usize> = (0..n).filter(|&j| q.letter(j) != Letter::I).collect();
        let draws = 1u64 << support.len();
        let mut sum = 0.0;
        for draw in 0..draws {
            let mut lambda = q.sign();
            let entries = (0..n)
                .map(|j| match support.iter().position(|&s| s == j) {
                    None => PrepEntry::TPlus,
                    Some(bit) => {
                        let sign: i8 = if draw >> bit & 1 == 0 { 1 } else { -1 };
                        lambda *= sign;
                        PrepEntry::Eigen {
                            letter: q.letter(j),
                            sign,
                        }
                    }
                })
                .collect();
            let prep = EigenstatePrep { entries, lambda };
            sum += 1.0 - acceptance_from_conjugate(&q_tilde, &prep)?;
        }
        total += sum / draws as f64;
    }
    Ok(total / (1u64 << (2 * n)) as f64)
}

/// Assumed lower bound on the per-run detection probability for distinct
/// Cliffords, used to size the number of runs.
pub const DETECTION_FLOOR: f64 = 0.25;

/// `ceil(ln(1/delta) / ln(1/(1 − floor)))`.
pub fn runs_for_confidence(delta: f64, floor: f64) -> Result<u64> {
    if !(delta > 0.0 && delta <= 1.0) || !(floor > 0.0 && floor < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < delta <= 1 and 0 < floor < 1, got {delta}, {floor}"
        )));
    }
    Ok(((1.0 / delta).ln() / (1.0 / (1.0 - floor)).ln()).ceil() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliffordTestReport {
    pub n_qubits: usize,
    pub runs: Vec<TestRun>,
    pub verdict: Verdict,
    /// Fraction of runs whose outcome was `−λ`.
    pub per_run_detection_estimate: f64,
    pub identity_fill: IdentityFill,
    pub seed: u64,
}

/// `repetitions` independent runs; run `i` uses stream `i` of `seed`.
/// Says "different" iff some outcome differs from `λ`.
pub fn equivalence_verdict(
    u: &Circuit,
    ut: &CliffordBlackBox,
    repetitions: u64,
    seed: u64,
) -> Result<CliffordTestReport> {
    equivalence_verdict_with(u, ut, repetitions, IdentityFill::TPlus, seed)
}

pub fn equivalence_verdict_with(
    u: &Circuit,
    ut: &CliffordBlackBox,
    repetitions: u64,
    fill: IdentityFill,
    seed: u64,
) -> Result<CliffordTestReport> {
    if repetitions == 0 {
        return Err(Error::Domain("at least one repetition is needed".into()));
    }
    let known = KnownClifford::new(u)?;
    let runs = (0..repetitions)
        .map(|i| known.run_once(ut, fill, &mut rng::child(seed, &[i])))
        .collect::<Result<Vec<_>>>()?;
    let rejected = runs.iter().filter(|r| r.rejected()).count();
    Ok(CliffordTestReport {
        n_qubits: u.n_qubits(),
        verdict: if rejected > 0 {
            Verdict::Different
        } else {
            Verdict::Equal
        },
        per_run_detection_estimate: rejected as f64 / repetitions as f64,
        runs,
        identity_fill: fill,
        seed,
    })
}

// Stops at the first rejection.
fn passes(known: &KnownClifford, ut: &CliffordBlackBox, runs: u64, seed: u64) -> Result<bool> {
    for i in 0..runs {
        if known
            .run_once(ut, IdentityFill::TPlus, &mut rng::child(seed, &[i]))?
            .rejected()
        {
            return Ok(false);
        }
    }
    Ok(true)
}

const ONE_QUBIT_ALPHABET: [GateKind; 7] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::I,
];

/// Replacements considered for `gate`, excluding `gate` itself.
///
/// A one-qubit gate may become any of X, Y, Z, H, S, S†, I on the same
/// qubit. A CNOT may become the reversed CNOT or any pair of those one-qubit
/// gates on its two qubits.
pub fn replacement_alphabet(gate: &Gate) -> Vec<Vec<Gate>> {
    let one = |k: GateKind, q: usize| Gate::new(k, vec![q]).expect("one-qubit kind");
    match gate.kind() {
        GateKind::Cnot => {
            let (c, t) = (gate.targets()[0], gate.targets()[1]);
            let mut out = vec![vec![Gate::cnot(t, c)]];
            for a in ONE_QUBIT_ALPHABET {
                for b in ONE_QUBIT_ALPHABET {
                    out.push(vec![one(a, c), one(b, t)]);
                }
            }
            out
        }
        kind => {
            let q = gate.targets()[0];
            ONE_QUBIT_ALPHABET
                .iter()
                .filter(|&&k| k != kind)
                .map(|&k| vec![one(k, q)])
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoundCircuit {
    #[serde(skip)]
    pub circuit: Circuit,
    /// Number of replaced gates.
    pub distance: usize,
    /// `(position, replacement)` for each replaced gate.
    pub replacements: Vec<(usize, Vec<String>)>,
    pub candidates_tested: u64,
    pub runs_per_candidate: u64,
    pub seed: u64,
}

fn apply_replacements(u: &Circuit, reps: &[(usize, &Vec<Gate>)]) -> Result<Circuit> {
    // splice from the back so earlier positions stay valid
    let mut c = u.clone();
    for (pos, gates) in reps.iter().rev() {
        c = c.splice(*pos, gates.iter().cloned())?;
    }
    Ok(c)
}

/// Searches circuits within `depth` gate replacements of `u` for one the
/// black box cannot be told apart from. Candidates are tried in order of
/// distance and position; candidate `c` uses stream `c` of `seed`.
pub fn find_error(
    u: &Circuit,
    ut: &CliffordBlackBox,
    depth: usize,
    runs_per_candidate: u64,
    seed: u64,
) -> Result<FoundCircuit> {
    if depth > 2 {
        return Err(Error::Domain(format!("depth {depth} not supported (max 2)")));
    }
    require_clifford(u)?;
    let alphabets: Vec<Vec<Vec<Gate>>> = u.gates().iter().map(replacement_alphabet).collect();
    let mut tested = 0u64;
    let mut try_candidate = |reps: &[(usize, &Vec<Gate>)]| -> Result<Option<FoundCircuit>> {
        let c = apply_replacements(u, reps)?;
        let known = KnownClifford::new(&c)?;
        let ok = passes(&known, ut, runs_per_candidate, rng::split(seed, &[tested]))?;
        tested += 1;
        Ok(ok.then(|| FoundCircuit {
            circuit: c,
            distance: reps.len(),
            replacements: reps
                .iter()
                .map(|(p, gs)| (*p, gs.iter().map(|g| g.to_string()).collect()))
                .collect(),
            candidates_tested: tested,
            runs_per_candidate,
            seed,
        }))
    };

    if let Some(found) = try_candidate(&[])? {
        return Ok(found);
    }
    if depth >= 1 {
        for (i, alpha) in alphabets.iter().enumerate() {
            for rep in alpha {
                if let Some(found) = try_candidate(&[(i, rep)])? {
                    return Ok(found);
                }
            }
        }
    }
    if depth >= 2 {
        for i in 0..alphabets.len() {
            for j in i + 1..alphabets.len() {
                for ri in &alphabets[i] {
                    for rj in &alphabets[j] {
                        if let Some(found) = try_candidate(&[(i, ri), (j, rj)])? {
                            return Ok(found);
                        }
                    }
                }
            }
        }
    }
    Err(Error::NotFound { depth })
}

/// `|Tr(U†Ũ)/2^n|²` by counting Paulis fixed by `W = U†Ũ`:
/// `(1/4^n) Σ_{P : W P W† = ±P} (±1)`.
pub fn entanglement_fidelity_clifford(u: &CliffordTableau, ut: &CliffordTableau) -> Result<f64> {
    let n = u.n_qubits();
    if n > DETECTION_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "entanglement_fidelity_clifford",
            requested: n,
            cap: DETECTION_ENUMERATION_CAP,
        });
    }
    let w = CliffordTableau::compose(&u.inverse(), ut)?;
    let total: i64 = (0..1u64 << (2 * n))
        .map(|i| {
            let p = PauliString::from_index(n, i);
            let img = w.conjugate(&p).expect("same width");
            if img.same_letters(&p) {
                img.sign() as i64
            } else {
                0
            }
        })
        .sum();
    Ok(total as f64 / (1u64 << (2 * n)) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::random_clifford_circuit;
    use crate::dense::circuit_unitary;
    use crate::metrics::trace_overlap;

    fn cfg() -> DenseConfig {
        DenseConfig::default()
    }

    fn pauli_shift(c: &Circuit, r: &PauliString) -> Circuit {
        let mut out = c.clone();
        for q in 0..c.n_qubits() {
            let g = match r.letter(q) {
                Letter::I => continue,
                Letter::X => Gate::x(q),
                Letter::Y => Gate::y(q),
                Letter::Z => Gate::z(q),
            };
            out.push(g).unwrap();
        }
        out
    }

    #[test]
    fn expectation_table() {
        let e = |letter, sign| PrepEntry::Eigen { letter, sign };
        assert_eq!(single_qubit_expectation(e(Letter::Z, 1), Letter::Z), 1.0);
        assert_eq!(single_qubit_expectation(e(Letter::Z, -1), Letter::Z), -1.0);
        assert_eq!(single_qubit_expectation(e(Letter::X, 1), Letter::Y), 0.0);
        assert_eq!(single_qubit_expectation(e(Letter::Y, -1), Letter::I), 1.0);
        assert_eq!(single_qubit_expectation(PrepEntry::TPlus, Letter::X), FRAC_1_SQRT_2);
        assert_eq!(single_qubit_expectation(PrepEntry::TPlus, Letter::Y), FRAC_1_SQRT_2);
        assert_eq!(single_qubit_expectation(PrepEntry::TPlus, Letter::Z), 0.0);
        // against 2×2 inner products
        let entries = [PrepEntry::TPlus, e(Letter::X, -1), e(Letter::Y, 1), e(Letter::Z, -1)];
        for entry in entries {
            let psi = StateVector::product(&[entry.amplitudes()]).unwrap();
            for letter in Letter::ALL {
                let m = letter.matrix();
                let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
                let dense = (v.adjoint() * m * &v)[(0, 0)].re;
                assert!((dense - single_qubit_expectation(entry, letter)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn prepared_inputs_are_eigenstates() {
        let mut r = rng::seeded(1);
        for _ in 0..100 {
            let q = PauliString::random(4, &mut r).with_sign(if r.random() { 1 } else { -1 });
            let prep = prepare_input(&q, IdentityFill::TPlus, &mut r);
            let psi = prep.state(&cfg()).unwrap();
            let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
            let qv = q.matrix() * &v;
            assert!((qv - v * Complex64::new(prep.lambda as f64, 0.0)).norm() < 1e-12);
            for (j, e) in prep.entries.iter().enumerate() {
                assert_eq!(q.letter(j) == Letter::I, *e == PrepEntry::TPlus);
            }
        }
        let zz: PauliString = "+ZZ".parse().unwrap();
        let mut r = rng::seeded(2);
        for _ in 0..20 {
            let prep = prepare_input(&zz, IdentityFill::TPlus, &mut r);
            let signs: i8 = prep
                .entries
                .iter()
                .map(|e| match e {
                    PrepEntry::Eigen { sign, .. } => *sign,
                    _ => unreachable!(),
                })
                .product();
            assert_eq!(prep.lambda, signs);
        }
        let mx: PauliString = "-XI".parse().unwrap();
        let prep = prepare_input(&mx, IdentityFill::TPlus, &mut r);
        assert_eq!(prep.entries[1], PrepEntry::TPlus);
        if prep.entries[0]
            == (PrepEntry::Eigen {
                letter: Letter::X,
                sign: 1,
            })
        {
            assert_eq!(prep.lambda, -1);
        }
    }

    #[test]
    fn six_state_fill_keeps_eigenvalue() {
        let mut r = rng::seeded(3);
        for _ in 0..50 {
            let q = PauliString::random(3, &mut r);
            let prep = prepare_input(&q, IdentityFill::SixStateMixture, &mut r);
            assert!(!prep.entries.contains(&PrepEntry::TPlus));
            let v = nalgebra::DVector::from_column_slice(prep.state(&cfg()).unwrap().amplitudes());
            let qv = q.matrix() * &v;
            assert!((qv - v * Complex64::new(prep.lambda as f64, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn acceptance_matches_dense() {
        let mut r = rng::seeded(4);
        for _ in 0..100 {
            let n = r.random_range(1..5);
            let u = random_clifford_circuit(n, 20, &mut r);
            let ut = random_clifford_circuit(n, 20, &mut r);
            let (tu, tut) = (
                CliffordTableau::from_circuit(&u).unwrap(),
                CliffordTableau::from_circuit(&ut).unwrap(),
            );
            let p = PauliString::random(n, &mut r);
            let q = conjugate_through_dagger(&u, &p).unwrap();
            let prep = prepare_input(&q, IdentityFill::TPlus, &mut r);
            let fast = acceptance_probability(&tu, &tut, &q, &prep).unwrap();
            let dense = (1.0 + prep.lambda as f64 * dense_expectation(&ut, &prep, &p, &cfg()).unwrap()) / 2.0;
            assert!((fast - dense).abs() < 1e-9, "{fast} vs {dense}");
            assert_eq!(acceptance_probability(&tu, &tu, &q, &prep).unwrap(), 1.0);
        }
    }

    #[test]
    fn dense_and_analytic_backends_agree_in_distribution() {
        let mut r = rng::seeded(5);
        let u = random_clifford_circuit(3, 25, &mut r);
        let ut = random_clifford_circuit(3, 25, &mut r);
        let fast = CliffordBlackBox::new(ut.clone()).unwrap();
        let dense = CliffordBlackBox::with_backend(ut.clone(), Backend::Dense(cfg())).unwrap();
        let p = PauliString::random(3, &mut r);
        let q = conjugate_through_dagger(&u, &p).unwrap();
        let prep = prepare_input(&q, IdentityFill::TPlus, &mut r);
        assert!((fast.expectation(&prep, &p).unwrap() - dense.expectation(&prep, &p).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn identity_observable_always_passes() {
        let mut r = rng::seeded(6);
        let u = random_clifford_circuit(3, 20, &mut r);
        let ut = CliffordBlackBox::new(random_clifford_circuit(3, 20, &mut r)).unwrap();
        let known = KnownClifford::new(&u).unwrap();
        let id = PauliString::identity(3);
        let q = known.pull_back(&id).unwrap();
        assert!(q.is_identity_letters() && q.sign() == 1);
        let prep = prepare_input(&q, IdentityFill::TPlus, &mut r);
        assert!(prep.entries.iter().all(|e| *e == PrepEntry::TPlus));
        assert_eq!(prep.lambda, 1);
        assert!((0..100).all(|_| ut.run_and_measure(&prep, &id, &mut r).unwrap() == 1));
    }

    #[test]
    fn detection_probabilities() {
        let s = Circuit::from_gates(1, [Gate::s(0)]).unwrap();
        let sdg = Circuit::from_gates(1, [Gate::sdg(0)]).unwrap();
        assert_eq!(detection_probability_exact(&s, &s).unwrap(), 0.0);
        assert_eq!(detection_probability_exact(&s, &sdg).unwrap(), 0.5);
        let mut r = rng::seeded(7);
        for n in 1..=3 {
            let u = random_clifford_circuit(n, 15, &mut r);
            for idx in 1..1u64 << (2 * n) {
                let shifted = pauli_shift(&u, &PauliString::from_index(n, idx));
                assert_eq!(detection_probability_exact(&u, &shifted).unwrap(), 0.5);
            }
        }
        let big = Circuit::new(8);
        assert!(matches!(
            detection_probability_exact(&big, &big),
            Err(Error::CapExceeded { .. })
        ));
        let t = Circuit::from_gates(1, [Gate::t(0)]).unwrap();
        assert!(matches!(
            detection_probability_exact(&s, &t),
            Err(Error::NonCliffordGate { .. })
        ));
    }

    #[test]
    fn verdicts() {
        let mut r = rng::seeded(8);
        let u = random_clifford_circuit(4, 30, &mut r);
        let same = CliffordBlackBox::new(u.clone()).unwrap();
        let rep = equivalence_verdict(&u, &same, 50, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Equal);
        assert_eq!(rep.per_run_detection_estimate, 0.0);
        let shifted = CliffordBlackBox::new(pauli_shift(&u, &"+XIZI".parse().unwrap())).unwrap();
        let rep = equivalence_verdict(&u, &shifted, 20, 2).unwrap();
        assert_eq!(rep.verdict, Verdict::Different);
        assert_eq!(rep, equivalence_verdict(&u, &shifted, 20, 2).unwrap());
        assert!(equivalence_verdict(&u, &shifted, 0, 2).is_err());
        assert_eq!(runs_for_confidence(1.0, DETECTION_FLOOR).unwrap(), 0);
        assert_eq!(runs_for_confidence(1e-6, DETECTION_FLOOR).unwrap(), 49);
    }

    #[test]
    fn non_clifford_is_rejected() {
        let t = Circuit::from_gates(1, [Gate::t(0)]).unwrap();
        assert_eq!(
            CliffordBlackBox::new(t.clone()).unwrap_err(),
            Error::NonCliffordGate { gate: "T" }
        );
        let ok = CliffordBlackBox::new(Circuit::new(1)).unwrap();
        assert!(matches!(
            equivalence_verdict(&t, &ok, 1, 0),
            Err(Error::NonCliffordGate { .. })
        ));
        assert!(format!("{ok:?}").contains("n_qubits"));
    }

    #[test]
    fn finder_returns_u_when_equal_and_recovers_a_planted_error() {
        let mut r = rng::seeded(9);
        let u = random_clifford_circuit(4, 20, &mut r);
        let found = find_error(&u, &CliffordBlackBox::new(u.clone()).unwrap(), 1, 30, 0).unwrap();
        assert_eq!(found.distance, 0);
        assert_eq!(found.circuit, u);

        let pos = u.gates().iter().position(|g| g.kind() != GateKind::Cnot).unwrap();
        let q = u.gates()[pos].targets()[0];
        let kind = if u.gates()[pos].kind() == GateKind::H {
            GateKind::S
        } else {
            GateKind::H
        };
        let planted = u.splice(pos, [Gate::new(kind, vec![q]).unwrap()]).unwrap();
        let found = find_error(&u, &CliffordBlackBox::new(planted.clone()).unwrap(), 1, 40, 1).unwrap();
        assert_eq!(
            CliffordTableau::from_circuit(&found.circuit).unwrap(),
            CliffordTableau::from_circuit(&planted).unwrap()
        );
    }

    #[test]
    fn finder_reports_not_found_outside_alphabet() {
        let u = Circuit::from_gates(2, [Gate::h(0), Gate::h(1)]).unwrap();
        // CNOT at a one-qubit position is not in the alphabet
        let hidden = Circuit::from_gates(2, [Gate::h(0), Gate::h(1), Gate::cnot(0, 1)]).unwrap();
        let err = find_error(&u, &CliffordBlackBox::new(hidden).unwrap(), 1, 40, 0).unwrap_err();
        assert_eq!(err, Error::NotFound { depth: 1 });
    }

    #[test]
    fn alphabet_sizes() {
        assert_eq!(replacement_alphabet(&Gate::h(0)).len(), 6);
        assert_eq!(replacement_alphabet(&Gate::cnot(0, 1)).len(), 50);
    }

    #[test]
    fn fidelity_identity_and_tightness() {
        let mut r = rng::seeded(10);
        let u = CliffordTableau::from_circuit(&random_clifford_circuit(3, 20, &mut r)).unwrap();
        assert_eq!(entanglement_fidelity_clifford(&u, &u).unwrap(), 1.0);
        let s = CliffordTableau::from_circuit(&Circuit::from_gates(2, [Gate::s(0)]).unwrap()).unwrap();
        assert_eq!(
            entanglement_fidelity_clifford(&CliffordTableau::identity(2), &s).unwrap(),
            0.5
        );
    }

    #[test]
    fn fidelity_matches_dense() {
        let mut r = rng::seeded(11);
        for _ in 0..40 {
            let n = r.random_range(1..5);
            let (a, b) = (
                random_clifford_circuit(n, 15, &mut r),
                random_clifford_circuit(n, 15, &mut r),
            );
            let f = entanglement_fidelity_clifford(
                &CliffordTableau::from_circuit(&a).unwrap(),
                &CliffordTableau::from_circuit(&b).unwrap(),
            )
            .unwrap();
            let (ua, ub) = (
                circuit_unitary(&a, &cfg()).unwrap(),
                circuit_unitary(&b, &cfg()).unwrap(),
            );
            let dense = trace_overlap(&ua, &ub).unwrap().norm_sqr();
            assert!((f - dense).abs() < 1e-9, "{f} vs {dense}");
        }
    }
}
