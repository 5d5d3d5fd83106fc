//! Black-box comparison tests: swap test on Choi states, conditional
//! application, and the inverse test.
//!
//! Each shot outputs 0 or 1. Equal circuits (up to the phase each test is
//! blind to) never output 1, so a single 1 is proof of a difference.
//!
//! Shots are drawn from the exact per-shot probability, computed from the
//! states the black boxes actually produce. The `literal_*` functions build
//! the full measurement circuits for small `n` as a cross-check.

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use serde::Serialize;

use crate::circuit::{Circuit, Gate};
use crate::dense::{apply_circuit_at, apply_circuit_at_controlled, bell_preparation, DenseConfig, StateVector};
use crate::error::{Error, Result};
use crate::rng;

/// Which kinds of access a [`BlackBoxUnitary`] grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    pub plain: bool,
    pub conditional: bool,
    pub inverse: bool,
}

impl Capabilities {
    pub const PLAIN: Capabilities = Capabilities {
        plain: true,
        conditional: false,
        inverse: false,
    };
    pub const ALL: Capabilities = Capabilities {
        plain: true,
        conditional: true,
        inverse: true,
    };
}

/// A unitary we can run but not read.
///
/// Deliberately has no accessor for the wrapped circuit.
#[derive(Clone)]
pub struct BlackBoxUnitary {
    circuit: Circuit,
    caps: Capabilities,
}

impl std::fmt::Debug for BlackBoxUnitary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlackBoxUnitary")
            .field("n_qubits", &self.circuit.n_qubits())
            .field("caps", &self.caps)
            .finish_non_exhaustive()
    }
}

impl BlackBoxUnitary {
    pub fn new(circuit: Circuit, caps: Capabilities) -> BlackBoxUnitary {
        BlackBoxUnitary { circuit, caps }
    }

    /// Plain access only.
    pub fn plain(circuit: Circuit) -> BlackBoxUnitary {
        BlackBoxUnitary::new(circuit, Capabilities::PLAIN)
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    pub fn capabilities(&self) -> Capabilities {
        self.caps
    }

    /// Runs the unitary on qubits `offset..offset + n` of `state`.
    pub fn apply(&self, state: &mut StateVector, offset: usize) -> Result<()> {
        if !self.caps.plain {
            return Err(Error::CapabilityMissing("plain"));
        }
        apply_circuit_at(&self.circuit, state, offset)
    }

    /// Runs the unitary only on the branch where qubit `control` equals `value`.
    pub fn apply_controlled(&self, state: &mut StateVector, offset: usize, control: usize, value: bool) -> Result<()> {
        if !self.caps.conditional {
            return Err(Error::CapabilityMissing("conditional"));
        }
        if (offset..offset + self.n_qubits()).contains(&control) {
            return Err(Error::DuplicateTarget(control));
        }
        apply_circuit_at_controlled(&self.circuit, state, offset, Some((control, value)))
    }

    pub fn apply_inverse(&self, state: &mut StateVector, offset: usize) -> Result<()> {
        if !self.caps.inverse {
            return Err(Error::CapabilityMissing("inverse"));
        }
        apply_circuit_at(&self.circuit.dagger(), state, offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Swap,
    Conditional,
    Inverse,
}

impl Protocol {
    /// The measurement event reported as outcome 1.
    pub fn outcome_one(self) -> &'static str {
        match self {
            Protocol::Swap | Protocol::Conditional => "auxiliary qubit measured 1",
            Protocol::Inverse => "register not returned to all-zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Different,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    pub protocol: Protocol,
    pub shots: u64,
    pub ones_observed: u64,
    pub analytic_p: f64,
    pub verdict: Verdict,
    pub seed: u64,
    pub outcome_one: &'static str,
}

impl ProtocolOutcome {
    fn new(protocol: Protocol, shots: u64, ones_observed: u64, analytic_p: f64, seed: u64) -> ProtocolOutcome {
        ProtocolOutcome {
            protocol,
            shots,
            ones_observed,
            analytic_p,
            verdict: if ones_observed > 0 {
                Verdict::Different
            } else {
                Verdict::Equal
            },
            seed,
            outcome_one: protocol.outcome_one(),
        }
    }

    pub fn frequency(&self) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.ones_observed as f64 / self.shots as f64
        }
    }
}

const CHUNK: u64 = 1 << 14;

/// Number of 1s in `shots` Bernoulli(`p`) draws.
///
/// Shot `i` uses stream `(i / CHUNK)` of `seed`, so any chunk can be
/// evaluated independently.
pub fn count_ones(p: f64, shots: u64, seed: u64) -> u64 {
    let bern = Bernoulli::new(p.clamp(0.0, 1.0)).expect("clamped probability");
    (0..shots.div_ceil(CHUNK))
        .map(|chunk| {
            let mut r = rng::child(seed, &[chunk]);
            let len = CHUNK.min(shots - chunk * CHUNK);
            (0..len).filter(|_| bern.sample(&mut r)).count() as u64
        })
        .sum()
}

// Index of the first 1 among `shots` draws, if any. Same streams as `count_ones`.
fn first_one(p: f64, shots: u64, seed: u64) -> Option<u64> {
    let bern = Bernoulli::new(p.clamp(0.0, 1.0)).expect("clamped probability");
    for chunk in 0..shots.div_ceil(CHUNK) {
        let mut r = rng::child(seed, &[chunk]);
        let len = CHUNK.min(shots - chunk * CHUNK);
        if let Some(i) = (0..len).find(|_| bern.sample(&mut r)) {
            return Some(chunk * CHUNK + i);
        }
    }
    None
}

fn same_width(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

/// `(U ⊗ I)|Φ⟩` on `2n` qubits, with the box applied to the first half.
pub fn choi_state(bb: &BlackBoxUnitary, cfg: &DenseConfig) -> Result<StateVector> {
    let n = bb.n_qubits();
    cfg.check("choi_state", 2 * n)?;
    let mut s = crate::dense::apply_circuit(&bell_preparation(n), &StateVector::zero(2 * n))?;
    bb.apply(&mut s, 0)?;
    Ok(s)
}

fn choi_overlap(u: &BlackBoxUnitary, ut: &BlackBoxUnitary, cfg: &DenseConfig) -> Result<Complex64> {
    same_width(u.n_qubits(), ut.n_qubits())?;
    choi_state(u, cfg)?.inner(&choi_state(ut, cfg)?)
}

/// Per-shot probability of outcome 1 in the swap test: `1/2 − |⟨ψ_U|ψ_Ũ⟩|²/2`.
pub fn swap_test_p(u: &BlackBoxUnitary, ut: &BlackBoxUnitary, cfg: &DenseConfig) -> Result<f64> {
    let o = choi_overlap(u, ut, cfg)?;
    Ok((0.5 - o.norm_sqr() / 2.0).clamp(0.0, 1.0))
}

/// Per-shot probability of outcome 1 in the conditional test: `1/2 − Re⟨ψ_U|ψ_Ũ⟩/2`.
pub fn conditional_test_p(u: &BlackBoxUnitary, ut: &BlackBoxUnitary, cfg: &DenseConfig) -> Result<f64> {
    for bb in [u, ut] {
        if !bb.capabilities().conditional {
            return Err(Error::CapabilityMissing("conditional"));
        }
    }
    let o = choi_overlap(u, ut, cfg)?;
    Ok((0.5 - o.re / 2.0).clamp(0.0, 1.0))
}

/// Per-shot reject probability of the inverse test: `1 − |⟨0^{2n}|B†(U†Ũ ⊗ I)B|0^{2n}⟩|²`.
pub fn inverse_test_p(u: &Circuit, ut: &BlackBoxUnitary, cfg: &DenseConfig) -> Result<f64> {
    let n = u.n_qubits();
    same_width(n, ut.n_qubits())?;
    cfg.check("inverse_test", 2 * n)?;
    let prep = bell_preparation(n);
    let mut s = crate::dense::apply_circuit(&prep, &StateVector::zero(2 * n))?;
    ut.apply(&mut s, 0)?;
    apply_circuit_at(&u.dagger(), &mut s, 0)?;
    apply_circuit_at(&prep.dagger(), &mut s, 0)?;
    Ok((1.0 - s.amplitudes()[0].norm_sqr()).clamp(0.0, 1.0))
}

pub fn run_swap_test(
    u: &BlackBoxUnitary,
    ut: &BlackBoxUnitary,
    shots: u64,
    seed: u64,
    cfg: &DenseConfig,
) -> Result<ProtocolOutcome> {
    let p = swap_test_p(u, ut, cfg)?;
    Ok(ProtocolOutcome::new(
        Protocol::Swap,
        shots,
        count_ones(p, shots, seed),
        p,
        seed,
    ))
}

pub fn run_conditional_test(
    u: &BlackBoxUnitary,
    ut: &BlackBoxUnitary,
    shots: u64,
    seed: u64,
    cfg: &DenseConfig,
) -> Result<ProtocolOutcome> {
    let p = conditional_test_p(u, ut, cfg)?;
    Ok(ProtocolOutcome::new(
        Protocol::Conditional,
        shots,
        count_ones(p, shots, seed),
        p,
        seed,
    ))
}

pub fn run_inverse_test(
    u: &Circuit,
    ut: &BlackBoxUnitary,
    shots: u64,
    seed: u64,
    cfg: &DenseConfig,
) -> Result<ProtocolOutcome> {
    let p = inverse_test_p(u, ut, cfg)?;
    Ok(ProtocolOutcome::new(
        Protocol::Inverse,
        shots,
        count_ones(p, shots, seed),
        p,
        seed,
    ))
}

/// Probability that qubit 0 of the full `4n + 1`-qubit swap-test circuit
/// reads 1. Layout: auxiliary qubit 0, Choi state of `U` on `1..2n+1`,
/// Choi state of `Ũ` on `2n+1..4n+1`.
pub fn literal_swap_test_p(u: &BlackBoxUnitary, ut: &BlackBoxUnitary, cfg: &DenseConfig) -> Result<f64> {
    let n = u.n_qubits();
    same_width(n, ut.n_qubits())?;
    let width = 4 * n + 1;
    cfg.check("literal_swap_test", width)?;
    let prep = bell_preparation(n);
    let mut s = StateVector::zero(width);
    apply_circuit_at(&prep, &mut s, 1)?;
    apply_circuit_at(&prep, &mut s, 2 * n + 1)?;
    u.apply(&mut s, 1)?;
    ut.apply(&mut s, 2 * n + 1)?;
    s.apply_gate(&Gate::h(0))?;
    let s = controlled_register_swap(s, 2 * n)?;
    let mut s = s;
    s.apply_gate(&Gate::h(0))?;
    Ok(s.prob_one(0))
}

// Swaps qubits 1..1+m with 1+m..1+2m on the branch where qubit 0 is 1.
fn controlled_register_swap(s: StateVector, m: usize) -> Result<StateVector> {
    let width = s.n_qubits();
    let mut amps = s.into_amplitudes();
    let top = 1usize << (width - 1);
    let mask = (1usize << m) - 1;
    for idx in top..2 * top {
        let a = (idx >> m) & mask;
        let b = idx & mask;
        if a < b {
            let other = top | (b << m) | a;
            amps.swap(idx, other);
        }
    }
    StateVector::from_amplitudes(amps)
}

/// Probability that the control qubit reads 1 in the full `2n + 1`-qubit
/// conditional-application circuit.
pub fn literal_conditional_test_p(u: &BlackBoxUnitary, ut: &BlackBoxUnitary, cfg: &DenseConfig) -> Result<f64> {
    let n = u.n_qubits();
    same_width(n, ut.n_qubits())?;
    cfg.check("literal_conditional_test", 2 * n + 1)?;
    let mut s = StateVector::zero(2 * n + 1);
    apply_circuit_at(&bell_preparation(n), &mut s, 1)?;
    s.apply_gate(&Gate::h(0))?;
    u.apply_controlled(&mut s, 1, 0, false)?;
    ut.apply_controlled(&mut s, 1, 0, true)?;
    s.apply_gate(&Gate::h(0))?;
    Ok(s.prob_one(0))
}

/// Number of runs for confidence `1 − delta` when each run detects a
/// difference with probability at least `eps²/2^{k+2}`.
pub fn required_runs(eps: f64, delta: f64, k: u32) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    let per_run = eps * eps / 2f64.powi(k as i32 + 2);
    Ok(((1.0 / delta).ln() / per_run).ceil() as u64)
}

/// One of the three tests, with its inputs.
#[derive(Debug, Clone, Copy)]
pub enum Tester<'a> {
    Swap(&'a BlackBoxUnitary, &'a BlackBoxUnitary),
    Conditional(&'a BlackBoxUnitary, &'a BlackBoxUnitary),
    Inverse(&'a Circuit, &'a BlackBoxUnitary),
}

impl Tester<'_> {
    pub fn protocol(&self) -> Protocol {
        match self {
            Tester::Swap(..) => Protocol::Swap,
            Tester::Conditional(..) => Protocol::Conditional,
            Tester::Inverse(..) => Protocol::Inverse,
        }
    }

    /// Per-run probability of outcome 1.
    pub fn p(&self, cfg: &DenseConfig) -> Result<f64> {
        match *self {
            Tester::Swap(u, ut) => swap_test_p(u, ut, cfg),
            Tester::Conditional(u, ut) => conditional_test_p(u, ut, cfg),
            Tester::Inverse(u, ut) => inverse_test_p(u, ut, cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidentVerdict {
    pub protocol: Protocol,
    pub verdict: Verdict,
    /// Runs performed; stops at the first 1.
    pub runs_used: u64,
    pub runs_planned: u64,
    pub analytic_p: f64,
    pub eps: f64,
    pub delta: f64,
    pub k: u32,
    pub seed: u64,
}

/// Runs `tester` up to [`required_runs`] times and says "different" as soon
/// as one run outputs 1.
pub fn repeat_until_confident(
    tester: Tester<'_>,
    eps: f64,
    delta: f64,
    k: u32,
    seed: u64,
    cfg: &DenseConfig,
) -> Result<ConfidentVerdict> {
    let runs_planned = required_runs(eps, delta, k)?;
    let p = tester.p(cfg)?;
    let (verdict, runs_used) = match first_one(p, runs_planned, seed) {
        Some(i) => (Verdict::Different, i + 1),
        None => (Verdict::Equal, runs_planned),
    };
    Ok(ConfidentVerdict {
        protocol: tester.protocol(),
        verdict,
        runs_used,
        runs_planned,
        analytic_p: p,
        eps,
        delta,
        k,
        seed,
    })
}
