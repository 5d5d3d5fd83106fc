//! Production-line winnowing.
//!
//! A factory emits copies of an ideal circuit, each faulty with probability
//! `f < 1/2`. Circuits are tested pairwise in odd-sized batches and any
//! circuit that more than half of its partners call "not equal" is thrown
//! away. When most of a batch is perfect this removes exactly the faulty ones.

use std::sync::Arc;

use rand::distr::{Bernoulli, Distribution};
use rand::Rng as _;
use rand_distr::Binomial;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, Matrix};
use crate::dense::{apply_circuit, bell_preparation, circuit_unitary, DenseConfig, StateVector};
use crate::error::{Error, Result};
use crate::metrics::worst_distance;
use crate::rng::{self, Rng};

/// Relative entropy `D(p‖q)` of two Bernoulli distributions, in nats.
pub fn kl_divergence_binary(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "probabilities must lie in [0, 1], got p={p}, q={q}"
        )));
    }
    let term = |a: f64, b: f64| -> Result<f64> {
        if a == 0.0 {
            Ok(0.0)
        } else if b == 0.0 {
            Err(Error::Domain(format!("D({p}‖{q}) is infinite")))
        } else {
            Ok(a * (a / b).ln())
        }
    };
    Ok(term(p, q)? + term(1.0 - p, 1.0 - q)?)
}

fn check_odd(n: usize) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenBatch(n));
    }
    Ok(())
}

/// Chernoff bound `e^{−D(1/2‖f)·n}` on the chance that at least half of an
/// `n`-circuit batch is faulty.
pub fn batch_failure_bound(f: f64, n: usize) -> Result<f64> {
    if !(0.0..0.5).contains(&f) {
        return Err(Error::Domain(format!(
            "fault probability must lie in [0, 1/2), got {f}"
        )));
    }
    check_odd(n)?;
    if f == 0.0 {
        return Ok(0.0);
    }
    Ok((-kl_divergence_binary(0.5, f)? * n as f64).exp())
}

/// Fraction of `batches` simulated batches of size `n` in which more than
/// half of the circuits are faulty.
pub fn majority_faulty_rate(f: f64, n: usize, batches: u64, seed: u64) -> Result<f64> {
    let faulty = Binomial::new(n as u64, f).map_err(|e| Error::Domain(e.to_string()))?;
    let mut r = rng::seeded(seed);
    let bad = (0..batches).filter(|_| faulty.sample(&mut r) > n as u64 / 2).count();
    Ok(bad as f64 / batches.max(1) as f64)
}

/// A circuit off the line, with its Choi state precomputed for testing.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub circuit: Circuit,
    pub faulty: bool,
    choi: StateVector,
}

impl Candidate {
    pub fn new(circuit: Circuit, faulty: bool, cfg: &DenseConfig) -> Result<Candidate> {
        let n = circuit.n_qubits();
        cfg.check("candidate", 2 * n)?;
        let mut choi = apply_circuit(&bell_preparation(n), &StateVector::zero(2 * n))?;
        crate::dense::apply_circuit_at(&circuit, &mut choi, 0)?;
        Ok(Candidate { circuit, faulty, choi })
    }

    /// `|⟨ψ_a|ψ_b⟩|`.
    pub fn overlap(&self, other: &Candidate) -> Result<f64> {
        Ok(self.choi.inner(&other.choi)?.norm())
    }

    /// Equal up to global phase.
    pub fn equivalent(&self, other: &Candidate) -> Result<bool> {
        Ok(self.overlap(other)? > 1.0 - 1e-9)
    }
}

/// One invocation of a test between two circuits.
pub trait PairwiseTester {
    /// Probability that one invocation says "not equal".
    fn p_not_equal(&self, a: &Candidate, b: &Candidate) -> Result<f64>;

    /// Never says "not equal" on equivalent circuits.
    fn one_sided(&self) -> bool;
}

/// One swap test on the two Choi states.
#[derive(Debug, Clone, Copy, Default)]
pub struct SwapTester;

impl PairwiseTester for SwapTester {
    fn p_not_equal(&self, a: &Candidate, b: &Candidate) -> Result<f64> {
        Ok((0.5 - a.overlap(b)?.powi(2) / 2.0).clamp(0.0, 1.0))
    }

    fn one_sided(&self) -> bool {
        true
    }
}

/// Always right.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleTester;

impl PairwiseTester for OracleTester {
    fn p_not_equal(&self, a: &Candidate, b: &Candidate) -> Result<f64> {
        Ok(if a.equivalent(b)? { 0.0 } else { 1.0 })
    }

    fn one_sided(&self) -> bool {
        true
    }
}

/// Right with probability exactly `1 − error` on every pair.
#[derive(Debug, Clone, Copy)]
pub struct NoisyTester {
    pub error: f64,
}

impl PairwiseTester for NoisyTester {
    fn p_not_equal(&self, a: &Candidate, b: &Candidate) -> Result<f64> {
        Ok(if a.equivalent(b)? { self.error } else { 1.0 - self.error })
    }

    fn one_sided(&self) -> bool {
        false
    }
}

pub const MAJORITY_CONSTANT: f64 = 18.0;

/// Repeats a base tester and aggregates.
///
/// One-sided bases say "not equal" if any run does; two-sided bases take a
/// strict majority over an odd number of runs.
#[derive(Debug, Clone)]
pub struct MajorityTester<T> {
    base: T,
    runs: u64,
}

impl<T: PairwiseTester> MajorityTester<T> {
    /// `ceil(18 · ln(1/delta))` runs (rounded up to odd for two-sided bases).
    pub fn new(base: T, delta: f64) -> Result<MajorityTester<T>> {
        MajorityTester::with_constant(base, delta, MAJORITY_CONSTANT)
    }

    pub fn with_constant(base: T, delta: f64, constant: f64) -> Result<MajorityTester<T>> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
        }
        let runs = ((constant * (1.0 / delta).ln()).ceil() as u64).max(1);
        Ok(MajorityTester::with_runs(base, runs))
    }

    pub fn with_runs(base: T, runs: u64) -> MajorityTester<T> {
        let runs = runs.max(1);
        let runs = if base.one_sided() || runs % 2 == 1 {
            runs
        } else {
            runs + 1
        };
        MajorityTester { base, runs }
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn base(&self) -> &T {
        &self.base
    }

    fn decide(&self, not_equal_count: u64) -> bool {
        if self.base.one_sided() {
            not_equal_count > 0
        } else {
            not_equal_count > self.runs / 2
        }
    }

    /// `true` means "not equal".
    pub fn verdict(&self, a: &Candidate, b: &Candidate, rng: &mut Rng) -> Result<bool> {
        let q = self.base.p_not_equal(a, b)?;
        let count = Binomial::new(self.runs, q.clamp(0.0, 1.0))
            .map_err(|e| Error::Domain(e.to_string()))?
            .sample(rng);
        Ok(self.decide(count))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchResult {
    pub batch_size: usize,
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub truth: Vec<bool>,
    /// `pair_verdicts[i][j] == Some(true)` means the pair was called "not equal".
    pub pair_verdicts: Vec<Vec<Option<bool>>>,
    pub tests_run: u64,
}

/// Tests all pairs of `batch` and discards circuits with more than
/// `(n − 1)/2` "not equal" verdicts. Pair `(i, j)` uses stream
/// `(batch_index, i, j)` of `seed`.
pub fn winnow_batch<T: PairwiseTester>(
    batch: &[Candidate],
    tester: &MajorityTester<T>,
    seed: u64,
    batch_index: u64,
) -> Result<BatchResult> {
    let n = batch.len();
    check_odd(n)?;
    let mut verdicts = vec![vec![None; n]; n];
    let mut against = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            let mut r = rng::child(seed, &[batch_index, i as u64, j as u64]);
            let v = tester.verdict(&batch[i], &batch[j], &mut r)?;
            verdicts[i][j] = Some(v);
            verdicts[j][i] = Some(v);
            if v {
                against[i] += 1;
                against[j] += 1;
            }
        }
    }
    let (discarded, kept): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| against[i] > (n - 1) / 2);
    Ok(BatchResult {
        batch_size: n,
        kept,
        discarded,
        truth: batch.iter().map(|c| c.faulty).collect(),
        pair_verdicts: verdicts,
        tests_run: (n * (n - 1) / 2) as u64 * tester.runs(),
    })
}

/// `(ideal, rng) -> (position, replacement)`.
pub type FaultFn = Arc<dyn Fn(&Circuit, &mut Rng) -> (usize, Gate) + Send + Sync>;

/// Produces a faulty version of the ideal circuit.
#[derive(Clone)]
pub enum FaultSampler {
    /// Replace a uniformly random gate `G` by `P·G` for a uniformly random
    /// non-identity Pauli `P` on the same qubits.
    Pauli,
    /// Caller-supplied `(position, replacement)`.
    Custom(FaultFn),
}

impl std::fmt::Debug for FaultSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FaultSampler::Pauli => f.write_str("Pauli"),
            FaultSampler::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn pauli_matrix(k: usize, label: usize) -> Matrix {
    let single = |p: usize| -> Matrix {
        match p {
            0 => Gate::i(0).matrix(),
            1 => Gate::x(0).matrix(),
            2 => Gate::y(0).matrix(),
            _ => Gate::z(0).matrix(),
        }
    };
    (0..k).fold(Matrix::identity(1, 1), |acc, q| {
        acc.kronecker(&single((label >> (2 * (k - 1 - q))) & 3))
    })
}

impl FaultSampler {
    pub fn sample(&self, ideal: &Circuit, rng: &mut Rng) -> (usize, Gate) {
        match self {
            FaultSampler::Pauli => {
                let position = rng.random_range(0..ideal.len());
                let gate = &ideal.gates()[position];
                let k = gate.targets().len();
                let label = rng.random_range(1..1usize << (2 * k));
                let m = pauli_matrix(k, label) * gate.matrix();
                let faulty = Gate::custom(gate.targets().to_vec(), m).expect("Pauli times unitary is unitary");
                (position, faulty)
            }
            FaultSampler::Custom(f) => f(ideal, rng),
        }
    }
}

/// Number of faulty circuits checked against `eps` when a factory is built.
pub const FACTORY_VALIDATION_SAMPLES: u64 = 20;

#[derive(Debug, Clone)]
pub struct FactoryModel {
    ideal: Circuit,
    fault_prob: f64,
    eps: f64,
    sampler: FaultSampler,
    faults_per_circuit: usize,
}

impl FactoryModel {
    /// Validates the sampler on [`FACTORY_VALIDATION_SAMPLES`] faulty circuits:
    /// each must sit at worst-case distance at least `eps` from `ideal`.
    pub fn new(
        ideal: Circuit,
        fault_prob: f64,
        eps: f64,
        sampler: FaultSampler,
        cfg: &DenseConfig,
    ) -> Result<FactoryModel> {
        FactoryModel::with_faults(ideal, fault_prob, eps, sampler, 1, 0, cfg)
    }

    /// Like [`FactoryModel::new`] with `faults_per_circuit` independent
    /// replacements per faulty circuit. More than one is flagged in reports:
    /// several faults can cancel in the average-case distance.
    pub fn with_faults(
        ideal: Circuit,
        fault_prob: f64,
        eps: f64,
        sampler: FaultSampler,
        faults_per_circuit: usize,
        validation_seed: u64,
        cfg: &DenseConfig,
    ) -> Result<FactoryModel> {
        if !(0.0..0.5).contains(&fault_prob) {
            return Err(Error::Domain(format!(
                "fault probability must lie in [0, 1/2), got {fault_prob}"
            )));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("eps must lie in [0, 1], got {eps}")));
        }
        if ideal.is_empty() {
            return Err(Error::Domain("ideal circuit has no gates to corrupt".into()));
        }
        if faults_per_circuit == 0 {
            return Err(Error::Domain("faults_per_circuit must be at least 1".into()));
        }
        let model = FactoryModel {
            ideal,
            fault_prob,
            eps,
            sampler,
            faults_per_circuit,
        };
        let u = circuit_unitary(&model.ideal, cfg)?;
        for i in 0..FACTORY_VALIDATION_SAMPLES {
            let faulty = model.faulty_copy(&mut rng::child(validation_seed, &[u64::MAX, i]))?;
            let d = worst_distance(&u, &circuit_unitary(&faulty, cfg)?, cfg)?;
            if d < eps - 1e-9 {
                return Err(Error::Domain(format!(
                    "fault sampler produced a circuit at worst-case distance {d} < eps = {eps}"
                )));
            }
        }
        Ok(model)
    }

    pub fn ideal(&self) -> &Circuit {
        &self.ideal
    }

    pub fn fault_prob(&self) -> f64 {
        self.fault_prob
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn multi_fault(&self) -> bool {
        self.faults_per_circuit > 1
    }

    pub fn faulty_copy(&self, rng: &mut Rng) -> Result<Circuit> {
        let mut c = self.ideal.clone();
        for _ in 0..self.faults_per_circuit {
            let (position, gate) = self.sampler.sample(&self.ideal, rng);
            c = c.splice(position, [gate])?;
        }
        Ok(c)
    }

    /// One circuit off the line.
    pub fn produce(&self, rng: &mut Rng, cfg: &DenseConfig) -> Result<Candidate> {
        let faulty = Bernoulli::new(self.fault_prob).expect("validated").sample(rng);
        let circuit = if faulty {
            self.faulty_copy(rng)?
        } else {
            self.ideal.clone()
        };
        Candidate::new(circuit, faulty, cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductionSummary {
    pub fault_prob: f64,
    pub batch_size: usize,
    pub batches: u64,
    /// Fraction of produced circuits that were faulty.
    pub pre_rate: f64,
    /// Fraction of kept circuits that are faulty (0 if nothing was kept).
    pub post_rate: f64,
    pub tests_per_batch: u64,
    pub runs_per_pair: u64,
    /// `e^{−D(1/2‖f)·n}`.
    pub bound: f64,
    /// Fraction of batches in which more than half the circuits were faulty.
    pub majority_faulty_rate: f64,
    pub produced: u64,
    pub kept: u64,
    pub faulty_kept: u64,
    pub multi_fault: bool,
    pub seed: u64,
}

/// Runs `batches` batches through the line with a swap-test base and
/// `ceil(18 ln(1/delta))` runs per pair.
pub fn simulate_production(
    factory: &FactoryModel,
    batch_size: usize,
    batches: u64,
    delta: f64,
    seed: u64,
    cfg: &DenseConfig,
) -> Result<ProductionSummary> {
    let tester = MajorityTester::new(SwapTester, delta)?;
    simulate_production_with(factory, batch_size, batches, &tester, seed, cfg)
}

pub fn simulate_production_with<T: PairwiseTester>(
    factory: &FactoryModel,
    batch_size: usize,
    batches: u64,
    tester: &MajorityTester<T>,
    seed: u64,
    cfg: &DenseConfig,
) -> Result<ProductionSummary> {
    check_odd(batch_size)?;
    let test_seed = rng::split(seed, &[1]);
    let (mut produced, mut faulty, mut kept, mut faulty_kept, mut bad_batches) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let mut tests_per_batch = 0;
    for b in 0..batches {
        let mut r = rng::child(seed, &[0, b]);
        let batch = (0..batch_size)
            .map(|_| factory.produce(&mut r, cfg))
            .collect::<Result<Vec<_>>>()?;
        let n_faulty = batch.iter().filter(|c| c.faulty).count();
        if n_faulty > batch_size / 2 {
            bad_batches += 1;
        }
        let result = winnow_batch(&batch, tester, test_seed, b)?;
        tests_per_batch = result.tests_run;
        produced += batch_size as u64;
        faulty += n_faulty as u64;
        kept += result.kept.len() as u64;
        faulty_kept += result.kept.iter().filter(|&&i| batch[i].faulty).count() as u64;
    }
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(ProductionSummary {
        fault_prob: factory.fault_prob(),
        batch_size,
        batches,
        pre_rate: ratio(faulty, produced),
        post_rate: ratio(faulty_kept, kept),
        tests_per_batch,
        runs_per_pair: tester.runs(),
        bound: batch_failure_bound(factory.fault_prob(), batch_size)?,
        majority_faulty_rate: ratio(bad_batches, batches),
        produced,
        kept,
        faulty_kept,
        multi_fault: factory.multi_fault(),
        seed,
    })
}
