//! `qverify`: command-line front end.
//!
//! Exit status is 0 when the verdict is "equal", 1 when it is "different",
//! and 2 on usage or input errors. Commands without a verdict exit 0.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qverify::circuit::{Circuit, Gate};
use qverify::clifford::{single_qubit_cliffords, CliffordTableau};
use qverify::clifford_test::{
    entanglement_fidelity_clifford, equivalence_verdict_with, find_error, runs_for_confidence, CliffordBlackBox,
    IdentityFill, DETECTION_FLOOR,
};
use qverify::dense::{DenseConfig, DEFAULT_CAP};
use qverify::error::{Error, Result};
use qverify::format::{emit, parse_circuit_file, write_circuit_file};
use qverify::metrics::{check_worst_case_bound, detection_probabilities, unitaries, DistanceReport, WorstCaseBound};
use qverify::pipeline::{simulate_production, FactoryModel, FaultSampler};
use qverify::protocols::{
    repeat_until_confident, run_conditional_test, run_inverse_test, run_swap_test, BlackBoxUnitary, Capabilities,
    Tester, Verdict,
};

/// Distances below this count as "equal up to global phase".
const EQUAL_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "qverify", version, about = "Equality testing for quantum circuits")]
struct Cli {
    /// Seed for every random choice; drawn from OS entropy if unset.
    #[arg(long, global = true, env = "QVERIFY_SEED")]
    seed: Option<u64>,

    /// Largest qubit count for dense simulation.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,

    /// Print a versioned JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Pair {
    /// The known circuit.
    #[arg(long)]
    u: PathBuf,
    /// The circuit under test.
    #[arg(long)]
    ut: PathBuf,
}

#[derive(Args)]
struct Sampling {
    /// Fixed number of shots.
    #[arg(long, conflicts_with_all = ["eps", "delta"])]
    shots: Option<u64>,
    /// Worst-case distance to detect; with --delta, picks the shot count.
    #[arg(long, requires = "delta")]
    eps: Option<f64>,
    /// Allowed miss probability.
    #[arg(long, requires = "eps")]
    delta: Option<f64>,
    /// Qubits touched by the differing gate.
    #[arg(long, default_value_t = 1)]
    k: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fill {
    TPlus,
    SixState,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distances and detection probabilities (dense).
    Distance(Pair),
    /// Swap test on the two Choi states.
    SwapTest {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Hadamard test with controlled applications of both circuits.
    ConditionalTest {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Runs the circuit under test, then the inverse of the known one.
    InverseTest {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Simulates faulty production and pairwise winnowing.
    ProductionLine {
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        fault_prob: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 11)]
        batch: usize,
        #[arg(long, default_value_t = 1000)]
        batches: u64,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
    },
    /// Randomized Pauli test for Clifford circuits.
    CliffordTest {
        #[command(flatten)]
        pair: Pair,
        /// Number of runs.
        #[arg(long, conflicts_with = "delta")]
        runs: Option<u64>,
        /// Miss probability, assuming per-run detection of at least 1/4.
        #[arg(long)]
        delta: Option<f64>,
        /// Input on qubits where the pulled-back Pauli is the identity.
        #[arg(long, value_enum, default_value_t = Fill::TPlus)]
        fill: Fill,
    },
    /// Searches nearby Clifford circuits for one matching the circuit under test.
    FindError {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 40)]
        runs_per_candidate: u64,
        /// Write the recovered circuit here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement fidelity of distinct Clifford circuits.
    FidelityBound {
        /// Enumerate all distinct pairs of one-qubit Cliffords.
        #[arg(long, conflicts_with_all = ["u", "ut"])]
        exhaustive: bool,
        /// Qubit count for --exhaustive (only 1 is supported).
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, requires = "ut")]
        u: Option<PathBuf>,
        #[arg(long, requires = "u")]
        ut: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct DistanceOutput {
    n_qubits: usize,
    #[serde(flatten)]
    distances: DistanceReport,
    worst_case_bound: WorstCaseBound,
    verdict: Verdict,
}

#[derive(Serialize)]
struct FoundOutput {
    #[serde(flatten)]
    found: qverify::clifford_test::FoundCircuit,
    circuit: String,
}

#[derive(Serialize)]
struct FidelityOutput {
    pairs: u64,
    max_fidelity: f64,
    /// `S ⊗ I^{n-1}` against the identity.
    tight_example: Option<f64>,
}

fn load_pair(pair: &Pair) -> Result<(Circuit, Circuit)> {
    let u = parse_circuit_file(&pair.u)?;
    let ut = parse_circuit_file(&pair.ut)?;
    if u.n_qubits() != ut.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: u.n_qubits(),
            right: ut.n_qubits(),
        });
    }
    Ok((u, ut))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Equal => 0,
        Verdict::Different => 1,
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    }
}

#[derive(Clone, Copy)]
enum Which {
    Swap,
    Conditional,
    Inverse,
}

fn protocol(which: Which, pair: &Pair, sampling: &Sampling, seed: u64, cfg: &DenseConfig, out: &Out) -> Result<u8> {
    let (u, ut) = load_pair(pair)?;
    let bu = BlackBoxUnitary::new(u.clone(), Capabilities::ALL);
    let but = BlackBoxUnitary::new(ut, Capabilities::ALL);
    let tester = match which {
        Which::Swap => Tester::Swap(&bu, &but),
        Which::Conditional => Tester::Conditional(&bu, &but),
        Which::Inverse => Tester::Inverse(&u, &but),
    };
    if let (Some(eps), Some(delta)) = (sampling.eps, sampling.delta) {
        let v = repeat_until_confident(tester, eps, delta, sampling.k, seed, cfg)?;
        out.emit(seed, &v)?;
        return Ok(verdict_code(v.verdict));
    }
    let shots = sampling.shots.unwrap_or(1000);
    let o = match which {
        Which::Swap => run_swap_test(&bu, &but, shots, seed, cfg)?,
        Which::Conditional => run_conditional_test(&bu, &but, shots, seed, cfg)?,
        Which::Inverse => run_inverse_test(&u, &but, shots, seed, cfg)?,
    };
    out.emit(seed, &o)?;
    Ok(verdict_code(o.verdict))
}

struct Out<'a> {
    command: &'a str,
    json: bool,
}

impl Out<'_> {
    fn emit<T: Serialize>(&self, seed: u64, report: &T) -> Result<()> {
        report::emit(self.command, seed, report, self.json).map_err(io_err)
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Distance(_) => "distance",
        Command::SwapTest { .. } => "swap-test",
        Command::ConditionalTest { .. } => "conditional-test",
        Command::InverseTest { .. } => "inverse-test",
        Command::ProductionLine { .. } => "production-line",
        Command::CliffordTest { .. } => "clifford-test",
        Command::FindError { .. } => "find-error",
        Command::FidelityBound { .. } => "fidelity-bound",
    }
}

fn dispatch(cli: &Cli, seed: u64) -> Result<u8> {
    let cfg = DenseConfig::with_cap(cli.cap);
    let out = Out {
        command: command_name(&cli.command),
        json: cli.json,
    };
    match &cli.command {
        Command::Distance(pair) => {
            let (u, ut) = load_pair(pair)?;
            let (mu, mut_) = unitaries(&u, &ut, &cfg)?;
            let distances = detection_probabilities(&mu, &mut_, &cfg)?;
            let verdict = if distances.worst_distance <= EQUAL_TOL {
                Verdict::Equal
            } else {
                Verdict::Different
            };
            out.emit(
                seed,
                &DistanceOutput {
                    n_qubits: u.n_qubits(),
                    distances,
                    worst_case_bound: check_worst_case_bound(&mu, &mut_, &cfg)?,
                    verdict,
                },
            )?;
            Ok(verdict_code(verdict))
        }
        Command::SwapTest { pair, sampling } => protocol(Which::Swap, pair, sampling, seed, &cfg, &out),
        Command::ConditionalTest { pair, sampling } => protocol(Which::Conditional, pair, sampling, seed, &cfg, &out),
        Command::InverseTest { pair, sampling } => protocol(Which::Inverse, pair, sampling, seed, &cfg, &out),
        Command::ProductionLine {
            ideal,
            fault_prob,
            eps,
            batch,
            batches,
            delta,
        } => {
            let ideal = parse_circuit_file(ideal)?;
            let factory = FactoryModel::new(ideal, *fault_prob, *eps, FaultSampler::Pauli, &cfg)?;
            let summary = simulate_production(&factory, *batch, *batches, *delta, seed, &cfg)?;
            out.emit(seed, &summary)?;
            Ok(0)
        }
        Command::CliffordTest {
            pair,
            runs,
            delta,
            fill,
        } => {
            let (u, ut) = load_pair(pair)?;
            let runs = match (runs, delta) {
                (Some(r), _) => *r,
                (None, Some(d)) => runs_for_confidence(*d, DETECTION_FLOOR)?.max(1),
                (None, None) => 60,
            };
            let fill = match fill {
                Fill::TPlus => IdentityFill::TPlus,
                Fill::SixState => IdentityFill::SixStateMixture,
            };
            let report = equivalence_verdict_with(&u, &CliffordBlackBox::new(ut)?, runs, fill, seed)?;
            out.emit(seed, &report)?;
            Ok(verdict_code(report.verdict))
        }
        Command::FindError {
            pair,
            depth,
            runs_per_candidate,
            out: path,
        } => {
            let (u, ut) = load_pair(pair)?;
            let found = find_error(&u, &CliffordBlackBox::new(ut)?, *depth, *runs_per_candidate, seed)?;
            if let Some(path) = path {
                write_circuit_file(path, &found.circuit)?;
            }
            let code = if found.distance == 0 { 0 } else { 1 };
            let circuit = emit(&found.circuit);
            out.emit(seed, &FoundOutput { found, circuit })?;
            Ok(code)
        }
        Command::FidelityBound { exhaustive, n, u, ut } => {
            let report = if *exhaustive {
                if *n != 1 {
                    return Err(Error::Domain(format!(
                        "exhaustive enumeration supports n = 1 only, got {n}"
                    )));
                }
                let group = single_qubit_cliffords()
                    .iter()
                    .map(CliffordTableau::from_circuit)
                    .collect::<Result<Vec<_>>>()?;
                let (mut pairs, mut max_fidelity) = (0, 0f64);
                for (i, a) in group.iter().enumerate() {
                    for b in group.iter().skip(i + 1) {
                        pairs += 2;
                        max_fidelity = max_fidelity
                            .max(entanglement_fidelity_clifford(a, b)?)
                            .max(entanglement_fidelity_clifford(b, a)?);
                    }
                }
                let s = CliffordTableau::from_circuit(&Circuit::from_gates(2, [Gate::s(0)])?)?;
                FidelityOutput {
                    pairs,
                    max_fidelity,
                    tight_example: Some(entanglement_fidelity_clifford(&CliffordTableau::identity(2), &s)?),
                }
            } else {
                let (Some(u), Some(ut)) = (u, ut) else {
                    return Err(Error::Domain("pass --exhaustive or both --u and --ut".into()));
                };
                let (u, ut) = load_pair(&Pair {
                    u: u.clone(),
                    ut: ut.clone(),
                })?;
                let f = entanglement_fidelity_clifford(
                    &CliffordTableau::from_circuit(&u)?,
                    &CliffordTableau::from_circuit(&ut)?,
                )?;
                FidelityOutput {
                    pairs: 1,
                    max_fidelity: f,
                    tight_example: None,
                }
            };
            out.emit(seed, &report)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or_else(rand::random);
    match dispatch(&cli, seed) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
