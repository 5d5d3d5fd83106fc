//! Lightweight equality testing for quantum circuits.
//!
//! Given a known circuit `U` and a black box `Ũ` that can only be run, the
//! tests here decide whether `Ũ = U` up to global phase:
//!
//! - [`metrics`] computes exact average-case and worst-case distances.
//! - [`protocols`] samples the swap, conditional, and inverse tests.
//! - [`pipeline`] winnows batches of possibly faulty copies.
//! - [`clifford`] and [`clifford_test`] test Clifford circuits at hundreds of
//!   qubits with single-qubit Pauli preparations and measurements.
//!
//! ```
//! use qverify::circuit::{Circuit, Gate};
//! use qverify::dense::DenseConfig;
//! use qverify::protocols::{run_swap_test, BlackBoxUnitary, Verdict};
//!
//! # fn main() -> qverify::error::Result<()> {
//! let u = Circuit::from_gates(2, [Gate::h(0), Gate::cnot(0, 1)])?;
//! let ut = u.clone().with(Gate::t(1))?;
//! let out = run_swap_test(
//!     &BlackBoxUnitary::plain(u),
//!     &BlackBoxUnitary::plain(ut),
//!     1000,
//!     7,
//!     &DenseConfig::default(),
//! )?;
//! assert_eq!(out.verdict, Verdict::Different);
//! # Ok(())
//! # }
//! ```
//!
//! All randomness is seeded through [`rng`]; equal seeds give equal results.

pub mod circuit;
pub mod clifford;
pub mod clifford_test;
pub mod dense;
pub mod error;
pub mod format;
pub mod metrics;
pub mod numerical_range;
pub mod pipeline;
pub mod protocols;
pub mod rng;

// The guide's code blocks run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/distances.md")]
    mod distances {}
    #[doc = include_str!("../../../book/src/protocols.md")]
    mod protocols {}
    #[doc = include_str!("../../../book/src/production.md")]
    mod production {}
    #[doc = include_str!("../../../book/src/clifford.md")]
    mod clifford {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
