//! Plain-text circuit files.
//!
//! ```text
//! # comment
//! QUBITS 3
//! H 0
//! CNOT 0 2
//! CUSTOM 1 1
//! 0,0 1,0
//! 1,0 0,0
//! ```
//!
//! One gate per line. A `CUSTOM k q0 … q(k-1)` header is followed by `2^k`
//! matrix rows of `2^k` space-separated `re,im` entries. [`emit`] writes the
//! canonical form (upper-case names, single spaces, shortest round-trip
//! floats), and `parse(emit(c)) == c` bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind, Matrix};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a qubit index, got `{tok}`")))
}

fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| parse_err(line, format!("expected `re,im`, got `{tok}`")))?;
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| parse_err(line, format!("bad number `{s}`")))
    };
    Ok(Complex64::new(num(re)?, num(im)?))
}

// Gate construction errors carry no line; attach one, except for the
// unitarity check which callers match on directly.
fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::NonUnitaryCustomGate { .. } => e,
        other => parse_err(line, other.to_string()),
    }
}

pub fn parse(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first, header) = lines.next().ok_or_else(|| parse_err(1, "missing `QUBITS n` header"))?;
    let n_qubits = match header.split_whitespace().collect::<Vec<_>>()[..] {
        [kw, n] if kw.eq_ignore_ascii_case("QUBITS") => n
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| parse_err(first, format!("bad qubit count `{n}`")))?,
        _ => return Err(parse_err(first, "expected `QUBITS n` header")),
    };

    let mut circuit = Circuit::new(n_qubits);
    while let Some((line, content)) = lines.next() {
        let mut toks = content.split_whitespace();
        let name = toks.next().expect("non-empty line");
        let kind = GateKind::from_name(name).ok_or_else(|| Error::UnknownGate {
            line,
            name: name.to_string(),
        })?;
        let rest: Vec<&str> = toks.collect();
        let gate = if kind == GateKind::Custom {
            let (k, qubits) = rest
                .split_first()
                .ok_or_else(|| parse_err(line, "CUSTOM needs a qubit count"))?;
            let k = parse_index(k, line)?;
            if k == 0 || k > 16 || qubits.len() != k {
                return Err(parse_err(line, format!("CUSTOM {k} needs exactly {k} qubit indices")));
            }
            let targets = qubits
                .iter()
                .map(|t| parse_index(t, line))
                .collect::<Result<Vec<_>>>()?;
            let dim = 1usize << k;
            let mut entries = Vec::with_capacity(dim * dim);
            for row in 0..dim {
                let (row_line, row_text) = lines
                    .next()
                    .ok_or_else(|| parse_err(line, format!("CUSTOM matrix ends after {row} of {dim} rows")))?;
                let row_entries = row_text
                    .split_whitespace()
                    .map(|t| parse_entry(t, row_line))
                    .collect::<Result<Vec<_>>>()?;
                if row_entries.len() != dim {
                    return Err(parse_err(
                        row_line,
                        format!("matrix row has {} entries, expected {dim}", row_entries.len()),
                    ));
                }
                entries.extend(row_entries);
            }
            Gate::custom(targets, Matrix::from_row_slice(dim, dim, &entries)).map_err(at_line(line))?
        } else {
            let targets = rest.iter().map(|t| parse_index(t, line)).collect::<Result<Vec<_>>>()?;
            Gate::new(kind, targets).map_err(at_line(line))?
        };
        circuit.push(gate).map_err(at_line(line))?;
    }
    Ok(circuit)
}

/// Canonical text for `circuit`.
pub fn emit(circuit: &Circuit) -> String {
    let mut out = format!("QUBITS {}\n", circuit.n_qubits());
    for gate in circuit.gates() {
        writeln!(out, "{gate}").unwrap();
        if let Some(m) = gate.custom_matrix() {
            for r in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|c| format!("{:?},{:?}", m[(r, c)].re, m[(r, c)].im))
                    .collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
    }
    out
}

pub fn parse_circuit_file(path: impl AsRef<Path>) -> Result<Circuit> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text)
}

pub fn write_circuit_file(path: impl AsRef<Path>, circuit: &Circuit) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, emit(circuit)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
