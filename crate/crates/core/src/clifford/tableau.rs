use crate::circuit::Circuit;
use crate::error::{Error, Result};

use super::bitmatrix::BitMatrix;
use super::pauli::{Letter, PauliString};

/// A Clifford unitary `U` stored as the signed images `U X_j U†` (row `j`)
/// and `U Z_j U†` (row `n + j`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    images: Vec<PauliString>,
}

fn check_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

impl CliffordTableau {
    pub fn identity(n: usize) -> CliffordTableau {
        let images = (0..n)
            .map(|j| PauliString::single(n, j, Letter::X))
            .chain((0..n).map(|j| PauliString::single(n, j, Letter::Z)))
            .collect();
        CliffordTableau { n, images }
    }

    pub fn from_circuit(circuit: &Circuit) -> Result<CliffordTableau> {
        let mut t = CliffordTableau::identity(circuit.n_qubits());
        for gate in circuit.gates() {
            t.images.iter_mut().try_for_each(|img| img.conjugate_by_gate(gate))?;
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn image_x(&self, j: usize) -> &PauliString {
        &self.images[j]
    }

    pub fn image_z(&self, j: usize) -> &PauliString {
        &self.images[self.n + j]
    }

    /// All `2n` images, X images first.
    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        *self == CliffordTableau::identity(self.n)
    }

    /// `U p U†`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        check_n(self.n, p.n_qubits())?;
        // p = i^k ∏_j X_j^{x_j} Z_j^{z_j}, so U p U† = i^k ∏_j img(X_j)^{x_j} img(Z_j)^{z_j}
        let mut out = PauliString::identity(self.n);
        for j in 0..self.n {
            if p.x(j) {
                out.mul_assign_unchecked(&self.images[j]);
            }
            if p.z(j) {
                out.mul_assign_unchecked(&self.images[self.n + j]);
            }
        }
        out.add_phase(p.phase());
        Ok(out)
    }

    /// Conjugation by `A · B`, i.e. `b` applied first.
    pub fn compose(a: &CliffordTableau, b: &CliffordTableau) -> Result<CliffordTableau> {
        check_n(a.n, b.n)?;
        let images = b.images.iter().map(|img| a.conjugate(img)).collect::<Result<_>>()?;
        Ok(CliffordTableau { n: a.n, images })
    }

    /// The `2n × 2n` matrix `M_U` over F2: column `g` holds the `(x | z)`
    /// bits of the image of generator `g`, so `M_U (x|z)ᵀ` gives the letters
    /// of `U P U†`.
    pub fn symplectic_matrix(&self) -> BitMatrix {
        let n = self.n;
        let mut m = BitMatrix::zeros(2 * n, 2 * n);
        for (g, img) in self.images.iter().enumerate() {
            for q in 0..n {
                m.set(q, g, img.x(q));
                m.set(n + q, g, img.z(q));
            }
        }
        m
    }

    /// Tableau of `U†`, from the images alone.
    ///
    /// `U† X_k U` has an X on qubit `j` iff it anticommutes with `Z_j`, i.e.
    /// iff `X_k` anticommutes with `U Z_j U†`; likewise for the other bits.
    /// Signs are fixed by conjugating the candidate forward again.
    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        let mut images = Vec::with_capacity(2 * n);
        for g in 0..2 * n {
            let (k, is_x) = (g % n, g < n);
            // X_k anticommutes with P iff z_k(P); Z_k iff x_k(P)
            let hit = |p: &PauliString| if is_x { p.z(k) } else { p.x(k) };
            let letters: Vec<Letter> = (0..n)
                .map(|j| Letter::from_bits(hit(&self.images[n + j]), hit(&self.images[j])))
                .collect();
            let candidate = PauliString::from_letters(&letters);
            let forward = self.conjugate(&candidate).expect("same width");
            images.push(if forward.sign() == 1 {
                candidate
            } else {
                candidate.negated()
            });
        }
        CliffordTableau { n, images }
    }

    /// Images satisfy the generators' commutation relations.
    pub fn preserves_commutation(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|a| {
            (a + 1..2 * n).all(|b| {
                let generators_commute = !(b == a + n && a < n);
                self.images[a].commutes_with(&self.images[b]) == generators_commute
            })
        })
    }
}

pub fn tableau_from_circuit(circuit: &Circuit) -> Result<CliffordTableau> {
    CliffordTableau::from_circuit(circuit)
}

pub fn conjugate_pauli(t: &CliffordTableau, p: &PauliString) -> Result<PauliString> {
    t.conjugate(p)
}

pub fn tableau_compose(a: &CliffordTableau, b: &CliffordTableau) -> Result<CliffordTableau> {
    CliffordTableau::compose(a, b)
}

/// Tableau of `U†`, built by walking the reversed, daggered circuit.
pub fn tableau_dagger(circuit: &Circuit) -> Result<CliffordTableau> {
    CliffordTableau::from_circuit(&circuit.dagger())
}

/// Equal images, signs included.
pub fn tableau_equal(a: &CliffordTableau, b: &CliffordTableau) -> bool {
    a == b
}

pub fn symplectic_matrix(t: &CliffordTableau) -> BitMatrix {
    t.symplectic_matrix()
}

/// Rank of `M_a − M_b` over F2. A uniformly random Pauli has different
/// letters under the two conjugations with probability `1 − 2^{−rank}`.
pub fn symplectic_rank_diff(a: &CliffordTableau, b: &CliffordTableau) -> Result<usize> {
    check_n(a.n, b.n)?;
    Ok(a.symplectic_matrix().add(&b.symplectic_matrix()).rank())
}

pub fn differing_fraction(rank: usize) -> f64 {
    1.0 - 0.5f64.powi(rank as i32)
}

/// The sign-`+` Pauli `R` with `A P A† = R B P B† R†` for every Pauli `P`,
/// or `None` when the two tableaux differ in their letters.
pub fn pauli_correction(a: &CliffordTableau, b: &CliffordTableau) -> Result<Option<PauliString>> {
    check_n(a.n, b.n)?;
    let n = a.n;
    if a.images.iter().zip(&b.images).any(|(p, q)| !p.same_letters(q)) {
        return Ok(None);
    }
    // R must anticommute with B X_j B† exactly when the signs differ, i.e.
    // R' = B† R B anticommutes with X_j (needs Z on j) or with Z_j (needs X on j).
    let mut r_prime = PauliString::identity(n);
    for j in 0..n {
        let flip_x = a.images[j] != b.images[j];
        let flip_z = a.images[n + j] != b.images[n + j];
        r_prime.set_letter(j, Letter::from_bits(flip_z, flip_x));
    }
    Ok(Some(b.conjugate(&r_prime)?.with_sign(1)))
}
