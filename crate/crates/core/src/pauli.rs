//! Exact algebra of N-qubit Pauli strings.
//!
//! A string `α ∈ {0,1,2,3}^N` names the tensor product `σ_{α_1} ⊗ … ⊗ σ_{α_N}` with
//! `σ_0 = 𝕀`. Qubit 1 is the leftmost tensor factor, i.e. the most significant bit of a
//! computational-basis index. Global phases are tracked as an exponent of `i` modulo 4.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_qubits, Error, Result};
use crate::limits::check_size;

/// Upper bound on generator families accepted by [`generate_group`].
pub const MAX_GENERATORS: usize = 20;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct PauliString {
    indices: Vec<u8>,
}

impl PauliString {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Argument("Pauli string must act on at least one qubit".into()));
        }
        if let Some(bad) = indices.iter().find(|&&i| i > 3) {
            return Err(Error::Argument(format!("Pauli index {bad} is outside 0..=3")));
        }
        Ok(Self { indices })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { indices: vec![0; n_qubits] }
    }

    /// `σ_pauli` on `site` (0-based), identity elsewhere.
    pub fn single(n_qubits: usize, site: usize, pauli: u8) -> Self {
        let mut indices = vec![0; n_qubits];
        indices[site] = pauli;
        Self { indices }
    }

    pub fn n_qubits(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn is_identity(&self) -> bool {
        self.indices.iter().all(|&i| i == 0)
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.indices.iter().filter(|&&i| i != 0).count()
    }

    /// All `4^n` strings in lexicographic order.
    pub fn all(n_qubits: usize) -> impl Iterator<Item = PauliString> {
        let total = 1usize << (2 * n_qubits);
        (0..total).map(move |code| Self::from_code(n_qubits, code))
    }

    /// Inverse of [`PauliString::code`]: base-4 digits, qubit 1 most significant.
    pub fn from_code(n_qubits: usize, code: usize) -> Self {
        let indices = (0..n_qubits).map(|k| ((code >> (2 * (n_qubits - 1 - k))) & 3) as u8).collect();
        Self { indices }
    }

    pub fn code(&self) -> usize {
        self.indices.iter().fold(0, |acc, &i| (acc << 2) | i as usize)
    }

    pub(crate) fn action(&self) -> BitPauli {
        BitPauli::from_indices(&self.indices)
    }
}

impl TryFrom<Vec<u8>> for PauliString {
    type Error = Error;

    fn try_from(indices: Vec<u8>) -> Result<Self> {
        Self::new(indices)
    }
}

impl From<PauliString> for Vec<u8> {
    fn from(p: PauliString) -> Self {
        p.indices
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &i in &self.indices {
            f.write_str(["I", "X", "Y", "Z"][i as usize])?;
        }
        Ok(())
    }
}

/// A fourth root of unity `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// A Pauli string with a global phase. Conjugation by it ignores the phase.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub string: PauliString,
    pub phase: Phase,
}

impl PhasedPauli {
    pub fn new(string: PauliString, phase: Phase) -> Self {
        Self { string, phase }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(PauliString::identity(n_qubits), Phase::ONE)
    }
}

impl From<PauliString> for PhasedPauli {
    fn from(string: PauliString) -> Self {
        Self::new(string, Phase::ONE)
    }
}

/// `σ_a σ_b = phase · σ_c` on a single site.
fn site_product(a: u8, b: u8) -> (u8, Phase) {
    match (a, b) {
        (0, x) | (x, 0) => (x, Phase::ONE),
        (x, y) if x == y => (0, Phase::ONE),
        (1, 2) | (2, 3) | (3, 1) => (6 - a - b, Phase::I),
        _ => (6 - a - b, Phase::MINUS_I),
    }
}

/// Sitewise product `a · b` with the accumulated global phase.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PhasedPauli> {
    check_qubits(a.n_qubits(), b.n_qubits())?;
    let mut phase = Phase::ONE;
    let indices = a
        .indices
        .iter()
        .zip(&b.indices)
        .map(|(&x, &y)| {
            let (c, p) = site_product(x, y);
            phase = phase * p;
            c
        })
        .collect();
    Ok(PhasedPauli::new(PauliString { indices }, phase))
}

/// Product of two phased strings, `a · b`.
pub fn multiply_phased(a: &PhasedPauli, b: &PhasedPauli) -> Result<PhasedPauli> {
    let mut out = multiply(&a.string, &b.string)?;
    out.phase = out.phase * a.phase * b.phase;
    Ok(out)
}

/// True iff the number of sites where both factors are non-identity and differ is even.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    check_qubits(a.n_qubits(), b.n_qubits())?;
    let clashes = a.indices.iter().zip(&b.indices).filter(|(&x, &y)| x != 0 && y != 0 && x != y).count();
    Ok(clashes % 2 == 0)
}

pub(crate) fn single_qubit_pauli(index: u8) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match index {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

/// Dense `2^N × 2^N` realization via Kronecker products of the single-qubit factors.
pub fn dense_matrix(p: &PhasedPauli) -> Result<DMatrix<Complex64>> {
    check_size(p.string.n_qubits())?;
    let mut acc = DMatrix::from_element(1, 1, p.phase.to_complex());
    for &index in p.string.indices() {
        let s = single_qubit_pauli(index);
        let factor = DMatrix::from_fn(2, 2, |r, c| s[r][c]);
        acc = acc.kronecker(&factor);
    }
    Ok(acc)
}

/// The `2^n` subset products of `generators`, layered by subset size.
///
/// Layer `k` lists the products `P_{i_k} ⋯ P_{i_1}` over `i_1 < … < i_k` in lexicographic
/// order of the index tuples. Underlying strings need not be distinct. An empty family
/// yields `{𝕀}`.
pub fn generate_group(n_qubits: usize, generators: &[PauliString]) -> Result<Vec<PhasedPauli>> {
    let n = generators.len();
    if n > MAX_GENERATORS {
        return Err(Error::Argument(format!("{n} generators exceeds the limit of {MAX_GENERATORS}")));
    }
    for g in generators {
        check_qubits(n_qubits, g.n_qubits())?;
    }
    let mut out = Vec::with_capacity(1 << n);
    out.push(PhasedPauli::identity(n_qubits));
    for k in 1..=n {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let mut acc = PhasedPauli::identity(n_qubits);
            for &i in &subset {
                acc = multiply_phased(&generators[i].clone().into(), &acc)?;
            }
            out.push(acc);
            // advance to the next k-subset in lexicographic order
            let Some(pos) = (0..k).rev().find(|&j| subset[j] < n - k + j) else {
                break;
            };
            subset[pos] += 1;
            for j in pos + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

/// Bit-level form of a Pauli string acting on computational-basis indices:
/// `P|c⟩ = ω(c) |c ⊕ x⟩` with `ω(c) = i^{#Y} (−1)^{popcount(c ∧ z)}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct BitPauli {
    pub x: usize,
    pub z: usize,
    pub y_count: u32,
}

impl BitPauli {
    pub fn from_indices(indices: &[u8]) -> Self {
        let n = indices.len();
        let (mut x, mut z, mut y_count) = (0usize, 0usize, 0u32);
        for (k, &i) in indices.iter().enumerate() {
            let bit = 1usize << (n - 1 - k);
            match i {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    y_count += 1;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        Self { x, z, y_count }
    }

    /// `ω(c)` as an exponent of `i`.
    #[inline]
    pub fn omega_exp(&self, c: usize) -> u32 {
        self.y_count + 2 * ((c & self.z).count_ones() & 1)
    }

    #[inline]
    pub fn omega(&self, c: usize) -> Complex64 {
        Phase::from_exponent(self.omega_exp(c)).to_complex()
    }

    /// Symplectic commutation test.
    #[inline]
    pub fn commutes_with(&self, other: &BitPauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }
}
