//! Dense N-qubit density matrices and their correlation-tensor (Bloch) view.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_qubits, Error, Result};
use crate::limits::check_size;
use crate::pauli::{BitPauli, PauliString};

/// Maximum elementwise deviation from Hermiticity accepted for a state.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Maximum deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-9;
/// Largest imaginary part tolerated in `Tr(ρ P_α)`.
pub const IMAG_TOL: f64 = 1e-10;
/// Unitarity tolerance for local factors.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before accepting `matrix`.
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Argument("a state needs at least one qubit".into()));
        }
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "{n_qubits} qubits need a {dim}x{dim} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("matrix has non-finite entries".into()));
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max deviation {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let state = Self { n_qubits, matrix };
        let min = state.min_eigenvalue();
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!("not positive semidefinite (minimum eigenvalue {min:e})")));
        }
        Ok(state)
    }

    /// For outputs of maps known to preserve validity (unitary conjugation, convex mixing).
    pub(crate) fn from_trusted(n_qubits: usize, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let m = DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self::from_trusted(n_qubits, m))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `p·self + (1−p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Argument(format!("mixing weight {p} is outside [0, 1]")));
        }
        let m = &self.matrix * Complex64::new(p, 0.0) + &other.matrix * Complex64::new(1.0 - p, 0.0);
        Ok(Self::from_trusted(self.n_qubits, m))
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn correlation(&self, alpha: &PauliString) -> Result<f64> {
        correlation(self, alpha)
    }

    pub fn to_bloch(&self) -> CorrelationTensor {
        to_bloch(self)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// `Tr(ρ P)` without forming `P`: `Σ_c ρ[c, c⊕x] ω(c)`.
pub(crate) fn trace_with_pauli(m: &DMatrix<Complex64>, p: &BitPauli) -> Complex64 {
    (0..m.nrows()).map(|c| m[(c, c ^ p.x)] * p.omega(c)).sum()
}

/// `P m P†` via the permutation-with-phases structure of a Pauli string.
pub(crate) fn conjugate_by_pauli(m: &DMatrix<Complex64>, p: &BitPauli) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let omega: Vec<Complex64> = (0..dim).map(|c| p.omega(c)).collect();
    DMatrix::from_fn(dim, dim, |a, b| {
        let (sa, sb) = (a ^ p.x, b ^ p.x);
        omega[sa] * m[(sa, sb)] * omega[sb].conj()
    })
}

/// `T_α = Re Tr(ρ P_α)`; a non-negligible imaginary part means the input was not Hermitian.
pub fn correlation(rho: &DensityMatrix, alpha: &PauliString) -> Result<f64> {
    check_qubits(rho.n_qubits, alpha.n_qubits())?;
    let t = trace_with_pauli(&rho.matrix, &alpha.action());
    if t.im.abs() > IMAG_TOL {
        return Err(Error::InvalidState(format!("Tr(rho P_{alpha}) has imaginary part {:e}", t.im)));
    }
    Ok(t.re)
}

/// Real coefficients of a state in the Pauli-string basis.
///
/// Omitted strings are zero. The all-zero string is always present with value 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTensor {
    n_qubits: usize,
    values: BTreeMap<PauliString, f64>,
}

impl CorrelationTensor {
    /// Builds a tensor, inserting `T_0 = 1` when absent.
    pub fn new(n_qubits: usize, values: BTreeMap<PauliString, f64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Argument("a tensor needs at least one qubit".into()));
        }
        let mut values = values;
        for (alpha, &v) in &values {
            check_qubits(n_qubits, alpha.n_qubits())?;
            if !v.is_finite() {
                return Err(Error::Argument(format!("T_{alpha} is not finite")));
            }
            if v.abs() > 1.0 + 1e-9 {
                return Err(Error::Argument(format!("|T_{alpha}| = {} exceeds 1", v.abs())));
            }
        }
        let id = PauliString::identity(n_qubits);
        match values.get(&id) {
            None => {
                values.insert(id, 1.0);
            }
            Some(&v) if (v - 1.0).abs() > TRACE_TOL => {
                return Err(Error::Argument(format!("T at the identity string is {v}, not 1")));
            }
            Some(_) => {}
        }
        Ok(Self { n_qubits, values })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn get(&self, alpha: &PauliString) -> f64 {
        self.values.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.values.iter().map(|(k, &v)| (k, v))
    }

    /// Entries with `|T_α| > threshold`.
    pub fn support(&self, threshold: f64) -> impl Iterator<Item = (&PauliString, f64)> {
        self.iter().filter(move |(_, v)| v.abs() > threshold)
    }

    /// Largest `|T_α − S_α|` over the union of both supports.
    pub fn max_deviation(&self, other: &CorrelationTensor) -> f64 {
        self.values.keys().chain(other.values.keys()).map(|k| (self.get(k) - other.get(k)).abs()).fold(0.0, f64::max)
    }
}

/// `ρ = 2^{−N} Σ_α T_α P_α`; the result is checked for positivity.
pub fn from_bloch(t: &CorrelationTensor) -> Result<DensityMatrix> {
    let n = t.n_qubits;
    check_size(n)?;
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for (alpha, value) in t.iter() {
        if value == 0.0 {
            continue;
        }
        let p = alpha.action();
        for c in 0..dim {
            m[(c ^ p.x, c)] += p.omega(c) * (value * scale);
        }
    }
    let state = DensityMatrix::from_trusted(n, m);
    let min = state.min_eigenvalue();
    if min < PSD_TOL {
        return Err(Error::UnphysicalTensor { min_eigenvalue: min });
    }
    Ok(state)
}

/// Every one of the `4^N` coefficients of `rho`.
pub fn to_bloch(rho: &DensityMatrix) -> CorrelationTensor {
    let values = PauliString::all(rho.n_qubits)
        .map(|alpha| {
            let v = trace_with_pauli(&rho.matrix, &alpha.action()).re;
            (alpha, v)
        })
        .collect();
    CorrelationTensor { n_qubits: rho.n_qubits, values }
}

/// Projector onto `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::Argument(format!("GHZ state needs at least 2 qubits, got {n}")));
    }
    check_size(n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    let half = Complex64::new(0.5, 0.0);
    for &(r, c) in &[(0, 0), (0, dim - 1), (dim - 1, 0), (dim - 1, dim - 1)] {
        m[(r, c)] = half;
    }
    Ok(DensityMatrix::from_trusted(n, m))
}

pub(crate) fn unitarity_deviation(u: &Matrix2<Complex64>) -> f64 {
    let prod = u * u.adjoint();
    (prod - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Left-multiplies qubit `site` of `m` by `u` and right-multiplies by `u†`.
pub(crate) fn conjugate_qubit(m: &mut DMatrix<Complex64>, n_qubits: usize, site: usize, u: &Matrix2<Complex64>) {
    let dim = m.nrows();
    let bit = 1usize << (n_qubits - 1 - site);
    for col in 0..dim {
        for a0 in (0..dim).filter(|a| a & bit == 0) {
            let a1 = a0 | bit;
            let (x0, x1) = (m[(a0, col)], m[(a1, col)]);
            m[(a0, col)] = u[(0, 0)] * x0 + u[(0, 1)] * x1;
            m[(a1, col)] = u[(1, 0)] * x0 + u[(1, 1)] * x1;
        }
    }
    let (c00, c01, c10, c11) = (u[(0, 0)].conj(), u[(0, 1)].conj(), u[(1, 0)].conj(), u[(1, 1)].conj());
    for b0 in (0..dim).filter(|b| b & bit == 0) {
        let b1 = b0 | bit;
        for row in 0..dim {
            let (y0, y1) = (m[(row, b0)], m[(row, b1)]);
            m[(row, b0)] = y0 * c00 + y1 * c01;
            m[(row, b1)] = y0 * c10 + y1 * c11;
        }
    }
}

/// `(⊗_k U_k) ρ (⊗_k U_k)†`.
pub fn apply_local_unitary(rho: &DensityMatrix, unitaries: &[Matrix2<Complex64>]) -> Result<DensityMatrix> {
    if unitaries.len() != rho.n_qubits {
        return Err(Error::Argument(format!(
            "expected {} single-qubit unitaries, got {}",
            rho.n_qubits,
            unitaries.len()
        )));
    }
    for (k, u) in unitaries.iter().enumerate() {
        let dev = unitarity_deviation(u);
        if dev.is_nan() || dev > UNITARY_TOL {
            return Err(Error::Argument(format!("factor for qubit {} is not unitary (deviation {dev:e})", k + 1)));
        }
    }
    let mut m = rho.matrix.clone();
    for (k, u) in unitaries.iter().enumerate() {
        conjugate_qubit(&mut m, rho.n_qubits, k, u);
    }
    Ok(DensityMatrix::from_trusted(rho.n_qubits, m))
}

/// `G G† / Tr(G G†)` with `G` of i.i.d. complex standard normals, seeded.
pub fn random_state(n: usize, seed: u64) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::Argument("a state needs at least one qubit".into()));
    }
    check_size(n)?;
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    // exact Hermitian symmetrization removes rounding asymmetry
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DensityMatrix::from_trusted(n, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{dense_matrix, PhasedPauli};

    fn ps(v: &[u8]) -> PauliString {
        PauliString::new(v.to_vec()).unwrap()
    }

    /// `Tr(ρ P)` by explicit dense multiplication.
    fn dense_trace(rho: &DensityMatrix, alpha: &PauliString) -> Complex64 {
        let p = dense_matrix(&PhasedPauli::from(alpha.clone())).unwrap();
        (rho.matrix() * p).trace()
    }

    #[test]
    fn maximally_mixed_has_no_correlations() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        for alpha in PauliString::all(3).skip(1) {
            assert_eq!(correlation(&rho, &alpha).unwrap(), 0.0);
        }
        assert_eq!(correlation(&rho, &PauliString::identity(3)).unwrap(), 1.0);
    }

    #[test]
    fn ghz_correlations_match_dense_trace() {
        let g3 = ghz(3).unwrap();
        for (alpha, expected) in [(ps(&[3, 3, 0]), 1.0), (ps(&[2, 2, 2]), 0.0), (ps(&[1, 1, 2]), 0.0)] {
            let dense = dense_trace(&g3, &alpha);
            assert!((dense.re - expected).abs() < 1e-14);
            assert!((correlation(&g3, &alpha).unwrap() - expected).abs() < 1e-14);
        }
        let g2 = ghz(2).unwrap();
        assert!((correlation(&g2, &ps(&[3, 3])).unwrap() - 1.0).abs() < 1e-14);
        let g4 = ghz(4).unwrap();
        let alpha = ps(&[2, 2, 2, 2]);
        // Y^{⊗4}|0000⟩ = i^4 |1111⟩
        assert!((dense_trace(&g4, &alpha).re - 1.0).abs() < 1e-14);
        assert!((correlation(&g4, &alpha).unwrap() - 1.0).abs() < 1e-14);
        assert!((correlation(&ghz(6).unwrap(), &ps(&[2; 6])).unwrap() + 1.0).abs() < 1e-14);
        assert!(ghz(1).is_err());
    }

    #[test]
    fn ghz_is_rank_one() {
        let ev = ghz(3).unwrap().eigenvalues();
        assert!((ev[7] - 1.0).abs() < 1e-12);
        assert!(ev[..7].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(1, m.clone()).is_err());
        m[(1, 0)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(1, m).is_ok());
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(1, diag).is_err());
        let wrong_trace = DMatrix::identity(2, 2) * Complex64::new(0.6, 0.0);
        assert!(DensityMatrix::new(1, wrong_trace).is_err());
        assert!(DensityMatrix::new(2, DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn imaginary_trace_is_an_error() {
        let mut m = DMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.3);
        let rho = DensityMatrix::from_trusted(1, m);
        assert!(matches!(correlation(&rho, &ps(&[1])), Err(Error::InvalidState(_))));
    }

    #[test]
    fn from_bloch_examples() {
        let t = CorrelationTensor::new(3, BTreeMap::new()).unwrap();
        let rho = from_bloch(&t).unwrap();
        assert!(rho.max_abs_diff(&DensityMatrix::maximally_mixed(3).unwrap()) < 1e-15);

        let t = CorrelationTensor::new(3, BTreeMap::from([(ps(&[3, 3, 0]), 1.0)])).unwrap();
        let rho = from_bloch(&t).unwrap();
        assert!((correlation(&rho, &ps(&[3, 3, 0])).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unphysical_tensor_reports_min_eigenvalue() {
        let t = CorrelationTensor::new(
            3,
            BTreeMap::from([(ps(&[1, 1, 2]), 1.0), (ps(&[2, 2, 2]), 1.0), (ps(&[3, 3, 0]), 1.0)]),
        )
        .unwrap();
        match from_bloch(&t) {
            Err(Error::UnphysicalTensor { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.25).abs() < 1e-10, "{min_eigenvalue}")
            }
            other => panic!("expected unphysical tensor, got {other:?}"),
        }
    }

    #[test]
    fn tensor_validation() {
        assert!(CorrelationTensor::new(2, BTreeMap::from([(ps(&[1]), 0.5)])).is_err());
        assert!(CorrelationTensor::new(1, BTreeMap::from([(ps(&[1]), 1.5)])).is_err());
        assert!(CorrelationTensor::new(1, BTreeMap::from([(ps(&[0]), 0.5)])).is_err());
    }

    #[test]
    fn bloch_round_trip_random() {
        for seed in 0..5 {
            let rho = random_state(3, seed).unwrap();
            let t = to_bloch(&rho);
            let back = from_bloch(&t).unwrap();
            assert!(back.max_abs_diff(&rho) < 1e-14);
            assert!(to_bloch(&back).max_deviation(&t) < 1e-12);
            assert!((t.get(&PauliString::identity(3)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_state_is_valid_and_deterministic() {
        let a = random_state(4, 17).unwrap();
        let b = random_state(4, 17).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_state(4, 18).unwrap());
        let checked = DensityMatrix::new(4, a.matrix().clone()).unwrap();
        let ev = checked.eigenvalues();
        assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ev[0] > 0.0);
    }

    #[test]
    fn local_unitaries_preserve_spectrum() {
        let rho = random_state(3, 5).unwrap();
        let id = vec![Matrix2::identity(); 3];
        assert!(apply_local_unitary(&rho, &id).unwrap().max_abs_diff(&rho) < 1e-15);

        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let had = Matrix2::new(h, h, h, -h);
        let s = Matrix2::new(Complex64::new(1.0, 0.0), ZERO, ZERO, Complex64::new(0.0, 1.0));
        let out = apply_local_unitary(&rho, &[had, s, had * s]).unwrap();
        let (ea, eb) = (rho.eigenvalues(), out.eigenvalues());
        assert!(ea.iter().zip(&eb).all(|(x, y)| (x - y).abs() < 1e-10));

        // dense Kronecker oracle
        let big = DMatrix::from_fn(2, 2, |r, c| had[(r, c)])
            .kronecker(&DMatrix::from_fn(2, 2, |r, c| s[(r, c)]))
            .kronecker(&DMatrix::from_fn(2, 2, |r, c| (had * s)[(r, c)]));
        let expected = &big * rho.matrix() * big.adjoint();
        assert!(max_abs_diff(&expected, out.matrix()) < 1e-14);
    }

    #[test]
    fn non_unitary_factor_rejected() {
        let rho = random_state(2, 1).unwrap();
        let bad = Matrix2::new(Complex64::new(2.0, 0.0), ZERO, ZERO, Complex64::new(1.0, 0.0));
        assert!(apply_local_unitary(&rho, &[bad, Matrix2::identity()]).is_err());
        assert!(apply_local_unitary(&rho, &[Matrix2::identity()]).is_err());
    }

    #[test]
    fn pauli_conjugation_matches_dense() {
        let rho = random_state(3, 9).unwrap();
        for code in [5usize, 27, 63, 38] {
            let p = PauliString::from_code(3, code);
            let dense = dense_matrix(&p.clone().into()).unwrap();
            let expected = &dense * rho.matrix() * dense.adjoint();
            let fast = conjugate_by_pauli(rho.matrix(), &p.action());
            assert!(max_abs_diff(&expected, &fast) < 1e-15);
        }
    }
}
