//! Coordinate geometry of EG_N states.
//!
//! An EG_N state is `2^{−N}(𝕀 + d1 σ1^{⊗N−1}σ2 + d2 σ2^{⊗N} + d3 σ3^{⊗N−1}𝕀)` and is identified
//! with its triple `(d1, d2, d3)`. Physical triples fill a tetrahedron for odd N and the unit
//! ball for even N. For `M > ⌊N/2⌋ + 1` the M-separable triples are exactly the unit
//! octahedron `|d1| + |d2| + |d3| ≤ 1`; below that threshold every EG_N state is M-separable.

use serde::{Deserialize, Serialize};

use crate::enip::egn_surviving_strings;
use crate::error::{Error, Result};
use crate::state::{correlation, from_bloch, CorrelationTensor, DensityMatrix};

/// Eigenvalues above `−PHYSICAL_TOL` count as non-negative.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Absolute tolerance of the even-N robustness bisection.
pub const BISECTION_TOL: f64 = 1e-9;
/// Upper end of the bisection bracket for the mixing weight.
pub const BISECTION_UPPER: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EgnTriple {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub n_qubits: usize,
}

impl EgnTriple {
    pub fn new(d1: f64, d2: f64, d3: f64, n_qubits: usize) -> Self {
        Self { d1, d2, d3, n_qubits }
    }

    pub fn from_array(d: [f64; 3], n_qubits: usize) -> Self {
        Self::new(d[0], d[1], d[2], n_qubits)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.d1, self.d2, self.d3]
    }

    pub fn abs_sum(&self) -> f64 {
        self.d1.abs() + self.d2.abs() + self.d3.abs()
    }

    pub fn is_odd(&self) -> bool {
        self.n_qubits % 2 == 1
    }
}

/// `(−1)^{(N−1)/2}`: the orientation of the physical tetrahedron for odd N.
pub fn tetra_sign(n_qubits: usize) -> f64 {
    if ((n_qubits - 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `⌊N/2⌋ + 1`; EG_N states certify M-inseparability only for `M` strictly above this.
pub fn separability_threshold(n_qubits: usize) -> usize {
    n_qubits / 2 + 1
}

pub fn is_nontrivial(n_qubits: usize, m: usize) -> bool {
    m > separability_threshold(n_qubits)
}

/// The three EG_N correlations of `rho`.
pub fn triple_of(rho: &DensityMatrix) -> Result<EgnTriple> {
    let n = rho.n_qubits();
    if n < 2 {
        return Err(Error::Argument("EG_N triples need at least 2 qubits".into()));
    }
    let [_, s1, s2, s3] = egn_surviving_strings(n);
    Ok(EgnTriple::new(correlation(rho, &s1)?, correlation(rho, &s2)?, correlation(rho, &s3)?, n))
}

/// Height above the separable plane, `(|d1| + |d2| + |d3| − 1)/2`.
pub fn height(t: &EgnTriple) -> f64 {
    (t.abs_sum() - 1.0) / 2.0
}

/// Closed-form eigenvalues with multiplicities, ascending, equal values merged.
pub fn egn_eigenvalues(t: &EgnTriple) -> Result<Vec<(f64, usize)>> {
    let n = t.n_qubits;
    if n < 2 {
        return Err(Error::Argument("EG_N eigenvalues need at least 2 qubits".into()));
    }
    let scale = 1.0 / (1u64 << n) as f64;
    let mut labelled: Vec<(f64, usize)> = if n % 2 == 1 {
        let s = tetra_sign(n);
        let mult = 1usize << (n - 3);
        let mut v = Vec::with_capacity(8);
        for p in 0..2 {
            for q in 0..2 {
                let sq = if q == 0 { 1.0 } else { -1.0 };
                let sp = if p == 0 { 1.0 } else { -1.0 };
                for pm in [1.0, -1.0] {
                    let lambda = 1.0 + pm * sq * t.d1 + pm * s * sp * t.d2 + sp * sq * t.d3;
                    v.push((scale * lambda, mult));
                }
            }
        }
        v
    } else {
        let r = (t.d1 * t.d1 + t.d2 * t.d2 + t.d3 * t.d3).sqrt();
        let mult = 1usize << (n - 1);
        vec![(scale * (1.0 - r), mult), (scale * (1.0 + r), mult)]
    };
    labelled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, usize)> = Vec::with_capacity(labelled.len());
    for (value, mult) in labelled {
        match merged.last_mut() {
            Some(last) if (last.0 - value).abs() <= 1e-12 => last.1 += mult,
            _ => merged.push((value, mult)),
        }
    }
    Ok(merged)
}

/// The full `2^N` spectrum implied by [`egn_eigenvalues`], ascending.
pub fn egn_spectrum(t: &EgnTriple) -> Result<Vec<f64>> {
    Ok(egn_eigenvalues(t)?.into_iter().flat_map(|(v, m)| std::iter::repeat_n(v, m)).collect())
}

/// The EG_N density matrix of `t`.
pub fn egn_state(t: &EgnTriple) -> Result<DensityMatrix> {
    if t.n_qubits < 2 {
        return Err(Error::Argument("EG_N states need at least 2 qubits".into()));
    }
    let [_, s1, s2, s3] = egn_surviving_strings(t.n_qubits);
    let values = [(s1, t.d1), (s2, t.d2), (s3, t.d3)].into_iter().collect();
    from_bloch(&CorrelationTensor::new(t.n_qubits, values)?)
}

pub fn is_physical(t: &EgnTriple) -> bool {
    let finite = t.as_array().iter().all(|v| v.is_finite());
    finite
        && egn_eigenvalues(t)
            .map(|ev| ev.iter().all(|&(v, _)| v * (1u64 << t.n_qubits) as f64 >= -PHYSICAL_TOL))
            .unwrap_or(false)
}

fn check_measure_args(t: &EgnTriple, m: usize) -> Result<()> {
    if t.n_qubits < 2 {
        return Err(Error::Argument("EG_N measures need at least 2 qubits".into()));
    }
    if m < 2 || m > t.n_qubits {
        return Err(Error::Argument(format!("M = {m} is outside 2..={}", t.n_qubits)));
    }
    if !is_physical(t) {
        return Err(Error::Domain(format!(
            "triple ({}, {}, {}) is not a physical EG_{} state",
            t.d1, t.d2, t.d3, t.n_qubits
        )));
    }
    Ok(())
}

/// Euclidean projection of `p` onto the unit L1 ball.
///
/// Sorts `|p|` in decreasing order (stable, so ties resolve by index), finds the
/// soft-threshold level and restores signs.
pub fn project_onto_octahedron(p: [f64; 3]) -> [f64; 3] {
    let abs = p.map(f64::abs);
    if abs.iter().sum::<f64>() <= 1.0 {
        return p;
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| abs[b].total_cmp(&abs[a]));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &idx) in order.iter().enumerate() {
        cumulative += abs[idx];
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if abs[idx] - candidate > 0.0 {
            threshold = candidate;
        }
    }
    std::array::from_fn(|i| p[i].signum() * (abs[i] - threshold).max(0.0))
}

/// Euclidean distance from `p` to `{x : |x1| + |x2| + |x3| ≤ 1}`.
pub fn distance_to_octahedron(p: [f64; 3]) -> f64 {
    let q = project_onto_octahedron(p);
    p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Generalized robustness of M-inseparability of an EG_N state.
///
/// Odd N uses the closed form `max(h, 0)`. Even N solves
/// `min s` such that `(d + s e)/(1 + s)` lies in the octahedron for some `‖e‖₂ ≤ 1`, which
/// is feasible iff `dist(d/(1+s), 𝒪₁) ≤ s/(1+s)`; the smallest such `s` is found by bisection.
pub fn robustness(t: &EgnTriple, m: usize) -> Result<f64> {
    check_measure_args(t, m)?;
    if !is_nontrivial(t.n_qubits, m) {
        return Ok(0.0);
    }
    if t.is_odd() {
        return Ok(height(t).max(0.0));
    }
    let d = t.as_array();
    let feasible = |s: f64| {
        let scaled = d.map(|v| v / (1.0 + s));
        distance_to_octahedron(scaled) <= s / (1.0 + s)
    };
    if feasible(0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, BISECTION_UPPER);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Trace-distance measure: `max(h, 0)/2` for odd N, half the Euclidean distance to the
/// octahedron for even N; zero below the separability threshold.
pub fn trace_distance_measure(t: &EgnTriple, m: usize) -> Result<f64> {
    check_measure_args(t, m)?;
    if !is_nontrivial(t.n_qubits, m) {
        return Ok(0.0);
    }
    if t.is_odd() {
        Ok(height(t).max(0.0) / 2.0)
    } else {
        Ok(distance_to_octahedron(t.as_array()) / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureResult {
    pub m_parties: usize,
    pub height: f64,
    pub robustness: f64,
    pub trace_distance_measure: f64,
    pub nontrivial: bool,
    pub warning: Option<String>,
}

pub fn measures(t: &EgnTriple, m: usize) -> Result<MeasureResult> {
    let robustness = robustness(t, m)?;
    let trace_distance_measure = trace_distance_measure(t, m)?;
    let warning = (t.n_qubits == 2)
        .then(|| "every two-qubit EG state is M-separable for all M; the bound certifies nothing".to_string());
    Ok(MeasureResult {
        m_parties: m,
        height: height(t),
        robustness,
        trace_distance_measure,
        nontrivial: is_nontrivial(t.n_qubits, m),
        warning,
    })
}

/// Images of `t` under conjugation by `σ_i ⊗ 𝕀^{⊗N−1}`: identity, then `σ1`, `σ2`, `σ3`.
pub fn corner_images(t: &EgnTriple) -> [EgnTriple; 4] {
    let EgnTriple { d1, d2, d3, n_qubits } = *t;
    [
        EgnTriple::new(d1, d2, d3, n_qubits),
        EgnTriple::new(d1, -d2, -d3, n_qubits),
        EgnTriple::new(-d1, d2, -d3, n_qubits),
        EgnTriple::new(-d1, -d2, d3, n_qubits),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::ghz;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn triples_of_reference_states() {
        for n in 2..=5 {
            let t = triple_of(&DensityMatrix::maximally_mixed(n).unwrap()).unwrap();
            assert_eq!(t.as_array(), [0.0, 0.0, 0.0]);
        }
        let t = triple_of(&ghz(3).unwrap()).unwrap();
        assert!((t.d1).abs() < 1e-14 && (t.d2).abs() < 1e-14 && (t.d3 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn height_examples() {
        assert_eq!(height(&EgnTriple::new(0.0, 0.0, 0.0, 3)), -0.5);
        assert_eq!(height(&EgnTriple::new(1.0, -1.0, 1.0, 3)), 1.0);
        let h = height(&EgnTriple::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 4));
        assert!((h - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(egn_eigenvalues(&EgnTriple::new(0.0, 0.0, 0.0, 3)).unwrap(), vec![(0.125, 8)]);
        let ev = egn_eigenvalues(&EgnTriple::new(1.0, -1.0, 1.0, 3)).unwrap();
        assert_eq!(ev.len(), 2);
        assert!(ev[0].0.abs() < 1e-15 && ev[0].1 == 6);
        assert!((ev[1].0 - 0.5).abs() < 1e-15 && ev[1].1 == 2);
        let ev = egn_eigenvalues(&EgnTriple::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 4)).unwrap();
        assert!(ev[0].0.abs() < 1e-15 && ev[0].1 == 8);
        assert!((ev[1].0 - 0.125).abs() < 1e-15 && ev[1].1 == 8);
        assert_eq!(egn_spectrum(&EgnTriple::new(0.2, 0.1, 0.0, 5)).unwrap().len(), 32);
    }

    #[test]
    fn physicality_examples() {
        assert!(is_physical(&EgnTriple::new(1.0, -1.0, 1.0, 3)));
        assert!(!is_physical(&EgnTriple::new(1.0, 1.0, 1.0, 3)));
        assert!(is_physical(&EgnTriple::new(1.0, 1.0, 1.0, 5)));
        assert!(!is_physical(&EgnTriple::new(0.9, 0.9, 0.0, 4)));
        assert!(!is_physical(&EgnTriple::new(f64::NAN, 0.0, 0.0, 4)));
    }

    #[test]
    fn robustness_examples() {
        assert_eq!(robustness(&EgnTriple::new(1.0, -1.0, 1.0, 3), 3).unwrap(), 1.0);
        assert_eq!(robustness(&EgnTriple::new(0.0, 0.0, 1.0, 3), 3).unwrap(), 0.0);
        // even N: (1−s)/(1+s) = 1/√2 at the boundary, s = (√2 − 1)^2
        let r = robustness(&EgnTriple::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 4), 4).unwrap();
        assert!((r - (2f64.sqrt() - 1.0).powi(2)).abs() < 2e-9, "{r}");
    }

    #[test]
    fn measure_errors() {
        let t = EgnTriple::new(1.0, 1.0, 1.0, 3);
        assert!(matches!(robustness(&t, 3), Err(Error::Domain(_))));
        let t = EgnTriple::new(0.0, 0.0, 0.0, 3);
        assert!(matches!(robustness(&t, 1), Err(Error::Argument(_))));
        assert!(matches!(trace_distance_measure(&t, 4), Err(Error::Argument(_))));
    }

    #[test]
    fn trace_distance_examples() {
        assert_eq!(trace_distance_measure(&EgnTriple::new(1.0, -1.0, 1.0, 3), 3).unwrap(), 0.5);
        for n in 2..=6 {
            for m in 2..=n {
                let t = EgnTriple::new(0.0, 0.0, 0.0, n);
                assert_eq!(trace_distance_measure(&t, m).unwrap(), 0.0);
            }
        }
        let v = trace_distance_measure(&EgnTriple::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 4), 4).unwrap();
        assert!((v - (1.0 - FRAC_1_SQRT_2) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn octahedron_distance_examples() {
        assert_eq!(distance_to_octahedron([0.2, 0.3, -0.1]), 0.0);
        assert!((distance_to_octahedron([1.0, 1.0, 1.0]) - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let p = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        assert!((distance_to_octahedron(p) - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-15);
        let q = project_onto_octahedron([-2.0, 0.5, 0.0]);
        assert_eq!(q, [-1.0, 0.0, 0.0]);
    }

    #[test]
    fn two_qubit_reports_are_trivial() {
        let t = EgnTriple::new(0.6, 0.0, 0.8, 2);
        let r = measures(&t, 2).unwrap();
        assert!(!r.nontrivial);
        assert_eq!(r.robustness, 0.0);
        assert!(r.warning.is_some());
    }

    #[test]
    fn corner_image_examples() {
        let imgs = corner_images(&EgnTriple::new(1.0, -1.0, 1.0, 3));
        assert!(imgs.iter().any(|t| t.as_array() == [1.0, 1.0, -1.0]));
        let zero = EgnTriple::new(0.0, 0.0, 0.0, 4);
        assert!(corner_images(&zero).iter().all(|t| t.abs_sum() == 0.0));
    }
}
