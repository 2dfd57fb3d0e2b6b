//! Entanglement-non-increasing projections built from Pauli-string twirls.
//!
//! A projection is specified by a surviving set `G` of Pauli strings and a generator family
//! `{P_i}`. Averaging `ρ` over the `2^n` subset products of the generators keeps exactly the
//! correlation-tensor entries in `G` and zeroes all others, provided every string in `G`
//! commutes with each generator and every string outside `G` anticommutes with at least one.
//! The same map is obtained by applying the coin-flip channel `ρ ↦ (ρ + PρP)/2` once per
//! generator.

use std::collections::{BTreeSet, HashSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_qubits, Error, Result};
use crate::limits::check_size;
use crate::pauli::{generate_group, BitPauli, PauliString, MAX_GENERATORS};
use crate::state::{conjugate_by_pauli, DensityMatrix};

/// Largest qubit count for which the group-average path materializes every conjugation.
pub const GROUP_AVERAGE_MAX_QUBITS: usize = 5;

/// Scans of `4^N × |group|` commutation checks above this size fall back to the generators.
const GROUP_SCAN_BUDGET: usize = 1 << 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnipSpec {
    pub n_qubits: usize,
    pub surviving: BTreeSet<PauliString>,
    pub generators: Vec<PauliString>,
}

/// `{0…0, (1,…,1,2), (2,…,2), (3,…,3,0)}`: the strings an EG_N state is built from.
pub fn egn_surviving_strings(n: usize) -> [PauliString; 4] {
    let mut d1 = vec![1u8; n];
    d1[n - 1] = 2;
    let mut d3 = vec![3u8; n];
    d3[n - 1] = 0;
    [
        PauliString::identity(n),
        PauliString::new(d1).expect("valid indices"),
        PauliString::new(vec![2; n]).expect("valid indices"),
        PauliString::new(d3).expect("valid indices"),
    ]
}

/// Which final generator the standard construction ended up with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardVariant {
    /// `{σ3σ3𝕀…, σ2σ2𝕀…, (𝕀 ⊗ σ2)}` on two qubits.
    TwoQubit,
    /// Nearest-neighbour `σ3σ3` pairs, `σ2σ2` pairs up to qubit N−1, single `σ2` on qubit N.
    SingleFinal,
    /// Nearest-neighbour `σ3σ3` pairs and `σ2σ2` pairs up to `(N−1, N)`.
    PairFinal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n_qubits: usize,
    pub generator_count: usize,
    pub group_size: usize,
    /// Group elements have pairwise distinct underlying strings.
    pub distinct_elements: bool,
    /// First string produced twice, if any.
    pub repeated_element: Option<PauliString>,
    /// Every string commuting with all group elements, sorted.
    pub commutant: Vec<PauliString>,
    pub surviving_contains_identity: bool,
    /// Surviving strings that anticommute with some group element.
    pub missing_from_commutant: Vec<PauliString>,
    /// Strings outside the surviving set that commute with every group element.
    pub unexpected_in_commutant: Vec<PauliString>,
    pub commutant_matches_surviving: bool,
    /// `"group"` when scanned against every group element, `"generators"` otherwise.
    pub scan_basis: String,
    pub variant: Option<StandardVariant>,
    pub passed: bool,
    pub first_violation: Option<String>,
}

/// Exhaustive check of the projection conditions over all `4^N` strings.
pub fn verify_spec(spec: &EnipSpec) -> Result<VerificationReport> {
    let n = spec.n_qubits;
    if n == 0 {
        return Err(Error::Argument("spec needs at least one qubit".into()));
    }
    check_size(n)?;
    if spec.generators.len() > MAX_GENERATORS {
        return Err(Error::Argument(format!(
            "{} generators exceeds the limit of {MAX_GENERATORS}",
            spec.generators.len()
        )));
    }
    for p in spec.generators.iter().chain(&spec.surviving) {
        check_qubits(n, p.n_qubits())?;
    }

    let group = generate_group(n, &spec.generators)?;
    let mut seen = HashSet::with_capacity(group.len());
    let repeated_element = group.iter().find(|g| !seen.insert(&g.string)).map(|g| g.string.clone());

    let use_group = (1usize << (2 * n)).saturating_mul(group.len()) <= GROUP_SCAN_BUDGET;
    let basis: Vec<BitPauli> = if use_group {
        group.iter().map(|g| g.string.action()).collect()
    } else {
        spec.generators.iter().map(PauliString::action).collect()
    };
    let commutant: Vec<PauliString> = PauliString::all(n)
        .filter(|alpha| {
            let a = alpha.action();
            basis.iter().all(|b| a.commutes_with(b))
        })
        .collect();

    let commutant_set: BTreeSet<&PauliString> = commutant.iter().collect();
    let missing_from_commutant: Vec<PauliString> =
        spec.surviving.iter().filter(|s| !commutant_set.contains(s)).cloned().collect();
    let unexpected_in_commutant: Vec<PauliString> =
        commutant.iter().filter(|c| !spec.surviving.contains(*c)).cloned().collect();
    let surviving_contains_identity = spec.surviving.contains(&PauliString::identity(n));

    let first_violation = if !surviving_contains_identity {
        Some("surviving set does not contain the identity string".to_string())
    } else if let Some(r) = &repeated_element {
        Some(format!("group elements are not distinct: {r:?} appears twice"))
    } else if let Some(m) = missing_from_commutant.first() {
        Some(format!("surviving string {m:?} anticommutes with a generator"))
    } else {
        unexpected_in_commutant
            .first()
            .map(|u| format!("string {u:?} outside the surviving set commutes with every generator"))
    };

    Ok(VerificationReport {
        n_qubits: n,
        generator_count: spec.generators.len(),
        group_size: group.len(),
        distinct_elements: repeated_element.is_none(),
        repeated_element,
        commutant_matches_surviving: missing_from_commutant.is_empty() && unexpected_in_commutant.is_empty(),
        commutant,
        surviving_contains_identity,
        missing_from_commutant,
        unexpected_in_commutant,
        scan_basis: if use_group { "group" } else { "generators" }.to_string(),
        variant: None,
        passed: first_violation.is_none(),
        first_violation,
    })
}

/// A spec that passed [`verify_spec`], ready to apply.
#[derive(Clone, Debug)]
pub struct Projection {
    spec: EnipSpec,
    report: VerificationReport,
    group: Vec<BitPauli>,
    generators: Vec<BitPauli>,
}

impl Projection {
    pub fn new(spec: EnipSpec) -> Result<Self> {
        let report = verify_spec(&spec)?;
        Self::from_report(spec, report)
    }

    fn from_report(spec: EnipSpec, report: VerificationReport) -> Result<Self> {
        if let Some(v) = &report.first_violation {
            return Err(Error::InvalidSpec(v.clone()));
        }
        let group = generate_group(spec.n_qubits, &spec.generators)?.iter().map(|g| g.string.action()).collect();
        let generators = spec.generators.iter().map(PauliString::action).collect();
        Ok(Self { spec, report, group, generators })
    }

    pub fn spec(&self) -> &EnipSpec {
        &self.spec
    }

    pub fn report(&self) -> &VerificationReport {
        &self.report
    }

    pub fn n_qubits(&self) -> usize {
        self.spec.n_qubits
    }

    pub fn surviving(&self) -> &BTreeSet<PauliString> {
        &self.spec.surviving
    }

    /// `|J|^{−1} Σ_β P′_β ρ P′_β†`, switching to the recursion above
    /// [`GROUP_AVERAGE_MAX_QUBITS`] qubits.
    pub fn group_average(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_qubits(self.spec.n_qubits, rho.n_qubits())?;
        if rho.n_qubits() > GROUP_AVERAGE_MAX_QUBITS {
            return self.recursive(rho);
        }
        Ok(self.group_average_unchecked(rho))
    }

    fn group_average_unchecked(&self, rho: &DensityMatrix) -> DensityMatrix {
        let dim = rho.dim();
        let mut acc = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for p in &self.group {
            acc += conjugate_by_pauli(rho.matrix(), p);
        }
        acc /= Complex64::new(self.group.len() as f64, 0.0);
        DensityMatrix::from_trusted(rho.n_qubits(), acc)
    }

    /// `ρ_i = (ρ_{i−1} + P_i ρ_{i−1} P_i)/2` through every generator.
    pub fn recursive(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_qubits(self.spec.n_qubits, rho.n_qubits())?;
        let half = Complex64::new(0.5, 0.0);
        let mut m = rho.matrix().clone();
        for p in &self.generators {
            let flipped = conjugate_by_pauli(&m, p);
            m = (m + flipped) * half;
        }
        Ok(DensityMatrix::from_trusted(rho.n_qubits(), m))
    }
}

pub fn project_group_average(rho: &DensityMatrix, spec: &EnipSpec) -> Result<DensityMatrix> {
    Projection::new(spec.clone())?.group_average(rho)
}

pub fn project_recursive(rho: &DensityMatrix, spec: &EnipSpec) -> Result<DensityMatrix> {
    Projection::new(spec.clone())?.recursive(rho)
}

fn pair(n: usize, site: usize, pauli: u8) -> PauliString {
    let mut v = vec![0u8; n];
    v[site] = pauli;
    v[site + 1] = pauli;
    PauliString::new(v).expect("valid indices")
}

fn standard_generators(n: usize, variant: StandardVariant) -> Vec<PauliString> {
    match variant {
        StandardVariant::TwoQubit => vec![pair(2, 0, 3), PauliString::single(2, 1, 2)],
        StandardVariant::SingleFinal | StandardVariant::PairFinal => {
            let mut gens: Vec<PauliString> = (0..n - 1).map(|k| pair(n, k, 3)).collect();
            gens.extend((0..n - 2).map(|k| pair(n, k, 2)));
            gens.push(if variant == StandardVariant::SingleFinal {
                PauliString::single(n, n - 1, 2)
            } else {
                pair(n, n - 2, 2)
            });
            gens
        }
    }
}

/// The twirl onto EG_N states, verified before it is returned.
///
/// For `n ≥ 3` the single-`σ2` closing generator is tried first and the `σ2σ2` pair on
/// `(N−1, N)` second; the report records which one verified.
pub fn standard_egn_spec(n: usize) -> Result<Projection> {
    if n < 2 {
        return Err(Error::Argument(format!("EG_N projection needs n >= 2, got {n}")));
    }
    let surviving: BTreeSet<PauliString> = egn_surviving_strings(n).into_iter().collect();
    let variants: &[StandardVariant] =
        if n == 2 { &[StandardVariant::TwoQubit] } else { &[StandardVariant::SingleFinal, StandardVariant::PairFinal] };
    let mut first_failure = None;
    for &variant in variants {
        let spec = EnipSpec { n_qubits: n, surviving: surviving.clone(), generators: standard_generators(n, variant) };
        let mut report = verify_spec(&spec)?;
        report.variant = Some(variant);
        if report.passed {
            return Projection::from_report(spec, report);
        }
        first_failure.get_or_insert(report.first_violation);
    }
    Err(Error::InvalidSpec(format!(
        "no standard generator variant verifies for n = {n}: {}",
        first_failure.flatten().unwrap_or_default()
    )))
}
