//! Which EG_N triples are M-separable.
//!
//! A product state over a partition of the N qubits into blocks maps to a Hadamard
//! (componentwise) product of one triple per block: blocks not containing qubit N contribute
//! an `σ_j^{⊗K}` correlation triple, the block containing qubit N contributes an EG triple.
//! The convex hull of each such product set is one of a handful of canonical regions, and
//! the M-separable region is the convex hull of the union over all M-block partitions.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical convex regions of triple-space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    /// Unit Euclidean ball.
    Ball,
    /// Tetrahedron with vertices the ±1 vectors whose coordinates multiply to +1.
    TetraPlus,
    /// Tetrahedron with vertices the ±1 vectors whose coordinates multiply to −1.
    TetraMinus,
    /// Segment `{(t, t, 1) : −1 ≤ t ≤ 1}`.
    Line,
    /// Unit L1 ball.
    Octahedron,
}

impl RegionLabel {
    pub fn tetra(sign: i32) -> Self {
        if sign > 0 {
            RegionLabel::TetraPlus
        } else {
            RegionLabel::TetraMinus
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::Ball => "ball",
            RegionLabel::TetraPlus => "tetra_plus",
            RegionLabel::TetraMinus => "tetra_minus",
            RegionLabel::Line => "line",
            RegionLabel::Octahedron => "octahedron",
        }
    }

    fn tetra_sign(self) -> Option<f64> {
        match self {
            RegionLabel::TetraPlus => Some(1.0),
            RegionLabel::TetraMinus => Some(-1.0),
            _ => None,
        }
    }

    /// Membership with slack `tol`.
    pub fn contains(self, p: [f64; 3], tol: f64) -> bool {
        let [x, y, z] = p;
        match self {
            RegionLabel::Ball => (x * x + y * y + z * z).sqrt() <= 1.0 + tol,
            RegionLabel::Octahedron => x.abs() + y.abs() + z.abs() <= 1.0 + tol,
            RegionLabel::Line => (x - y).abs() <= tol && (z - 1.0).abs() <= tol && x.abs() <= 1.0 + tol,
            RegionLabel::TetraPlus | RegionLabel::TetraMinus => {
                let s = self.tetra_sign().unwrap_or(1.0);
                tetra_forms(p, s).iter().all(|&f| f >= -tol)
            }
        }
    }

    /// Vertices of polytopes, endpoints of the line; `None` for the ball.
    pub fn vertices(self) -> Option<Vec<[f64; 3]>> {
        match self {
            RegionLabel::Ball => None,
            RegionLabel::Octahedron => Some(octahedron_vertices().to_vec()),
            RegionLabel::Line => Some(vec![[-1.0, -1.0, 1.0], [1.0, 1.0, 1.0]]),
            RegionLabel::TetraPlus | RegionLabel::TetraMinus => {
                Some(tetra_vertices(self.tetra_sign().unwrap_or(1.0)).to_vec())
            }
        }
    }

    /// `conv(A ∘ B)` for single regions. The line acts as the identity and the octahedron
    /// absorbs everything.
    pub fn compose(self, other: RegionLabel) -> RegionLabel {
        use RegionLabel::*;
        match (self, other) {
            (Octahedron, _) | (_, Octahedron) => Octahedron,
            (Ball, Ball) => Octahedron,
            (Ball, _) | (_, Ball) => Ball,
            (Line, x) | (x, Line) => x,
            (a, b) => {
                let s = a.tetra_sign().unwrap_or(1.0) * b.tetra_sign().unwrap_or(1.0);
                RegionLabel::tetra(s as i32)
            }
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The four facet forms `1 + (−1)^q x + s(−1)^p y + (−1)^{p+q} z`; all ≥ 0 inside `𝒯_s`.
pub fn tetra_forms(p: [f64; 3], s: f64) -> [f64; 4] {
    let [x, y, z] = p;
    [1.0 + x + s * y + z, 1.0 - x + s * y - z, 1.0 + x - s * y - z, 1.0 - x - s * y + z]
}

pub fn tetra_vertices(s: f64) -> [[f64; 3]; 4] {
    [[1.0, s, 1.0], [-1.0, -s, 1.0], [1.0, -s, -1.0], [-1.0, s, -1.0]]
}

pub fn octahedron_vertices() -> [[f64; 3]; 6] {
    [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]
}

pub fn hadamard_point(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] * b[0], a[1] * b[1], a[2] * b[2]]
}

/// Label of `conv(F_1 ∘ … ∘ F_k)`.
pub fn hadamard_reduce(factors: &[RegionLabel]) -> Result<RegionLabel> {
    let (first, rest) =
        factors.split_first().ok_or_else(|| Error::Argument("Hadamard reduction needs at least one factor".into()))?;
    Ok(rest.iter().fold(*first, |acc, &f| acc.compose(f)))
}

/// Region of the triples a single block can produce.
pub fn subsystem_region(size: usize, is_last_block: bool) -> Result<RegionLabel> {
    if size == 0 {
        return Err(Error::Argument("blocks must contain at least one qubit".into()));
    }
    let parity_sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    Ok(match (is_last_block, size % 2) {
        (false, 1) => RegionLabel::Ball,
        (false, _) => RegionLabel::tetra(parity_sign(size / 2)),
        (true, 0) => RegionLabel::Ball,
        (true, _) if size == 1 => RegionLabel::Line,
        (true, _) => RegionLabel::tetra(parity_sign((size - 1) / 2)),
    })
}

/// Block sizes of an M-partition; the last entry is the block holding qubit N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    sizes: Vec<usize>,
}

impl Partition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Argument("a partition needs at least 2 blocks".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::Argument("block sizes must be positive".into()));
        }
        Ok(Self { sizes })
    }

    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn last_block_size(&self) -> usize {
        *self.sizes.last().expect("at least two blocks")
    }

    pub fn leading_blocks(&self) -> &[usize] {
        &self.sizes[..self.sizes.len() - 1]
    }
}

/// Every ordered composition of `n` into `m` positive block sizes.
pub fn compositions(n: usize, m: usize) -> Vec<Partition> {
    fn rec(remaining: usize, parts: usize, acc: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if parts == 1 {
            acc.push(remaining);
            out.push(Partition { sizes: acc.clone() });
            acc.pop();
            return;
        }
        for first in 1..=remaining - (parts - 1) {
            acc.push(first);
            rec(remaining - first, parts - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if m >= 2 && n >= m {
        rec(n, m, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

pub fn partition_region(p: &Partition) -> RegionLabel {
    let last = p.m() - 1;
    let labels: Vec<RegionLabel> =
        p.sizes.iter().enumerate().map(|(i, &k)| subsystem_region(k, i == last).expect("positive sizes")).collect();
    hadamard_reduce(&labels).expect("non-empty")
}

/// One of the nine textual partition cases, with the region it asserts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionCase {
    pub case: u8,
    pub region: RegionLabel,
}

/// Hand-coded case table keyed on block-size parities.
///
/// Case 4 is read as "exactly one odd leading block and an even last block"; cases 5 and 6
/// cover the same leading-block hypothesis with an odd last block.
pub fn classify_partition(p: &Partition) -> PartitionCase {
    let n = p.n_qubits();
    let km = p.last_block_size();
    let odd_leading = p.leading_blocks().iter().filter(|&&k| k % 2 == 1).count();
    let all_odd = p.sizes.iter().all(|&k| k % 2 == 1);
    let full_odd = RegionLabel::tetra(if ((n.saturating_sub(1)) / 2).is_multiple_of(2) { 1 } else { -1 });
    let (case, region) = if odd_leading == 0 && km.is_multiple_of(2) {
        (1, RegionLabel::Ball)
    } else if odd_leading == 0 && km == 1 {
        (2, full_odd)
    } else if odd_leading == 0 {
        (3, full_odd)
    } else if odd_leading == 1 && km.is_multiple_of(2) {
        (4, RegionLabel::Octahedron)
    } else if odd_leading == 1 && km == 1 {
        (5, RegionLabel::Ball)
    } else if odd_leading == 1 {
        (6, RegionLabel::Ball)
    } else if p.m() > 2 && all_odd && km == 1 {
        (7, RegionLabel::Octahedron)
    } else if p.m() > 2 && all_odd {
        (8, RegionLabel::Octahedron)
    } else {
        (9, RegionLabel::Octahedron)
    };
    PartitionCase { case, region }
}

/// The region filled by all EG_N states: ball for even N, `𝒯_{(−1)^{(N−1)/2}}` for odd N.
pub fn physical_region(n: usize) -> RegionLabel {
    if n.is_multiple_of(2) {
        RegionLabel::Ball
    } else {
        RegionLabel::tetra(if ((n - 1) / 2).is_multiple_of(2) { 1 } else { -1 })
    }
}

/// Closed-form M-separable region: everything up to `⌊N/2⌋ + 1` blocks, the octahedron above.
pub fn m_separable_region(n: usize, m: usize) -> Result<RegionLabel> {
    if m < 2 || m > n {
        return Err(Error::Argument(format!("M = {m} is outside 2..={n}")));
    }
    Ok(if m <= n / 2 + 1 { physical_region(n) } else { RegionLabel::Octahedron })
}

/// Label of `conv(∪ regions)` when it is canonical: the octahedron sits inside every other
/// full-dimensional region, so the union of the octahedron with `X` is `X`.
pub fn conv_union(labels: &[RegionLabel]) -> Option<RegionLabel> {
    let mut iter = labels.iter().copied();
    let first = iter.next()?;
    iter.try_fold(first, |acc, l| match (acc, l) {
        (a, b) if a == b => Some(a),
        (RegionLabel::Octahedron, x) | (x, RegionLabel::Octahedron) if x != RegionLabel::Line => Some(x),
        _ => None,
    })
}

/// M-separable region from exhaustive enumeration of block-size compositions.
pub fn m_separable_region_by_enumeration(n: usize, m: usize) -> Result<RegionLabel> {
    if m < 2 || m > n {
        return Err(Error::Argument(format!("M = {m} is outside 2..={n}")));
    }
    let labels: Vec<RegionLabel> = compositions(n, m).iter().map(partition_region).collect();
    conv_union(&labels)
        .ok_or_else(|| Error::Domain(format!("partition regions for N = {n}, M = {m} have no canonical hull")))
}

/// Seeded points inside `label`. Vertices (or segment endpoints, or the six axis points of
/// the ball) come first so the boundary is always covered.
pub fn sample_region(label: RegionLabel, seed: u64, count: usize) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<[f64; 3]> = match label {
        RegionLabel::Ball => octahedron_vertices().to_vec(),
        other => other.vertices().unwrap_or_default(),
    };
    out.truncate(count);
    while out.len() < count {
        let p = match label {
            RegionLabel::Ball => {
                let dir: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                // a quarter of the draws land exactly on the sphere
                let radius = if rng.random_bool(0.25) { 1.0 } else { rng.random::<f64>() };
                dir.map(|v| v / norm * radius)
            }
            RegionLabel::Line => {
                let t = rng.random_range(-1.0..=1.0);
                [t, t, 1.0]
            }
            polytope => {
                let verts = polytope.vertices().unwrap_or_default();
                let weights: Vec<f64> = verts.iter().map(|_| Exp1.sample(&mut rng)).collect();
                let total: f64 = weights.iter().sum();
                let mut p = [0.0; 3];
                for (w, v) in weights.iter().zip(&verts) {
                    for k in 0..3 {
                        p[k] += w / total * v[k];
                    }
                }
                p
            }
        };
        out.push(p);
    }
    out
}
