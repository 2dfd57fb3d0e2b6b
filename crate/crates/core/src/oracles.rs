//! Brute-force validators for the closed forms used elsewhere in the crate.
//!
//! Each oracle deliberately takes a different route from the fast path it checks: dense
//! Kronecker traces instead of bit tricks, a simplex feasibility solve instead of the height
//! formula, Jacobi rotations instead of LAPACK-style eigensolvers, and a face grid instead of
//! the sort-based L1 projection.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::enip::standard_egn_spec;
use crate::error::{Error, Result};
use crate::geometry::{
    distance_to_octahedron, egn_spectrum, egn_state, is_nontrivial, is_physical, robustness, tetra_sign, EgnTriple,
};
use crate::pauli::{dense_matrix, PauliString, PhasedPauli};
use crate::separability::{octahedron_vertices, sample_region, tetra_vertices, RegionLabel};
use crate::state::{random_state, DensityMatrix};

/// Largest matrix dimension the Jacobi oracle accepts.
pub const EIGEN_MAX_DIM: usize = 128;
/// Hermiticity tolerance of the Jacobi oracle's input.
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub bisection_tol: f64,
    pub lp_tol: f64,
    /// Grid points per edge of each octahedron face.
    pub grid_resolution: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { bisection_tol: 1e-9, lp_tol: 1e-10, grid_resolution: 400 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bisection_tol > 0.0 && self.lp_tol > 0.0 && self.grid_resolution > 0) {
            return Err(Error::Argument("oracle tolerances and grid resolution must be positive".into()));
        }
        Ok(())
    }
}

fn dense_trace(rho: &DMatrix<Complex64>, p: &DMatrix<Complex64>) -> f64 {
    (rho * p).trace().re
}

/// `2^{−N} Σ_{α∈G} Tr(ρ P_α) P_α` from dense Kronecker products.
pub fn dense_projection_oracle(rho: &DensityMatrix, surviving: &BTreeSet<PauliString>) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    let dim = rho.dim();
    let mut acc = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for alpha in surviving {
        if alpha.n_qubits() != n {
            return Err(Error::Dimension { expected: n, found: alpha.n_qubits() });
        }
        let p = dense_matrix(&PhasedPauli::from(alpha.clone()))?;
        let t = dense_trace(rho.matrix(), &p);
        acc += p * Complex64::new(t / dim as f64, 0.0);
    }
    DensityMatrix::new(n, acc)
}

/// Phase-one simplex: a non-negative `x` with `A x = b`, or `None` when the smallest total
/// infeasibility exceeds `tol`. Bland's rule keeps the pivoting finite.
pub fn feasible_point(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    // tableau columns: original, artificial, rhs
    let width = cols + rows + 1;
    let mut t: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; width];
            for j in 0..cols {
                row[j] = sign * a[i][j];
            }
            row[cols + i] = 1.0;
            row[width - 1] = sign * b[i];
            row
        })
        .collect();
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    // reduced costs of the phase-one objective Σ artificials
    let mut cost = vec![0.0; width];
    for row in &t {
        for j in 0..cols {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }
    const PIVOT_EPS: f64 = 1e-12;
    for _ in 0..10_000 {
        let Some(enter) = (0..cols + rows).find(|&j| cost[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter] > PIVOT_EPS {
                let ratio = row[width - 1] / row[enter];
                let better = match leave {
                    None => true,
                    Some((l, r)) => ratio < r - 1e-15 || ((ratio - r).abs() <= 1e-15 && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            break;
        };
        let pv = t[pivot_row][enter];
        for v in t[pivot_row].iter_mut() {
            *v /= pv;
        }
        let pivot = t[pivot_row].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != pivot_row && row[enter] != 0.0 {
                let f = row[enter];
                for (v, p) in row.iter_mut().zip(&pivot) {
                    *v -= f * p;
                }
            }
        }
        let f = cost[enter];
        for (c, p) in cost.iter_mut().zip(&pivot) {
            *c -= f * p;
        }
        basis[pivot_row] = enter;
    }
    let infeasibility = -cost[width - 1];
    if infeasibility > tol {
        return None;
    }
    let mut x = vec![0.0; cols];
    for (i, &j) in basis.iter().enumerate() {
        if j < cols {
            x[j] = t[i][width - 1];
        }
    }
    Some(x)
}

/// Tetrahedron mixing weights `μ` making `d = (1+s) a − s e` with `a ∈ 𝒪₁`, `e ∈ 𝒯`.
fn tetra_mixture(d: [f64; 3], s: f64, sign: f64, tol: f64) -> Option<[f64; 3]> {
    let oct = octahedron_vertices();
    let tet = tetra_vertices(sign);
    let mut a = vec![vec![0.0; 10]; 5];
    for k in 0..3 {
        for (j, v) in oct.iter().enumerate() {
            a[k][j] = (1.0 + s) * v[k];
        }
        for (j, w) in tet.iter().enumerate() {
            a[k][6 + j] = -s * w[k];
        }
    }
    a[3][..6].fill(1.0);
    a[4][6..].fill(1.0);
    let x = feasible_point(&a, &[d[0], d[1], d[2], 1.0, 1.0], tol)?;
    let mut e = [0.0; 3];
    for (j, w) in tet.iter().enumerate() {
        for k in 0..3 {
            e[k] += x[6 + j] * w[k];
        }
    }
    Some(e)
}

/// Closest point to `p` on the triangle `abc`.
fn closest_on_triangle(p: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    let sub = |u: [f64; 3], v: [f64; 3]| [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let lerp = |u: [f64; 3], dir: [f64; 3], t: f64| [u[0] + t * dir[0], u[1] + t * dir[1], u[2] + t * dir[2]];
    let (ab, ac, ap) = (sub(b, a), sub(c, a), sub(p, a));
    let (d1, d2) = (dot(ab, ap), dot(ac, ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let (d3, d4) = (dot(ab, bp), dot(ac, bp));
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return lerp(a, ab, d1 / (d1 - d3));
    }
    let cp = sub(p, c);
    let (d5, d6) = (dot(ab, cp), dot(ac, cp));
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return lerp(a, ac, d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return lerp(b, sub(c, b), (d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    let (v, w) = (vb * denom, vc * denom);
    [a[0] + ab[0] * v + ac[0] * w, a[1] + ab[1] * v + ac[1] * w, a[2] + ab[2] * v + ac[2] * w]
}

/// Octahedron faces as vertex triples, one per sign octant.
fn octahedron_faces(scale: f64) -> Vec<[[f64; 3]; 3]> {
    let mut faces = Vec::with_capacity(8);
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                faces.push([[sx * scale, 0.0, 0.0], [0.0, sy * scale, 0.0], [0.0, 0.0, sz * scale]]);
            }
        }
    }
    faces
}

/// Distance from `p` to `scale · 𝒪₁` by exact closest points on all eight faces.
fn face_distance(p: [f64; 3], scale: f64) -> f64 {
    if p.iter().map(|v| v.abs()).sum::<f64>() <= scale {
        return 0.0;
    }
    octahedron_faces(scale)
        .iter()
        .map(|[a, b, c]| {
            let q = closest_on_triangle(p, *a, *b, *c);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Whether mixing weight `s` suffices, decided without the closed forms.
pub fn robustness_feasible(t: &EgnTriple, s: f64, config: &OracleConfig) -> bool {
    let d = t.as_array();
    if t.is_odd() {
        tetra_mixture(d, s, tetra_sign(t.n_qubits), config.lp_tol).is_some()
    } else {
        // some e in the unit ball with d + s e ∈ (1+s) 𝒪₁
        face_distance(d, 1.0 + s) <= s + config.lp_tol
    }
}

/// Generalized robustness by bisection over a feasibility oracle.
pub fn robustness_lp_oracle(t: &EgnTriple, m: usize, config: &OracleConfig) -> Result<f64> {
    config.validate()?;
    if m < 2 || m > t.n_qubits {
        return Err(Error::Argument(format!("M = {m} is outside 2..={}", t.n_qubits)));
    }
    if !is_physical(t) {
        return Err(Error::Domain(format!("triple {:?} is not physical", t.as_array())));
    }
    if !is_nontrivial(t.n_qubits, m) || robustness_feasible(t, 0.0, config) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 3.0);
    while hi - lo > config.bisection_tol {
        let mid = 0.5 * (lo + hi);
        if robustness_feasible(t, mid, config) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Optimal tetrahedron mixing point `e` at the oracle's robustness value (odd N only).
pub fn robustness_witness(t: &EgnTriple, config: &OracleConfig) -> Result<Option<[f64; 3]>> {
    if !t.is_odd() {
        return Err(Error::Argument("mixing witnesses are extracted for odd N only".into()));
    }
    let m = t.n_qubits;
    let s = robustness_lp_oracle(t, m, config)?;
    if s == 0.0 {
        return Ok(None);
    }
    Ok(tetra_mixture(t.as_array(), s, tetra_sign(t.n_qubits), config.lp_tol))
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi on its real embedding.
pub fn eigen_oracle(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let d = m.nrows();
    if d != m.ncols() {
        return Err(Error::Argument("eigenvalue oracle needs a square matrix".into()));
    }
    if d > EIGEN_MAX_DIM {
        return Err(Error::Argument(format!("dimension {d} exceeds {EIGEN_MAX_DIM}")));
    }
    for i in 0..d {
        for j in 0..d {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > EIGEN_HERMITIAN_TOL {
                return Err(Error::Argument("matrix is not Hermitian".into()));
            }
        }
    }
    // [[A, −B], [B, A]] has each eigenvalue of A + iB twice
    let n = 2 * d;
    let mut s = vec![0.0; n * n];
    for i in 0..d {
        for j in 0..d {
            let (re, im) = (m[(i, j)].re, m[(i, j)].im);
            s[i * n + j] = re;
            s[(i + d) * n + (j + d)] = re;
            s[i * n + (j + d)] = -im;
            s[(i + d) * n + j] = im;
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (s[i * n + j] + s[j * n + i]);
            s[i * n + j] = avg;
            s[j * n + i] = avg;
        }
    }
    jacobi_sweeps(&mut s, n);
    let mut ev: Vec<f64> = (0..n).map(|i| s[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev.into_iter().step_by(2).collect())
}

fn jacobi_sweeps(s: &mut [f64], n: usize) {
    let off = |s: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += s[i * n + j] * s[i * n + j];
                }
            }
        }
        acc
    };
    let scale: f64 = s.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        if off(s) <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = s[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let (app, aqq) = (s[p * n + p], s[q * n + q]);
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (s[k * n + p], s[k * n + q]);
                    s[k * n + p] = c * akp - sn * akq;
                    s[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (s[p * n + k], s[q * n + k]);
                    s[p * n + k] = c * apk - sn * aqk;
                    s[q * n + k] = sn * apk + c * aqk;
                }
            }
        }
    }
}

/// Distance from `p` to the unit octahedron by a barycentric grid on every face, polished
/// by a shrinking pattern search.
pub fn grid_distance_oracle(p: [f64; 3], config: &OracleConfig) -> f64 {
    if p.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 {
        return 0.0;
    }
    let r = config.grid_resolution.max(1);
    let dist = |sign: [f64; 3], a: f64, b: f64| {
        let c = 1.0 - a - b;
        let q = [sign[0] * a, sign[1] * b, sign[2] * c];
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
    };
    let mut best = f64::INFINITY;
    for [a, b, c] in octahedron_faces(1.0) {
        let sign = [a[0], b[1], c[2]];
        let (mut ba, mut bb, mut bd) = (0.0, 0.0, f64::INFINITY);
        for i in 0..=r {
            for j in 0..=r - i {
                let (x, y) = (i as f64 / r as f64, j as f64 / r as f64);
                let d = dist(sign, x, y);
                if d < bd {
                    (ba, bb, bd) = (x, y, d);
                }
            }
        }
        let mut step = 1.0 / r as f64;
        while step > 1e-13 {
            let mut moved = false;
            for (da, db) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                let (x, y) = (ba + da * step, bb + db * step);
                if x < 0.0 || y < 0.0 || x + y > 1.0 {
                    continue;
                }
                let d = dist(sign, x, y);
                if d < bd {
                    (ba, bb, bd) = (x, y, d);
                    moved = true;
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        best = best.min(bd);
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfCheckReport {
    pub seed: u64,
    pub quick: bool,
    pub checks: BTreeMap<String, CheckSummary>,
    pub passed: bool,
}

fn summary(samples: usize, deviations: impl IntoIterator<Item = f64>, tolerance: f64) -> CheckSummary {
    // NaN deviations must fail, so fold with an explicit NaN check
    let max_deviation =
        deviations.into_iter().fold(0.0_f64, |acc, d| if d.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(d) });
    CheckSummary { samples, max_deviation, tolerance, passed: max_deviation <= tolerance }
}

/// Seeded physical triples: tetrahedron samples for odd N, ball samples for even N.
pub fn random_physical_triples(n_qubits: usize, seed: u64, count: usize) -> Vec<EgnTriple> {
    let label = if n_qubits % 2 == 1 { RegionLabel::tetra(tetra_sign(n_qubits) as i32) } else { RegionLabel::Ball };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // skip the fixed vertex prefix so every draw is random
    let skip = label.vertices().map_or(6, |v| v.len());
    sample_region(label, rng.random(), count + skip)
        .into_iter()
        .skip(skip)
        .map(|p| EgnTriple::from_array(p, n_qubits))
        .collect()
}

/// Runs every oracle comparison and reports the largest deviation per check.
pub fn self_check(seed: u64, quick: bool) -> Result<SelfCheckReport> {
    let config = OracleConfig::default();
    let (states, triples, points) = if quick { (5, 20, 20) } else { (50, 200, 100) };
    let grid_config = if quick { OracleConfig { grid_resolution: 100, ..config } } else { config };
    let mut checks = BTreeMap::new();

    let mut proj_dev = Vec::new();
    for n in 2..=4usize {
        let proj = standard_egn_spec(n)?;
        for i in 0..states {
            let rho = random_state(n, seed.wrapping_add(1000 * n as u64 + i as u64))?;
            let g = proj.group_average(&rho)?;
            let r = proj.recursive(&rho)?;
            let o = dense_projection_oracle(&rho, proj.surviving())?;
            let twice = proj.group_average(&g)?;
            proj_dev.extend([g.max_abs_diff(&r), g.max_abs_diff(&o), r.max_abs_diff(&o), twice.max_abs_diff(&g)]);
        }
    }
    checks.insert("projection".to_string(), summary(proj_dev.len(), proj_dev, 1e-12));

    let mut rob_dev = Vec::new();
    let mut mono_dev = Vec::new();
    for n in [3usize, 5, 7] {
        for t in random_physical_triples(n, seed ^ (n as u64), triples) {
            for m in 2..=n {
                let formula = robustness(&t, m)?;
                let lp = robustness_lp_oracle(&t, m, &config)?;
                rob_dev.push((formula - lp).abs());
                if is_nontrivial(n, m) && lp > 0.0 {
                    mono_dev.push(if robustness_feasible(&t, lp + 0.01, &config) { 0.0 } else { 1.0 });
                }
            }
        }
    }
    checks.insert("robustness_lp".to_string(), summary(rob_dev.len(), rob_dev, 1e-6));
    checks.insert("lp_monotonicity".to_string(), summary(mono_dev.len(), mono_dev, 0.0));

    let mut eig_dev = Vec::new();
    for n in 3..=5usize {
        for t in random_physical_triples(n, seed.wrapping_add(77 * n as u64), triples / 2) {
            let formula = egn_spectrum(&t)?;
            let jacobi = eigen_oracle(egn_state(&t)?.matrix())?;
            eig_dev.push(formula.iter().zip(&jacobi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    checks.insert("eigenvalues".to_string(), summary(eig_dev.len(), eig_dev, 1e-10));

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4242));
    let dist_dev: Vec<f64> = (0..points)
        .map(|_| {
            let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            (distance_to_octahedron(p) - grid_distance_oracle(p, &grid_config)).abs()
        })
        .collect();
    checks.insert("octahedron_distance".to_string(), summary(dist_dev.len(), dist_dev, 1e-4));

    let passed = checks.values().all(|c| c.passed);
    Ok(SelfCheckReport { seed, quick, checks, passed })
}
