//! JSON state and projection-spec files.
//!
//! A state file holds either a dense matrix,
//! `{"n_qubits": N, "matrix": {"re": [[…]], "im": [[…]]}}`, or sparse correlations,
//! `{"n_qubits": N, "tensor": [{"alpha": [3, 3, 0], "value": 1.0}, …]}`. Omitted tensor
//! entries are zero and the identity entry defaults to 1.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::enip::EnipSpec;
use crate::error::{Error, Result};
use crate::limits::check_size;
use crate::pauli::PauliString;
use crate::state::{from_bloch, CorrelationTensor, DensityMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixParts {
    pub re: Vec<Vec<f64>>,
    /// Missing imaginary part means a real matrix.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub alpha: Vec<u8>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixParts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<Vec<TensorEntry>>,
}

impl StateFile {
    pub fn from_matrix(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self {
            n_qubits: rho.n_qubits(),
            matrix: Some(MatrixParts { re: rows(|z| z.re), im: rows(|z| z.im) }),
            tensor: None,
        }
    }

    pub fn from_tensor(t: &CorrelationTensor) -> Self {
        Self {
            n_qubits: t.n_qubits(),
            matrix: None,
            tensor: Some(
                t.iter().map(|(alpha, value)| TensorEntry { alpha: alpha.indices().to_vec(), value }).collect(),
            ),
        }
    }

    pub fn into_state(self) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if n == 0 {
            return Err(Error::InvalidState("n_qubits must be positive".into()));
        }
        check_size(n)?;
        match (self.matrix, self.tensor) {
            (Some(parts), None) => matrix_state(n, parts),
            (None, Some(entries)) => tensor_state(n, entries),
            _ => Err(Error::InvalidState("exactly one of \"matrix\" or \"tensor\" is required".into())),
        }
    }
}

fn matrix_state(n: usize, parts: MatrixParts) -> Result<DensityMatrix> {
    let dim = 1usize << n;
    let check_shape = |rows: &[Vec<f64>], name: &str| -> Result<()> {
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidState(format!("\"{name}\" must be a {dim}x{dim} array")));
        }
        Ok(())
    };
    check_shape(&parts.re, "re")?;
    let real = parts.im.is_empty();
    if !real {
        check_shape(&parts.im, "im")?;
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(parts.re[i][j], if real { 0.0 } else { parts.im[i][j] }));
    DensityMatrix::new(n, m)
}

fn tensor_state(n: usize, entries: Vec<TensorEntry>) -> Result<DensityMatrix> {
    let mut values = BTreeMap::new();
    for e in entries {
        if e.alpha.len() != n {
            return Err(Error::InvalidState(format!(
                "tensor index {:?} has length {}, expected {n}",
                e.alpha,
                e.alpha.len()
            )));
        }
        let alpha = PauliString::new(e.alpha)?;
        if values.insert(alpha.clone(), e.value).is_some() {
            return Err(Error::InvalidState(format!("tensor index {alpha:?} appears twice")));
        }
    }
    from_bloch(&CorrelationTensor::new(n, values)?)
}

pub fn parse_state(json: &str) -> Result<DensityMatrix> {
    serde_json::from_str::<StateFile>(json)?.into_state()
}

pub fn load_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    parse_state(&std::fs::read_to_string(path)?)
}

/// Parses a projection spec and checks its shape; commutation is left to `verify_spec`.
pub fn parse_enip_spec(json: &str) -> Result<EnipSpec> {
    let spec: EnipSpec = serde_json::from_str(json)?;
    if spec.n_qubits == 0 {
        return Err(Error::InvalidSpec("n_qubits must be positive".into()));
    }
    check_size(spec.n_qubits)?;
    for p in spec.generators.iter().chain(&spec.surviving) {
        if p.n_qubits() != spec.n_qubits {
            return Err(Error::InvalidSpec(format!(
                "string {p:?} has {} sites, expected {}",
                p.n_qubits(),
                spec.n_qubits
            )));
        }
    }
    Ok(spec)
}

pub fn load_enip_spec(path: impl AsRef<Path>) -> Result<EnipSpec> {
    parse_enip_spec(&std::fs::read_to_string(path)?)
}
