//! Lower bounds on multiqubit entanglement from projections onto EG_N states.
//!
//! The pipeline: project an arbitrary N-qubit state onto the EG_N family with an
//! entanglement-non-increasing Pauli twirl ([`enip`]), read off its triple ([`geometry`]),
//! compare against the M-separable region ([`separability`]) and tighten the bound over local
//! unitaries ([`optimize`]).

pub mod enip;
pub mod error;
pub mod geometry;
pub mod io;
pub mod limits;
mod nelder_mead;
pub mod optimize;
pub mod oracles;
pub mod pauli;
pub mod separability;
pub mod state;

pub use enip::{standard_egn_spec, verify_spec, EnipSpec, Projection, VerificationReport};
pub use error::{Error, Result};
pub use geometry::{robustness, trace_distance_measure, triple_of, EgnTriple};
pub use optimize::{optimize, su2, BoundReport, LocalUnitaryParams, OptimizeConfig};
pub use pauli::{PauliString, PhasedPauli};
pub use separability::{m_separable_region, RegionLabel};
pub use state::{CorrelationTensor, DensityMatrix};
