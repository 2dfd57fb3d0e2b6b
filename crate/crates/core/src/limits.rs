//! Process-wide size guard for dense 2^N x 2^N allocations.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_QUBITS: usize = 10;

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Overrides the guard. Values are clamped to 1..=30 so `1 << n` stays well defined.
pub fn set_max_qubits(n: usize) {
    MAX_QUBITS.store(n.clamp(1, 30), Ordering::Relaxed);
}

pub(crate) fn check_size(n_qubits: usize) -> Result<()> {
    let max = max_qubits();
    if n_qubits > max {
        Err(Error::Size { n_qubits, max })
    } else {
        Ok(())
    }
}
