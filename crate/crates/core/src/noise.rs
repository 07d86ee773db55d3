//! White-noise tolerance of a violation.
//!
//! The maximally mixed state yields the uniform table, whose Bell value is 0,
//! and the Bell value is linear in the table, so mixing in a fraction `F` of
//! white noise scales a violation `I` to `(1 - F) I`.

use alloc::format;

use crate::error::{Error, Result};
use crate::table::ProbabilityTable;

/// Largest noise fraction `F` with `(1 - F) I >= 2`, i.e. `max(0, 1 - 2/I)`.
pub fn noise_threshold(violation: f64) -> Result<f64> {
    if !(violation > 0.0) || !violation.is_finite() {
        return Err(Error::domain(format!("violation must be positive and finite, got {violation}")));
    }
    Ok((1.0 - 2.0 / violation).max(0.0))
}

/// Table of `(1 - F) rho + F I/d^N`: `(1 - F) table + F uniform`.
pub fn noisy_table(table: &ProbabilityTable<f64>, noise: f64) -> Result<ProbabilityTable<f64>> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::domain(format!("noise fraction {noise} outside [0, 1]")));
    }
    table.mix(&ProbabilityTable::uniform(*table.scenario()), 1.0 - noise)
}
