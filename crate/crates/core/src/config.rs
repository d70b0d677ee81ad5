use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension and adversary budget shared by every operation.
///
/// The budget `k` is both the number of coordinates the adversary may
/// rewrite and the number of values trimmed from each end of the sorted
/// coordinate-wise product. Valid configurations have `2k < d`; `k = 0` is
/// additionally accepted as the classical inner-product degenerate mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    d: usize,
    k: usize,
}

impl TruncationConfig {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidConfig("d must be at least 1".into()));
        }
        if k > 0 && 2 * k >= d {
            return Err(Error::InvalidConfig(format!(
                "need 2k < d, got d = {d}, k = {k}"
            )));
        }
        Ok(Self { d, k })
    }

    /// Feature dimension d.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Adversary budget / truncation level k.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of coordinates surviving truncation, d - 2k.
    pub fn kept(&self) -> usize {
        self.d - 2 * self.k
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: len,
            });
        }
        Ok(())
    }
}
