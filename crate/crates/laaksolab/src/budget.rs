//! Edge-count budget guarding the recursive builders.

use crate::error::{Error, Result};

/// Maximum number of edges a single constructed block may have.
///
/// Level-`n` graphs have `4^n` edges, so the default of `2^20` admits levels
/// up to 10. The CLI lets `LAAKSOLAB_BUDGET` override it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

pub const DEFAULT_EDGE_BUDGET: u64 = 1 << 20;

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_EDGE_BUDGET)
    }
}

impl Budget {
    /// Reads `LAAKSOLAB_BUDGET` if set, otherwise the default.
    pub fn from_env() -> Result<Budget> {
        match std::env::var("LAAKSOLAB_BUDGET") {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(Budget)
                .map_err(|e| Error::InvalidInput(format!("LAAKSOLAB_BUDGET: {e}"))),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub fn check(&self, what: &str, required_edges: u128) -> Result<()> {
        if required_edges > self.0 as u128 {
            return Err(Error::CapacityExceeded {
                what: what.to_string(),
                required: required_edges,
                budget: self.0,
            });
        }
        Ok(())
    }
}
