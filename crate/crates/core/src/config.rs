use serde::Serialize;

use crate::error::{Error, Result};

/// Largest truncation degree any check will refine to.
pub const MAX_TRUNCATION: usize = 1024;

/// Thresholds and truncation policy shared by the residual-based checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckConfig {
    /// A residual below this at both truncation levels means "invariant".
    pub tol_accept: f64,
    /// A residual above this at both levels means "not invariant".
    pub tol_reject: f64,
    /// Starting truncation degree; `None` picks `max(128, 16·deg θ)`.
    pub truncation: Option<usize>,
    pub max_truncation: usize,
    /// Boundary sample count for sup-norm estimates.
    pub samples: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            tol_accept: 1e-8,
            tol_reject: 1e-3,
            truncation: None,
            max_truncation: MAX_TRUNCATION,
            samples: 512,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_accept > 0.0 && self.tol_accept < self.tol_reject) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < tol_accept < tol_reject, got {} and {}",
                self.tol_accept, self.tol_reject
            )));
        }
        if self.max_truncation > MAX_TRUNCATION {
            return Err(Error::InvalidArgument(format!(
                "max_truncation {} exceeds {MAX_TRUNCATION}",
                self.max_truncation
            )));
        }
        if let Some(n) = self.truncation {
            if n > self.max_truncation {
                return Err(Error::InvalidArgument(format!(
                    "truncation {n} exceeds {}",
                    self.max_truncation
                )));
            }
        }
        Ok(())
    }

    /// Starting degree for a model space of the given dimension.
    pub fn base_degree(&self, dim: usize) -> usize {
        self.truncation
            .unwrap_or_else(|| 128.max(16 * dim))
            .max(4 * dim)
            .max(1)
            .min(self.max_truncation)
    }
}
