//! Numerical decision thresholds.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative thresholds for the two kinds of numerical decision the crate
/// makes: rank decisions (which singular values count as zero) and residual
/// decisions (which least-squares fits count as exact).
///
/// Both are relative: a singular value sigma is treated as zero when
/// `sigma <= rank_tol * sigma_max`, and a residual r accepted when
/// `r <= residual_tol * scale` for the documented scale of each operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Tolerance {
    /// Builds a tolerance pair, requiring both values in the open interval
    /// (0, 1).
    pub fn new(rank_tol: f64, residual_tol: f64) -> Result<Self> {
        for (name, value) in [("rank_tol", rank_tol), ("residual_tol", residual_tol)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must lie in (0, 1), got {value}"
                )));
            }
        }
        Ok(Tolerance {
            rank_tol,
            residual_tol,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_tol: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_values() {
        let tol = Tolerance::default();
        assert_eq!(tol.rank_tol, 1e-10);
        assert_eq!(tol.residual_tol, 1e-8);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, 1.0).is_err());
        assert!(Tolerance::new(-1e-3, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, f64::NAN).is_err());
        assert!(Tolerance::new(1e-10, 1e-8).is_ok());
    }
}
