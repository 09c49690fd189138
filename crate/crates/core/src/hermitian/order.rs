use serde::{Deserialize, Serialize};

use super::{eigendecompose, HermitianMatrix};
use crate::error::{Error, Result};

/// Default relative PSD tolerance.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoewnerRelation {
    LessOrEqual,
    GreaterOrEqual,
    Equal,
    Incomparable,
}

impl LoewnerRelation {
    /// `A ≤ B` holds (including equality).
    pub fn is_leq(self) -> bool {
        matches!(self, Self::LessOrEqual | Self::Equal)
    }

    pub fn is_geq(self) -> bool {
        matches!(self, Self::GreaterOrEqual | Self::Equal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    pub relation: LoewnerRelation,
    /// `λ_min(B − A)`, as computed.
    pub min_eigenvalue_of_difference: f64,
    /// `λ_max(B − A)`, as computed.
    pub max_eigenvalue_of_difference: f64,
    /// Effective (absolute) tolerance: `tol · max(1, ‖A‖_F + ‖B‖_F)`.
    pub tolerance_used: f64,
}

/// Compares `A` and `B` in the Loewner order from the spectrum of `B − A`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<LoewnerVerdict> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be >= 0, got {tol}")));
    }
    let tolerance_used = tol * (a.frobenius_norm() + b.frobenius_norm()).max(1.0);
    let eig = eigendecompose(&b.checked_sub(a)?)?;
    let (lo, hi) = (eig.min(), eig.max());
    let leq = lo >= -tolerance_used;
    let geq = hi <= tolerance_used;
    let relation = match (leq, geq) {
        (true, true) => LoewnerRelation::Equal,
        (true, false) => LoewnerRelation::LessOrEqual,
        (false, true) => LoewnerRelation::GreaterOrEqual,
        (false, false) => LoewnerRelation::Incomparable,
    };
    Ok(LoewnerVerdict {
        relation,
        min_eigenvalue_of_difference: lo,
        max_eigenvalue_of_difference: hi,
        tolerance_used,
    })
}
