//! Compilation of the inequality chains into Hermitian terms, link-by-link
//! Loewner verification, and counterexample search under relaxed hypotheses.

mod chains;
mod compile;
mod hunt;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

pub use chains::{build_chain, check_class, check_hypotheses};
pub use compile::Interpolant;
pub use hunt::{
    admissible_relation, generate_instance, hunt_counterexample, needs_nonnegative, relaxed_relation, Counterexample, GeneratedInstance, HuntConfig, HuntOutcome,
    SamplingRanges,
};
pub use report::{
    check_refinement, evaluate_chain, instance_digest, ChainReport, LinkReport, RefinementReport,
};

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, DEFAULT_PSD_TOL};

/// Every chain the engine can build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    JmBase,
    MosBase,
    LcQuad,
    LcPow,
    LcMid,
    LcMap,
    LcMapV2,
    LcMapV3,
    LcMulti,
    LcMercer,
    SqMap,
    SqPow,
    SqMapV2,
    SqMapV3,
    SqMultiA,
    SqMultiB,
    SqMercer,
    SqQuad,
    SqMid,
}

/// The instance shape a theorem consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Quadruple,
    Midpoint,
    Mercer,
    MultiQuadruple,
}

/// What kind of positive map a theorem takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapUse {
    /// No map; the identity is implied.
    None,
    /// One unital map supplied alongside the instance.
    Single,
    /// The family stored in the instance.
    Family,
}

impl TheoremId {
    pub const ALL: [TheoremId; 19] = [
        Self::JmBase,
        Self::MosBase,
        Self::LcQuad,
        Self::LcPow,
        Self::LcMid,
        Self::LcMap,
        Self::LcMapV2,
        Self::LcMapV3,
        Self::LcMulti,
        Self::LcMercer,
        Self::SqMap,
        Self::SqPow,
        Self::SqMapV2,
        Self::SqMapV3,
        Self::SqMultiA,
        Self::SqMultiB,
        Self::SqMercer,
        Self::SqQuad,
        Self::SqMid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::JmBase => "JM-BASE",
            Self::MosBase => "MOS-BASE",
            Self::LcQuad => "LC-QUAD",
            Self::LcPow => "LC-POW",
            Self::LcMid => "LC-MID",
            Self::LcMap => "LC-MAP",
            Self::LcMapV2 => "LC-MAP-V2",
            Self::LcMapV3 => "LC-MAP-V3",
            Self::LcMulti => "LC-MULTI",
            Self::LcMercer => "LC-MERCER",
            Self::SqMap => "SQ-MAP",
            Self::SqPow => "SQ-POW",
            Self::SqMapV2 => "SQ-MAP-V2",
            Self::SqMapV3 => "SQ-MAP-V3",
            Self::SqMultiA => "SQ-MULTI-A",
            Self::SqMultiB => "SQ-MULTI-B",
            Self::SqMercer => "SQ-MERCER",
            Self::SqQuad => "SQ-QUAD",
            Self::SqMid => "SQ-MID",
        }
    }

    pub fn shape(self) -> Shape {
        use TheoremId::*;
        match self {
            MosBase | LcQuad | LcPow | LcMap | LcMapV2 | LcMapV3 | SqMap | SqPow | SqMapV2 | SqMapV3
            | SqQuad => Shape::Quadruple,
            LcMid | SqMid => Shape::Midpoint,
            JmBase | LcMercer | SqMercer => Shape::Mercer,
            LcMulti | SqMultiA | SqMultiB => Shape::MultiQuadruple,
        }
    }

    pub fn map_use(self) -> MapUse {
        use TheoremId::*;
        match self {
            LcQuad | LcPow | LcMid | SqQuad | SqMid => MapUse::None,
            MosBase | LcMap | LcMapV2 | LcMapV3 | SqMap | SqPow | SqMapV2 | SqMapV3 => MapUse::Single,
            JmBase | LcMercer | SqMercer | LcMulti | SqMultiA | SqMultiB => MapUse::Family,
        }
    }

    pub fn is_log_convex(self) -> bool {
        self.as_str().starts_with("LC-")
    }

    pub fn is_superquadratic(self) -> bool {
        self.as_str().starts_with("SQ-")
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, Self::JmBase | Self::MosBase)
    }

    /// Whether the hypotheses include `A + D = B + C` (per index for families).
    pub fn needs_equal_sum(self) -> bool {
        use TheoremId::*;
        matches!(
            self,
            MosBase | LcMap | LcMapV2 | LcMapV3 | LcMulti | SqMap | SqPow | SqMapV2 | SqMapV3 | SqMultiA | SqMultiB
        )
    }

    /// Whether the hypotheses are the alternative conditions (i)/(ii).
    pub fn has_quad_conditions(self) -> bool {
        matches!(self, Self::LcQuad | Self::SqQuad)
    }

    /// Relaxations the builder knows how to skip for this theorem.
    pub fn relaxations(self) -> &'static [Relaxation] {
        use Relaxation::*;
        if self.has_quad_conditions() {
            &[CondIF, CondISum, CondIIF, CondIISum]
        } else if self == Self::LcPow {
            &[CondIISum]
        } else if self.needs_equal_sum() {
            &[EqualSum]
        } else {
            &[]
        }
    }

    /// Number of terms in the displayed chain.
    pub fn chain_len(self) -> usize {
        use TheoremId::*;
        match self {
            LcQuad | LcPow | LcMid | LcMap | LcMapV2 | LcMapV3 | LcMulti => 5,
            LcMercer => 3,
            _ => 2,
        }
    }

    /// The two-term baseline a refined chain sharpens.
    pub fn baseline(self) -> TheoremId {
        match self.shape() {
            Shape::Mercer => Self::JmBase,
            _ => Self::MosBase,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == upper)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A named hypothesis that may be dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relaxation {
    /// `f(m) ≤ f(M)` in condition (i).
    CondIF,
    /// `B + C ≤ A + D` in condition (i).
    CondISum,
    /// `f(M) ≤ f(m)` in condition (ii).
    CondIIF,
    /// `A + D ≤ B + C` in condition (ii).
    CondIISum,
    /// `A + D = B + C`.
    EqualSum,
}

impl Relaxation {
    pub const ALL: [Relaxation; 5] = [
        Self::CondIF,
        Self::CondISum,
        Self::CondIIF,
        Self::CondIISum,
        Self::EqualSum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CondIF => "cond-i-f",
            Self::CondISum => "cond-i-sum",
            Self::CondIIF => "cond-ii-f",
            Self::CondIISum => "cond-ii-sum",
            Self::EqualSum => "equal-sum",
        }
    }
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relaxation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownRelaxation(s.to_string()))
    }
}

impl Serialize for Relaxation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    /// Relative PSD tolerance, also used for hypothesis checks.
    pub tol: f64,
    /// Hypothesis to skip.
    pub relax: Option<Relaxation>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_PSD_TOL,
            relax: None,
        }
    }
}

/// An ascending chain `E_1 ≤ … ≤ E_k` of Hermitian terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionChain {
    pub theorem: TheoremId,
    pub function: String,
    pub terms: Vec<HermitianMatrix>,
    pub labels: Vec<String>,
    /// Ascending sandwich used by [`check_refinement`]: the baseline left and
    /// right sides with the refined terms between them. For log-convex chains
    /// this is `terms`; for superquadratic ones it is
    /// `[lhs, lhs + corrections, rhs − corrections, rhs]`.
    pub envelope: Vec<HermitianMatrix>,
}

impl ExpressionChain {
    pub fn dim(&self) -> usize {
        self.terms[0].dim()
    }
}

#[cfg(test)]
mod tests;
