use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{ExpressionChain, TheoremId};
use crate::error::Result;
use crate::forge::Instance;
use crate::functions::{FunctionDescriptor, EQUALITY_REL_TOL};
use crate::hermitian::{loewner_leq, HermitianMatrix};
use crate::maps::PositiveUnitalMap;

/// Verdict on one link `lower ≤ upper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkReport {
    pub lower: String,
    pub upper: String,
    /// `λ_min(upper − lower)`.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `‖upper − lower‖_F`.
    pub gap_norm: f64,
    pub holds: bool,
    pub equality: bool,
    pub tolerance_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub theorem: TheoremId,
    pub function: String,
    pub dim: usize,
    pub labels: Vec<String>,
    pub links: Vec<LinkReport>,
    pub pass: bool,
    pub min_link_eigenvalue: f64,
    /// Largest per-link absolute tolerance.
    pub tolerance_used: f64,
    /// Term values, for `1 x 1` chains only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChainReport {
    pub fn with_provenance(mut self, digest: String, seed: Option<u64>) -> Self {
        self.digest = Some(digest);
        self.seed = seed;
        self
    }

    /// Index of the first failing link.
    pub fn first_failure(&self) -> Option<usize> {
        self.links.iter().position(|l| !l.holds)
    }
}

fn link(lower: &HermitianMatrix, upper: &HermitianMatrix, names: (&str, &str), tol: f64) -> Result<LinkReport> {
    let verdict = loewner_leq(lower, upper, tol)?;
    let gap_norm = upper.checked_sub(lower)?.frobenius_norm();
    let scale = lower.frobenius_norm().max(upper.frobenius_norm()).max(1.0);
    Ok(LinkReport {
        lower: names.0.to_string(),
        upper: names.1.to_string(),
        min_eigenvalue: verdict.min_eigenvalue_of_difference,
        max_eigenvalue: verdict.max_eigenvalue_of_difference,
        gap_norm,
        holds: verdict.relation.is_leq(),
        equality: gap_norm <= EQUALITY_REL_TOL * scale,
        tolerance_used: verdict.tolerance_used,
    })
}

/// Checks every adjacent pair of the chain in the Loewner order.
pub fn evaluate_chain(chain: &ExpressionChain, tol: f64) -> Result<ChainReport> {
    let links = chain
        .terms
        .windows(2)
        .zip(chain.labels.windows(2))
        .map(|(t, l)| link(&t[0], &t[1], (&l[0], &l[1]), tol))
        .collect::<Result<Vec<_>>>()?;
    let values = (chain.dim() == 1).then(|| chain.terms.iter().map(|t| t.get(0, 0).re).collect());
    Ok(ChainReport {
        theorem: chain.theorem,
        function: chain.function.clone(),
        dim: chain.dim(),
        labels: chain.labels.clone(),
        pass: links.iter().all(|l| l.holds),
        min_link_eigenvalue: links.iter().map(|l| l.min_eigenvalue).fold(f64::INFINITY, f64::min),
        tolerance_used: links.iter().map(|l| l.tolerance_used).fold(0.0, f64::max),
        links,
        values,
        digest: None,
        seed: None,
    })
}

/// The baseline endpoints of a chain and the refined terms between them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementReport {
    /// First envelope term against the last: the two-term baseline.
    pub baseline: LinkReport,
    /// For each inner envelope term, its links to the first and last terms.
    pub inner: Vec<(LinkReport, LinkReport)>,
    pub pass: bool,
}

/// Verifies that the chain's baseline holds and that every refined term lies
/// between the baseline endpoints.
pub fn check_refinement(chain: &ExpressionChain, tol: f64) -> Result<RefinementReport> {
    let env = &chain.envelope;
    let (first, last) = (&env[0], &env[env.len() - 1]);
    let baseline = link(first, last, ("baseline lhs", "baseline rhs"), tol)?;
    let inner = env[1..env.len() - 1]
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let name = format!("refined term {}", i + 1);
            Ok((
                link(first, t, ("baseline lhs", &name), tol)?,
                link(t, last, (&name, "baseline rhs"), tol)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = baseline.holds && inner.iter().all(|(a, b)| a.holds && b.holds);
    Ok(RefinementReport { baseline, inner, pass })
}

/// Hex SHA-256 of the instance JSON, salted with the function id and map JSON.
pub fn instance_digest(inst: &Instance, f: &FunctionDescriptor, map: Option<&PositiveUnitalMap>) -> Result<String> {
    let mut hasher = Sha256::new();
    hasher.update(inst.to_json()?.as_bytes());
    hasher.update([0u8]);
    hasher.update(f.id().as_bytes());
    hasher.update([0u8]);
    if let Some(phi) = map {
        hasher.update(serde_json::to_string(phi)?.as_bytes());
    }
    Ok(hex::encode(hasher.finalize()))
}
