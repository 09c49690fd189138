//! Positive unital linear maps and families of sub-unital maps summing to a
//! unital one.
//!
//! Four kinds are supported: the identity, pinchings onto a block partition,
//! compressions `A ↦ V*AV` by an isometry, and mixtures of unitary
//! conjugations. Together they exercise dimension change, block structure and
//! convex mixing.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::{random_hermitian, random_psd};
use crate::hermitian::{eigendecompose, HermitianMatrix};
use crate::matrix::CMatrix;
use crate::rng::seeded;

/// Tolerance used by [`verify_unital`].
pub const MAP_CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum PositiveUnitalMap {
    Identity { dim: usize },
    /// Keeps entries whose row and column fall in the same block.
    Pinching { dim: usize, blocks: Vec<Vec<usize>> },
    /// `A ↦ V* A V` with `V` of shape `n x k`.
    Compression { isometry: CMatrix },
    /// `A ↦ Σ w_j U_j A U_j*`.
    MixedUnitary { terms: Vec<(f64, CMatrix)> },
}

impl PositiveUnitalMap {
    pub fn identity(dim: usize) -> Self {
        Self::Identity { dim }
    }

    /// Validates that `blocks` partitions `0..dim`.
    pub fn pinching(dim: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; dim];
        for &i in blocks.iter().flatten() {
            if i >= dim || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "pinching blocks {blocks:?} do not partition 0..{dim}"
                )));
            }
        }
        if seen.iter().any(|s| !s) || blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidArgument(format!(
                "pinching blocks {blocks:?} do not partition 0..{dim}"
            )));
        }
        Ok(Self::Pinching { dim, blocks })
    }

    /// No isometry check here; see [`verify_unital`].
    pub fn compression(isometry: CMatrix) -> Self {
        Self::Compression { isometry }
    }

    pub fn mixed_unitary(terms: Vec<(f64, CMatrix)>) -> Result<Self> {
        let n = terms.first().map(|(_, u)| u.rows()).ok_or_else(|| {
            Error::InvalidArgument("mixed-unitary map needs at least one term".into())
        })?;
        if terms.iter().any(|(w, u)| !(*w > 0.0) || u.rows() != n || u.cols() != n) {
            return Err(Error::InvalidArgument(
                "mixed-unitary terms need positive weights and square unitaries of one size".into(),
            ));
        }
        Ok(Self::MixedUnitary { terms })
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Self::Identity { dim } | Self::Pinching { dim, .. } => *dim,
            Self::Compression { isometry } => isometry.rows(),
            Self::MixedUnitary { terms } => terms[0].1.rows(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Self::Compression { isometry } => isometry.cols(),
            _ => self.input_dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Identity { .. } => "identity",
            Self::Pinching { .. } => "pinching",
            Self::Compression { .. } => "compression",
            Self::MixedUnitary { .. } => "mixed",
        }
    }

    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        if a.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                left: self.input_dim(),
                right: a.dim(),
            });
        }
        match self {
            Self::Identity { .. } => Ok(a.clone()),
            Self::Pinching { dim, blocks } => {
                let mut block_of = vec![0; *dim];
                for (b, members) in blocks.iter().enumerate() {
                    for &i in members {
                        block_of[i] = b;
                    }
                }
                let mut out = a.as_complex().clone();
                for i in 0..*dim {
                    for j in 0..*dim {
                        if block_of[i] != block_of[j] {
                            out[(i, j)] = Complex64::new(0.0, 0.0);
                        }
                    }
                }
                HermitianMatrix::from_complex(out)
            }
            Self::Compression { isometry } => a.congruence(isometry),
            Self::MixedUnitary { terms } => {
                let mut acc = HermitianMatrix::zeros(a.dim());
                for (w, u) in terms {
                    acc = acc.checked_add(&a.conjugate_by(u)?.scale(*w))?;
                }
                Ok(acc)
            }
        }
    }
}

/// Applies a positive unital map.
pub fn apply_map(phi: &PositiveUnitalMap, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    phi.apply(a)
}

/// `A ↦ weight · Φ(A)`, a sub-unital positive map.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMap {
    pub weight: f64,
    pub map: PositiveUnitalMap,
}

impl WeightedMap {
    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(self.map.apply(a)?.scale(self.weight))
    }
}

/// Positive maps `Φ_1 … Φ_n` with `Σ Φ_i(I) = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamily {
    pub members: Vec<WeightedMap>,
}

impl MapFamily {
    pub fn new(members: Vec<WeightedMap>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidArgument("a map family needs at least one member".into()))?;
        let (n, k) = (first.map.input_dim(), first.map.output_dim());
        if members
            .iter()
            .any(|m| m.map.input_dim() != n || m.map.output_dim() != k || !(m.weight > 0.0))
        {
            return Err(Error::InvalidArgument(
                "family members need positive weights and common input/output dimensions".into(),
            ));
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.members[0].map.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.members[0].map.output_dim()
    }

    /// `Σ_i Φ_i(A_i)`.
    pub fn apply_sum(&self, inputs: &[HermitianMatrix]) -> Result<HermitianMatrix> {
        if inputs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: inputs.len(),
            });
        }
        let mut acc = HermitianMatrix::zeros(self.output_dim());
        for (member, a) in self.members.iter().zip(inputs) {
            acc = acc.checked_add(&member.apply(a)?)?;
        }
        Ok(acc)
    }

    /// `Σ_i Φ_i(A)` for one common argument.
    pub fn apply_common(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        let inputs = vec![a.clone(); self.len()];
        self.apply_sum(&inputs)
    }

    /// `‖Σ Φ_i(I) − I‖_F`.
    pub fn unital_defect(&self) -> Result<f64> {
        let sum = self.apply_common(&HermitianMatrix::identity(self.input_dim()))?;
        Ok(sum.checked_sub(&HermitianMatrix::identity(self.output_dim()))?.frobenius_norm())
    }
}

/// Parsed CLI map spec.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Identity,
    /// `pinching` (random partition) or `pinching:blocks=0,1|2,3`.
    Pinching(Option<Vec<Vec<usize>>>),
    /// `compression` (random `k`) or `compression:k=<int>`.
    Compression(Option<usize>),
    /// `mixed` (random count) or `mixed:count=<int>`.
    Mixed(Option<usize>),
    /// `family:n=<int>`.
    Family(usize),
}

impl MapSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: spec.to_string(),
            reason: reason.to_string(),
        };
        let (kind, param) = match spec.split_once(':') {
            Some((kind, rest)) => {
                let (key, value) = rest.split_once('=').ok_or_else(|| err("expected key=value"))?;
                (kind, Some((key, value)))
            }
            None => (spec, None),
        };
        let int = |key: &str, expected: &str, value: &str| -> Result<usize> {
            if key != expected {
                return Err(err(&format!("expected parameter `{expected}`")));
            }
            let v: usize = value.parse().map_err(|_| err("expected a positive integer"))?;
            if v == 0 {
                return Err(err("expected a positive integer"));
            }
            Ok(v)
        };
        match (kind, param) {
            ("identity", None) => Ok(Self::Identity),
            ("pinching", None) => Ok(Self::Pinching(None)),
            ("pinching", Some(("blocks", value))) => {
                let blocks = value
                    .split('|')
                    .map(|b| {
                        b.split(',')
                            .map(|i| i.trim().parse::<usize>().map_err(|_| err("bad block index")))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::Pinching(Some(blocks)))
            }
            ("compression", None) => Ok(Self::Compression(None)),
            ("compression", Some((k, v))) => Ok(Self::Compression(Some(int(k, "k", v)?))),
            ("mixed", None) => Ok(Self::Mixed(None)),
            ("mixed", Some((k, v))) => Ok(Self::Mixed(Some(int(k, "count", v)?))),
            ("family", Some((k, v))) => Ok(Self::Family(int(k, "n", v)?)),
            ("identity" | "pinching" | "family", _) => Err(err("bad parameter")),
            (other, _) => Err(Error::UnknownKind(other.to_string())),
        }
    }

    pub fn is_family(&self) -> bool {
        matches!(self, Self::Family(_))
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Pinching(None) => f.write_str("pinching"),
            Self::Pinching(Some(blocks)) => {
                let text: Vec<String> = blocks
                    .iter()
                    .map(|b| b.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "pinching:blocks={}", text.join("|"))
            }
            Self::Compression(None) => f.write_str("compression"),
            Self::Compression(Some(k)) => write!(f, "compression:k={k}"),
            Self::Mixed(None) => f.write_str("mixed"),
            Self::Mixed(Some(c)) => write!(f, "mixed:count={c}"),
            Self::Family(n) => write!(f, "family:n={n}"),
        }
    }
}

/// Flat-Dirichlet weights on `n` points.
pub fn simplex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| Distribution::<f64>::sample(&Exp1, rng) + f64::MIN_POSITIVE)
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn random_partition<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<usize>> {
    // Restricted growth string: element i joins an existing block or opens a new one.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..dim {
        let choice = rng.random_range(0..=blocks.len());
        if choice == blocks.len() {
            blocks.push(vec![i]);
        } else {
            blocks[choice].push(i);
        }
    }
    blocks
}

/// Random unitary as the eigenvector matrix of a random Hermitian matrix.
fn random_eigenbasis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    Ok(eigendecompose(&random_hermitian(dim, rng))?.vectors)
}

/// Samples a single (unital) map of the given kind on `dim x dim` inputs.
pub fn sample_map<R: Rng + ?Sized>(spec: &MapSpec, dim: usize, rng: &mut R) -> Result<PositiveUnitalMap> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    match spec {
        MapSpec::Identity => Ok(PositiveUnitalMap::identity(dim)),
        MapSpec::Pinching(Some(blocks)) => PositiveUnitalMap::pinching(dim, blocks.clone()),
        MapSpec::Pinching(None) => PositiveUnitalMap::pinching(dim, random_partition(dim, rng)),
        MapSpec::Compression(k) => {
            let k = match k {
                Some(k) if *k > dim => {
                    return Err(Error::InvalidArgument(format!(
                        "compression target {k} exceeds dimension {dim}"
                    )))
                }
                Some(k) => *k,
                None => rng.random_range(1..=dim),
            };
            Ok(PositiveUnitalMap::compression(CMatrix::random_isometry(dim, k, rng)))
        }
        MapSpec::Mixed(count) => {
            let count = count.unwrap_or_else(|| rng.random_range(1..=4));
            let weights = simplex_weights(count, rng);
            let terms = weights
                .into_iter()
                .map(|w| Ok((w, random_eigenbasis(dim, rng)?)))
                .collect::<Result<Vec<_>>>()?;
            PositiveUnitalMap::mixed_unitary(terms)
        }
        MapSpec::Family(_) => Err(Error::UnknownKind(format!("{spec} is a family, not a single map"))),
    }
}

/// Samples a family `{w_i Ψ_i}` with `Ψ_i` unital of random kind and `Σ w_i = 1`.
///
/// Every member maps `dim x dim` to `dim x dim`; compressions are taken with
/// `k = dim`.
pub fn sample_map_family<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<MapFamily> {
    if n == 0 {
        return Err(Error::InvalidArgument("family size must be at least 1".into()));
    }
    let weights = simplex_weights(n, rng);
    let members = weights
        .into_iter()
        .map(|weight| {
            let spec = match rng.random_range(0..4) {
                0 => MapSpec::Identity,
                1 => MapSpec::Pinching(None),
                2 => MapSpec::Compression(Some(dim)),
                _ => MapSpec::Mixed(None),
            };
            Ok(WeightedMap {
                weight,
                map: sample_map(&spec, dim, rng)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MapFamily::new(members)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitalReport {
    /// `‖Φ(I) − I‖_F`.
    pub unital_deviation: f64,
    /// Worst `‖Φ(A + cB) − Φ(A) − cΦ(B)‖_F / max(1, scale)`.
    pub linearity_deviation: f64,
    /// Most negative `λ_min(Φ(P))` over PSD samples, relative to `max(1, ‖P‖_F)`.
    pub positivity_violation: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Random-input check that `phi` is a positive unital linear map.
pub fn verify_unital(phi: &PositiveUnitalMap, samples: usize, seed: u64) -> UnitalReport {
    let mut rng = seeded(seed);
    let n = phi.input_dim();
    let unital_deviation = phi
        .apply(&HermitianMatrix::identity(n))
        .and_then(|p| p.checked_sub(&HermitianMatrix::identity(phi.output_dim())))
        .map(|d| d.frobenius_norm())
        .unwrap_or(f64::INFINITY);
    let mut linearity_deviation: f64 = 0.0;
    let mut positivity_violation: f64 = 0.0;
    for _ in 0..samples {
        let a = random_hermitian(n, &mut rng);
        let b = random_hermitian(n, &mut rng);
        let c: f64 = rng.random_range(-2.0..2.0);
        let lin = (|| -> Result<f64> {
            let combined = phi.apply(&a.checked_add(&b.scale(c))?)?;
            let separate = phi.apply(&a)?.checked_add(&phi.apply(&b)?.scale(c))?;
            let scale = a.frobenius_norm() + c.abs() * b.frobenius_norm();
            Ok(combined.checked_sub(&separate)?.frobenius_norm() / scale.max(1.0))
        })()
        .unwrap_or(f64::INFINITY);
        linearity_deviation = linearity_deviation.max(lin);

        let p = random_psd(n, 1.0, &mut rng);
        let pos = phi
            .apply(&p)
            .and_then(|q| Ok(eigendecompose(&q)?.min()))
            .map(|lo| (-lo).max(0.0) / p.frobenius_norm().max(1.0))
            .unwrap_or(f64::INFINITY);
        positivity_violation = positivity_violation.max(pos);
    }
    let pass = unital_deviation <= MAP_CHECK_TOL
        && linearity_deviation <= MAP_CHECK_TOL
        && positivity_violation <= MAP_CHECK_TOL;
    UnitalReport {
        unital_deviation,
        linearity_deviation,
        positivity_violation,
        samples,
        pass,
    }
}

// ---------------------------------------------------------------------------
// File representation
// ---------------------------------------------------------------------------

/// Rectangular complex matrix on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl From<&CMatrix> for RectFile {
    fn from(m: &CMatrix) -> Self {
        let im = m.im_rows();
        let has_im = im.iter().flatten().any(|&x| x != 0.0);
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: m.re_rows(),
            im: has_im.then_some(im),
        }
    }
}

impl TryFrom<&RectFile> for CMatrix {
    type Error = Error;

    fn try_from(f: &RectFile) -> Result<Self> {
        let m = CMatrix::from_parts(&f.re, f.im.as_deref())?;
        if m.rows() != f.rows || m.cols() != f.cols {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, header says {}x{}",
                m.rows(),
                m.cols(),
                f.rows,
                f.cols
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryTermFile {
    pub weight: f64,
    pub unitary: RectFile,
}

/// A concrete map on disk, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapFile {
    Identity { dim: usize },
    Pinching { dim: usize, blocks: Vec<Vec<usize>> },
    Compression { isometry: RectFile },
    Mixed { terms: Vec<UnitaryTermFile> },
}

impl From<&PositiveUnitalMap> for MapFile {
    fn from(m: &PositiveUnitalMap) -> Self {
        match m {
            PositiveUnitalMap::Identity { dim } => Self::Identity { dim: *dim },
            PositiveUnitalMap::Pinching { dim, blocks } => Self::Pinching {
                dim: *dim,
                blocks: blocks.clone(),
            },
            PositiveUnitalMap::Compression { isometry } => Self::Compression {
                isometry: isometry.into(),
            },
            PositiveUnitalMap::MixedUnitary { terms } => Self::Mixed {
                terms: terms
                    .iter()
                    .map(|(w, u)| UnitaryTermFile {
                        weight: *w,
                        unitary: u.into(),
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<&MapFile> for PositiveUnitalMap {
    type Error = Error;

    fn try_from(f: &MapFile) -> Result<Self> {
        match f {
            MapFile::Identity { dim } => Ok(Self::identity(*dim)),
            MapFile::Pinching { dim, blocks } => Self::pinching(*dim, blocks.clone()),
            MapFile::Compression { isometry } => Ok(Self::compression(isometry.try_into()?)),
            MapFile::Mixed { terms } => Self::mixed_unitary(
                terms
                    .iter()
                    .map(|t| Ok((t.weight, CMatrix::try_from(&t.unitary)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

impl Serialize for PositiveUnitalMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PositiveUnitalMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MapFile::deserialize(d)?;
        PositiveUnitalMap::try_from(&file).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct WeightedMapFile {
    weight: f64,
    map: PositiveUnitalMap,
}

impl Serialize for MapFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members.iter().map(|m| WeightedMapFile {
            weight: m.weight,
            map: m.map.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for MapFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let files = Vec::<WeightedMapFile>::deserialize(d)?;
        MapFamily::new(
            files
                .into_iter()
                .map(|f| WeightedMap {
                    weight: f.weight,
                    map: f.map,
                })
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}
