use rand::Rng;
use serde::Serialize;

use super::{build_chain, check_hypotheses, evaluate_chain, instance_digest, ChainOptions, ChainReport};
use super::{MapUse, Relaxation, Shape, TheoremId};
use crate::error::{Error, Result};
use crate::forge::{
    sample_mercer_family, sample_midpoint, sample_multi_quadruple, sample_quadruple, Instance, QuadrupleParams,
    SumRelation,
};
use crate::functions::FunctionDescriptor;
use crate::hermitian::DEFAULT_PSD_TOL;
use crate::maps::{sample_map, MapSpec, PositiveUnitalMap};
use crate::rng::{stream, StreamRng};

/// Where random instances are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRanges {
    /// `m` is uniform on this range.
    pub m_range: (f64, f64),
    /// `M − m` is uniform on this range.
    pub width_range: (f64, f64),
    pub dims: Vec<usize>,
}

impl Default for SamplingRanges {
    fn default() -> Self {
        Self {
            m_range: (0.5, 2.0),
            width_range: (0.5, 2.0),
            dims: vec![1, 2, 3],
        }
    }
}

impl SamplingRanges {
    /// Draws `(m, M, dim)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64, usize) {
        let m = uniform(self.m_range, rng);
        let width = uniform(self.width_range, rng);
        let dim = self.dims[rng.random_range(0..self.dims.len())];
        (m, m + width, dim)
    }
}

fn uniform<R: Rng + ?Sized>((lo, hi): (f64, f64), rng: &mut R) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// An instance together with the single map it is evaluated under.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedInstance {
    pub instance: Instance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<PositiveUnitalMap>,
}

/// Whether `A` must be drawn non-negative: always for superquadratic
/// theorems, and whenever `f` lives on a half-line starting at 0.
pub fn needs_nonnegative(theorem: TheoremId, f: &FunctionDescriptor) -> bool {
    theorem.is_superquadratic() || f.domain().lo >= 0.0
}

/// A sum relation under which the unrelaxed hypotheses hold.
pub fn admissible_relation<R: Rng + ?Sized>(
    theorem: TheoremId,
    f: &FunctionDescriptor,
    m: f64,
    upper: f64,
    rng: &mut R,
) -> Result<SumRelation> {
    if theorem.needs_equal_sum() {
        return Ok(SumRelation::EqualSum);
    }
    let mut options = vec![SumRelation::EqualSum];
    if theorem == TheoremId::LcPow {
        options.push(SumRelation::SumGeq);
    } else if theorem.has_quad_conditions() {
        let (fm, fu) = (f.eval_checked(m)?, f.eval_checked(upper)?);
        if fm <= fu {
            options.push(SumRelation::SumLeq);
        }
        if fu <= fm {
            options.push(SumRelation::SumGeq);
        }
    }
    Ok(options[rng.random_range(0..options.len())])
}

/// A sum relation that breaks the hypothesis named by `relax`.
pub fn relaxed_relation<R: Rng + ?Sized>(relax: Relaxation, rng: &mut R) -> SumRelation {
    match relax {
        Relaxation::CondIF | Relaxation::CondIISum => SumRelation::SumLeq,
        Relaxation::CondISum | Relaxation::CondIIF => SumRelation::SumGeq,
        Relaxation::EqualSum => {
            if rng.random_bool(0.5) {
                SumRelation::SumLeq
            } else {
                SumRelation::SumGeq
            }
        }
    }
}

/// Samples an instance of the theorem's shape and, for single-map theorems,
/// a map of kind `map`. Family theorems need `map = family:n=<k>`; theorems
/// without a map need `identity`.
#[allow(clippy::too_many_arguments)]
pub fn generate_instance<R: Rng + ?Sized>(
    theorem: TheoremId,
    f: &FunctionDescriptor,
    map: &MapSpec,
    dim: usize,
    m: f64,
    upper: f64,
    relation: SumRelation,
    rng: &mut R,
) -> Result<GeneratedInstance> {
    let nonneg = needs_nonnegative(theorem, f);
    let family_size = match (theorem.map_use(), map) {
        (MapUse::Family, MapSpec::Family(n)) => *n,
        (MapUse::None, MapSpec::Identity) | (MapUse::Single, _) if !map.is_family() => 0,
        _ => {
            return Err(Error::ShapeMismatch {
                theorem: theorem.to_string(),
                expected: match theorem.map_use() {
                    MapUse::None => "identity".into(),
                    MapUse::Single => "a single map".into(),
                    MapUse::Family => "family:n=<k>".into(),
                },
                found: map.to_string(),
            })
        }
    };
    let params = QuadrupleParams::new(dim, m, upper, relation).nonneg(nonneg);
    let instance = match theorem.shape() {
        Shape::Quadruple => Instance::Quadruple(sample_quadruple(&params, rng)?),
        Shape::Midpoint => Instance::Midpoint(sample_midpoint(dim, m, upper, nonneg, rng)?),
        Shape::Mercer => Instance::Mercer(sample_mercer_family(family_size, dim, m, upper, rng)?),
        Shape::MultiQuadruple => Instance::MultiQuadruple(sample_multi_quadruple(family_size, &params, rng)?),
    };
    let map = match theorem.map_use() {
        MapUse::Single => Some(sample_map(map, dim, rng)?),
        _ => None,
    };
    Ok(GeneratedInstance { instance, map })
}

#[derive(Debug, Clone)]
pub struct HuntConfig {
    pub theorem: TheoremId,
    pub relax: Option<Relaxation>,
    pub function: FunctionDescriptor,
    /// Map kind for single-map theorems, `family:n=<k>` for family theorems.
    pub map: MapSpec,
    pub budget: usize,
    pub seed: u64,
    pub ranges: SamplingRanges,
    pub tol: f64,
}

impl HuntConfig {
    /// Defaults to the identity map (or a family of 3) with default ranges.
    pub fn new(theorem: TheoremId, relax: Option<Relaxation>, function: FunctionDescriptor, budget: usize, seed: u64) -> Self {
        let map = match theorem.map_use() {
            MapUse::Family => MapSpec::Family(3),
            _ => MapSpec::Identity,
        };
        Self {
            theorem,
            relax,
            function,
            map,
            budget,
            seed,
            ranges: SamplingRanges::default(),
            tol: DEFAULT_PSD_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    /// Sample index within the hunt.
    pub index: usize,
    #[serde(flatten)]
    pub generated: GeneratedInstance,
    pub report: ChainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuntOutcome {
    pub theorem: TheoremId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relax: Option<Relaxation>,
    pub function: String,
    /// Samples drawn.
    pub drawn: usize,
    /// Samples that violated exactly the relaxed hypothesis and were evaluated.
    pub evaluated: usize,
    /// Samples discarded: sampling failures, or hypotheses off by more or
    /// less than the relaxation.
    pub skipped: usize,
    pub counterexample: Option<Counterexample>,
}

/// Draws up to `budget` instances that violate only the relaxed hypothesis
/// (or none, without a relaxation) and returns the first failing chain.
pub fn hunt_counterexample(cfg: &HuntConfig) -> Result<HuntOutcome> {
    let theorem = cfg.theorem;
    if let Some(r) = cfg.relax {
        if !theorem.relaxations().contains(&r) {
            return Err(Error::UnknownRelaxation(format!("{r} (not a hypothesis of {theorem})")));
        }
    }
    if cfg.ranges.dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions to sample".into()));
    }
    let strict = ChainOptions { tol: cfg.tol, relax: None };
    let relaxed = ChainOptions { tol: cfg.tol, relax: cfg.relax };
    let mut outcome = HuntOutcome {
        theorem,
        relax: cfg.relax,
        function: cfg.function.id().to_string(),
        drawn: 0,
        evaluated: 0,
        skipped: 0,
        counterexample: None,
    };
    for index in 0..cfg.budget {
        outcome.drawn += 1;
        let mut rng = stream(cfg.seed, 0, index as u64);
        let Some(generated) = draw(cfg, &mut rng) else {
            outcome.skipped += 1;
            continue;
        };
        let map = generated.map.as_ref();
        let strict_ok = check_hypotheses(theorem, &generated.instance, &cfg.function, map, strict);
        let targeted = match (cfg.relax, &strict_ok) {
            (None, Ok(())) => true,
            (Some(_), Err(Error::HypothesisViolation { .. })) => {
                check_hypotheses(theorem, &generated.instance, &cfg.function, map, relaxed).is_ok()
            }
            _ => false,
        };
        if !targeted {
            outcome.skipped += 1;
            continue;
        }
        let report = match build_chain(theorem, &generated.instance, &cfg.function, map, relaxed)
            .and_then(|chain| evaluate_chain(&chain, cfg.tol))
        {
            Ok(r) => r,
            Err(_) => {
                outcome.skipped += 1;
                continue;
            }
        };
        outcome.evaluated += 1;
        if !report.pass {
            let digest = instance_digest(&generated.instance, &cfg.function, map)?;
            outcome.counterexample = Some(Counterexample {
                index,
                report: report.with_provenance(digest, Some(cfg.seed)),
                generated,
            });
            break;
        }
    }
    Ok(outcome)
}

fn draw(cfg: &HuntConfig, rng: &mut StreamRng) -> Option<GeneratedInstance> {
    let (m, upper, dim) = cfg.ranges.draw(rng);
    let relation = match cfg.relax {
        Some(r) => relaxed_relation(r, rng),
        None => admissible_relation(cfg.theorem, &cfg.function, m, upper, rng).ok()?,
    };
    generate_instance(cfg.theorem, &cfg.function, &cfg.map, dim, m, upper, relation, rng).ok()
}
