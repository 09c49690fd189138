//! Random operator tuples satisfying the spectral and sum constraints of each
//! inequality.
//!
//! Quadruples are built constructively rather than by rejection: exact
//! `A + D = B + C` has probability zero under independent sampling, so `A`
//! and `D` are derived from `B + C` plus a positive-part correction.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{apply_fn, loewner_leq, positive_part, spectral_bounds, HermitianMatrix};
use crate::maps::{sample_map_family, MapFamily};
use crate::matrix::CMatrix;

/// Attempts before [`Error::ExhaustedRetries`].
pub const MAX_ATTEMPTS: usize = 1000;

/// Default tolerance of [`validate_instance`].
pub const VALIDATION_TOL: f64 = 1e-10;

/// `(G + G*)/2` with `G` complex Gaussian.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::symmetrize(CMatrix::gaussian(dim, dim, rng))
}

/// PSD matrix with eigenvalues uniform in `[0, scale]` and a Haar eigenbasis.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> HermitianMatrix {
    let values: Vec<f64> = (0..dim).map(|_| scale * rng.random::<f64>()).collect();
    HermitianMatrix::from_spectral(&values, &CMatrix::random_unitary(dim, rng))
}

/// Hermitian matrix with eigenvalues uniform in `[lo, hi]` and a Haar eigenbasis.
pub fn sample_sandwiched_matrix<R: Rng + ?Sized>(
    dim: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad spectral interval [{lo}, {hi}]")));
    }
    let values: Vec<f64> = (0..dim).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    let out = HermitianMatrix::from_spectral(&values, &CMatrix::random_unitary(dim, rng));
    // Rounding in V·Λ·V* can push an extreme eigenvalue a few ulps past the
    // bound; pull the matrix back in if so.
    let (lo_seen, hi_seen) = spectral_bounds(&out)?;
    if lo_seen < lo || hi_seen > hi {
        return apply_fn(&out, |t| t.clamp(lo, hi));
    }
    Ok(out)
}

fn check_interval(m: f64, upper: f64) -> Result<()> {
    if !(m < upper) || !m.is_finite() || !upper.is_finite() {
        return Err(Error::DegenerateInterval { m, upper });
    }
    Ok(())
}

/// Which sum constraint a quadruple satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SumRelation {
    /// `A + D = B + C`
    EqualSum,
    /// `B + C ≤ A + D`
    SumLeq,
    /// `A + D ≤ B + C`
    SumGeq,
}

impl fmt::Display for SumRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EqualSum => "EqualSum",
            Self::SumLeq => "SumLeq",
            Self::SumGeq => "SumGeq",
        })
    }
}

/// `A ≤ m ≤ B, C ≤ M ≤ D` plus a sum relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadrupleInstance {
    #[serde(rename = "A")]
    pub a: HermitianMatrix,
    #[serde(rename = "B")]
    pub b: HermitianMatrix,
    #[serde(rename = "C")]
    pub c: HermitianMatrix,
    #[serde(rename = "D")]
    pub d: HermitianMatrix,
    pub m: f64,
    #[serde(rename = "M")]
    pub upper: f64,
    pub relation: SumRelation,
    #[serde(rename = "nonneg_A", default, skip_serializing_if = "std::ops::Not::not")]
    pub require_nonnegative_a: bool,
}

impl QuadrupleInstance {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupleParams {
    pub dim: usize,
    pub m: f64,
    pub upper: f64,
    pub relation: SumRelation,
    pub nonneg_a: bool,
    /// Spectral-norm bound of the random PSD slack; `0.25 (M − m)` if `None`.
    pub q_scale: Option<f64>,
}

impl QuadrupleParams {
    pub fn new(dim: usize, m: f64, upper: f64, relation: SumRelation) -> Self {
        Self {
            dim,
            m,
            upper,
            relation,
            nonneg_a: false,
            q_scale: None,
        }
    }

    pub fn nonneg(mut self, yes: bool) -> Self {
        self.nonneg_a = yes;
        self
    }
}

/// Samples a quadruple satisfying `params`.
///
/// `B` and `C` are sandwiched in `[m, M]`; with `S = B + C` and
/// `P₀ = ((M+m)I − S)₊`:
/// * `EqualSum`: `A = mI − P₀ − Q`, `D = S − A`.
/// * `SumLeq`: `A = mI − Q`, `D = S − A + P₀ + Q'`.
/// * `SumGeq`: `A = mI − P₀ − Q`, `G = S − A − MI ≥ 0`, `D = MI + G − G^½WG^½`
///   with `0 ≤ W ≤ I`.
///
/// With `nonneg_a`, the slack `Q` is capped at half the headroom
/// `m − λ_max(P₀)` so `A > 0`; draws with no headroom are rejected.
pub fn sample_quadruple<R: Rng + ?Sized>(params: &QuadrupleParams, rng: &mut R) -> Result<QuadrupleInstance> {
    let QuadrupleParams {
        dim,
        m,
        upper,
        relation,
        nonneg_a,
        q_scale,
    } = *params;
    check_interval(m, upper)?;
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if nonneg_a && m <= 0.0 {
        return Err(Error::InvalidArgument(format!("nonneg_A needs m > 0, got m = {m}")));
    }
    let q_scale = q_scale.unwrap_or(0.25 * (upper - m));
    for _ in 0..MAX_ATTEMPTS {
        let b = sample_sandwiched_matrix(dim, m, upper, rng)?;
        let c = sample_sandwiched_matrix(dim, m, upper, rng)?;
        let s = b.checked_add(&c)?;
        let p0 = positive_part(&s.affine(-1.0, upper + m))?;

        let headroom = |p: &HermitianMatrix| -> Result<f64> { Ok(m - spectral_bounds(p)?.1) };
        let (a, d) = match relation {
            SumRelation::EqualSum | SumRelation::SumGeq => {
                let cap = if nonneg_a {
                    let h = headroom(&p0)?;
                    if h <= 0.0 {
                        continue;
                    }
                    q_scale.min(0.5 * h)
                } else {
                    q_scale
                };
                let q = random_psd(dim, cap, rng);
                let a = p0.checked_add(&q)?.affine(-1.0, m);
                let d = if relation == SumRelation::EqualSum {
                    s.checked_sub(&a)?
                } else {
                    let g = positive_part(&s.checked_sub(&a)?.shift(-upper))?;
                    let root = apply_fn(&g, |t| t.max(0.0).sqrt())?;
                    let w = random_psd(dim, 1.0, rng);
                    let r = w.congruence(root.as_complex())?;
                    g.checked_sub(&r)?.shift(upper)
                };
                (a, d)
            }
            SumRelation::SumLeq => {
                let cap = if nonneg_a { q_scale.min(0.5 * m) } else { q_scale };
                let a = random_psd(dim, cap, rng).affine(-1.0, m);
                let extra = random_psd(dim, q_scale, rng);
                let d = s.checked_sub(&a)?.checked_add(&p0)?.checked_add(&extra)?;
                (a, d)
            }
        };
        let inst = QuadrupleInstance {
            a,
            b,
            c,
            d,
            m,
            upper,
            relation,
            require_nonnegative_a: nonneg_a,
        };
        if validate_quadruple(&inst, VALIDATION_TOL).is_empty() {
            return Ok(inst);
        }
    }
    Err(Error::ExhaustedRetries {
        attempts: MAX_ATTEMPTS,
        what: format!("{relation} quadruple with m = {m}, M = {upper}, nonneg_A = {nonneg_a}"),
    })
}

/// `(A, D)` with `A ≤ m ≤ (A+D)/2 ≤ M ≤ D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MidpointInstance {
    #[serde(rename = "A")]
    pub a: HermitianMatrix,
    #[serde(rename = "D")]
    pub d: HermitianMatrix,
    pub m: f64,
    #[serde(rename = "M")]
    pub upper: f64,
}

impl MidpointInstance {
    pub fn midpoint(&self) -> Result<HermitianMatrix> {
        Ok(self.a.checked_add(&self.d)?.scale(0.5))
    }
}

/// Samples a midpoint pair via an `EqualSum` quadruple with `B = C`.
pub fn sample_midpoint<R: Rng + ?Sized>(
    dim: usize,
    m: f64,
    upper: f64,
    nonneg_a: bool,
    rng: &mut R,
) -> Result<MidpointInstance> {
    check_interval(m, upper)?;
    if nonneg_a && m <= 0.0 {
        return Err(Error::InvalidArgument(format!("nonneg_A needs m > 0, got m = {m}")));
    }
    let q_scale = 0.25 * (upper - m);
    for _ in 0..MAX_ATTEMPTS {
        let x = sample_sandwiched_matrix(dim, m, upper, rng)?;
        let s = x.scale(2.0);
        let p0 = positive_part(&s.affine(-1.0, upper + m))?;
        let cap = if nonneg_a {
            let h = m - spectral_bounds(&p0)?.1;
            if h <= 0.0 {
                continue;
            }
            q_scale.min(0.5 * h)
        } else {
            q_scale
        };
        let a = p0.checked_add(&random_psd(dim, cap, rng))?.affine(-1.0, m);
        let d = s.checked_sub(&a)?;
        let inst = MidpointInstance { a, d, m, upper };
        if validate_midpoint(&inst, VALIDATION_TOL, nonneg_a).is_empty() {
            return Ok(inst);
        }
    }
    Err(Error::ExhaustedRetries {
        attempts: MAX_ATTEMPTS,
        what: format!("midpoint pair with m = {m}, M = {upper}, nonneg_A = {nonneg_a}"),
    })
}

/// `B_i` with spectra in `[m, M]` and a unital family. `C_i = (M+m)I − B_i`,
/// `A_i = mI` and `D_i = MI` are implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MercerInstance {
    #[serde(rename = "B_list")]
    pub b_list: Vec<HermitianMatrix>,
    pub m: f64,
    #[serde(rename = "M")]
    pub upper: f64,
    pub family: MapFamily,
}

impl MercerInstance {
    pub fn c_list(&self) -> Vec<HermitianMatrix> {
        self.b_list
            .iter()
            .map(|b| b.affine(-1.0, self.m + self.upper))
            .collect()
    }
}

pub fn sample_mercer_family<R: Rng + ?Sized>(
    n: usize,
    dim: usize,
    m: f64,
    upper: f64,
    rng: &mut R,
) -> Result<MercerInstance> {
    check_interval(m, upper)?;
    if n == 0 {
        return Err(Error::InvalidArgument("family size must be at least 1".into()));
    }
    let b_list = (0..n)
        .map(|_| sample_sandwiched_matrix(dim, m, upper, rng))
        .collect::<Result<Vec<_>>>()?;
    let family = sample_map_family(n, dim, rng)?;
    Ok(MercerInstance {
        b_list,
        m,
        upper,
        family,
    })
}

/// One `(A_i, B_i, C_i, D_i)` of a multi-map instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadrupleTerms {
    #[serde(rename = "A")]
    pub a: HermitianMatrix,
    #[serde(rename = "B")]
    pub b: HermitianMatrix,
    #[serde(rename = "C")]
    pub c: HermitianMatrix,
    #[serde(rename = "D")]
    pub d: HermitianMatrix,
}

/// `n` quadruples sharing `m`, `M`, plus a unital family `{Φ_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiQuadrupleInstance {
    pub quadruples: Vec<QuadrupleTerms>,
    pub m: f64,
    #[serde(rename = "M")]
    pub upper: f64,
    pub relation: SumRelation,
    #[serde(rename = "nonneg_A", default, skip_serializing_if = "std::ops::Not::not")]
    pub require_nonnegative_a: bool,
    pub family: MapFamily,
}

impl MultiQuadrupleInstance {
    fn pick(&self, f: impl Fn(&QuadrupleTerms) -> &HermitianMatrix) -> Vec<HermitianMatrix> {
        self.quadruples.iter().map(|q| f(q).clone()).collect()
    }

    pub fn a_list(&self) -> Vec<HermitianMatrix> {
        self.pick(|q| &q.a)
    }

    pub fn b_list(&self) -> Vec<HermitianMatrix> {
        self.pick(|q| &q.b)
    }

    pub fn c_list(&self) -> Vec<HermitianMatrix> {
        self.pick(|q| &q.c)
    }

    pub fn d_list(&self) -> Vec<HermitianMatrix> {
        self.pick(|q| &q.d)
    }
}

pub fn sample_multi_quadruple<R: Rng + ?Sized>(
    n: usize,
    params: &QuadrupleParams,
    rng: &mut R,
) -> Result<MultiQuadrupleInstance> {
    if n == 0 {
        return Err(Error::InvalidArgument("family size must be at least 1".into()));
    }
    let quadruples = (0..n)
        .map(|_| {
            let q = sample_quadruple(params, rng)?;
            Ok(QuadrupleTerms {
                a: q.a,
                b: q.b,
                c: q.c,
                d: q.d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let family = sample_map_family(n, params.dim, rng)?;
    Ok(MultiQuadrupleInstance {
        quadruples,
        m: params.m,
        upper: params.upper,
        relation: params.relation,
        require_nonnegative_a: params.nonneg_a,
        family,
    })
}

/// Any instance shape accepted by the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Quadruple(QuadrupleInstance),
    Midpoint(MidpointInstance),
    Mercer(MercerInstance),
    MultiQuadruple(MultiQuadrupleInstance),
}

impl Instance {
    pub fn shape_name(&self) -> &'static str {
        match self {
            Self::Quadruple(_) => "quadruple",
            Self::Midpoint(_) => "midpoint pair",
            Self::Mercer(_) => "Mercer family",
            Self::MultiQuadruple(_) => "multi-quadruple family",
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match self {
            Self::Quadruple(q) => (q.m, q.upper),
            Self::Midpoint(q) => (q.m, q.upper),
            Self::Mercer(q) => (q.m, q.upper),
            Self::MultiQuadruple(q) => (q.m, q.upper),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Self::Quadruple(q) => q.a.dim(),
            Self::Midpoint(q) => q.a.dim(),
            Self::Mercer(q) => q.b_list.first().map_or(0, HermitianMatrix::dim),
            Self::MultiQuadruple(q) => q.quadruples.first().map_or(0, |t| t.a.dim()),
        }
    }

    /// Compact canonical JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }
}

impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Quadruple(q) => q.serialize(s),
            Self::Midpoint(q) => q.serialize(s),
            Self::Mercer(q) => q.serialize(s),
            Self::MultiQuadruple(q) => q.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Instance {
    /// The shape is recognised by its keys: `quadruples`, `B_list`, `B`, or
    /// just `A` and `D`.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(d)?;
        let obj = value
            .as_object()
            .ok_or_else(|| D::Error::custom("instance must be a JSON object"))?;
        let conv = |e: serde_json::Error| D::Error::custom(e.to_string());
        if obj.contains_key("quadruples") {
            serde_json::from_value(value).map(Self::MultiQuadruple).map_err(conv)
        } else if obj.contains_key("B_list") {
            serde_json::from_value(value).map(Self::Mercer).map_err(conv)
        } else if obj.contains_key("B") {
            serde_json::from_value(value).map(Self::Quadruple).map_err(conv)
        } else {
            serde_json::from_value(value).map(Self::Midpoint).map_err(conv)
        }
    }
}

/// A failed instance constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// e.g. `"lambda_max(A) > m"`.
    pub constraint: String,
    /// The offending eigenvalue or norm.
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (value {})", self.constraint, self.value)
    }
}

struct Checker {
    eps: f64,
    tol: f64,
    out: Vec<Violation>,
}

impl Checker {
    fn new(m: f64, upper: f64, tol: f64) -> Self {
        let mut out = Vec::new();
        if !(m < upper) {
            out.push(Violation {
                constraint: "m < M".into(),
                value: upper - m,
            });
        }
        Self {
            eps: tol * (1.0 + m.abs() + upper.abs()),
            tol,
            out,
        }
    }

    fn push(&mut self, constraint: String, value: f64) {
        self.out.push(Violation { constraint, value });
    }

    fn bounds(&mut self, name: &str, x: &HermitianMatrix) -> Option<(f64, f64)> {
        match spectral_bounds(x) {
            Ok(b) => Some(b),
            Err(e) => {
                self.push(format!("spectrum of {name} not computable: {e}"), f64::NAN);
                None
            }
        }
    }

    fn at_most(&mut self, name: &str, x: &HermitianMatrix, bound: f64, bound_name: &str) {
        if let Some((_, hi)) = self.bounds(name, x) {
            if hi > bound + self.eps {
                self.push(format!("lambda_max({name}) > {bound_name}"), hi);
            }
        }
    }

    fn at_least(&mut self, name: &str, x: &HermitianMatrix, bound: f64, bound_name: &str) {
        if let Some((lo, _)) = self.bounds(name, x) {
            if lo < bound - self.eps {
                self.push(format!("lambda_min({name}) < {bound_name}"), lo);
            }
        }
    }

    fn same_dim(&mut self, names: &str, mats: &[&HermitianMatrix]) -> bool {
        let d = mats[0].dim();
        if mats.iter().any(|x| x.dim() != d) {
            self.push(format!("{names} differ in dimension"), f64::NAN);
            return false;
        }
        true
    }

    fn leq(&mut self, name: &str, lhs: &HermitianMatrix, rhs: &HermitianMatrix) {
        match loewner_leq(lhs, rhs, self.tol) {
            Ok(v) if v.relation.is_leq() => {}
            Ok(v) => self.push(format!("{name} fails"), v.min_eigenvalue_of_difference),
            Err(e) => self.push(format!("{name} not computable: {e}"), f64::NAN),
        }
    }

    fn equal(&mut self, name: &str, lhs: &HermitianMatrix, rhs: &HermitianMatrix) {
        let gap = lhs.checked_sub(rhs).map(|x| x.frobenius_norm()).unwrap_or(f64::INFINITY);
        let scale = (lhs.frobenius_norm() + rhs.frobenius_norm()).max(1.0);
        if gap > self.tol * scale {
            self.push(format!("{name} fails"), gap);
        }
    }

    fn relation(&mut self, relation: SumRelation, t: (&HermitianMatrix, &HermitianMatrix, &HermitianMatrix, &HermitianMatrix)) {
        let (a, b, c, d) = t;
        let (Ok(ad), Ok(bc)) = (a.checked_add(d), b.checked_add(c)) else {
            return;
        };
        match relation {
            SumRelation::EqualSum => self.equal("A + D = B + C", &ad, &bc),
            SumRelation::SumLeq => self.leq("B + C <= A + D", &bc, &ad),
            SumRelation::SumGeq => self.leq("A + D <= B + C", &ad, &bc),
        }
    }

    fn quadruple(&mut self, m: f64, upper: f64, t: (&HermitianMatrix, &HermitianMatrix, &HermitianMatrix, &HermitianMatrix), suffix: &str) {
        let (a, b, c, d) = t;
        if !self.same_dim("A, B, C, D", &[a, b, c, d]) {
            return;
        }
        self.at_most(&format!("A{suffix}"), a, m, "m");
        self.at_least(&format!("B{suffix}"), b, m, "m");
        self.at_most(&format!("B{suffix}"), b, upper, "M");
        self.at_least(&format!("C{suffix}"), c, m, "m");
        self.at_most(&format!("C{suffix}"), c, upper, "M");
        self.at_least(&format!("D{suffix}"), d, upper, "M");
    }

    fn family(&mut self, family: &MapFamily, n: usize, dim: usize) {
        if family.len() != n {
            self.push(format!("family has {} maps for {n} operators", family.len()), family.len() as f64);
        }
        if family.input_dim() != dim {
            self.push("family input dimension differs from operators".into(), family.input_dim() as f64);
            return;
        }
        match family.unital_defect() {
            Ok(defect) if defect <= 1e-12 * (dim as f64).sqrt().max(1.0) => {}
            Ok(defect) => self.push("sum of Phi_i(I) != I".into(), defect),
            Err(e) => self.push(format!("family not evaluable: {e}"), f64::NAN),
        }
    }
}

fn validate_quadruple(q: &QuadrupleInstance, tol: f64) -> Vec<Violation> {
    let mut ck = Checker::new(q.m, q.upper, tol);
    let t = (&q.a, &q.b, &q.c, &q.d);
    ck.quadruple(q.m, q.upper, t, "");
    if q.require_nonnegative_a {
        ck.at_least("A", &q.a, 0.0, "0");
    }
    if ck.out.iter().all(|v| !v.constraint.contains("dimension")) {
        ck.relation(q.relation, t);
    }
    ck.out
}

fn validate_midpoint(q: &MidpointInstance, tol: f64, nonneg_a: bool) -> Vec<Violation> {
    let mut ck = Checker::new(q.m, q.upper, tol);
    if !ck.same_dim("A, D", &[&q.a, &q.d]) {
        return ck.out;
    }
    ck.at_most("A", &q.a, q.m, "m");
    ck.at_least("D", &q.d, q.upper, "M");
    if nonneg_a {
        ck.at_least("A", &q.a, 0.0, "0");
    }
    if let Ok(x) = q.midpoint() {
        ck.at_least("(A+D)/2", &x, q.m, "m");
        ck.at_most("(A+D)/2", &x, q.upper, "M");
    }
    ck.out
}

/// Checks every invariant of the instance; an empty list means valid.
pub fn validate_instance(inst: &Instance, tol: f64) -> Vec<Violation> {
    match inst {
        Instance::Quadruple(q) => validate_quadruple(q, tol),
        Instance::Midpoint(q) => validate_midpoint(q, tol, false),
        Instance::Mercer(q) => {
            let mut ck = Checker::new(q.m, q.upper, tol);
            if q.b_list.is_empty() {
                ck.push("B_list is empty".into(), 0.0);
                return ck.out;
            }
            let refs: Vec<&HermitianMatrix> = q.b_list.iter().collect();
            if !ck.same_dim("B_i", &refs) {
                return ck.out;
            }
            for (i, b) in q.b_list.iter().enumerate() {
                ck.at_least(&format!("B_{i}"), b, q.m, "m");
                ck.at_most(&format!("B_{i}"), b, q.upper, "M");
            }
            ck.family(&q.family, q.b_list.len(), q.b_list[0].dim());
            ck.out
        }
        Instance::MultiQuadruple(q) => {
            let mut ck = Checker::new(q.m, q.upper, tol);
            if q.quadruples.is_empty() {
                ck.push("quadruples is empty".into(), 0.0);
                return ck.out;
            }
            let dim = q.quadruples[0].a.dim();
            for (i, t) in q.quadruples.iter().enumerate() {
                let terms = (&t.a, &t.b, &t.c, &t.d);
                if !ck.same_dim(&format!("A_{i}, B_{i}, C_{i}, D_{i}"), &[&t.a, &t.b, &t.c, &t.d, &q.quadruples[0].a]) {
                    continue;
                }
                ck.quadruple(q.m, q.upper, terms, &format!("_{i}"));
                if q.require_nonnegative_a {
                    ck.at_least(&format!("A_{i}"), &t.a, 0.0, "0");
                }
                ck.relation(q.relation, terms);
            }
            ck.family(&q.family, q.quadruples.len(), dim);
            ck.out
        }
    }
}

/// Like [`validate_instance`] but also requires `A ≥ 0` for midpoint pairs.
pub fn validate_midpoint_nonneg(inst: &MidpointInstance, tol: f64) -> Vec<Violation> {
    validate_midpoint(inst, tol, true)
}
