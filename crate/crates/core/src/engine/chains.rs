use super::compile::Interpolant;
use super::{ChainOptions, ExpressionChain, MapUse, Relaxation, Shape, TheoremId};
use crate::error::{Error, Result};
use crate::forge::{
    validate_instance, validate_midpoint_nonneg, Instance, MercerInstance, MidpointInstance, MultiQuadrupleInstance,
    QuadrupleInstance,
};
use crate::functions::{FunctionClass, FunctionDescriptor};
use crate::hermitian::{apply_scalar_function, loewner_leq, spectral_bounds, HermitianMatrix};
use crate::maps::{MapFamily, PositiveUnitalMap};

/// Builds the chain of `theorem` on `inst` after checking shape, function
/// class and hypotheses (minus `opts.relax`).
///
/// `map` is the single map for map theorems (identity when `None`); it must
/// be `None` or the identity for theorems without a map, and `None` for
/// family theorems, whose maps live in the instance.
pub fn build_chain(
    theorem: TheoremId,
    inst: &Instance,
    f: &FunctionDescriptor,
    map: Option<&PositiveUnitalMap>,
    opts: ChainOptions,
) -> Result<ExpressionChain> {
    check_shape(theorem, inst, map)?;
    check_class(theorem, f)?;
    check_hypotheses(theorem, inst, f, map, opts)?;
    compile(theorem, inst, f, map)
}

fn shape_of(inst: &Instance) -> Shape {
    match inst {
        Instance::Quadruple(_) => Shape::Quadruple,
        Instance::Midpoint(_) => Shape::Midpoint,
        Instance::Mercer(_) => Shape::Mercer,
        Instance::MultiQuadruple(_) => Shape::MultiQuadruple,
    }
}

fn shape_label(shape: Shape) -> &'static str {
    match shape {
        Shape::Quadruple => "quadruple",
        Shape::Midpoint => "midpoint pair",
        Shape::Mercer => "Mercer family",
        Shape::MultiQuadruple => "multi-quadruple family",
    }
}

fn check_shape(theorem: TheoremId, inst: &Instance, map: Option<&PositiveUnitalMap>) -> Result<()> {
    let mismatch = |expected: String, found: String| Error::ShapeMismatch {
        theorem: theorem.to_string(),
        expected,
        found,
    };
    if shape_of(inst) != theorem.shape() {
        return Err(mismatch(
            shape_label(theorem.shape()).into(),
            inst.shape_name().into(),
        ));
    }
    match (theorem.map_use(), map) {
        (MapUse::None, Some(phi)) if !matches!(phi, PositiveUnitalMap::Identity { .. }) => {
            Err(mismatch("no map".into(), format!("{} map", phi.kind_name())))
        }
        (MapUse::Family, Some(phi)) => Err(mismatch(
            "the family stored in the instance".into(),
            format!("a separate {} map", phi.kind_name()),
        )),
        (_, Some(phi)) if phi.input_dim() != inst.input_dim() => Err(Error::DimensionMismatch {
            left: inst.input_dim(),
            right: phi.input_dim(),
        }),
        _ => Ok(()),
    }
}

/// Checks that `f` carries the class the theorem needs.
pub fn check_class(theorem: TheoremId, f: &FunctionDescriptor) -> Result<()> {
    let fail = |required: &str| {
        Err(Error::ClassMismatch {
            theorem: theorem.to_string(),
            function: f.id().to_string(),
            required: required.to_string(),
        })
    };
    if theorem.is_log_convex() && !f.has_class(FunctionClass::LogConvex) {
        return fail("log-convex");
    }
    if theorem.is_superquadratic() && !f.has_class(FunctionClass::Superquadratic) {
        return fail("superquadratic");
    }
    if theorem.is_baseline() && !f.has_class(FunctionClass::Convex) {
        return fail("convex");
    }
    match (theorem, f.power_exponent()) {
        (TheoremId::LcPow, Some(p)) if p <= 0.0 => Ok(()),
        (TheoremId::LcPow, _) => fail("power t^p with p <= 0"),
        (TheoremId::SqPow, Some(p)) if p >= 2.0 => Ok(()),
        (TheoremId::SqPow, _) => fail("power t^p with p >= 2"),
        _ => Ok(()),
    }
}

/// Checks the theorem's hypotheses on a shape-compatible instance, skipping
/// the one named by `opts.relax`. Instance constraints always apply.
pub fn check_hypotheses(
    theorem: TheoremId,
    inst: &Instance,
    f: &FunctionDescriptor,
    map: Option<&PositiveUnitalMap>,
    opts: ChainOptions,
) -> Result<()> {
    check_shape(theorem, inst, map)?;
    let violated = |condition: String| {
        Err(Error::HypothesisViolation {
            theorem: theorem.to_string(),
            condition,
        })
    };
    if let Some(r) = opts.relax {
        if !theorem.relaxations().contains(&r) {
            return Err(Error::UnknownRelaxation(format!("{r} (not a hypothesis of {theorem})")));
        }
    }
    let mut problems: Vec<String> = validate_instance(inst, opts.tol).iter().map(|v| v.to_string()).collect();
    if let (Instance::Midpoint(q), TheoremId::SqMid) = (inst, theorem) {
        problems.extend(validate_midpoint_nonneg(q, opts.tol).iter().map(|v| v.to_string()));
        problems.dedup();
    }
    if !problems.is_empty() {
        return violated(problems.join("; "));
    }

    let (m, upper) = inst.interval();
    let skip = |r: Relaxation| opts.relax == Some(r);
    if theorem.is_superquadratic() {
        if m < 0.0 {
            return violated(format!("0 <= m fails (m = {m})"));
        }
        for (i, a) in lower_operators(inst).iter().enumerate() {
            let lo = spectral_bounds(a)?.0;
            if lo < -opts.tol * a.frobenius_norm().max(1.0) {
                return violated(format!("0 <= A{} fails (lambda_min = {lo})", index_suffix(inst, i)));
            }
        }
    }

    if theorem.needs_equal_sum() && !skip(Relaxation::EqualSum) {
        for (i, (lhs, rhs)) in sum_pairs(inst)?.iter().enumerate() {
            if !sums_equal(lhs, rhs, opts.tol)? {
                return violated(format!("A{s} + D{s} = B{s} + C{s} fails", s = index_suffix(inst, i)));
            }
        }
    }

    if let Instance::Quadruple(q) = inst {
        if theorem.has_quad_conditions() || theorem == TheoremId::LcPow {
            let ad = q.a.checked_add(&q.d)?;
            let bc = q.b.checked_add(&q.c)?;
            let sum_i = loewner_leq(&bc, &ad, opts.tol)?.relation.is_leq();
            let sum_ii = loewner_leq(&ad, &bc, opts.tol)?.relation.is_leq();
            let fm = f.eval_checked(m)?;
            let fu = f.eval_checked(upper)?;
            let eps = opts.tol * fm.abs().max(fu.abs()).max(1.0);
            let f_i = fm <= fu + eps;
            let f_ii = fu <= fm + eps;
            let cond_ii = (sum_ii || skip(Relaxation::CondIISum)) && (f_ii || skip(Relaxation::CondIIF));
            if theorem == TheoremId::LcPow {
                if !cond_ii {
                    return violated("A + D <= B + C fails".into());
                }
            } else {
                let cond_i = (sum_i || skip(Relaxation::CondISum)) && (f_i || skip(Relaxation::CondIF));
                if !(cond_i || cond_ii) {
                    return violated(format!(
                        "neither (i) B + C <= A + D and f(m) <= f(M) nor (ii) A + D <= B + C and f(M) <= f(m) \
                         [B + C <= A + D: {sum_i}, A + D <= B + C: {sum_ii}, f(m) = {fm}, f(M) = {fu}]"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn index_suffix(inst: &Instance, i: usize) -> String {
    match inst {
        Instance::MultiQuadruple(_) => format!("_{i}"),
        _ => String::new(),
    }
}

fn lower_operators(inst: &Instance) -> Vec<HermitianMatrix> {
    match inst {
        Instance::Quadruple(q) => vec![q.a.clone()],
        Instance::Midpoint(q) => vec![q.a.clone()],
        Instance::Mercer(_) => Vec::new(),
        Instance::MultiQuadruple(q) => q.a_list(),
    }
}

fn sum_pairs(inst: &Instance) -> Result<Vec<(HermitianMatrix, HermitianMatrix)>> {
    let pair = |a: &HermitianMatrix, b: &HermitianMatrix, c: &HermitianMatrix, d: &HermitianMatrix| {
        Ok((a.checked_add(d)?, b.checked_add(c)?))
    };
    match inst {
        Instance::Quadruple(q) => Ok(vec![pair(&q.a, &q.b, &q.c, &q.d)?]),
        Instance::MultiQuadruple(q) => q.quadruples.iter().map(|t| pair(&t.a, &t.b, &t.c, &t.d)).collect(),
        _ => Ok(Vec::new()),
    }
}

fn sums_equal(lhs: &HermitianMatrix, rhs: &HermitianMatrix, tol: f64) -> Result<bool> {
    let gap = lhs.checked_sub(rhs)?.frobenius_norm();
    Ok(gap <= tol * (lhs.frobenius_norm() + rhs.frobenius_norm()).max(1.0))
}

/// Accumulates terms with their labels.
struct Builder {
    theorem: TheoremId,
    function: String,
    terms: Vec<HermitianMatrix>,
    labels: Vec<String>,
}

impl Builder {
    fn new(theorem: TheoremId, f: &FunctionDescriptor) -> Self {
        Self {
            theorem,
            function: f.id().to_string(),
            terms: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn push(&mut self, label: &str, term: HermitianMatrix) {
        self.labels.push(label.to_string());
        self.terms.push(term);
    }

    /// Ascending chain; the envelope is the chain itself.
    fn ascending(self) -> ExpressionChain {
        ExpressionChain {
            theorem: self.theorem,
            function: self.function,
            envelope: self.terms.clone(),
            terms: self.terms,
            labels: self.labels,
        }
    }

    /// Superquadratic chain `lhs + lhs_corr ≤ rhs − rhs_corr`.
    fn corrected(self, lhs: Side, rhs: Side) -> Result<ExpressionChain> {
        let left = lhs.bare.checked_add(&lhs.corr)?;
        let right = rhs.bare.checked_sub(&rhs.corr)?;
        Ok(ExpressionChain {
            theorem: self.theorem,
            function: self.function,
            terms: vec![left.clone(), right.clone()],
            labels: vec![
                format!("{} + {}", lhs.bare_label, lhs.corr_label),
                format!("{} - [{}]", rhs.bare_label, rhs.corr_label),
            ],
            envelope: vec![lhs.bare, left, right, rhs.bare],
        })
    }
}

/// One side of a superquadratic chain before the corrections are merged.
struct Side {
    bare: HermitianMatrix,
    corr: HermitianMatrix,
    bare_label: &'static str,
    corr_label: &'static str,
}

fn fc(x: &HermitianMatrix, f: &FunctionDescriptor) -> Result<HermitianMatrix> {
    apply_scalar_function(x, f)
}

fn add(x: HermitianMatrix, y: HermitianMatrix) -> Result<HermitianMatrix> {
    x.checked_add(&y)
}

/// The per-function pieces every builder uses.
struct Kit {
    ip: Interpolant,
    f: FunctionDescriptor,
}

impl Kit {
    fn g(&self, theorem: TheoremId) -> Result<FunctionDescriptor> {
        match (theorem, self.f.power_exponent()) {
            (TheoremId::LcPow, Some(p)) => Ok(self.ip.g_power(p)),
            _ => self.ip.g(),
        }
    }
}

fn compile(
    theorem: TheoremId,
    inst: &Instance,
    f: &FunctionDescriptor,
    map: Option<&PositiveUnitalMap>,
) -> Result<ExpressionChain> {
    let (m, upper) = inst.interval();
    let kit = Kit {
        ip: Interpolant::new(f, m, upper)?,
        f: f.clone(),
    };
    match inst {
        Instance::Quadruple(q) => {
            let identity = PositiveUnitalMap::identity(q.dim());
            quadruple(theorem, q, &kit, map.unwrap_or(&identity))
        }
        Instance::Midpoint(q) => midpoint(theorem, q, &kit),
        Instance::Mercer(q) => mercer(theorem, q, &kit),
        Instance::MultiQuadruple(q) => multi(theorem, q, &kit),
    }
}

fn quadruple(theorem: TheoremId, q: &QuadrupleInstance, kit: &Kit, phi: &PositiveUnitalMap) -> Result<ExpressionChain> {
    use TheoremId::*;
    let f = &kit.f;
    let (a, b, c, d) = (&q.a, &q.b, &q.c, &q.d);
    let mut out = Builder::new(theorem, f);
    let ph = |x: &HermitianMatrix| phi.apply(x);
    match theorem {
        MosBase => {
            out.push("f(Phi(B)) + f(Phi(C))", add(fc(&ph(b)?, f)?, fc(&ph(c)?, f)?)?);
            out.push("Phi(f(A)) + Phi(f(D))", add(ph(&fc(a, f)?)?, ph(&fc(d, f)?)?)?);
            Ok(out.ascending())
        }
        LcQuad | LcPow => {
            let g = kit.g(theorem)?;
            out.push("f(B) + f(C)", add(fc(b, f)?, fc(c, f)?)?);
            out.push("g(B) + g(C)", add(fc(b, &g)?, fc(c, &g)?)?);
            out.push("L(B) + L(C)", kit.ip.linear(&b.checked_add(c)?, 2.0));
            out.push("g(A) + g(D)", add(fc(a, &g)?, fc(d, &g)?)?);
            out.push("f(A) + f(D)", add(fc(a, f)?, fc(d, f)?)?);
            Ok(out.ascending())
        }
        LcMap | LcMapV2 | LcMapV3 => {
            let g = kit.g(theorem)?;
            let (pa, pb, pc, pd) = (ph(a)?, ph(b)?, ph(c)?, ph(d)?);
            let linear = kit.ip.linear(&ph(&b.checked_add(c)?)?, 2.0);
            // Which arguments take Φ outside (`inner`) or inside the function.
            let (b_out, c_out, a_out, d_out) = match theorem {
                LcMap => (true, true, false, false),
                LcMapV2 => (false, false, true, true),
                _ => (true, false, false, true),
            };
            let term = |x: &HermitianMatrix, px: &HermitianMatrix, h: &FunctionDescriptor, outer: bool| {
                if outer {
                    ph(&fc(x, h)?)
                } else {
                    fc(px, h)
                }
            };
            let label = |h: &str, outer: [bool; 2], names: [&str; 2]| {
                let one = |o: bool, n: &str| if o { format!("Phi({h}({n}))") } else { format!("{h}(Phi({n}))") };
                format!("{} + {}", one(outer[0], names[0]), one(outer[1], names[1]))
            };
            out.push(
                &label("f", [b_out, c_out], ["B", "C"]),
                add(term(b, &pb, f, b_out)?, term(c, &pc, f, c_out)?)?,
            );
            out.push(
                &label("g", [b_out, c_out], ["B", "C"]),
                add(term(b, &pb, &g, b_out)?, term(c, &pc, &g, c_out)?)?,
            );
            out.push("L(Phi(B)) + L(Phi(C))", linear);
            out.push(
                &label("g", [a_out, d_out], ["A", "D"]),
                add(term(a, &pa, &g, a_out)?, term(d, &pd, &g, d_out)?)?,
            );
            out.push(
                &label("f", [a_out, d_out], ["A", "D"]),
                add(term(a, &pa, f, a_out)?, term(d, &pd, f, d_out)?)?,
            );
            Ok(out.ascending())
        }
        SqMap | SqPow | SqQuad | SqMapV2 | SqMapV3 => {
            let ic = kit.ip.inner_correction()?;
            let lc = kit.ip.lower_correction()?;
            let uc = kit.ip.upper_correction()?;
            let (pa, pb, pc, pd) = (ph(a)?, ph(b)?, ph(c)?, ph(d)?);
            // `true` applies Φ after the scalar function.
            let (b_out, c_out, a_out, d_out) = match theorem {
                SqMapV2 => (true, true, false, false),
                SqMapV3 => (false, true, true, false),
                _ => (false, false, true, true),
            };
            let term = |x: &HermitianMatrix, px: &HermitianMatrix, h: &FunctionDescriptor, outer: bool| {
                if outer {
                    ph(&fc(x, h)?)
                } else {
                    fc(px, h)
                }
            };
            let (lhs_label, rhs_label, lcorr_label, rcorr_label) = match theorem {
                SqMapV2 => (
                    "Phi(f(B)) + Phi(f(C))",
                    "f(Phi(A)) + f(Phi(D))",
                    "Phi(icorr(B)) + Phi(icorr(C))",
                    "lcorr(Phi(A)) + ucorr(Phi(D))",
                ),
                SqMapV3 => (
                    "f(Phi(B)) + Phi(f(C))",
                    "Phi(f(A)) + f(Phi(D))",
                    "icorr(Phi(B)) + Phi(icorr(C))",
                    "Phi(lcorr(A)) + ucorr(Phi(D))",
                ),
                SqQuad => ("f(B) + f(C)", "f(A) + f(D)", "icorr(B) + icorr(C)", "lcorr(A) + ucorr(D)"),
                _ => (
                    "f(Phi(B)) + f(Phi(C))",
                    "Phi(f(A)) + Phi(f(D))",
                    "icorr(Phi(B)) + icorr(Phi(C))",
                    "Phi(lcorr(A)) + Phi(ucorr(D))",
                ),
            };
            let lhs = Side {
                bare: add(term(b, &pb, f, b_out)?, term(c, &pc, f, c_out)?)?,
                corr: add(term(b, &pb, &ic, b_out)?, term(c, &pc, &ic, c_out)?)?,
                bare_label: lhs_label,
                corr_label: lcorr_label,
            };
            let rhs = Side {
                bare: add(term(a, &pa, f, a_out)?, term(d, &pd, f, d_out)?)?,
                corr: add(term(a, &pa, &lc, a_out)?, term(d, &pd, &uc, d_out)?)?,
                bare_label: rhs_label,
                corr_label: rcorr_label,
            };
            out.corrected(lhs, rhs)
        }
        _ => unreachable!("{theorem} is not a quadruple theorem"),
    }
}

fn midpoint(theorem: TheoremId, q: &MidpointInstance, kit: &Kit) -> Result<ExpressionChain> {
    let f = &kit.f;
    let x = q.midpoint()?;
    let half = |u: HermitianMatrix, v: HermitianMatrix| Ok::<_, Error>(u.checked_add(&v)?.scale(0.5));
    let mut out = Builder::new(theorem, f);
    match theorem {
        TheoremId::LcMid => {
            let g = kit.g(theorem)?;
            out.push("f(X)", fc(&x, f)?);
            out.push("g(X)", fc(&x, &g)?);
            out.push("L(X)", kit.ip.linear(&x, 1.0));
            out.push("g(A)/2 + g(D)/2", half(fc(&q.a, &g)?, fc(&q.d, &g)?)?);
            out.push("f(A)/2 + f(D)/2", half(fc(&q.a, f)?, fc(&q.d, f)?)?);
            Ok(out.ascending())
        }
        TheoremId::SqMid => {
            let lhs = Side {
                bare: fc(&x, f)?,
                corr: fc(&x, &kit.ip.inner_correction()?)?,
                bare_label: "f(X)",
                corr_label: "icorr(X)",
            };
            let rhs = Side {
                bare: half(fc(&q.a, f)?, fc(&q.d, f)?)?,
                corr: half(
                    fc(&q.a, &kit.ip.lower_correction()?)?,
                    fc(&q.d, &kit.ip.upper_correction()?)?,
                )?,
                bare_label: "f(A)/2 + f(D)/2",
                corr_label: "lcorr(A)/2 + ucorr(D)/2",
            };
            out.corrected(lhs, rhs)
        }
        _ => unreachable!("{theorem} is not a midpoint theorem"),
    }
}

/// `Σ Φ_i(h(X_i))`.
fn sum_of(fam: &MapFamily, xs: &[HermitianMatrix], h: &FunctionDescriptor) -> Result<HermitianMatrix> {
    let images = xs.iter().map(|x| fc(x, h)).collect::<Result<Vec<_>>>()?;
    fam.apply_sum(&images)
}

fn mercer(theorem: TheoremId, q: &MercerInstance, kit: &Kit) -> Result<ExpressionChain> {
    let f = &kit.f;
    let fam = &q.family;
    let dim = fam.output_dim();
    let s = fam.apply_sum(&q.b_list)?;
    let y = s.affine(-1.0, q.m + q.upper);
    let sum_fb = sum_of(fam, &q.b_list, f)?;
    let mut out = Builder::new(theorem, f);
    match theorem {
        TheoremId::JmBase => {
            out.push("f(M + m - sum Phi_i(B_i))", fc(&y, f)?);
            out.push(
                "f(m) + f(M) - sum Phi_i(f(B_i))",
                sum_fb.affine(-1.0, kit.ip.f_m() + kit.ip.f_upper()),
            );
            Ok(out.ascending())
        }
        TheoremId::LcMercer => {
            let g = kit.g(theorem)?;
            let n = q.b_list.len();
            let lower = fam.apply_common(&HermitianMatrix::scalar(q.b_list[0].dim(), q.m))?;
            let upper_imgs = vec![fc(&HermitianMatrix::scalar(q.b_list[0].dim(), q.upper), &g)?; n];
            out.push("sum Phi_i(f(B_i)) + f(M + m - sum Phi_i(B_i))", add(sum_fb, fc(&y, f)?)?);
            out.push("sum Phi_i(g(B_i)) + g(M + m - sum Phi_i(B_i))", add(sum_of(fam, &q.b_list, &g)?, fc(&y, &g)?)?);
            out.push(
                "g(sum Phi_i(mI)) + sum Phi_i(g(MI))",
                add(fc(&lower, &g)?, fam.apply_sum(&upper_imgs)?)?,
            );
            Ok(out.ascending())
        }
        TheoremId::SqMercer => {
            let ic = kit.ip.inner_correction()?;
            let f0 = f.eval_checked(0.0)?;
            let lhs = Side {
                bare: fc(&y, f)?,
                corr: add(sum_of(fam, &q.b_list, &ic)?, fc(&s, &ic)?)?,
                bare_label: "f(M + m - sum Phi_i(B_i))",
                corr_label: "sum Phi_i(icorr(B_i)) + icorr(sum Phi_i(B_i))",
            };
            let rhs = Side {
                bare: sum_fb.affine(-1.0, kit.ip.f_m() + kit.ip.f_upper()),
                corr: HermitianMatrix::scalar(dim, 2.0 * f0),
                bare_label: "f(m) + f(M) - sum Phi_i(f(B_i))",
                corr_label: "2 f(0)",
            };
            out.corrected(lhs, rhs)
        }
        _ => unreachable!("{theorem} is not a Mercer theorem"),
    }
}

fn multi(theorem: TheoremId, q: &MultiQuadrupleInstance, kit: &Kit) -> Result<ExpressionChain> {
    let f = &kit.f;
    let fam = &q.family;
    let (a, b, c, d) = (q.a_list(), q.b_list(), q.c_list(), q.d_list());
    let (sa, sb, sc) = (fam.apply_sum(&a)?, fam.apply_sum(&b)?, fam.apply_sum(&c)?);
    let mut out = Builder::new(theorem, f);
    match theorem {
        TheoremId::LcMulti => {
            let g = kit.g(theorem)?;
            let sum_bc = sb.checked_add(&sc)?;
            out.push("sum Phi_i(f(B_i)) + f(sum Phi_i(C_i))", add(sum_of(fam, &b, f)?, fc(&sc, f)?)?);
            out.push("sum Phi_i(g(B_i)) + g(sum Phi_i(C_i))", add(sum_of(fam, &b, &g)?, fc(&sc, &g)?)?);
            out.push("L(sum Phi_i(B_i)) + L(sum Phi_i(C_i))", kit.ip.linear(&sum_bc, 2.0));
            out.push("g(sum Phi_i(A_i)) + sum Phi_i(g(D_i))", add(fc(&sa, &g)?, sum_of(fam, &d, &g)?)?);
            out.push("f(sum Phi_i(A_i)) + sum Phi_i(f(D_i))", add(fc(&sa, f)?, sum_of(fam, &d, f)?)?);
            Ok(out.ascending())
        }
        TheoremId::SqMultiA => {
            let ic = kit.ip.inner_correction()?;
            let lhs = Side {
                bare: add(fc(&sb, f)?, fc(&sc, f)?)?,
                corr: add(fc(&sb, &ic)?, fc(&sc, &ic)?)?,
                bare_label: "f(sum Phi_i(B_i)) + f(sum Phi_i(C_i))",
                corr_label: "icorr(sum Phi_i(B_i)) + icorr(sum Phi_i(C_i))",
            };
            let rhs = Side {
                bare: add(sum_of(fam, &a, f)?, sum_of(fam, &d, f)?)?,
                corr: add(
                    sum_of(fam, &a, &kit.ip.lower_correction()?)?,
                    sum_of(fam, &d, &kit.ip.upper_correction()?)?,
                )?,
                bare_label: "sum Phi_i(f(A_i)) + sum Phi_i(f(D_i))",
                corr_label: "sum Phi_i(lcorr(A_i)) + sum Phi_i(ucorr(D_i))",
            };
            out.corrected(lhs, rhs)
        }
        TheoremId::SqMultiB => {
            let ic = kit.ip.inner_correction()?;
            let lhs = Side {
                bare: add(sum_of(fam, &b, f)?, fc(&sc, f)?)?,
                corr: add(sum_of(fam, &b, &ic)?, fc(&sc, &ic)?)?,
                bare_label: "sum Phi_i(f(B_i)) + f(sum Phi_i(C_i))",
                corr_label: "sum Phi_i(icorr(B_i)) + icorr(sum Phi_i(C_i))",
            };
            let rhs = Side {
                bare: add(fc(&sa, f)?, sum_of(fam, &d, f)?)?,
                corr: add(
                    fc(&sa, &kit.ip.lower_correction()?)?,
                    sum_of(fam, &d, &kit.ip.upper_correction()?)?,
                )?,
                bare_label: "f(sum Phi_i(A_i)) + sum Phi_i(f(D_i))",
                corr_label: "lcorr(sum Phi_i(A_i)) + sum Phi_i(ucorr(D_i))",
            };
            out.corrected(lhs, rhs)
        }
        _ => unreachable!("{theorem} is not a multi-map theorem"),
    }
}
