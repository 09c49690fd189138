use std::f64::consts::E;

use proptest::prelude::*;

use super::*;
use crate::forge::{
    random_psd, sample_quadruple, sample_sandwiched_matrix, Instance, MercerInstance, MultiQuadrupleInstance,
    QuadrupleInstance, QuadrupleParams, QuadrupleTerms, SumRelation,
};
use crate::functions::FunctionDescriptor;
use crate::hermitian::{apply_fn, apply_scalar_function};
use crate::maps::{MapFamily, PositiveUnitalMap, WeightedMap};
use crate::rng::seeded;

fn s(x: f64) -> HermitianMatrix {
    HermitianMatrix::diag(&[x])
}

fn quad(a: f64, b: f64, c: f64, d: f64, m: f64, upper: f64, relation: SumRelation) -> Instance {
    Instance::Quadruple(QuadrupleInstance {
        a: s(a),
        b: s(b),
        c: s(c),
        d: s(d),
        m,
        upper,
        relation,
        require_nonnegative_a: false,
    })
}

fn worked() -> Instance {
    quad(0.0, 2.0, 2.0, 5.0, 1.0, 3.0, SumRelation::SumLeq)
}

fn chain(theorem: TheoremId, inst: &Instance, f: &FunctionDescriptor) -> ExpressionChain {
    build_chain(theorem, inst, f, None, ChainOptions::default()).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn theorem_ids_parse_case_insensitively() {
    assert_eq!("lc-quad".parse::<TheoremId>().unwrap(), TheoremId::LcQuad);
    assert_eq!("Sq-Multi-B".parse::<TheoremId>().unwrap(), TheoremId::SqMultiB);
    for t in TheoremId::ALL {
        assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
    }
    assert!(matches!("LC-NOPE".parse::<TheoremId>(), Err(Error::UnknownTheorem(_))));
    assert!(matches!("cond-iii".parse::<Relaxation>(), Err(Error::UnknownRelaxation(_))));
    assert_eq!("cond-ii-sum".parse::<Relaxation>().unwrap(), Relaxation::CondIISum);
}

#[test]
fn worked_lc_quad_instance_matches_scalar_oracle() {
    let c = chain(TheoremId::LcQuad, &worked(), &FunctionDescriptor::exp(1.0));
    let expected = [2.0 * E * E, 2.0 * E * E, E + E.powi(3), 1.0 + E.powi(5), 1.0 + E.powi(5)];
    assert_eq!(c.terms.len(), 5);
    for (t, want) in c.terms.iter().zip(expected) {
        assert!(rel_close(t.get(0, 0).re, want, 1e-12), "{} vs {want}", t.get(0, 0).re);
    }
    let r = evaluate_chain(&c, 1e-9).unwrap();
    assert!(r.pass);
    let eq: Vec<bool> = r.links.iter().map(|l| l.equality).collect();
    assert_eq!(eq, [true, false, false, true]);
    assert!((r.links[1].min_eigenvalue - 8.026).abs() < 1e-3);
    assert!((r.links[2].min_eigenvalue - 126.609).abs() < 1e-3);
}

#[test]
fn worked_sq_quad_instance() {
    let c = chain(TheoremId::SqQuad, &worked(), &FunctionDescriptor::pow(2.0));
    assert!(rel_close(c.terms[0].get(0, 0).re, 10.0, 1e-12));
    assert!(rel_close(c.terms[1].get(0, 0).re, 14.0, 1e-12));
    assert!(evaluate_chain(&c, 1e-9).unwrap().pass);
}

#[test]
fn equal_terms_pass_with_equality() {
    let x = s(3.0);
    let c = ExpressionChain {
        theorem: TheoremId::MosBase,
        function: "exp".into(),
        terms: vec![x.clone(), x.clone()],
        labels: vec!["X".into(), "X".into()],
        envelope: vec![x.clone(), x],
    };
    let r = evaluate_chain(&c, 1e-9).unwrap();
    assert!(r.pass && r.links[0].equality);
}

#[test]
fn reversed_chain_fails_on_first_link() {
    let mut c = chain(TheoremId::SqQuad, &worked(), &FunctionDescriptor::pow(2.0));
    c.terms.swap(0, 1);
    let r = evaluate_chain(&c, 1e-9).unwrap();
    assert!(!r.pass);
    assert_eq!(r.first_failure(), Some(0));
    assert!(r.links[0].min_eigenvalue < 0.0);
}

#[test]
fn mercer_endpoint_is_f_m_plus_f_upper() {
    let (m, upper) = (0.7, 2.3);
    let mid = HermitianMatrix::scalar(3, 0.5 * (m + upper));
    let mut rng = seeded(3);
    let family = crate::maps::sample_map_family(3, 3, &mut rng).unwrap();
    let inst = Instance::Mercer(MercerInstance {
        b_list: vec![mid.clone(), mid.clone(), mid],
        m,
        upper,
        family,
    });
    for f in [FunctionDescriptor::exp(1.0), FunctionDescriptor::pow(-1.0)] {
        let c = chain(TheoremId::LcMercer, &inst, &f);
        assert_eq!(c.terms.len(), 3);
        let want = HermitianMatrix::scalar(3, f.eval(m) + f.eval(upper));
        let gap = c.terms[2].checked_sub(&want).unwrap().frobenius_norm();
        assert!(gap <= 1e-10 * want.frobenius_norm());
        assert!(evaluate_chain(&c, 1e-9).unwrap().pass);
    }
}

#[test]
fn compiled_g_matches_separate_factors() {
    let mut rng = seeded(11);
    let (m, upper) = (0.8, 2.6);
    for f in [FunctionDescriptor::exp(1.0), FunctionDescriptor::pow(-1.0), FunctionDescriptor::pow(-2.0)] {
        let ip = Interpolant::new(&f, m, upper).unwrap();
        let k = crate::functions::kf_constant(&f, m, upper).unwrap();
        let (fm, fu) = (f.eval(m), f.eval(upper));
        for _ in 0..10 {
            let b = sample_sandwiched_matrix(4, m, upper, &mut rng).unwrap();
            let compiled = apply_scalar_function(&b, &ip.g().unwrap()).unwrap();
            let w = upper - m;
            let k_part = apply_fn(&b, |t| k.powf(0.5 - (t - 0.5 * (m + upper)).abs() / w)).unwrap();
            let m_part = apply_fn(&b, |t| fm.powf((upper - t) / w)).unwrap();
            let u_part = apply_fn(&b, |t| fu.powf((t - m) / w)).unwrap();
            let product = k_part
                .as_complex()
                .matmul(m_part.as_complex())
                .and_then(|p| p.matmul(u_part.as_complex()))
                .unwrap();
            let product = HermitianMatrix::from_complex(product).unwrap();
            let gap = compiled.checked_sub(&product).unwrap().frobenius_norm();
            assert!(gap <= 1e-10 * compiled.frobenius_norm(), "gap {gap}");
        }
    }
}

#[test]
fn growing_d_keeps_condition_i_chain_passing() {
    let f = FunctionDescriptor::exp(1.0);
    for seed in 0..40 {
        let mut rng = seeded(seed);
        let params = QuadrupleParams::new(3, 1.0, 2.5, SumRelation::SumLeq);
        let mut q = sample_quadruple(&params, &mut rng).unwrap();
        let before = evaluate_chain(&chain(TheoremId::LcQuad, &Instance::Quadruple(q.clone()), &f), 1e-9).unwrap();
        q.d = q.d.checked_add(&random_psd(3, 1.0, &mut rng)).unwrap();
        let after = evaluate_chain(&chain(TheoremId::LcQuad, &Instance::Quadruple(q), &f), 1e-9).unwrap();
        assert!(before.pass && after.pass);
    }
}

#[test]
fn near_miss_without_f_condition_still_holds() {
    // B + C ≤ A + D with f(m) > f(M): the chain still holds here.
    let inst = quad(0.5, 1.5, 1.5, 2.6, 1.0, 2.0, SumRelation::SumLeq);
    let f = FunctionDescriptor::pow(-1.0);
    let opts = ChainOptions {
        relax: Some(Relaxation::CondIF),
        ..Default::default()
    };
    assert!(matches!(
        build_chain(TheoremId::LcQuad, &inst, &f, None, ChainOptions::default()),
        Err(Error::HypothesisViolation { .. })
    ));
    let c = build_chain(TheoremId::LcQuad, &inst, &f, None, opts).unwrap();
    assert!(evaluate_chain(&c, 1e-9).unwrap().pass);
}

#[test]
fn dropping_f_condition_breaks_the_chain() {
    let inst = quad(1.0, 1.0, 1.0, 2.0, 1.0, 2.0, SumRelation::SumLeq);
    let f = FunctionDescriptor::pow(-1.0);
    let opts = ChainOptions {
        relax: Some(Relaxation::CondIF),
        ..Default::default()
    };
    let r = evaluate_chain(&build_chain(TheoremId::LcQuad, &inst, &f, None, opts).unwrap(), 1e-9).unwrap();
    assert!(!r.pass);
    let v = r.values.clone().unwrap();
    assert!(rel_close(v[2], 2.0, 1e-12) && rel_close(v[3], 1.5, 1e-12));
    assert_eq!(r.first_failure(), Some(2));
}

#[test]
fn hunt_finds_counterexample_without_f_condition() {
    let cfg = HuntConfig::new(TheoremId::LcQuad, Some(Relaxation::CondIF), FunctionDescriptor::pow(-1.0), 2000, 7);
    let out = hunt_counterexample(&cfg).unwrap();
    let cx = out.counterexample.expect("counterexample");
    assert!(!cx.report.pass);
    assert!(cx.report.digest.is_some());
    assert_eq!(out.drawn, cx.index + 1);
}

#[test]
fn hunt_without_relaxation_finds_nothing() {
    let cfg = HuntConfig::new(TheoremId::LcQuad, None, FunctionDescriptor::pow(-1.0), 300, 7);
    let out = hunt_counterexample(&cfg).unwrap();
    assert!(out.counterexample.is_none());
    assert_eq!(out.drawn, 300);
    assert!(out.evaluated > 250);
}

#[test]
fn hunt_with_zero_budget_draws_nothing() {
    let cfg = HuntConfig::new(TheoremId::LcQuad, Some(Relaxation::CondIF), FunctionDescriptor::exp(1.0), 0, 1);
    let out = hunt_counterexample(&cfg).unwrap();
    assert_eq!((out.drawn, out.evaluated, out.skipped), (0, 0, 0));
    assert!(out.counterexample.is_none());
}

#[test]
fn hunt_rejects_foreign_relaxation() {
    let cfg = HuntConfig::new(TheoremId::SqMid, Some(Relaxation::EqualSum), FunctionDescriptor::pow(2.0), 10, 1);
    assert!(matches!(hunt_counterexample(&cfg), Err(Error::UnknownRelaxation(_))));
}

#[test]
fn class_and_shape_mismatches_are_reported() {
    let inst = worked();
    let r = build_chain(TheoremId::SqQuad, &inst, &FunctionDescriptor::exp(1.0), None, ChainOptions::default());
    assert!(matches!(r, Err(Error::ClassMismatch { .. })));
    let r = build_chain(TheoremId::LcMid, &inst, &FunctionDescriptor::exp(1.0), None, ChainOptions::default());
    assert!(matches!(r, Err(Error::ShapeMismatch { .. })));
    let pinch = PositiveUnitalMap::pinching(1, vec![vec![0]]).unwrap();
    let r = build_chain(TheoremId::LcQuad, &inst, &FunctionDescriptor::exp(1.0), Some(&pinch), ChainOptions::default());
    assert!(matches!(r, Err(Error::ShapeMismatch { .. })));
    let r = build_chain(TheoremId::LcPow, &inst, &FunctionDescriptor::exp(1.0), None, ChainOptions::default());
    assert!(matches!(r, Err(Error::ClassMismatch { .. })));
}

#[test]
fn equal_sum_is_enforced_for_map_theorems() {
    let inst = worked();
    let f = FunctionDescriptor::exp(1.0);
    let r = build_chain(TheoremId::LcMap, &inst, &f, None, ChainOptions::default());
    assert!(matches!(r, Err(Error::HypothesisViolation { ref condition, .. }) if condition.contains("A + D = B + C")));
    let opts = ChainOptions {
        relax: Some(Relaxation::EqualSum),
        ..Default::default()
    };
    assert!(build_chain(TheoremId::LcMap, &inst, &f, None, opts).is_ok());
}

/// With `f = t²`, `m = 0`, `M = 1`, one identity map, `A = 0`, `D = 1`,
/// `C = 1 − b`, both sides of the second multi-map chain equal 1. The
/// displayed correction with `Σ Φ_i(f(B_i))` in place of `f(Σ Φ_i(B_i))`
/// would overshoot by `2b²(1 − b)`.
#[test]
fn multi_b_literal_correction_would_fail() {
    let f = FunctionDescriptor::pow(2.0);
    let family = MapFamily::new(vec![WeightedMap {
        weight: 1.0,
        map: PositiveUnitalMap::identity(1),
    }])
    .unwrap();
    for b in [0.2, 0.5, 0.7] {
        let inst = Instance::MultiQuadruple(MultiQuadrupleInstance {
            quadruples: vec![QuadrupleTerms {
                a: s(0.0),
                b: s(b),
                c: s(1.0 - b),
                d: s(1.0),
            }],
            m: 0.0,
            upper: 1.0,
            relation: SumRelation::EqualSum,
            require_nonnegative_a: true,
            family: family.clone(),
        });
        let c = chain(TheoremId::SqMultiB, &inst, &f);
        let (lhs, rhs) = (c.terms[0].get(0, 0).re, c.terms[1].get(0, 0).re);
        assert!(rel_close(lhs, 1.0, 1e-12) && rel_close(rhs, 1.0, 1e-12));
        let literal_excess = (1.0 - b) * b * b + b * (1.0 - b * b) - ((1.0 - b) * b * b + b * (1.0 - b).powi(2));
        assert!(rel_close(literal_excess, 2.0 * b * b * (1.0 - b), 1e-12));
        assert!(lhs + literal_excess > rhs + 1e-3);
    }
}

#[test]
fn refinement_envelope_is_ordered() {
    let c = chain(TheoremId::SqQuad, &worked(), &FunctionDescriptor::pow(2.0));
    let r = check_refinement(&c, 1e-9).unwrap();
    assert!(r.pass);
    assert_eq!(r.inner.len(), 2);
    let c = chain(TheoremId::LcQuad, &worked(), &FunctionDescriptor::exp(1.0));
    assert!(check_refinement(&c, 1e-9).unwrap().pass);
}

#[test]
fn digest_depends_on_function_and_instance() {
    let f = FunctionDescriptor::exp(1.0);
    let d1 = instance_digest(&worked(), &f, None).unwrap();
    assert_eq!(d1, instance_digest(&worked(), &f, None).unwrap());
    assert_eq!(d1.len(), 64);
    assert_ne!(d1, instance_digest(&worked(), &FunctionDescriptor::exp(2.0), None).unwrap());
    let other = quad(0.0, 2.0, 2.0, 5.5, 1.0, 3.0, SumRelation::SumLeq);
    assert_ne!(d1, instance_digest(&other, &f, None).unwrap());
}

/// Plain-arithmetic oracle for the log-convex quadruple chain at `1 x 1`.
fn lc_quad_oracle(f: &dyn Fn(f64) -> f64, a: f64, b: f64, c: f64, d: f64, m: f64, upper: f64) -> [f64; 5] {
    let w = upper - m;
    let k = f(0.5 * (m + upper)).powi(2) / (f(m) * f(upper));
    let g = |t: f64| {
        let tt = 0.5 - (t - 0.5 * (m + upper)).abs() / w;
        k.powf(tt) * f(m).powf((upper - t) / w) * f(upper).powf((t - m) / w)
    };
    let lin = (2.0 * upper - b - c) / w * f(m) + (b + c - 2.0 * m) / w * f(upper);
    [f(b) + f(c), g(b) + g(c), lin, g(a) + g(d), f(a) + f(d)]
}

/// Plain-arithmetic oracle for the superquadratic quadruple chain at `1 x 1`.
fn sq_quad_oracle(p: f64, a: f64, b: f64, c: f64, d: f64, m: f64, upper: f64) -> [f64; 2] {
    let f = |t: f64| t.powf(p);
    let w = upper - m;
    let inner = |t: f64| (upper - t) / w * f(t - m) + (t - m) / w * f(upper - t);
    let lhs = f(b) + f(c) + inner(b) + inner(c);
    let rhs = f(a) + f(d) - f(m - a) - (m - a) / w * f(w) - f(d - upper) - (d - upper) / w * f(w);
    [lhs, rhs]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lc_quad_scalar_terms_match_oracle(
        m in 0.5f64..2.0, w in 0.5f64..2.0, bt in 0.0f64..1.0, ct in 0.0f64..1.0,
        qa in 0.0f64..0.4, extra in 0.0f64..1.0, which in 0usize..2,
    ) {
        let upper = m + w;
        let (b, c) = (m + bt * w, m + ct * w);
        let a = m - qa * m;
        let d = (b + c - a).max(upper) + extra;
        let f = if which == 0 { FunctionDescriptor::exp(1.0) } else { FunctionDescriptor::pow(-1.0) };
        let relax = if which == 0 { None } else { Some(Relaxation::CondIF) };
        let inst = quad(a, b, c, d, m, upper, SumRelation::SumLeq);
        let ch = build_chain(TheoremId::LcQuad, &inst, &f, None, ChainOptions { tol: 1e-9, relax }).unwrap();
        let want = lc_quad_oracle(&|t| f.eval(t), a, b, c, d, m, upper);
        for (t, v) in ch.terms.iter().zip(want) {
            prop_assert!(rel_close(t.get(0, 0).re, v, 1e-12));
        }
    }

    #[test]
    fn sq_quad_scalar_terms_match_oracle(
        m in 0.5f64..2.0, w in 0.5f64..2.0, bt in 0.0f64..1.0, ct in 0.0f64..1.0,
        qa in 0.0f64..1.0, extra in 0.0f64..1.0, pi in 0usize..3,
    ) {
        let p = [2.0, 3.0, 2.5][pi];
        let upper = m + w;
        let (b, c) = (m + bt * w, m + ct * w);
        let a = m * (1.0 - qa);
        let d = (b + c - a).max(upper) + extra;
        let inst = quad(a, b, c, d, m, upper, SumRelation::SumLeq);
        let ch = build_chain(TheoremId::SqQuad, &inst, &FunctionDescriptor::pow(p), None, ChainOptions::default()).unwrap();
        let want = sq_quad_oracle(p, a, b, c, d, m, upper);
        for (t, v) in ch.terms.iter().zip(want) {
            prop_assert!(rel_close(t.get(0, 0).re, v, 1e-12));
        }
        prop_assert!(evaluate_chain(&ch, 1e-9).unwrap().pass);
    }

    #[test]
    fn every_generated_instance_passes(theorem_ix in 0usize..19, seed in 0u64..1_000) {
        let theorem = TheoremId::ALL[theorem_ix];
        let f = if theorem.is_superquadratic() {
            FunctionDescriptor::pow(3.0)
        } else if theorem == TheoremId::LcPow {
            FunctionDescriptor::pow(-2.0)
        } else {
            FunctionDescriptor::exp(1.0)
        };
        let map = match theorem.map_use() {
            MapUse::Family => crate::maps::MapSpec::Family(2),
            MapUse::Single => crate::maps::MapSpec::Mixed(None),
            MapUse::None => crate::maps::MapSpec::Identity,
        };
        let mut rng = seeded(seed);
        let (m, upper, dim) = SamplingRanges::default().draw(&mut rng);
        let relation = admissible_relation(theorem, &f, m, upper, &mut rng).unwrap();
        let g = generate_instance(theorem, &f, &map, dim, m, upper, relation, &mut rng).unwrap();
        let ch = build_chain(theorem, &g.instance, &f, g.map.as_ref(), ChainOptions::default()).unwrap();
        prop_assert_eq!(ch.terms.len(), theorem.chain_len());
        let r = evaluate_chain(&ch, 1e-9).unwrap();
        prop_assert!(r.pass, "{} failed: {:?}", theorem, r.links);
        prop_assert!(check_refinement(&ch, 1e-9).unwrap().pass);
    }
}
