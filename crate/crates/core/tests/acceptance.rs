//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::E;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use loewner_core::campaign::{report_to_json, run_campaign, CampaignConfig};
use loewner_core::engine::{
    admissible_relation, build_chain, check_refinement, evaluate_chain, generate_instance, hunt_counterexample,
    ChainOptions, HuntConfig, MapUse, Relaxation, SamplingRanges, TheoremId,
};
use loewner_core::forge::{random_hermitian, validate_instance, Instance, QuadrupleInstance, SumRelation, VALIDATION_TOL};
use loewner_core::functions::{check_logconvex_chain, check_superquadratic_characterization, FunctionDescriptor};
use loewner_core::hermitian::eigendecompose;
use loewner_core::maps::{verify_unital, MapFamily, MapSpec};
use loewner_core::rng::{seeded, stream};
use loewner_core::HermitianMatrix;

/// Absolute link tolerance is this times the link's own scale.
const CHAIN_TOL: f64 = 1e-8;
const SEED: u64 = 20_241_018;

struct Line {
    pass: bool,
    text: String,
}

fn line(pass: bool, text: String) -> Line {
    Line { pass, text }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn f(spec: &str) -> FunctionDescriptor {
    FunctionDescriptor::parse(spec).unwrap()
}

fn th(id: &str) -> TheoremId {
    id.parse().unwrap()
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Line {
    let start = Instant::now();
    let cases = [
        (f("exp"), -2.0, 2.0),
        (f("exp:a=2"), -2.0, 2.0),
        (f("pow:p=-1"), 0.1, 3.0),
        (f("pow:p=-2"), 0.1, 3.0),
    ];
    let inside: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let outside = [-1.0, -0.5, 1.5, 2.0];
    let (mut checked, mut skipped, mut bad) = (0usize, 0usize, Vec::new());
    let mut worst: f64 = f64::INFINITY;
    for (func, lo, hi) in &cases {
        let grid = linspace(*lo, *hi, 50);
        for &x in &grid {
            for &y in &grid {
                for &alpha in inside.iter().chain(&outside) {
                    let point = alpha * x + (1.0 - alpha) * y;
                    if !func.domain().contains(point) {
                        skipped += 1;
                        continue;
                    }
                    let c = check_logconvex_chain(func, x, y, alpha, 0.0).unwrap();
                    let scale = c.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                    let slack = c.links.iter().map(|l| l.slack / scale).fold(f64::INFINITY, f64::min);
                    worst = worst.min(slack);
                    checked += 1;
                    if slack < -1e-12 && bad.len() < 3 {
                        bad.push(format!("{} at ({x}, {y}, {alpha})", func.id()));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(10);
    line(
        pass,
        format!(
            "scalar log-convex chain: {checked} points ({skipped} outside domain), worst scaled slack {worst:.3e}, {}{}",
            secs(elapsed),
            if bad.is_empty() { String::new() } else { format!("; failing {bad:?}") }
        ),
    )
}

// ---------------------------------------------------------------------------

/// Everything observed on one random instance.
struct Sample {
    pass: bool,
    min_scaled: f64,
    refinement: bool,
    valid: bool,
    maps_unital: bool,
    /// `‖last term − (f(m)+f(M))I‖_F / scale` for LC-MERCER.
    endpoint: Option<f64>,
    error: Option<String>,
}

fn family_unital(family: &MapFamily, seed: u64) -> bool {
    family.members.iter().all(|w| verify_unital(&w.map, 3, seed).pass)
}

fn sample(theorem: TheoremId, func: &FunctionDescriptor, map: &MapSpec, dims: &[usize], cell: u64, index: u64) -> Sample {
    let mut rng = stream(SEED, cell, index);
    let ranges = SamplingRanges {
        dims: dims.to_vec(),
        ..SamplingRanges::default()
    };
    let (m, upper, dim) = ranges.draw(&mut rng);
    let broken = |e: String| Sample {
        pass: false,
        min_scaled: f64::NAN,
        refinement: false,
        valid: false,
        maps_unital: false,
        endpoint: None,
        error: Some(e),
    };
    let generated = match admissible_relation(theorem, func, m, upper, &mut rng)
        .and_then(|rel| generate_instance(theorem, func, map, dim, m, upper, rel, &mut rng))
    {
        Ok(g) => g,
        Err(e) => return broken(format!("generation: {e}")),
    };
    let valid = validate_instance(&generated.instance, VALIDATION_TOL).is_empty();
    let maps_unital = match (&generated.map, &generated.instance) {
        (Some(phi), _) => verify_unital(phi, 3, index).pass,
        (None, Instance::Mercer(inst)) => family_unital(&inst.family, index),
        (None, Instance::MultiQuadruple(inst)) => family_unital(&inst.family, index),
        (None, _) => true,
    };
    let opts = ChainOptions {
        tol: CHAIN_TOL,
        relax: None,
    };
    let chain = match build_chain(theorem, &generated.instance, func, generated.map.as_ref(), opts) {
        Ok(c) => c,
        Err(e) => return broken(e.to_string()),
    };
    let (report, refinement) = match evaluate_chain(&chain, CHAIN_TOL).and_then(|r| Ok((r, check_refinement(&chain, CHAIN_TOL)?))) {
        Ok(r) => r,
        Err(e) => return broken(e.to_string()),
    };
    let endpoint = (theorem == TheoremId::LcMercer).then(|| {
        let last = chain.terms.last().unwrap();
        let want = HermitianMatrix::scalar(last.dim(), func.eval(m) + func.eval(upper));
        last.checked_sub(&want).unwrap().frobenius_norm() / last.frobenius_norm().max(1.0)
    });
    Sample {
        pass: report.pass,
        min_scaled: report
            .links
            .iter()
            .map(|l| l.min_eigenvalue / l.tolerance_used * CHAIN_TOL)
            .fold(f64::INFINITY, f64::min),
        refinement: refinement.pass,
        valid,
        maps_unital,
        endpoint,
        error: None,
    }
}

struct Batch {
    theorem: TheoremId,
    samples: Vec<Sample>,
    elapsed: Duration,
}

impl Batch {
    fn failures(&self) -> usize {
        self.samples.iter().filter(|s| !s.pass).count()
    }

    fn worst(&self) -> f64 {
        self.samples.iter().map(|s| s.min_scaled).filter(|x| !x.is_nan()).fold(f64::INFINITY, f64::min)
    }

    fn first_error(&self) -> Option<&str> {
        self.samples.iter().find_map(|s| s.error.as_deref())
    }

    fn summary(&self) -> String {
        let mut s = format!(
            "{} {}/{} (worst link {:.2e}, {})",
            self.theorem,
            self.samples.len() - self.failures(),
            self.samples.len(),
            self.worst(),
            secs(self.elapsed)
        );
        if let Some(e) = self.first_error() {
            s.push_str(&format!(" [{e}]"));
        }
        s
    }
}

/// `count` instances of `theorem`, cycling through `functions` and `maps`.
fn batch(theorem: TheoremId, functions: &[FunctionDescriptor], maps: &[MapSpec], dims: &[usize], count: usize) -> Batch {
    let start = Instant::now();
    let cell = TheoremId::ALL.iter().position(|&t| t == theorem).unwrap() as u64;
    let samples = (0..count)
        .into_par_iter()
        .map(|i| {
            let func = &functions[i % functions.len()];
            let map = &maps[(i / functions.len()) % maps.len()];
            sample(theorem, func, map, dims, cell, i as u64)
        })
        .collect();
    Batch {
        theorem,
        samples,
        elapsed: start.elapsed(),
    }
}

fn single_maps() -> Vec<MapSpec> {
    ["identity", "pinching", "compression", "mixed"].iter().map(|s| MapSpec::parse(s).unwrap()).collect()
}

fn maps_for(theorem: TheoremId) -> Vec<MapSpec> {
    match theorem.map_use() {
        MapUse::None => vec![MapSpec::Identity],
        MapUse::Single => single_maps(),
        MapUse::Family => vec![MapSpec::Family(3)],
    }
}

fn criterion_2() -> (Line, Vec<Batch>) {
    let functions = [f("exp"), f("pow:p=-1")];
    let dims: Vec<usize> = (1..=6).collect();
    let batches: Vec<Batch> = ["LC-QUAD", "LC-MAP", "LC-MAP-V2", "LC-MAP-V3"]
        .iter()
        .map(|id| batch(th(id), &functions, &maps_for(th(id)), &dims, 1000))
        .collect();
    let pass = batches
        .iter()
        .all(|b| b.failures() == 0 && b.elapsed < Duration::from_secs(60));
    let text = batches.iter().map(Batch::summary).collect::<Vec<_>>().join("; ");
    (line(pass, format!("log-convex chains, tol {CHAIN_TOL:e}·scale: {text}")), batches)
}

fn criterion_3() -> (Line, Vec<Batch>) {
    let functions = [f("exp"), f("pow:p=-1")];
    let dims: Vec<usize> = (1..=6).collect();
    let batches: Vec<Batch> = ["LC-MULTI", "LC-MERCER"]
        .iter()
        .map(|id| batch(th(id), &functions, &[MapSpec::Family(3)], &dims, 500))
        .collect();
    let endpoint = batches[1]
        .samples
        .iter()
        .filter_map(|s| s.endpoint)
        .fold(0.0f64, f64::max);
    let endpoints_seen = batches[1].samples.iter().filter(|s| s.endpoint.is_some()).count();
    let pass = batches.iter().all(|b| b.failures() == 0) && endpoints_seen == 500 && endpoint <= 1e-10;
    let text = batches.iter().map(Batch::summary).collect::<Vec<_>>().join("; ");
    (
        line(pass, format!("families of 3 maps: {text}; Mercer endpoint error {endpoint:.2e}")),
        batches,
    )
}

fn criterion_4() -> (Line, Vec<Batch>) {
    let functions = [f("pow:p=2"), f("pow:p=3"), f("pow:p=2.5")];
    let dims: Vec<usize> = (1..=6).collect();
    let ids = [
        "SQ-MAP",
        "SQ-MAP-V2",
        "SQ-MAP-V3",
        "SQ-MULTI-A",
        "SQ-MULTI-B",
        "SQ-MERCER",
        "SQ-QUAD",
        "SQ-MID",
    ];
    let batches: Vec<Batch> = ids
        .iter()
        .map(|id| batch(th(id), &functions, &maps_for(th(id)), &dims, 1000))
        .collect();
    let pass = batches.iter().all(|b| b.failures() == 0);
    let text = batches.iter().map(Batch::summary).collect::<Vec<_>>().join("; ");
    (line(pass, format!("superquadratic chains, tol {CHAIN_TOL:e}·scale: {text}")), batches)
}

// ---------------------------------------------------------------------------

fn criterion_5() -> Line {
    let start = Instant::now();
    let exp = f("exp");

    // (a) exp is log-affine, so the outer links collapse.
    let theorem = TheoremId::LcQuad;
    let cell = 1000;
    let mut eq_ok = 0;
    for i in 0..100u64 {
        let mut rng = stream(SEED, cell, i);
        let ranges = SamplingRanges {
            dims: (1..=6).collect(),
            ..SamplingRanges::default()
        };
        let (m, upper, dim) = ranges.draw(&mut rng);
        let rel = admissible_relation(theorem, &exp, m, upper, &mut rng).unwrap();
        let g = generate_instance(theorem, &exp, &MapSpec::Identity, dim, m, upper, rel, &mut rng).unwrap();
        let chain = build_chain(theorem, &g.instance, &exp, None, ChainOptions::default()).unwrap();
        let r = evaluate_chain(&chain, CHAIN_TOL).unwrap();
        if r.pass && r.links[0].equality && r.links[3].equality {
            eq_ok += 1;
        }
    }

    // (b) t² has a zero slack everywhere.
    let square = f("pow:p=2");
    let grid = linspace(0.0, 3.0, 20);
    let mut worst_slack: f64 = 0.0;
    for &x in &grid {
        for &y in &grid {
            for k in 0..=10 {
                let c = check_superquadratic_characterization(&square, x, y, k as f64 / 10.0, 0.0).unwrap();
                worst_slack = worst_slack.max(c.slack.abs());
            }
        }
    }

    // (c) the worked 1x1 instance against hand-computed values.
    let s = |x: f64| HermitianMatrix::diag(&[x]);
    let worked = Instance::Quadruple(QuadrupleInstance {
        a: s(0.0),
        b: s(2.0),
        c: s(2.0),
        d: s(5.0),
        m: 1.0,
        upper: 3.0,
        relation: SumRelation::SumLeq,
        require_nonnegative_a: false,
    });
    let chain = build_chain(theorem, &worked, &exp, None, ChainOptions::default()).unwrap();
    let values = evaluate_chain(&chain, CHAIN_TOL).unwrap().values.unwrap();
    let oracle = [2.0 * E * E, 2.0 * E * E, E + E.powi(3), 1.0 + E.powi(5), 1.0 + E.powi(5)];
    let worst_rel = values
        .iter()
        .zip(oracle)
        .map(|(v, o)| (v - o).abs() / o.abs())
        .fold(0.0f64, f64::max);

    let pass = eq_ok == 100 && worst_slack <= 1e-12 && values.len() == 5 && worst_rel <= 1e-12;
    line(
        pass,
        format!(
            "equality regressions: exp outer links equal on {eq_ok}/100, t² slack max {worst_slack:.2e} over 4400 points, \
             worked values rel error {worst_rel:.2e}, {}",
            secs(start.elapsed())
        ),
    )
}

fn criterion_6(batches: &[&Batch]) -> Line {
    let total: usize = batches.iter().map(|b| b.samples.len()).sum();
    let bad: Vec<String> = batches
        .iter()
        .filter_map(|b| {
            let n = b.samples.iter().filter(|s| !s.refinement).count();
            (n > 0).then(|| format!("{} {n}", b.theorem))
        })
        .collect();
    line(
        bad.is_empty(),
        format!(
            "refinement between baseline endpoints on {total} instances{}",
            if bad.is_empty() { String::new() } else { format!("; failing {}", bad.join(", ")) }
        ),
    )
}

fn criterion_7() -> Line {
    let start = Instant::now();
    let recip = f("pow:p=-1");
    let relaxed = hunt_counterexample(&HuntConfig::new(TheoremId::LcQuad, Some(Relaxation::CondIF), recip.clone(), 10_000, 7))
        .unwrap();
    let strict = hunt_counterexample(&HuntConfig::new(TheoremId::LcQuad, None, recip.clone(), 10_000, 7)).unwrap();

    // The 1x1 family A = B = C = mI, D = MI breaks the third link without the f condition.
    let s = |x: f64| HermitianMatrix::diag(&[x]);
    let family = Instance::Quadruple(QuadrupleInstance {
        a: s(1.0),
        b: s(1.0),
        c: s(1.0),
        d: s(2.0),
        m: 1.0,
        upper: 2.0,
        relation: SumRelation::SumLeq,
        require_nonnegative_a: false,
    });
    let opts = ChainOptions {
        tol: CHAIN_TOL,
        relax: Some(Relaxation::CondIF),
    };
    let family_fails = build_chain(TheoremId::LcQuad, &family, &recip, None, opts)
        .and_then(|c| evaluate_chain(&c, CHAIN_TOL))
        .map(|r| !r.pass)
        .unwrap_or(false);

    let found = relaxed.counterexample.as_ref().map(|c| c.index);
    let pass = found.is_some() && strict.counterexample.is_none() && strict.evaluated == 10_000 && family_fails;
    line(
        pass,
        format!(
            "counterexample search: relaxed hunt found one at sample {found:?}; strict hunt {}/{} clean; \
             1x1 family fails when relaxed: {family_fails}, {}",
            strict.evaluated - strict.counterexample.is_some() as usize,
            strict.drawn,
            secs(start.elapsed())
        ),
    )
}

fn criterion_8(batches: &[&Batch]) -> Line {
    let start = Instant::now();
    let mut rng = seeded(SEED);
    let mut worst_recon: f64 = 0.0;
    for i in 0..1000 {
        let a = random_hermitian(1 + i % 16, &mut rng);
        let err = eigendecompose(&a).unwrap().reconstruct().checked_sub(&a).unwrap().frobenius_norm();
        worst_recon = worst_recon.max(err / a.frobenius_norm().max(f64::MIN_POSITIVE));
    }

    let samples = batches.iter().flat_map(|b| &b.samples);
    let total = samples.clone().count();
    let maps_bad = samples.clone().filter(|s| !s.maps_unital).count();
    let invalid = samples.filter(|s| !s.valid).count();

    let config = CampaignConfig::from_json(
        r#"{
          "theorems": ["LC-QUAD", "LC-MAP-V2", "LC-MERCER", "SQ-MAP", "SQ-MID"],
          "functions": ["exp", "pow:p=2", "pow:p=-1"],
          "maps": ["identity", "pinching", "compression", "mixed", "family:n=3"],
          "dims": [1, 3, 5],
          "instances_per_cell": 5,
          "seed": 99
        }"#,
    )
    .unwrap();
    let runs: Vec<String> = [Some(1), Some(8), Some(8)]
        .into_iter()
        .map(|t| report_to_json(&run_campaign(&config, t).unwrap()).unwrap())
        .collect();
    let deterministic = runs.windows(2).all(|w| w[0] == w[1]);

    let pass = worst_recon <= 1e-10 && maps_bad == 0 && invalid == 0 && deterministic;
    line(
        pass,
        format!(
            "infrastructure: eigen reconstruction max {worst_recon:.2e}·‖A‖, {maps_bad} non-unital maps and {invalid} \
             invalid instances out of {total}, campaign byte-identical across runs and 1/8 threads: {deterministic}, {}",
            secs(start.elapsed())
        ),
    )
}

fn main() {
    let mut lines = vec![criterion_1()];
    let (l2, b2) = criterion_2();
    let (l3, b3) = criterion_3();
    let (l4, b4) = criterion_4();
    lines.extend([l2, l3, l4, criterion_5()]);
    let all: Vec<&Batch> = b2.iter().chain(&b3).chain(&b4).collect();
    lines.push(criterion_6(&all));
    lines.push(criterion_7());
    lines.push(criterion_8(&all));

    for (i, l) in lines.iter().enumerate() {
        println!("criterion {} {}: {}", i + 1, if l.pass { "PASS" } else { "FAIL" }, l.text);
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("acceptance: {}/{} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
