//! Configuration-driven randomized campaigns.
//!
//! A campaign crosses theorems, functions, maps and dimensions into cells,
//! draws `instances_per_cell` instances per cell from independent streams
//! addressed by `(seed, cell, index)`, and evaluates every chain. Results are
//! merged by index, so the report does not depend on the thread count.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::{
    admissible_relation, build_chain, check_class, check_refinement, evaluate_chain, generate_instance,
    instance_digest, ChainOptions, MapUse, SamplingRanges, TheoremId,
};
use crate::error::{Error, Result};
use crate::functions::FunctionDescriptor;
use crate::hermitian::DEFAULT_PSD_TOL;
use crate::maps::{sample_map, MapSpec};
use crate::rng::{seeded, stream};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn default_maps() -> Vec<String> {
    vec!["identity".into()]
}

fn default_m_range() -> (f64, f64) {
    SamplingRanges::default().m_range
}

fn default_width_range() -> (f64, f64) {
    SamplingRanges::default().width_range
}

fn default_tol() -> f64 {
    DEFAULT_PSD_TOL
}

/// Campaign configuration, read from JSON with these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub theorems: Vec<String>,
    pub functions: Vec<String>,
    #[serde(default = "default_maps")]
    pub maps: Vec<String>,
    pub dims: Vec<usize>,
    #[serde(default = "default_m_range")]
    pub m_range: (f64, f64),
    /// Range of `M − m`.
    #[serde(default = "default_width_range")]
    pub width_range: (f64, f64),
    pub instances_per_cell: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// The parsed, validated form of a [`CampaignConfig`].
struct Plan {
    theorems: Vec<TheoremId>,
    functions: Vec<FunctionDescriptor>,
    maps: Vec<MapSpec>,
    ranges: SamplingRanges,
}

impl CampaignConfig {
    /// Parses JSON; type errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.plan().map(|_| ())
    }

    fn plan(&self) -> Result<Plan> {
        fn nonempty<T>(items: &[T], field: &str) -> Result<()> {
            if items.is_empty() {
                return Err(config_error(field, "must not be empty"));
            }
            Ok(())
        }
        nonempty(&self.theorems, "theorems")?;
        nonempty(&self.functions, "functions")?;
        nonempty(&self.maps, "maps")?;
        nonempty(&self.dims, "dims")?;
        let theorems = self
            .theorems
            .iter()
            .enumerate()
            .map(|(i, t)| t.parse().map_err(|e: Error| config_error(format!("theorems[{i}]"), e.to_string())))
            .collect::<Result<Vec<TheoremId>>>()?;
        let functions = self
            .functions
            .iter()
            .enumerate()
            .map(|(i, f)| FunctionDescriptor::parse(f).map_err(|e| config_error(format!("functions[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| MapSpec::parse(m).map_err(|e| config_error(format!("maps[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if let Some(i) = self.dims.iter().position(|&d| d == 0) {
            return Err(config_error(format!("dims[{i}]"), "dimensions must be at least 1"));
        }
        let (lo, hi) = self.m_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(config_error("m_range", "expected finite [lo, hi] with lo <= hi"));
        }
        let (wlo, whi) = self.width_range;
        if !(wlo.is_finite() && whi.is_finite() && wlo > 0.0 && wlo <= whi) {
            return Err(config_error("width_range", "expected finite [lo, hi] with 0 < lo <= hi"));
        }
        if self.instances_per_cell == 0 {
            return Err(config_error("instances_per_cell", "must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(config_error("tol", "must be a positive finite number"));
        }
        Ok(Plan {
            theorems,
            functions,
            maps,
            ranges: SamplingRanges {
                m_range: self.m_range,
                width_range: self.width_range,
                dims: self.dims.clone(),
            },
        })
    }
}

/// One failed instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
    /// Index of the first failing link, when the chain was evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    /// Set when the instance could not be generated or evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub theorem: TheoremId,
    pub function: String,
    pub map: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub pass: usize,
    pub fail: usize,
    /// Smallest `λ_min` over all links of all instances.
    pub min_link_eigenvalue: Option<f64>,
    /// Smallest `λ_min / tolerance_used` over all links: at least −1 on a pass.
    pub min_scaled_link_eigenvalue: Option<f64>,
    /// Per link, the number of instances where it was an equality.
    pub equality_links: Vec<usize>,
    /// Instances whose refined terms escaped the baseline endpoints.
    pub refinement_failures: usize,
    pub failures: Vec<FailureRecord>,
}

impl CellReport {
    fn new(theorem: TheoremId, function: &FunctionDescriptor, map: &MapSpec, dim: usize) -> Self {
        Self {
            theorem,
            function: function.id().to_string(),
            map: map.to_string(),
            dim,
            skipped: None,
            pass: 0,
            fail: 0,
            min_link_eigenvalue: None,
            min_scaled_link_eigenvalue: None,
            equality_links: Vec::new(),
            refinement_failures: 0,
            failures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub cells: Vec<CellReport>,
    /// `"pass"` or `"fail"`.
    pub verdict: String,
    pub seed: u64,
    pub version: String,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

/// Outcome of one instance.
struct Sample {
    pass: bool,
    min_eigenvalue: f64,
    min_scaled: f64,
    equalities: Vec<bool>,
    refinement_ok: bool,
    failure: Option<FailureRecord>,
}

struct Cell {
    theorem: TheoremId,
    function: FunctionDescriptor,
    map: MapSpec,
    dim: usize,
}

fn skip_reason(cell: &Cell) -> Option<String> {
    if check_class(cell.theorem, &cell.function).is_err() {
        return Some("function class mismatch".into());
    }
    let ok = match cell.theorem.map_use() {
        MapUse::None => cell.map == MapSpec::Identity,
        MapUse::Single => !cell.map.is_family(),
        MapUse::Family => cell.map.is_family(),
    };
    if !ok {
        let wants = match cell.theorem.map_use() {
            MapUse::None => "identity",
            MapUse::Single => "a single map",
            MapUse::Family => "family:n=<k>",
        };
        return Some(format!("map shape mismatch: {} takes {wants}", cell.theorem));
    }
    if cell.theorem.map_use() == MapUse::Single {
        if let Err(e) = sample_map(&cell.map, cell.dim, &mut seeded(0)) {
            return Some(format!("map not applicable at dim {}: {e}", cell.dim));
        }
    }
    None
}

fn run_sample(cell: &Cell, ranges: &SamplingRanges, tol: f64, seed: u64, cell_ix: usize, index: usize) -> Sample {
    let failed = |error: Option<String>, digest: Option<String>, link: Option<usize>, min: Option<f64>| Sample {
        pass: false,
        min_eigenvalue: min.unwrap_or(f64::NAN),
        min_scaled: f64::NAN,
        equalities: Vec::new(),
        refinement_ok: true,
        failure: Some(FailureRecord {
            index,
            digest,
            link,
            min_eigenvalue: min,
            error,
        }),
    };
    let mut rng = stream(seed, cell_ix as u64, index as u64);
    let ranges = SamplingRanges {
        dims: vec![cell.dim],
        ..ranges.clone()
    };
    let (m, upper, dim) = ranges.draw(&mut rng);
    let generated = admissible_relation(cell.theorem, &cell.function, m, upper, &mut rng).and_then(|relation| {
        generate_instance(cell.theorem, &cell.function, &cell.map, dim, m, upper, relation, &mut rng)
    });
    let generated = match generated {
        Ok(g) => g,
        Err(e) => return failed(Some(format!("generation: {e}")), None, None, None),
    };
    let map = generated.map.as_ref();
    let digest = instance_digest(&generated.instance, &cell.function, map).ok();
    let opts = ChainOptions { tol, relax: None };
    let evaluated = build_chain(cell.theorem, &generated.instance, &cell.function, map, opts)
        .and_then(|chain| Ok((evaluate_chain(&chain, tol)?, check_refinement(&chain, tol)?)));
    let (report, refinement) = match evaluated {
        Ok(r) => r,
        Err(e) => return failed(Some(e.to_string()), digest, None, None),
    };
    let min_scaled = report
        .links
        .iter()
        .map(|l| l.min_eigenvalue / l.tolerance_used)
        .fold(f64::INFINITY, f64::min);
    if !report.pass {
        let mut out = failed(None, digest, report.first_failure(), Some(report.min_link_eigenvalue));
        out.min_scaled = min_scaled;
        out.refinement_ok = refinement.pass;
        return out;
    }
    Sample {
        pass: true,
        min_eigenvalue: report.min_link_eigenvalue,
        min_scaled,
        equalities: report.links.iter().map(|l| l.equality).collect(),
        refinement_ok: refinement.pass,
        failure: None,
    }
}

fn min_opt(acc: Option<f64>, x: f64) -> Option<f64> {
    if x.is_nan() {
        return acc;
    }
    Some(acc.map_or(x, |a| a.min(x)))
}

/// Runs every cell; `threads = None` uses rayon's default pool.
pub fn run_campaign(config: &CampaignConfig, threads: Option<usize>) -> Result<CampaignReport> {
    let plan = config.plan()?;
    let mut cells = Vec::new();
    for &theorem in &plan.theorems {
        for function in &plan.functions {
            for map in &plan.maps {
                for &dim in &config.dims {
                    cells.push(Cell {
                        theorem,
                        function: function.clone(),
                        map: map.clone(),
                        dim,
                    });
                }
            }
        }
    }
    let skips: Vec<Option<String>> = cells.iter().map(skip_reason).collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .filter(|&c| skips[c].is_none())
        .flat_map(|c| (0..config.instances_per_cell).map(move |i| (c, i)))
        .collect();
    let work = || -> Vec<Sample> {
        jobs.par_iter()
            .map(|&(c, i)| run_sample(&cells[c], &plan.ranges, config.tol, config.seed, c, i))
            .collect()
    };
    let samples = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut reports: Vec<CellReport> = cells
        .iter()
        .zip(&skips)
        .map(|(cell, skip)| {
            let mut r = CellReport::new(cell.theorem, &cell.function, &cell.map, cell.dim);
            r.skipped = skip.clone();
            r
        })
        .collect();
    for (&(c, _), sample) in jobs.iter().zip(samples) {
        let r = &mut reports[c];
        if sample.pass {
            r.pass += 1;
        } else {
            r.fail += 1;
        }
        r.min_link_eigenvalue = min_opt(r.min_link_eigenvalue, sample.min_eigenvalue);
        r.min_scaled_link_eigenvalue = min_opt(r.min_scaled_link_eigenvalue, sample.min_scaled);
        if r.equality_links.len() < sample.equalities.len() {
            r.equality_links.resize(sample.equalities.len(), 0);
        }
        for (k, &eq) in sample.equalities.iter().enumerate() {
            r.equality_links[k] += usize::from(eq);
        }
        r.refinement_failures += usize::from(!sample.refinement_ok);
        r.failures.extend(sample.failure);
    }
    let failed = reports.iter().any(|r| r.fail > 0);
    Ok(CampaignReport {
        config: config.clone(),
        cells: reports,
        verdict: if failed { "fail" } else { "pass" }.into(),
        seed: config.seed,
        version: VERSION.into(),
    })
}

/// Canonical JSON: sorted keys with two-space indentation. Every float is
/// written with 17 significant digits.
pub fn report_to_json<T: Serialize>(report: &T) -> Result<String> {
    let value = serde_json::to_value(report)?;
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    let indent = |out: &mut String, d: usize| {
        out.push('\n');
        out.push_str(&"  ".repeat(d));
    };
    match value {
        Value::Number(n) if n.is_f64() => {
            let _ = write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN));
        }
        Value::Array(items) if !items.is_empty() => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            // serde_json's default map is a BTreeMap, so keys come out sorted.
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                indent(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
            }
            indent(out, depth);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &CampaignReport, path: &Path) -> Result<()> {
    let text = report_to_json(report)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(theorems: &[&str], functions: &[&str], maps: &[&str], dims: &[usize], n: usize) -> CampaignConfig {
        CampaignConfig {
            theorems: theorems.iter().map(|s| s.to_string()).collect(),
            functions: functions.iter().map(|s| s.to_string()).collect(),
            maps: maps.iter().map(|s| s.to_string()).collect(),
            dims: dims.to_vec(),
            m_range: (0.5, 2.0),
            width_range: (0.5, 2.0),
            instances_per_cell: n,
            tol: 1e-9,
            seed: 42,
        }
    }

    #[test]
    fn single_cell_passes_with_equality_links() {
        let r = run_campaign(&config(&["LC-QUAD"], &["exp"], &["identity"], &[1], 1), Some(1)).unwrap();
        assert!(r.passed());
        let cell = &r.cells[0];
        assert_eq!((cell.pass, cell.fail), (1, 0));
        assert_eq!(cell.equality_links[0], 1);
        assert_eq!(cell.equality_links[3], 1);
        assert!(cell.min_link_eigenvalue.unwrap().abs() < 1e-9);
    }

    #[test]
    fn class_mismatch_skips_the_cell() {
        let r = run_campaign(&config(&["SQ-MAP"], &["exp"], &["identity"], &[2], 3), None).unwrap();
        assert_eq!(r.cells[0].skipped.as_deref(), Some("function class mismatch"));
        assert_eq!(r.cells[0].pass + r.cells[0].fail, 0);
        assert!(r.passed());
    }

    #[test]
    fn map_shape_mismatch_skips_the_cell() {
        let r = run_campaign(&config(&["LC-QUAD", "LC-MULTI"], &["exp"], &["pinching"], &[2], 2), None).unwrap();
        assert!(r.cells.iter().all(|c| c.skipped.as_deref().unwrap().starts_with("map shape mismatch")));
    }

    #[test]
    fn zero_instances_is_a_config_error() {
        let err = config(&["LC-QUAD"], &["exp"], &["identity"], &[1], 0).validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "instances_per_cell"));
    }

    #[test]
    fn config_errors_carry_field_paths() {
        let err = CampaignConfig::from_json(r#"{"theorems":["LC-QUAD"],"functions":["exp"],"dims":[1,"x"],"instances_per_cell":1}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "dims[1]"), "{err}");
        let err = CampaignConfig::from_json(r#"{"theorems":["LC-NOPE"],"functions":["exp"],"dims":[1],"instances_per_cell":1}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "theorems[0]"));
        let err = CampaignConfig::from_json(r#"{"theorems":["LC-QUAD"],"functions":["exp"],"dims":[1],"instances_per_cell":1,"tol":0}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "tol"));
        let err = CampaignConfig::from_json(r#"{"theorems":["LC-QUAD"],"functions":["exp"],"dims":[1],"instances_per_cell":1,"bogus":1}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn report_json_is_sorted_with_17_digit_floats() {
        let r = run_campaign(&config(&["LC-QUAD"], &["exp"], &["identity"], &[1], 2), Some(2)).unwrap();
        let text = report_to_json(&r).unwrap();
        let keys: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        assert_eq!(keys, ["cells", "config", "seed", "verdict", "version"]);
        assert!(text.contains(&format!("\"tol\": {:.16e}", 1e-9)));
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["verdict"], "pass");
        assert_eq!(parsed["config"]["tol"].as_f64(), Some(1e-9));
    }

    #[test]
    fn reports_do_not_depend_on_thread_count() {
        let cfg = config(&["LC-MAP", "SQ-MULTI-A"], &["exp", "pow:p=2"], &["mixed", "family:n=2"], &[1, 3], 4);
        let one = report_to_json(&run_campaign(&cfg, Some(1)).unwrap()).unwrap();
        let many = report_to_json(&run_campaign(&cfg, Some(8)).unwrap()).unwrap();
        assert_eq!(one, many);
    }
}
