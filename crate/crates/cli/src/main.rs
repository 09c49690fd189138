//! `loewner-lab` command-line front end.
//!
//! Exit codes: 0 when everything holds, 1 when a chain fails (or a hunt finds
//! a counterexample), 2 on usage, configuration or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use loewner_core::campaign::{emit_report, report_to_json, run_campaign, CampaignConfig};
use loewner_core::engine::{
    build_chain, evaluate_chain, hunt_counterexample, instance_digest, ChainOptions, HuntConfig, MapUse, Relaxation,
    SamplingRanges, TheoremId,
};
use loewner_core::forge::Instance;
use loewner_core::functions::FunctionDescriptor;
use loewner_core::hermitian::DEFAULT_PSD_TOL;
use loewner_core::maps::{MapSpec, PositiveUnitalMap};
use loewner_core::Error;

#[derive(Parser)]
#[command(name = "loewner-lab", version, about = "Numerical checks of interpolating Jensen-type operator inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one instance and print the chain report as JSON.
    Verify {
        /// Theorem id such as `LC-QUAD` or `SQ-MAP-V2` (case-insensitive).
        #[arg(long)]
        theorem: TheoremId,
        /// Instance JSON file.
        #[arg(long)]
        instance: PathBuf,
        /// `exp`, `exp:a=<r>`, `pow:p=<r>`, `recip` or `const:c=<r>`.
        #[arg(long)]
        function: String,
        /// Map JSON file for single-map theorems (identity when absent).
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PSD_TOL)]
        tol: f64,
        /// Hypothesis to skip.
        #[arg(long)]
        relax: Option<Relaxation>,
    },
    /// Run a campaign from a JSON config and write the report.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Does not affect the report.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Search for a failing instance with one hypothesis dropped.
    Hunt {
        #[arg(long)]
        theorem: TheoremId,
        /// `cond-i-f`, `cond-i-sum`, `cond-ii-f`, `cond-ii-sum` or `equal-sum`.
        #[arg(long)]
        relax: Option<Relaxation>,
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Map kind (`identity`, `pinching`, `compression`, `mixed`, `family:n=<k>`).
        #[arg(long)]
        map: Option<String>,
        /// Comma-separated dimensions to sample.
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        dims: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_PSD_TOL)]
        tol: f64,
    },
}

fn verify(
    theorem: TheoremId,
    instance: PathBuf,
    function: &str,
    map: Option<PathBuf>,
    tol: f64,
    relax: Option<Relaxation>,
) -> Result<bool, Error> {
    let f = FunctionDescriptor::parse(function)?;
    let text = std::fs::read_to_string(&instance).map_err(|e| Error::Io(format!("{}: {e}", instance.display())))?;
    let inst = Instance::from_json(&text)?;
    let map = match map {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Some(serde_json::from_str::<PositiveUnitalMap>(&text)?)
        }
        None => None,
    };
    let chain = build_chain(theorem, &inst, &f, map.as_ref(), ChainOptions { tol, relax })?;
    let digest = instance_digest(&inst, &f, map.as_ref())?;
    let report = evaluate_chain(&chain, tol)?.with_provenance(digest, None);
    print!("{}", report_to_json(&report)?);
    Ok(report.pass)
}

fn campaign(config: PathBuf, out: PathBuf, seed: Option<u64>, threads: Option<usize>) -> Result<bool, Error> {
    let mut cfg = CampaignConfig::from_file(&config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let report = run_campaign(&cfg, threads)?;
    emit_report(&report, &out)?;
    let ran: usize = report.cells.iter().map(|c| c.pass + c.fail).sum();
    let failed: usize = report.cells.iter().map(|c| c.fail).sum();
    let skipped = report.cells.iter().filter(|c| c.skipped.is_some()).count();
    eprintln!(
        "{}: {ran} instances, {failed} failed, {skipped} cells skipped -> {}",
        report.verdict,
        out.display()
    );
    Ok(report.passed())
}

#[allow(clippy::too_many_arguments)]
fn hunt(
    theorem: TheoremId,
    relax: Option<Relaxation>,
    function: &str,
    budget: usize,
    seed: u64,
    map: Option<String>,
    dims: Vec<usize>,
    tol: f64,
) -> Result<bool, Error> {
    let f = FunctionDescriptor::parse(function)?;
    let mut cfg = HuntConfig::new(theorem, relax, f, budget, seed);
    if let Some(spec) = map {
        cfg.map = MapSpec::parse(&spec)?;
    } else if theorem.map_use() == MapUse::Family {
        cfg.map = MapSpec::Family(3);
    }
    cfg.ranges = SamplingRanges {
        dims,
        ..SamplingRanges::default()
    };
    cfg.tol = tol;
    let outcome = hunt_counterexample(&cfg)?;
    print!("{}", report_to_json(&outcome)?);
    eprintln!(
        "drew {}, evaluated {}, skipped {}: {}",
        outcome.drawn,
        outcome.evaluated,
        outcome.skipped,
        if outcome.counterexample.is_some() { "counterexample found" } else { "none found" }
    );
    Ok(outcome.counterexample.is_none())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            theorem,
            instance,
            function,
            map,
            tol,
            relax,
        } => verify(theorem, instance, &function, map, tol, relax),
        Command::Campaign {
            config,
            out,
            seed,
            threads,
        } => campaign(config, out, seed, threads),
        Command::Hunt {
            theorem,
            relax,
            function,
            budget,
            seed,
            map,
            dims,
            tol,
        } => hunt(theorem, relax, &function, budget, seed, map, dims, tol),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
