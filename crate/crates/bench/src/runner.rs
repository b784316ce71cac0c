//! Benchmark suites: generate instances, bound the optimum, run algorithms,
//! and record load and makespan ratios.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::{Duration, Instant};

use malleable::matroid_scheduler::solve_matroid;
use malleable::submodular::solve_submodular;
use malleable::transform::{transform_assignment, DeltaMethod};
use malleable::{
    machine_loads, makespan, schedule_from_well_structured, verify_schedule, Assignment, Instance, Schedule,
    SpeedModel,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{exact_milp, MilpLimits};
use crate::generate::{generate, FamilyParams, GeneratorConfig};
use crate::lower_bound::lp_lower_bound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    /// Phased heuristic for submodular speeds.
    Submodular,
    /// Matroid-rank algorithm; runs on matroid-rank instances only.
    Matroid,
    /// Well-structured transformation of an exact optimal assignment.
    TransformOpt,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Submodular => "submodular",
            Algo::Matroid => "matroid",
            Algo::TransformOpt => "transform_opt",
        }
    }
}

/// Instances up to these sizes are bounded by the exact optimum, larger
/// ones by the LP bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactPolicy {
    pub max_jobs: usize,
    pub max_machines: usize,
    pub time_limit_ms: u64,
}

impl Default for ExactPolicy {
    fn default() -> Self {
        ExactPolicy {
            max_jobs: 6,
            max_machines: 5,
            time_limit_ms: 10_000,
        }
    }
}

fn default_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub families: Vec<FamilyParams>,
    /// `(n, m)` pairs.
    pub sizes: Vec<(usize, usize)>,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algo>,
    #[serde(default)]
    pub exact: ExactPolicy,
    #[serde(default = "default_tol")]
    pub rel_tol: f64,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub algo: String,
    pub lower_bound: f64,
    pub load: f64,
    pub makespan: f64,
    pub ratio_load: f64,
    pub ratio_makespan: f64,
    pub ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub instance_id: String,
    pub algo: Option<Algo>,
    pub message: String,
}

/// Mean and maximum ratios per `(family, n, m, algo)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub algo: String,
    pub count: usize,
    pub mean_ratio_load: f64,
    pub max_ratio_load: f64,
    pub mean_ratio_makespan: f64,
    pub max_ratio_makespan: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<Failure>,
    pub summary: Vec<GroupSummary>,
}

impl BenchReport {
    pub fn write_summary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "family,n,m,algo,count,mean_ratio_load,max_ratio_load,mean_ratio_makespan,max_ratio_makespan")?;
        for g in &self.summary {
            writeln!(
                out,
                "{},{},{},{},{},{:.4},{:.4},{:.4},{:.4}",
                g.family,
                g.n,
                g.m,
                g.algo,
                g.count,
                g.mean_ratio_load,
                g.max_ratio_load,
                g.mean_ratio_makespan,
                g.max_ratio_makespan
            )?;
        }
        for f in &self.failures {
            let algo = f.algo.map_or("-", Algo::name);
            writeln!(out, "failure {} {}: {}", f.instance_id, algo, f.message)?;
        }
        Ok(())
    }
}

pub fn instance_id(config: &GeneratorConfig) -> String {
    format!(
        "{}-n{}-m{}-s{}",
        config.params.family().name(),
        config.n,
        config.m,
        config.seed
    )
}

struct Bound {
    value: f64,
    optimum: Option<Assignment>,
}

fn lower_bound(instance: &Instance, policy: &ExactPolicy) -> Result<Bound, String> {
    if instance.job_count() <= policy.max_jobs && instance.machine_count() <= policy.max_machines {
        let limits = MilpLimits::with_time_limit(Duration::from_millis(policy.time_limit_ms));
        if let Ok(sol) = exact_milp(instance, limits) {
            return Ok(Bound {
                value: sol.value,
                optimum: Some(sol.assignment),
            });
        }
    }
    let value = lp_lower_bound(instance).map_err(|e| e.to_string())?;
    Ok(Bound { value, optimum: None })
}

/// Runs one algorithm and returns its verified assignment and schedule.
fn run_algo(instance: &Instance, algo: Algo, bound: &Bound, rel_tol: f64) -> Result<(Assignment, Schedule), String> {
    let (assignment, schedule) = match algo {
        Algo::Submodular => {
            let sol = solve_submodular(instance, rel_tol).map_err(|e| e.to_string())?;
            (sol.assignment, sol.schedule)
        }
        Algo::Matroid => {
            let out = solve_matroid(instance, rel_tol).map_err(|e| e.to_string())?;
            (out.solution.assignment, out.solution.schedule)
        }
        Algo::TransformOpt => {
            let opt = bound.optimum.clone().ok_or("no exact optimum for this instance size")?;
            let report = transform_assignment(instance, &opt, DeltaMethod::Greedy).map_err(|e| e.to_string())?;
            let schedule = schedule_from_well_structured(instance, &report.assignment).map_err(|e| e.to_string())?;
            (opt, schedule)
        }
    };
    verify_schedule(instance, &schedule).map_err(|v| format!("schedule failed verification: {v}"))?;
    Ok((assignment, schedule))
}

fn applies(algo: Algo, params: &FamilyParams) -> bool {
    algo != Algo::Matroid || matches!(params, FamilyParams::MatroidRank { .. })
}

fn run_instance(config: &GeneratorConfig, suite: &SuiteConfig) -> (Vec<BenchRecord>, Vec<Failure>) {
    let id = instance_id(config);
    let fail = |algo, message: String| Failure {
        instance_id: id.clone(),
        algo,
        message,
    };
    let instance = match generate(config) {
        Ok(i) => i,
        Err(e) => return (Vec::new(), vec![fail(None, e.to_string())]),
    };
    let bound = match lower_bound(&instance, &suite.exact) {
        Ok(b) => b,
        Err(e) => return (Vec::new(), vec![fail(None, e)]),
    };
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &algo in suite.algorithms.iter().filter(|&&a| applies(a, &config.params)) {
        let started = Instant::now();
        let outcome = run_algo(&instance, algo, &bound, suite.rel_tol).and_then(|(a, s)| {
            let load = machine_loads(&instance, &a).map_err(|e| e.to_string())?.max_load;
            let span = makespan(&instance, &s).map_err(|e| e.to_string())?;
            Ok((load, span))
        });
        let ms = started.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok((load, span)) => records.push(BenchRecord {
                instance_id: id.clone(),
                family: config.params.family().name().to_string(),
                n: instance.job_count(),
                m: instance.machine_count(),
                seed: config.seed,
                algo: algo.name().to_string(),
                lower_bound: bound.value,
                load,
                makespan: span,
                ratio_load: load / bound.value,
                ratio_makespan: span / bound.value,
                ms,
            }),
            Err(e) => failures.push(fail(Some(algo), e)),
        }
    }
    (records, failures)
}

fn summarize(records: &[BenchRecord]) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<(String, usize, usize, String), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.family.clone(), r.n, r.m, r.algo.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((family, n, m, algo), rs)| {
            let count = rs.len();
            let mean = |f: fn(&BenchRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / count as f64;
            let max = |f: fn(&BenchRecord) -> f64| rs.iter().map(|r| f(r)).fold(f64::NEG_INFINITY, f64::max);
            GroupSummary {
                family,
                n,
                m,
                algo,
                count,
                mean_ratio_load: mean(|r| r.ratio_load),
                max_ratio_load: max(|r| r.ratio_load),
                mean_ratio_makespan: mean(|r| r.ratio_makespan),
                max_ratio_makespan: max(|r| r.ratio_makespan),
            }
        })
        .collect()
}

/// Every `(family, size, seed)` combination in suite order; instances run
/// in parallel, records keep suite order.
pub fn run_benchmark(suite: &SuiteConfig) -> BenchReport {
    let configs: Vec<GeneratorConfig> = suite
        .families
        .iter()
        .flat_map(|params| {
            suite.sizes.iter().flat_map(move |&(n, m)| {
                suite.seeds.iter().map(move |&seed| GeneratorConfig {
                    n,
                    m,
                    seed,
                    params: params.clone(),
                })
            })
        })
        .collect();
    let results: Vec<_> = configs.par_iter().map(|c| run_instance(c, suite)).collect();
    let mut report = BenchReport::default();
    for (records, failures) in results {
        report.records.extend(records);
        report.failures.extend(failures);
    }
    report.summary = summarize(&report.records);
    report
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<BenchRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
