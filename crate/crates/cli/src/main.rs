use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use malleable::matroid_scheduler::solve_matroid;
use malleable::submodular::{solve_identical, solve_submodular};
use malleable::transform::{transform_assignment, transform_subadditive, DeltaMethod, TransformReport};
use malleable::{machine_loads, makespan, verify_schedule, Assignment, Instance, Schedule};
use malleable_bench::{
    emit_gantt, exact_milp, generate, lp_lower_bound, run_benchmark, write_csv, ExactError, Family, FamilyParams,
    GeneratorConfig, MilpLimits, SuiteConfig,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

/// Exit status for a schedule that fails verification.
const VERIFY_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "malleable", version, about = "Malleable job scheduling with set-function speeds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Machine count; ignored for clique_gap.
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Matroid matching with m + 1 slots and groups.
        #[arg(long)]
        wide: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact minimum assignment load.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        time_limit_ms: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// LP lower bound on the optimal assignment load.
    Lowerbound {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run a benchmark suite and write CSV rows.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        /// Per-group summary; printed to stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Render a schedule as an SVG Gantt chart.
    Gantt {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a schedule; exits with status 2 if it is infeasible.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Turn an assignment into a well-structured one; prints one JSON line.
    Transform {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute an assignment and schedule.
    Solve {
        #[arg(long, value_enum)]
        algo: Algorithm,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// All jobs share one speed function (submodular only).
        #[arg(long)]
        identical: bool,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Greedy,
    Lp,
    Subadditive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Matroid,
    Submodular,
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::parse(s).ok_or_else(|| {
        let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
        format!("unknown family {s:?}; expected one of {}", names.join(", "))
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn report_json(report: &TransformReport) -> serde_json::Value {
    json!({
        "input_load": report.input_load,
        "output_load": report.output_load,
        "ratio": report.ratio,
        "parent_jobs": report.parent_jobs,
        "children_jobs": report.children_jobs,
        "parent_bound_holds": report.parent_bound_holds,
        "children_bound_holds": report.children_bound_holds,
        "clamped": report.clamped,
        "assignment": report.assignment,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            family,
            n,
            m,
            seed,
            wide,
            out,
        } => {
            let params = if wide {
                if family != Family::MatroidMatching {
                    bail!("--wide applies to matroid_matching only");
                }
                FamilyParams::matroid_matching_wide(m)
            } else {
                FamilyParams::defaults(family)
            };
            let instance = generate(&GeneratorConfig { n, m, seed, params })?;
            write_json(&instance, out.as_deref())?;
        }
        Command::Exact {
            instance,
            time_limit_ms,
            out,
        } => {
            let inst: Instance = read_json(&instance)?;
            let limits = MilpLimits {
                time_limit: time_limit_ms.map(Duration::from_millis),
            };
            match exact_milp(&inst, limits) {
                Ok(sol) => write_json(
                    &json!({"value": sol.value, "nodes": sol.nodes, "assignment": sol.assignment}),
                    out.as_deref(),
                )?,
                Err(ExactError::Timeout {
                    assignment,
                    incumbent,
                    bound,
                }) => {
                    write_json(
                        &json!({"timeout": true, "incumbent": incumbent, "bound": bound, "assignment": assignment}),
                        out.as_deref(),
                    )?;
                    bail!("time limit reached; incumbent {incumbent}, bound {bound}");
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Lowerbound { instance } => {
            let inst: Instance = read_json(&instance)?;
            println!("{}", json!({ "lower_bound": lp_lower_bound(&inst)? }));
        }
        Command::Bench { suite, csv, summary } => {
            let suite: SuiteConfig = read_json(&suite)?;
            let report = run_benchmark(&suite);
            let file = File::create(&csv).with_context(|| format!("creating {}", csv.display()))?;
            write_csv(&report.records, BufWriter::new(file))?;
            match summary {
                Some(path) => report.write_summary(BufWriter::new(File::create(path)?))?,
                None => report.write_summary(io::stdout().lock())?,
            }
            if report.failures.iter().any(|f| f.message.contains("verification")) {
                return Ok(ExitCode::from(VERIFY_FAILED));
            }
        }
        Command::Gantt {
            instance,
            schedule,
            out,
        } => {
            let inst: Instance = read_json(&instance)?;
            let schedule: Schedule = read_json(&schedule)?;
            if let Err(v) = verify_schedule(&inst, &schedule) {
                eprintln!("schedule is infeasible: {v}");
                return Ok(ExitCode::from(VERIFY_FAILED));
            }
            fs::write(&out, emit_gantt(&inst, &schedule)?).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Verify { instance, schedule } => {
            let inst: Instance = read_json(&instance)?;
            let schedule: Schedule = read_json(&schedule)?;
            match verify_schedule(&inst, &schedule) {
                Ok(()) => println!("{}", json!({"feasible": true, "makespan": makespan(&inst, &schedule)?})),
                Err(v) => {
                    println!("{}", json!({"feasible": false, "violation": v.to_string()}));
                    return Ok(ExitCode::from(VERIFY_FAILED));
                }
            }
        }
        Command::Transform {
            instance,
            assignment,
            method,
            out,
        } => {
            let inst: Instance = read_json(&instance)?;
            let assignment: Assignment = read_json(&assignment)?;
            let report = match method {
                Method::Greedy => transform_assignment(&inst, &assignment, DeltaMethod::Greedy)?,
                Method::Lp => transform_assignment(&inst, &assignment, DeltaMethod::Lp)?,
                Method::Subadditive => transform_subadditive(&inst, &assignment)?,
            };
            if let Some(path) = out {
                write_json(&report.assignment, Some(&path))?;
            }
            println!("{}", report_json(&report));
        }
        Command::Solve {
            algo,
            instance,
            out,
            identical,
            tol,
        } => {
            let inst: Instance = read_json(&instance)?;
            let (summary, schedule) = match (algo, identical) {
                (Algorithm::Matroid, true) => bail!("--identical applies to the submodular algorithm only"),
                (Algorithm::Matroid, false) => {
                    let out = solve_matroid(&inst, tol)?;
                    let s = out.solution;
                    let load = machine_loads(&inst, &s.assignment)?.max_load;
                    let summary = json!({
                        "algo": "matroid",
                        "level": s.level,
                        "load": load,
                        "calls": out.calls,
                        "certificates": out.certificates.len(),
                    });
                    (summary, s.schedule)
                }
                (Algorithm::Submodular, false) => {
                    let s = solve_submodular(&inst, tol)?;
                    let load = machine_loads(&inst, &s.assignment)?.max_load;
                    let summary = json!({
                        "algo": "submodular",
                        "level": s.level,
                        "load": load,
                        "phases": s.phases.len(),
                        "calls": s.calls,
                    });
                    (summary, s.schedule)
                }
                (Algorithm::Submodular, true) => {
                    let s = solve_identical(&inst, tol)?;
                    let summary = json!({
                        "algo": "submodular_identical",
                        "level": s.level,
                        "copies": s.copies_used,
                    });
                    (summary, s.schedule)
                }
            };
            if let Err(v) = verify_schedule(&inst, &schedule) {
                eprintln!("computed schedule is infeasible: {v}");
                return Ok(ExitCode::from(VERIFY_FAILED));
            }
            let mut summary = summary;
            summary["makespan"] = json!(makespan(&inst, &schedule)?);
            match out {
                Some(path) => {
                    write_json(&schedule, Some(&path))?;
                    println!("{summary}");
                }
                None => write_json(&json!({"summary": summary, "schedule": schedule}), None)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io::stderr(), "error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
