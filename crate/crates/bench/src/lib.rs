//! Baselines and experiments: exact optimum by branch-and-bound, the LP
//! lower bound, seeded instance generators, the benchmark runner with CSV
//! output, and SVG Gantt charts.

pub mod exact;
pub mod gantt;
pub mod generate;
pub mod lower_bound;
pub mod runner;

pub use exact::{exact_milp, ExactError, ExactSolution, MilpLimits};
pub use gantt::emit_gantt;
pub use generate::{generate, Family, FamilyParams, GenerateError, GeneratorConfig};
pub use lower_bound::lp_lower_bound;
pub use runner::{read_csv, run_benchmark, write_csv, Algo, BenchRecord, BenchReport, SuiteConfig};
