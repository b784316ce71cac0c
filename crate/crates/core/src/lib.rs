//! Scheduling malleable jobs whose joint speed on a machine set is a set
//! function: data model, speed oracles, combinatorial and LP tools, the
//! well-structured transformation, and approximation algorithms.

pub mod combinatorics;
pub mod lp;
pub mod matroid_scheduler;
pub mod model;
pub mod scalar;
pub mod set;
pub mod speed;
pub mod submodular;
pub mod transform;

pub use model::{
    clique_gap_instance, is_well_structured, machine_loads, makespan, schedule_from_well_structured,
    schedule_in_order, verify_schedule, Assignment, Instance, LoadProfile, ModelError, Schedule, SpeedModel,
    Violation,
};
pub use scalar::Scalar;
pub use set::MachineSet;
pub use speed::{SetFunction, Speed};

/// Double-precision linear program.
pub type Lp = lp::LinearProgram<f64>;
/// Single-precision linear program.
pub type Lp32 = lp::LinearProgram<f32>;
/// Double-precision simplex solution.
pub type Solution = lp::BasicSolution<f64>;
