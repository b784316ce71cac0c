//! Instances, assignments, schedules, loads and makespan.
//!
//! A job `j` processed on machine set `S` takes time `f_j(S) = 1 / g_j(S)`,
//! where `g_j` is the job's speed function. A zero speed encodes an infinite
//! processing time; committing a job to such a set is an error rather than a
//! silent infinity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::{MachineSet, MAX_MACHINES};
use crate::speed::{AllOfSpeed, SetFunction, Speed};

/// Read access to per-job speed oracles over a common machine set.
///
/// Implemented by [`Instance`] and by derived views such as truncated or
/// surrogate oracles, so that algorithms run unchanged on either.
pub trait SpeedModel: Sync {
    fn job_count(&self) -> usize;
    fn machine_count(&self) -> usize;
    fn speed(&self, job: usize, set: MachineSet) -> f64;

    fn machines(&self) -> MachineSet {
        MachineSet::full(self.machine_count())
    }

    fn processing_time(&self, job: usize, set: MachineSet) -> Result<f64, ModelError> {
        let g = self.speed(job, set);
        if g > 0.0 {
            Ok(1.0 / g)
        } else {
            Err(ModelError::ZeroSpeed { job })
        }
    }
}

impl<M: SpeedModel + ?Sized> SpeedModel for &M {
    fn job_count(&self) -> usize {
        (**self).job_count()
    }
    fn machine_count(&self) -> usize {
        (**self).machine_count()
    }
    fn speed(&self, job: usize, set: MachineSet) -> f64 {
        (**self).speed(job, set)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("job {job} has zero speed on its machine set")]
    ZeroSpeed { job: usize },
    #[error("job {job} is assigned an empty machine set")]
    EmptySet { job: usize },
    #[error("job {job} uses machine {machine}, which is not in the instance")]
    UnknownMachine { job: usize, machine: usize },
    #[error("expected {expected} jobs, found {found}")]
    JobCountMismatch { expected: usize, found: usize },
    #[error("schedule is infeasible: {0}")]
    Infeasible(Box<Violation>),
    #[error("assignment is not well-structured: machine {machine} shares more than one job")]
    NotWellStructured { machine: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

/// A job set, a machine set and one speed oracle per job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    machines: usize,
    speeds: Vec<Speed>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    jobs: usize,
    machines: usize,
    speeds: Vec<Speed>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = ModelError;

    fn try_from(raw: RawInstance) -> Result<Self, ModelError> {
        if raw.speeds.len() != raw.jobs {
            return Err(ModelError::JobCountMismatch {
                expected: raw.jobs,
                found: raw.speeds.len(),
            });
        }
        Instance::new(raw.machines, raw.speeds)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance {
            jobs: inst.speeds.len(),
            machines: inst.machines,
            speeds: inst.speeds,
        }
    }
}

impl Instance {
    pub fn new(machines: usize, speeds: Vec<Speed>) -> Result<Self, ModelError> {
        if speeds.is_empty() {
            return Err(ModelError::InvalidInstance("at least one job is required".into()));
        }
        if machines == 0 || machines > MAX_MACHINES {
            return Err(ModelError::InvalidInstance(format!(
                "machine count must be in 1..={MAX_MACHINES}, got {machines}"
            )));
        }
        for (j, s) in speeds.iter().enumerate() {
            s.validate(machines)
                .map_err(|e| ModelError::InvalidInstance(format!("job {j}: {e}")))?;
        }
        Ok(Instance { machines, speeds })
    }

    pub fn speeds(&self) -> &[Speed] {
        &self.speeds
    }

    pub fn speed_fn(&self, job: usize) -> &Speed {
        &self.speeds[job]
    }
}

impl SpeedModel for Instance {
    fn job_count(&self) -> usize {
        self.speeds.len()
    }

    fn machine_count(&self) -> usize {
        self.machines
    }

    fn speed(&self, job: usize, set: MachineSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        self.speeds[job].value(set)
    }
}

/// A non-empty machine set per job.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub sets: Vec<MachineSet>,
}

impl Assignment {
    pub fn new(sets: Vec<MachineSet>) -> Self {
        Assignment { sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Checks job count, non-emptiness and machine range against `model`.
    pub fn validate<M: SpeedModel + ?Sized>(&self, model: &M) -> Result<(), ModelError> {
        if self.sets.len() != model.job_count() {
            return Err(ModelError::JobCountMismatch {
                expected: model.job_count(),
                found: self.sets.len(),
            });
        }
        let all = model.machines();
        for (job, &s) in self.sets.iter().enumerate() {
            if s.is_empty() {
                return Err(ModelError::EmptySet { job });
            }
            if let Some(machine) = s.difference(all).first() {
                return Err(ModelError::UnknownMachine { job, machine });
            }
        }
        Ok(())
    }

    /// Processing time of every job on its set.
    pub fn processing_times<M: SpeedModel + ?Sized>(&self, model: &M) -> Result<Vec<f64>, ModelError> {
        self.validate(model)?;
        self.sets
            .iter()
            .enumerate()
            .map(|(j, &s)| model.processing_time(j, s))
            .collect()
    }
}

/// An assignment together with one start time per job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub sets: Vec<MachineSet>,
    pub starts: Vec<f64>,
}

impl Schedule {
    pub fn assignment(&self) -> Assignment {
        Assignment::new(self.sets.clone())
    }
}

/// Per-machine loads of an assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub load: Vec<f64>,
    pub max_load: f64,
}

/// Sum of `f_j(S_j)` over the jobs using each machine.
pub fn machine_loads<M: SpeedModel + ?Sized>(model: &M, assignment: &Assignment) -> Result<LoadProfile, ModelError> {
    let times = assignment.processing_times(model)?;
    let mut load = vec![0.0; model.machine_count()];
    for (&s, &t) in assignment.sets.iter().zip(&times) {
        for i in s.iter() {
            load[i] += t;
        }
    }
    let max_load = load.iter().copied().fold(0.0, f64::max);
    Ok(LoadProfile { load, max_load })
}

/// First reason a schedule is not feasible.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Model(ModelError),
    StartCount { expected: usize, found: usize },
    InvalidStart { job: usize },
    /// Jobs `first < second` overlap in time on `machine`.
    Overlap { first: usize, second: usize, machine: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Model(e) => write!(f, "{e}"),
            Violation::StartCount { expected, found } => {
                write!(f, "expected {expected} start times, found {found}")
            }
            Violation::InvalidStart { job } => write!(f, "job {job} has a negative or non-finite start"),
            Violation::Overlap { first, second, machine } => {
                write!(f, "jobs {first} and {second} overlap on machine {machine}")
            }
        }
    }
}

/// Accepts iff no two jobs sharing a machine have overlapping half-open
/// intervals `[t_j, t_j + f_j(S_j))`. Comparisons are exact.
pub fn verify_schedule<M: SpeedModel + ?Sized>(model: &M, schedule: &Schedule) -> Result<(), Violation> {
    let assignment = schedule.assignment();
    let times = assignment.processing_times(model).map_err(Violation::Model)?;
    if schedule.starts.len() != times.len() {
        return Err(Violation::StartCount {
            expected: times.len(),
            found: schedule.starts.len(),
        });
    }
    if let Some(job) = schedule.starts.iter().position(|t| !t.is_finite() || *t < 0.0) {
        return Err(Violation::InvalidStart { job });
    }
    let n = times.len();
    for a in 0..n {
        for b in a + 1..n {
            let shared = schedule.sets[a].intersection(schedule.sets[b]);
            let Some(machine) = shared.first() else { continue };
            let (sa, ea) = (schedule.starts[a], schedule.starts[a] + times[a]);
            let (sb, eb) = (schedule.starts[b], schedule.starts[b] + times[b]);
            if sa < eb && sb < ea {
                return Err(Violation::Overlap { first: a, second: b, machine });
            }
        }
    }
    Ok(())
}

/// `max_j t_j + f_j(S_j)` of a feasible schedule.
pub fn makespan<M: SpeedModel + ?Sized>(model: &M, schedule: &Schedule) -> Result<f64, ModelError> {
    verify_schedule(model, schedule).map_err(|v| match v {
        Violation::Model(e) => e,
        other => ModelError::Infeasible(Box::new(other)),
    })?;
    let times = schedule.assignment().processing_times(model)?;
    Ok(schedule
        .starts
        .iter()
        .zip(&times)
        .map(|(s, t)| s + t)
        .fold(0.0, f64::max))
}

/// True iff every machine belongs to at most one multi-machine set.
pub fn is_well_structured(assignment: &Assignment) -> bool {
    well_structured_conflict(assignment).is_none()
}

fn well_structured_conflict(assignment: &Assignment) -> Option<usize> {
    let mut shared = MachineSet::EMPTY;
    for &s in assignment.sets.iter().filter(|s| s.len() > 1) {
        if let Some(machine) = shared.intersection(s).first() {
            return Some(machine);
        }
        shared = shared.union(s);
    }
    None
}

/// Turns a well-structured assignment into a schedule with makespan equal
/// to its maximum load: shared jobs start at time zero, then each machine
/// runs its singleton jobs back to back in job-id order.
pub fn schedule_from_well_structured<M: SpeedModel + ?Sized>(
    model: &M,
    assignment: &Assignment,
) -> Result<Schedule, ModelError> {
    if let Some(machine) = well_structured_conflict(assignment) {
        return Err(ModelError::NotWellStructured { machine });
    }
    let times = assignment.processing_times(model)?;
    let mut free = vec![0.0; model.machine_count()];
    let mut starts = vec![0.0; times.len()];
    for (j, &s) in assignment.sets.iter().enumerate() {
        if s.len() > 1 {
            for i in s.iter() {
                free[i] = times[j];
            }
        }
    }
    for (j, &s) in assignment.sets.iter().enumerate() {
        if s.len() == 1 {
            let i = s.first().unwrap();
            starts[j] = free[i];
            free[i] += times[j];
        }
    }
    Ok(Schedule {
        sets: assignment.sets.clone(),
        starts,
    })
}

/// List-schedules jobs in `order`, each starting as soon as all of its
/// machines are free. Works for any assignment.
pub fn schedule_in_order<M: SpeedModel + ?Sized>(
    model: &M,
    assignment: &Assignment,
    order: &[usize],
) -> Result<Schedule, ModelError> {
    let times = assignment.processing_times(model)?;
    let mut free = vec![0.0f64; model.machine_count()];
    let mut starts = vec![0.0; times.len()];
    for &j in order {
        let s = assignment.sets[j];
        let start = s.iter().map(|i| free[i]).fold(0.0, f64::max);
        starts[j] = start;
        for i in s.iter() {
            free[i] = start + times[j];
        }
    }
    Ok(Schedule {
        sets: assignment.sets.clone(),
        starts,
    })
}

/// The clique gap instance: jobs are the nodes of `K_n`, machines its edges.
///
/// Job `j` runs at unit speed exactly on machine sets containing all `n - 1`
/// edges incident to node `j`, and cannot run otherwise. The returned
/// canonical assignment gives each job its incident edges; its maximum load
/// is 2 while every schedule needs makespan `n`.
pub fn clique_gap_instance(n: usize) -> Result<(Instance, Assignment), ModelError> {
    if n < 2 {
        return Err(ModelError::InvalidInstance("clique gap instance needs n >= 2".into()));
    }
    let m = n * (n - 1) / 2;
    if m > MAX_MACHINES {
        return Err(ModelError::InvalidInstance(format!(
            "clique gap instance with n = {n} needs {m} machines (limit {MAX_MACHINES})"
        )));
    }
    let mut incident = vec![MachineSet::EMPTY; n];
    let mut edge = 0;
    for a in 0..n {
        for b in a + 1..n {
            incident[a] = incident[a].with(edge);
            incident[b] = incident[b].with(edge);
            edge += 1;
        }
    }
    let speeds = incident
        .iter()
        .map(|&required| Speed::AllOf(AllOfSpeed { required, speed: 1.0 }))
        .collect();
    Ok((Instance::new(m, speeds)?, Assignment::new(incident)))
}
