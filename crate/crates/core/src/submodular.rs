//! Phased heuristic for monotone submodular speeds.
//!
//! At a level `C`, each phase runs two procedures on the remaining jobs at
//! `C' = 2C`: rounding an LP that packs as many jobs as possible onto single
//! machines (load at most `2C'`), and a greedy welfare allocation of
//! disjoint machine sets under speeds truncated at `1/C'` (processing time
//! at most `20C'` for every kept job). The procedure assigning more jobs
//! wins. If the winner assigns fewer than `max(|J| - m, ceil(|J| / 19))`
//! jobs, no assignment of load `C` exists.

use thiserror::Error;

use crate::lp::{
    binary_search_decision, round_support, solve_lp, Decision, Direction, LinearProgram, LpError, LpStatus, Node,
    Relation, SearchError, SUPPORT_TOLERANCE,
};
use crate::model::{
    makespan, schedule_from_well_structured, Assignment, Instance, ModelError, Schedule, SpeedModel,
};
use crate::set::MachineSet;
use crate::speed::PROPERTY_TOLERANCE;
use crate::transform::{transform_assignment, DeltaMethod};

/// Copies of the first phase concatenated for identical jobs.
pub const IDENTICAL_COPIES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubmodularError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("level must be positive and finite, got {0}")]
    BadLevel(f64),
    #[error("jobs {first} and {second} have different speed functions")]
    NotIdentical { first: usize, second: usize },
    #[error("search failed: {0}")]
    Search(String),
}

/// A job with its machine set.
pub type Placement = (usize, MachineSet);

/// Assigns as many of `jobs` as possible to single machines with load at
/// most `2c`.
///
/// Solves `max Σ x_ij` subject to `Σ_i x_ij <= 1` per job and
/// `Σ_j f_j({i}) x_ij <= c` per machine, with `x_ij` only for
/// `f_j({i}) <= c`, then rounds every job in the support of the extreme
/// point to one machine. Trees of the support are rooted at jobs whose LP
/// mass is below one, so that those jobs have a machine to move to.
pub fn proc_single<M: SpeedModel + ?Sized>(model: &M, jobs: &[usize], c: f64) -> Result<Vec<Placement>, SubmodularError> {
    let m = model.machine_count();
    let mut lp = LinearProgram::new(Direction::Maximize);
    let mut pairs = Vec::new();
    let mut by_machine = vec![Vec::new(); m];
    for (k, &j) in jobs.iter().enumerate() {
        let mut row = Vec::new();
        for i in 0..m {
            let g = model.speed(j, MachineSet::singleton(i));
            if g > 0.0 && 1.0 / g <= c {
                let v = lp.add_nonneg(1.0);
                pairs.push((k, i));
                row.push((v, 1.0));
                by_machine[i].push((v, 1.0 / g));
            }
        }
        if !row.is_empty() {
            lp.add_constraint(row, Relation::Le, 1.0);
        }
    }
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    for terms in by_machine {
        if !terms.is_empty() {
            lp.add_constraint(terms, Relation::Le, c);
        }
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(LpError::InfeasibleLp.into());
    }
    let x: Vec<_> = pairs.iter().zip(&sol.values).map(|(&(k, i), &v)| (k, i, v)).collect();
    let mut mass = vec![0.0; jobs.len()];
    for &(k, _, v) in &x {
        mass[k] += v;
    }
    let rounded = round_support(&x, jobs.len(), m, |node| {
        matches!(node, Node::Job(k) if mass[k] > SUPPORT_TOLERANCE && mass[k] < 1.0 - SUPPORT_TOLERANCE)
    })?;
    Ok(rounded
        .into_iter()
        .enumerate()
        .filter_map(|(k, i)| i.map(|i| (jobs[k], MachineSet::singleton(i))))
        .collect())
}

/// Disjoint machine sets from the greedy welfare allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareAllocation {
    /// Set per bidder, in input order; possibly empty.
    pub sets: Vec<MachineSet>,
    /// Total value `Σ_j h_j(T_j)`.
    pub value: f64,
    /// A negative marginal gain was observed.
    pub non_monotone: bool,
}

/// Gives each machine, in ascending order, to the bidder with the largest
/// marginal gain (lowest index on ties). A machine whose best gain is not
/// positive stays unallocated.
pub fn greedy_welfare<F: Fn(usize, MachineSet) -> f64>(bidders: usize, machines: usize, value: F) -> WelfareAllocation {
    let mut sets = vec![MachineSet::EMPTY; bidders];
    let mut current: Vec<f64> = (0..bidders).map(|j| value(j, MachineSet::EMPTY)).collect();
    let mut non_monotone = false;
    for i in 0..machines {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..bidders {
            let v = value(j, sets[j].with(i));
            let gain = v - current[j];
            if gain < -PROPERTY_TOLERANCE {
                non_monotone = true;
            }
            if gain > 0.0 && best.is_none_or(|(_, g, _)| gain > g) {
                best = Some((j, gain, v));
            }
        }
        if let Some((j, _, v)) = best {
            sets[j] = sets[j].with(i);
            current[j] = v;
        }
    }
    WelfareAllocation {
        sets,
        value: current.iter().sum(),
        non_monotone,
    }
}

/// Keeps the jobs whose greedy set, under speeds truncated at `1/c`, has
/// truncated speed at least `1/(20c)`; each takes at most `20c` there.
///
/// Returns the kept placements and whether a negative marginal was seen.
pub fn proc_welfare<M: SpeedModel + ?Sized>(model: &M, jobs: &[usize], c: f64) -> (Vec<Placement>, bool) {
    let cap = 1.0 / c;
    let alloc = greedy_welfare(jobs.len(), model.machine_count(), |k, s| {
        if s.is_empty() {
            0.0
        } else {
            model.speed(jobs[k], s).min(cap)
        }
    });
    let keep = 1.0 / (20.0 * c);
    let placed = alloc
        .sets
        .iter()
        .enumerate()
        .filter(|&(k, &s)| !s.is_empty() && model.speed(jobs[k], s).min(cap) >= keep)
        .map(|(k, &s)| (jobs[k], s))
        .collect();
    (placed, alloc.non_monotone)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    Single,
    Welfare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    pub mode: PhaseMode,
    pub assigned: Vec<Placement>,
    /// Maximum machine load of the phase's own jobs.
    pub load: f64,
    /// `max(|J| - m, ceil(|J| / 19))` for the phase's input jobs.
    pub threshold: usize,
    /// The welfare greedy saw a negative marginal.
    pub non_monotone: bool,
}

impl PhaseResult {
    pub fn meets_threshold(&self) -> bool {
        self.assigned.len() >= self.threshold
    }
}

/// Minimum number of jobs a phase must place when load `C` is achievable.
pub fn phase_threshold(jobs: usize, machines: usize) -> usize {
    jobs.saturating_sub(machines).max(jobs.div_ceil(19))
}

fn placement_load<M: SpeedModel + ?Sized>(model: &M, placed: &[Placement]) -> Result<f64, ModelError> {
    let mut load = vec![0.0; model.machine_count()];
    for &(j, s) in placed {
        let f = model.processing_time(j, s)?;
        for i in s.iter() {
            load[i] += f;
        }
    }
    Ok(load.into_iter().fold(0.0, f64::max))
}

/// One phase at level `c`: both procedures at `2c`, run concurrently; the
/// one placing more jobs wins, the single-machine procedure on ties.
pub fn run_phase<M: SpeedModel + ?Sized>(model: &M, remaining: &[usize], c: f64) -> Result<PhaseResult, SubmodularError> {
    let c2 = 2.0 * c;
    let (single, (welfare, non_monotone)) =
        rayon::join(|| proc_single(model, remaining, c2), || proc_welfare(model, remaining, c2));
    let single = single?;
    let (mode, assigned) = if welfare.len() > single.len() {
        (PhaseMode::Welfare, welfare)
    } else {
        (PhaseMode::Single, single)
    };
    Ok(PhaseResult {
        load: placement_load(model, &assigned)?,
        threshold: phase_threshold(remaining.len(), model.machine_count()),
        mode,
        assigned,
        non_monotone,
    })
}

/// Phases at level `c` until every job is placed, or `None` at the first
/// phase below its threshold.
pub fn run_phases<M: SpeedModel + ?Sized>(model: &M, c: f64) -> Result<Option<Vec<PhaseResult>>, SubmodularError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(SubmodularError::BadLevel(c));
    }
    let mut remaining: Vec<usize> = (0..model.job_count()).collect();
    let mut phases = Vec::new();
    while !remaining.is_empty() {
        let phase = run_phase(model, &remaining, c)?;
        if !phase.meets_threshold() || phase.assigned.is_empty() {
            return Ok(None);
        }
        let mut done = vec![false; model.job_count()];
        for &(j, _) in &phase.assigned {
            done[j] = true;
        }
        remaining.retain(|&j| !done[j]);
        phases.push(phase);
    }
    Ok(Some(phases))
}

/// Concatenates phases: phase `k` starts when phase `k - 1` has finished on
/// every machine; within a phase, multi-machine jobs start first and
/// single-machine jobs follow per machine in job order.
pub fn stack_phases<M: SpeedModel + ?Sized>(model: &M, phases: &[PhaseResult]) -> Result<Schedule, ModelError> {
    let n = model.job_count();
    let mut sets = vec![MachineSet::EMPTY; n];
    let mut starts = vec![0.0; n];
    let mut offset = 0.0;
    for phase in phases {
        let mut local = vec![MachineSet::EMPTY; n];
        let mut members = Vec::new();
        for &(j, s) in &phase.assigned {
            local[j] = s;
            members.push(j);
        }
        let sub = PhaseView { model, members: &members };
        let local_sets: Vec<MachineSet> = members.iter().map(|&j| local[j]).collect();
        let schedule = schedule_from_well_structured(&sub, &Assignment::new(local_sets))?;
        let span = makespan(&sub, &schedule)?;
        for (k, &j) in members.iter().enumerate() {
            sets[j] = schedule.sets[k];
            starts[j] = offset + schedule.starts[k];
        }
        offset += span;
    }
    Ok(Schedule { sets, starts })
}

/// The model restricted to a subset of its jobs, renumbered from zero.
struct PhaseView<'a, M: ?Sized> {
    model: &'a M,
    members: &'a [usize],
}

impl<M: SpeedModel + ?Sized> SpeedModel for PhaseView<'_, M> {
    fn job_count(&self) -> usize {
        self.members.len()
    }

    fn machine_count(&self) -> usize {
        self.model.machine_count()
    }

    fn speed(&self, job: usize, set: MachineSet) -> f64 {
        self.model.speed(self.members[job], set)
    }
}

/// Search bracket: `max_j f_j(M)` below the optimum; above it, the sum over
/// jobs of the best time among singletons and greedily grown sets.
pub fn submodular_bounds<M: SpeedModel + ?Sized>(model: &M) -> Result<(f64, f64), ModelError> {
    let all = model.machines();
    let mut lo: f64 = 0.0;
    let mut hi = 0.0;
    for j in 0..model.job_count() {
        lo = lo.max(model.processing_time(j, all)?);
        let mut best = f64::INFINITY;
        for i in all.iter() {
            let g = model.speed(j, MachineSet::singleton(i));
            if g > 0.0 {
                best = best.min(1.0 / g);
            }
        }
        let mut set = MachineSet::EMPTY;
        for _ in 0..model.machine_count() {
            let next = all
                .difference(set)
                .iter()
                .map(|i| (i, model.speed(j, set.with(i))))
                .fold(None, |acc: Option<(usize, f64)>, (i, g)| match acc {
                    Some((_, bg)) if bg >= g => acc,
                    _ => Some((i, g)),
                });
            let Some((i, g)) = next else { break };
            set = set.with(i);
            if g > 0.0 {
                best = best.min(1.0 / g);
            }
        }
        hi += best;
    }
    Ok((lo, hi.max(lo)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularSolution {
    pub level: f64,
    pub phases: Vec<PhaseResult>,
    /// Union of all phase placements.
    pub assignment: Assignment,
    /// Phases concatenated in time.
    pub stacked: Schedule,
    /// The assignment made well-structured, if the transformation succeeded.
    pub transformed: Option<Schedule>,
    /// The shorter of the two schedules.
    pub schedule: Schedule,
    pub calls: usize,
}

/// Binary search over [`run_phases`]; the schedule is the shorter of the
/// stacked phases and the well-structured transformation of the combined
/// assignment.
pub fn solve_submodular(instance: &Instance, rel_tol: f64) -> Result<SubmodularSolution, SubmodularError> {
    let (lo, hi) = submodular_bounds(instance)?;
    let outcome = binary_search_decision(lo, hi, rel_tol, |c| {
        Ok::<_, SubmodularError>(match run_phases(instance, c)? {
            Some(phases) => Decision::Accept(phases),
            None => Decision::Reject,
        })
    })
    .map_err(search_error)?;
    let phases = outcome.solution;
    let mut sets = vec![MachineSet::EMPTY; instance.job_count()];
    for phase in &phases {
        for &(j, s) in &phase.assigned {
            sets[j] = s;
        }
    }
    let assignment = Assignment::new(sets);
    let stacked = stack_phases(instance, &phases)?;
    let transformed = transform_assignment(instance, &assignment, DeltaMethod::Greedy)
        .ok()
        .and_then(|r| schedule_from_well_structured(instance, &r.assignment).ok());
    let stacked_span = makespan(instance, &stacked)?;
    let schedule = match &transformed {
        Some(t) if makespan(instance, t)? < stacked_span => t.clone(),
        _ => stacked.clone(),
    };
    Ok(SubmodularSolution {
        level: outcome.level,
        phases,
        assignment,
        stacked,
        transformed,
        schedule,
        calls: outcome.calls,
    })
}

fn search_error(e: SearchError<SubmodularError>) -> SubmodularError {
    match e {
        SearchError::Procedure(e) => e,
        other => SubmodularError::Search(other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdenticalSolution {
    pub level: f64,
    /// The first-phase placements that are replicated.
    pub phase: PhaseResult,
    /// Copies that received at least one job.
    pub copies_used: usize,
    pub schedule: Schedule,
}

/// Identical jobs: a single phase at the accepted level, replicated up to
/// [`IDENTICAL_COPIES`] times back to back with jobs filled into the slots
/// in order. Slots left over in the last copy are dropped.
pub fn solve_identical(instance: &Instance, rel_tol: f64) -> Result<IdenticalSolution, SubmodularError> {
    let speeds = instance.speeds();
    if let Some(j) = (1..speeds.len()).find(|&j| speeds[j] != speeds[0]) {
        return Err(SubmodularError::NotIdentical { first: 0, second: j });
    }
    let n = instance.job_count();
    let all: Vec<usize> = (0..n).collect();
    let (lo, hi) = submodular_bounds(instance)?;
    let outcome = binary_search_decision(lo, hi, rel_tol, |c| {
        if !(c.is_finite() && c > 0.0) {
            return Err(SubmodularError::BadLevel(c));
        }
        let phase = run_phase(instance, &all, c)?;
        Ok(if phase.meets_threshold() && !phase.assigned.is_empty() {
            Decision::Accept(phase)
        } else {
            Decision::Reject
        })
    })
    .map_err(search_error)?;
    let phase = outcome.solution;
    let template = stack_phases(instance, std::slice::from_ref(&phase))?;
    let slots: Vec<(MachineSet, f64)> = phase.assigned.iter().map(|&(j, s)| (s, template.starts[j])).collect();
    let mut span: f64 = 0.0;
    for &(s, t) in &slots {
        span = span.max(t + instance.processing_time(0, s)?);
    }
    let mut sets = vec![MachineSet::EMPTY; n];
    let mut starts = vec![0.0; n];
    let mut next = 0;
    let mut copies_used = 0;
    for copy in 0..IDENTICAL_COPIES {
        if next == n {
            break;
        }
        copies_used += 1;
        for &(s, t) in &slots {
            if next == n {
                break;
            }
            sets[next] = s;
            starts[next] = copy as f64 * span + t;
            next += 1;
        }
    }
    debug_assert_eq!(next, n, "twenty copies of a threshold phase cover all jobs");
    Ok(IdenticalSolution {
        level: outcome.level,
        phase,
        copies_used,
        schedule: Schedule { sets, starts },
    })
}
