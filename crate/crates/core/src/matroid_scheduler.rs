//! Scheduling jobs whose speeds are scaled matroid ranks `g_j = r_j / q_j`.
//!
//! At a level `C`, jobs needing one machine (`ceil(q_j / C) = 1`) are placed
//! by rounding the unrelated-machines assignment LP; the others receive
//! `t_j = ceil(q_j / C)` independent machines each through a matroid
//! intersection that lets every machine serve at most two of them. Either
//! step failing proves that no assignment of load `C` exists. A successful
//! level yields an assignment of load at most `4C` and, after orienting the
//! shared machines, a well-structured assignment of load at most `5C`.

use thiserror::Error;

use crate::combinatorics::{
    direct_sum, matroid_intersection_max, orient_half_indegree, partition_matroid, truncate, CombinatoricsError,
    Matroid, MultiGraph,
};
use crate::lp::{binary_search_decision, lst_solve, Decision, LpError, LstOutcome, ProcessingTimes, SearchError};
use crate::model::{schedule_from_well_structured, Assignment, Instance, ModelError, Schedule, SpeedModel};
use crate::set::MachineSet;
use crate::speed::Speed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatroidError {
    #[error("job {job} does not have a matroid-rank speed")]
    NonMatroidInstance { job: usize },
    #[error("job {job} has rank zero on all machines")]
    ZeroRank { job: usize },
    #[error("level must be positive and finite, got {0}")]
    BadLevel(f64),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("search failed: {0}")]
    Search(String),
}

/// Matroid and quota of every job of an instance.
#[derive(Debug, Clone, Copy)]
pub struct MatroidJobs<'a> {
    pub instance: &'a Instance,
}

impl<'a> MatroidJobs<'a> {
    /// Fails unless every job has a matroid-rank speed with positive rank.
    pub fn new(instance: &'a Instance) -> Result<Self, MatroidError> {
        let jobs = MatroidJobs { instance };
        for j in 0..instance.job_count() {
            let (matroid, _) = jobs.try_parts(j)?;
            if matroid.rank_set(instance.machines()) == 0 {
                return Err(MatroidError::ZeroRank { job: j });
            }
        }
        Ok(jobs)
    }

    fn try_parts(&self, job: usize) -> Result<(&'a Matroid, f64), MatroidError> {
        match self.instance.speed_fn(job) {
            Speed::MatroidRank(s) => Ok((&s.matroid, s.quota)),
            _ => Err(MatroidError::NonMatroidInstance { job }),
        }
    }

    pub fn matroid(&self, job: usize) -> &'a Matroid {
        self.try_parts(job).expect("checked in new").0
    }

    pub fn quota(&self, job: usize) -> f64 {
        self.try_parts(job).expect("checked in new").1
    }

    pub fn job_count(&self) -> usize {
        self.instance.job_count()
    }

    pub fn machine_count(&self) -> usize {
        self.instance.machine_count()
    }
}

/// Machines needed per job at a level, and the resulting two job classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSplit {
    /// `ceil(q_j / C)`, capped at `m + 1` (which is already unreachable).
    pub t: Vec<usize>,
    /// Jobs with `t_j = 1`, ascending.
    pub single: Vec<usize>,
    /// Jobs with `t_j >= 2`, ascending.
    pub multi: Vec<usize>,
}

pub fn split_jobs(jobs: &MatroidJobs<'_>, c: f64) -> JobSplit {
    let cap = jobs.machine_count() + 1;
    let t: Vec<usize> = (0..jobs.job_count())
        .map(|j| {
            let need = (jobs.quota(j) / c).ceil();
            if need >= cap as f64 {
                cap
            } else {
                (need as usize).max(1)
            }
        })
        .collect();
    let single = (0..t.len()).filter(|&j| t[j] == 1).collect();
    let multi = (0..t.len()).filter(|&j| t[j] > 1).collect();
    JobSplit { t, single, multi }
}

/// Why no assignment of load at most `C` exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// The single-machine assignment LP for the one-machine jobs is
    /// infeasible.
    SingleMachineLp,
    /// The largest common independent set is smaller than `Σ t_j`.
    Intersection { found: usize, needed: usize },
}

/// Places the one-machine jobs on machines where they are independent
/// singletons, with load at most `2C` per machine.
///
/// Returns the machine of each job in `split.single`, in that order.
pub fn step1_single_machine(
    jobs: &MatroidJobs<'_>,
    split: &JobSplit,
    c: f64,
) -> Result<Result<Vec<usize>, Certificate>, MatroidError> {
    if split.single.is_empty() {
        return Ok(Ok(Vec::new()));
    }
    let m = jobs.machine_count();
    let p = ProcessingTimes::new(split.single.len(), m, |k, i| {
        let j = split.single[k];
        if jobs.matroid(j).rank_set(MachineSet::singleton(i)) == 1 {
            jobs.quota(j)
        } else {
            f64::INFINITY
        }
    });
    Ok(match lst_solve(&p, c)? {
        LstOutcome::Assigned(machines) => Ok(machines),
        LstOutcome::Infeasible => Err(Certificate::SingleMachineLp),
    })
}

/// Common independent set of the truncated direct sum and the
/// two-per-machine partition matroid over `multi × machines`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionResult {
    /// Chosen `(machine, job)` pairs.
    pub pairs: Vec<(usize, usize)>,
    /// Machines chosen per job; empty for jobs outside `split.multi`.
    pub sets: Vec<MachineSet>,
    /// `|pairs| == Σ t_j` over the multi-machine jobs.
    pub success: bool,
}

pub fn step2_intersection(jobs: &MatroidJobs<'_>, split: &JobSplit) -> Result<IntersectionResult, MatroidError> {
    let m = jobs.machine_count();
    let needed: usize = split.multi.iter().map(|&j| split.t[j]).sum();
    let mut sets = vec![MachineSet::EMPTY; jobs.job_count()];
    if split.multi.is_empty() {
        return Ok(IntersectionResult {
            pairs: Vec::new(),
            sets,
            success: true,
        });
    }
    let per_job = direct_sum(
        split
            .multi
            .iter()
            .map(|&j| truncate(jobs.matroid(j).clone(), split.t[j]))
            .collect(),
    );
    let groups = (0..split.multi.len()).flat_map(|_| 0..m).collect();
    let two_per_machine = partition_matroid(groups, vec![2; m]);
    let chosen = matroid_intersection_max(&per_job, &two_per_machine)?;
    let mut pairs: Vec<(usize, usize)> = chosen
        .iter()
        .map(|&e| {
            let j = split.multi[e / m];
            let i = e % m;
            sets[j] = sets[j].with(i);
            (i, j)
        })
        .collect();
    pairs.sort_unstable();
    Ok(IntersectionResult {
        success: pairs.len() == needed,
        pairs,
        sets,
    })
}

/// Union of the single-machine placements and the intersection sets.
pub fn step3a_merge(split: &JobSplit, single: &[usize], intersection: &IntersectionResult) -> Assignment {
    let mut sets = intersection.sets.clone();
    for (&j, &i) in split.single.iter().zip(single) {
        sets[j] = MachineSet::singleton(i);
    }
    Assignment::new(sets)
}

/// Keeps, for every machine shared by two jobs, only the job its edge points
/// to under a half-in-degree orientation, so each multi-machine job retains
/// at least `floor(t_j / 2)` machines and every machine serves at most one
/// of them. Returns the well-structured assignment and its schedule.
pub fn step3b_schedule(
    instance: &Instance,
    split: &JobSplit,
    single: &[usize],
    intersection: &IntersectionResult,
) -> Result<(Assignment, Schedule), MatroidError> {
    let m = instance.machine_count();
    let mut local = vec![usize::MAX; instance.job_count()];
    for (k, &j) in split.multi.iter().enumerate() {
        local[j] = k;
    }
    let mut on_machine: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(i, j) in &intersection.pairs {
        on_machine[i].push(j);
    }
    let mut graph = MultiGraph::new(split.multi.len());
    let mut edge_machine = Vec::new();
    for (i, js) in on_machine.iter().enumerate() {
        match js.as_slice() {
            [] => continue,
            [a] => graph.add_edge(local[*a], local[*a]),
            [a, b] => graph.add_edge(local[*a], local[*b]),
            _ => unreachable!("at most two jobs per machine"),
        };
        edge_machine.push(i);
    }
    let orientation = orient_half_indegree(&graph);
    let mut sets = vec![MachineSet::EMPTY; instance.job_count()];
    for (e, &head) in orientation.heads.iter().enumerate() {
        let j = split.multi[head];
        sets[j] = sets[j].with(edge_machine[e]);
    }
    for (&j, &i) in split.single.iter().zip(single) {
        sets[j] = MachineSet::singleton(i);
    }
    let assignment = Assignment::new(sets);
    let schedule = schedule_from_well_structured(instance, &assignment)?;
    Ok((assignment, schedule))
}

/// Output of an accepted level.
#[derive(Debug, Clone, PartialEq)]
pub struct MatroidSolution {
    pub level: f64,
    /// Load at most `4 * level`.
    pub assignment: Assignment,
    /// Well-structured, load at most `5 * level`.
    pub well_structured: Assignment,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatroidDecision {
    Feasible(MatroidSolution),
    Infeasible(Certificate),
}

/// Runs all steps at level `c`.
pub fn matroid_decision(jobs: &MatroidJobs<'_>, c: f64) -> Result<MatroidDecision, MatroidError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(MatroidError::BadLevel(c));
    }
    let split = split_jobs(jobs, c);
    let single = match step1_single_machine(jobs, &split, c)? {
        Ok(s) => s,
        Err(cert) => return Ok(MatroidDecision::Infeasible(cert)),
    };
    let intersection = step2_intersection(jobs, &split)?;
    if !intersection.success {
        return Ok(MatroidDecision::Infeasible(Certificate::Intersection {
            found: intersection.pairs.len(),
            needed: split.multi.iter().map(|&j| split.t[j]).sum(),
        }));
    }
    let assignment = step3a_merge(&split, &single, &intersection);
    let (well_structured, schedule) = step3b_schedule(jobs.instance, &split, &single, &intersection)?;
    Ok(MatroidDecision::Feasible(MatroidSolution {
        level: c,
        assignment,
        well_structured,
        schedule,
    }))
}

/// Search bracket: `max_j q_j / r_j(M)` below the optimum and
/// `Σ_j q_j / r_j(M)` (every job on all machines) above it.
pub fn matroid_bounds(jobs: &MatroidJobs<'_>) -> (f64, f64) {
    let all = jobs.instance.machines();
    let best: Vec<f64> = (0..jobs.job_count())
        .map(|j| jobs.quota(j) / jobs.matroid(j).rank_set(all) as f64)
        .collect();
    (best.iter().copied().fold(0.0, f64::max), best.iter().sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatroidOutcome {
    pub solution: MatroidSolution,
    /// Every rejected level with its certificate, in call order.
    pub certificates: Vec<(f64, Certificate)>,
    pub calls: usize,
}

/// Binary search over [`matroid_decision`]; the returned assignment has
/// load at most `4(1 + rel_tol)` times the optimum and the schedule
/// makespan at most `5(1 + rel_tol)` times it.
pub fn solve_matroid(instance: &Instance, rel_tol: f64) -> Result<MatroidOutcome, MatroidError> {
    let jobs = MatroidJobs::new(instance)?;
    let (lo, hi) = matroid_bounds(&jobs);
    let mut certificates = Vec::new();
    let outcome = binary_search_decision(lo, hi, rel_tol, |c| {
        Ok::<_, MatroidError>(match matroid_decision(&jobs, c)? {
            MatroidDecision::Feasible(s) => Decision::Accept(s),
            MatroidDecision::Infeasible(cert) => {
                certificates.push((c, cert));
                Decision::Reject
            }
        })
    })
    .map_err(|e| match e {
        SearchError::Procedure(e) => e,
        other => MatroidError::Search(other.to_string()),
    })?;
    Ok(MatroidOutcome {
        solution: outcome.solution,
        certificates,
        calls: outcome.calls,
    })
}
