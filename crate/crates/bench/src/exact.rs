//! Exact minimum assignment load by branch-and-bound over machine subsets.
//!
//! Jobs are branched in decreasing order of `f_j(M)`; each job tries its
//! candidate sets fastest first. A set is dropped as a candidate when
//! removing one of its machines does not slow the job down. A node is
//! pruned when the larger of its current maximum load, the slowest
//! remaining job's best time, and the average machine area (current area
//! plus every remaining job's minimum area `|S| f_j(S)`, over `m`) reaches
//! the incumbent.

use std::time::{Duration, Instant};

use malleable::{Assignment, MachineSet, ModelError, SpeedModel};
use thiserror::Error;

pub const MAX_EXACT_MACHINES: usize = 14;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MilpLimits {
    pub time_limit: Option<Duration>,
}

impl MilpLimits {
    pub fn with_time_limit(limit: Duration) -> Self {
        MilpLimits { time_limit: Some(limit) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub assignment: Assignment,
    /// Minimum achievable maximum load.
    pub value: f64,
    /// Search nodes expanded.
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("exact search supports at most {MAX_EXACT_MACHINES} machines, got {0}")]
    TooManyMachines(usize),
    #[error("job {0} has zero speed on every machine set")]
    NoPositiveSet(usize),
    #[error("time limit reached with incumbent {incumbent} and lower bound {bound}")]
    Timeout {
        assignment: Assignment,
        incumbent: f64,
        bound: f64,
    },
}

#[derive(Clone, Copy)]
struct Candidate {
    set: MachineSet,
    time: f64,
    area: f64,
}

struct Search {
    order: Vec<usize>,
    candidates: Vec<Vec<Candidate>>,
    /// Max over jobs at positions `>= d` of the best time.
    suffix_time: Vec<f64>,
    /// Sum over jobs at positions `>= d` of the least area.
    suffix_area: Vec<f64>,
    machines: f64,
    loads: Vec<f64>,
    current: Vec<MachineSet>,
    best: f64,
    best_sets: Vec<MachineSet>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Search {
    fn bound(&self, depth: usize, max_load: f64, area: f64) -> f64 {
        max_load
            .max(self.suffix_time[depth])
            .max((area + self.suffix_area[depth]) / self.machines)
    }

    fn dfs(&mut self, depth: usize, max_load: f64, area: f64) {
        self.nodes += 1;
        if self.nodes % 4096 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if depth == self.order.len() {
            if max_load < self.best {
                self.best = max_load;
                self.best_sets.clone_from(&self.current);
            }
            return;
        }
        let j = self.order[depth];
        for c in 0..self.candidates[depth].len() {
            let Candidate { set, time, area: a } = self.candidates[depth][c];
            let new_max = set.iter().fold(max_load, |acc, i| acc.max(self.loads[i] + time));
            if self.bound(depth + 1, new_max, area + a) >= self.best {
                continue;
            }
            for i in set.iter() {
                self.loads[i] += time;
            }
            self.current[j] = set;
            self.dfs(depth + 1, new_max, area + a);
            for i in set.iter() {
                self.loads[i] -= time;
            }
            if self.timed_out {
                return;
            }
        }
    }
}

/// Candidate sets of one job, fastest first, then smaller, then by mask.
fn candidates<M: SpeedModel + ?Sized>(model: &M, job: usize) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = model
        .machines()
        .subsets()
        .filter(|s| !s.is_empty())
        .filter_map(|s| {
            let g = model.speed(job, s);
            if !(g > 0.0) {
                return None;
            }
            let dominated = s.len() > 1 && s.iter().any(|i| model.speed(job, s.without(i)) >= g);
            (!dominated).then(|| Candidate {
                set: s,
                time: 1.0 / g,
                area: s.len() as f64 / g,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then(a.set.len().cmp(&b.set.len()))
            .then(a.set.cmp_lex(b.set))
    });
    out
}

/// Greedy start: each job, in branching order, takes the candidate that
/// keeps the maximum load smallest.
fn greedy(order: &[usize], cands: &[Vec<Candidate>], m: usize, n: usize) -> (f64, Vec<MachineSet>) {
    let mut loads = vec![0.0f64; m];
    let mut sets = vec![MachineSet::EMPTY; n];
    for (d, &j) in order.iter().enumerate() {
        let pick = cands[d]
            .iter()
            .min_by(|a, b| {
                let peak = |c: &Candidate| c.set.iter().map(|i| loads[i] + c.time).fold(0.0, f64::max);
                peak(a).total_cmp(&peak(b))
            })
            .expect("every job has a candidate");
        for i in pick.set.iter() {
            loads[i] += pick.time;
        }
        sets[j] = pick.set;
    }
    (loads.into_iter().fold(0.0, f64::max), sets)
}

/// Minimum over all assignments of the maximum machine load.
pub fn exact_milp<M: SpeedModel + ?Sized>(model: &M, limits: MilpLimits) -> Result<ExactSolution, ExactError> {
    let m = model.machine_count();
    let n = model.job_count();
    if m > MAX_EXACT_MACHINES {
        return Err(ExactError::TooManyMachines(m));
    }
    let all = model.machines();
    let mut whole = Vec::with_capacity(n);
    for j in 0..n {
        let g = model.speed(j, all);
        if !(g > 0.0) {
            return Err(ExactError::NoPositiveSet(j));
        }
        whole.push(1.0 / g);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| whole[b].total_cmp(&whole[a]).then(a.cmp(&b)));
    let cands: Vec<Vec<Candidate>> = order.iter().map(|&j| candidates(model, j)).collect();
    let mut suffix_time = vec![0.0f64; n + 1];
    let mut suffix_area = vec![0.0f64; n + 1];
    for d in (0..n).rev() {
        let best_time = cands[d].first().map_or(f64::INFINITY, |c| c.time);
        let least_area = cands[d].iter().map(|c| c.area).fold(f64::INFINITY, f64::min);
        suffix_time[d] = suffix_time[d + 1].max(best_time);
        suffix_area[d] = suffix_area[d + 1] + least_area;
    }
    let (best, best_sets) = greedy(&order, &cands, m, n);
    let mut search = Search {
        order,
        candidates: cands,
        suffix_time,
        suffix_area,
        machines: m.max(1) as f64,
        loads: vec![0.0; m],
        current: vec![MachineSet::EMPTY; n],
        best,
        best_sets,
        nodes: 0,
        deadline: limits.time_limit.map(|t| Instant::now() + t),
        timed_out: false,
    };
    let root = search.bound(0, 0.0, 0.0);
    if n > 0 && search.best > root {
        search.dfs(0, 0.0, 0.0);
    }
    let assignment = Assignment::new(search.best_sets);
    if search.timed_out {
        return Err(ExactError::Timeout {
            assignment,
            incumbent: search.best,
            bound: root,
        });
    }
    Ok(ExactSolution {
        assignment,
        value: search.best,
        nodes: search.nodes,
    })
}
