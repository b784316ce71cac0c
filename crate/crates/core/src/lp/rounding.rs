//! Extreme-point rounding for single-machine assignment LPs.

use super::support::{build_support_graph, orient_pseudoforest_with, Node, SUPPORT_TOLERANCE};
use super::{solve_lp, Direction, LinearProgram, LpError, LpStatus, Relation};
use crate::combinatorics::bipartite_matching;

/// Job-by-machine processing times; `f64::INFINITY` marks forbidden pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessingTimes {
    jobs: usize,
    machines: usize,
    p: Vec<f64>,
}

impl ProcessingTimes {
    pub fn new(jobs: usize, machines: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let p = (0..jobs).flat_map(|j| (0..machines).map(move |i| (j, i))).map(|(j, i)| f(j, i)).collect();
        ProcessingTimes { jobs, machines, p }
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn get(&self, job: usize, machine: usize) -> f64 {
        self.p[job * self.machines + machine]
    }

    /// Per-machine load of an integral job-to-machine map.
    pub fn loads(&self, machine_of: &[usize]) -> Vec<f64> {
        let mut load = vec![0.0; self.machines];
        for (j, &i) in machine_of.iter().enumerate() {
            load[i] += self.get(j, i);
        }
        load
    }
}

/// The assignment LP at level `c`: one variable per pair with `p_ij <= c`,
/// `sum_i x_ij = 1` per job and `sum_j p_ij x_ij <= c` per machine.
///
/// Returns the program and the `(job, machine)` pair of every variable.
pub fn lst_lp(p: &ProcessingTimes, c: f64) -> (LinearProgram<f64>, Vec<(usize, usize)>) {
    let mut lp = LinearProgram::new(Direction::Feasibility);
    let mut pairs = Vec::new();
    let mut by_job = vec![Vec::new(); p.jobs];
    let mut by_machine = vec![Vec::new(); p.machines];
    for j in 0..p.jobs {
        for i in 0..p.machines {
            let pij = p.get(j, i);
            if pij <= c {
                let v = lp.add_nonneg(0.0);
                pairs.push((j, i));
                by_job[j].push((v, 1.0));
                by_machine[i].push((v, pij));
            }
        }
    }
    for terms in by_job {
        lp.add_constraint(terms, Relation::Eq, 1.0);
    }
    for terms in by_machine {
        if !terms.is_empty() {
            lp.add_constraint(terms, Relation::Le, c);
        }
    }
    (lp, pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LstOutcome {
    /// Machine of every job; each machine load is at most `2c`.
    Assigned(Vec<usize>),
    /// The LP is infeasible, so no assignment has load at most `c`.
    Infeasible,
}

/// Solves the assignment LP at level `c` and rounds its extreme point.
pub fn lst_solve(p: &ProcessingTimes, c: f64) -> Result<LstOutcome, LpError> {
    let (lp, pairs) = lst_lp(p, c);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(LstOutcome::Infeasible);
    }
    let x: Vec<_> = pairs.iter().zip(&sol.values).map(|(&(j, i), &v)| (j, i, v)).collect();
    lst_round(&x, p, c).map(LstOutcome::Assigned)
}

/// Rounds an extreme point `x` of [`lst_lp`] to one machine per job.
///
/// Integral entries are kept; every fractional job moves to a child machine
/// of the pseudoforest orientation, which receives at most one such job.
pub fn lst_round(x: &[(usize, usize, f64)], p: &ProcessingTimes, _c: f64) -> Result<Vec<usize>, LpError> {
    let rounded = round_support(x, p.jobs, p.machines, |_| false)?;
    rounded
        .into_iter()
        .enumerate()
        .map(|(j, m)| m.ok_or(LpError::Unroundable(j)))
        .collect()
}

/// Rounds every job in the support of `x` to a single machine.
///
/// A job with an entry of at least `1 - 1e-9` keeps that machine. Every
/// other support job goes to the lowest machine it points to in the
/// orientation from [`orient_pseudoforest_with`] (trees rooted per
/// `prefer_root`), so no machine receives more than one rounded fractional
/// job. If some fractional job has no outgoing arc, all fractional jobs are
/// instead matched to distinct support machines. Jobs outside the support
/// map to `None`.
pub fn round_support<F: Fn(Node) -> bool>(
    x: &[(usize, usize, f64)],
    jobs: usize,
    machines: usize,
    prefer_root: F,
) -> Result<Vec<Option<usize>>, LpError> {
    let graph = build_support_graph(x, jobs, machines);
    let orientation = orient_pseudoforest_with(&graph, prefer_root)?;
    let mut out: Vec<Option<usize>> = vec![None; jobs];
    let mut in_support = vec![false; jobs];
    for e in &graph.edges {
        in_support[e.job] = true;
        if e.value >= 1.0 - SUPPORT_TOLERANCE {
            out[e.job] = Some(e.machine);
        }
    }
    let fractional: Vec<usize> = (0..jobs).filter(|&j| in_support[j] && out[j].is_none()).collect();
    let mut stuck = false;
    for &j in &fractional {
        let child = orientation
            .out_arcs(Node::Job(j))
            .iter()
            .map(|&e| graph.edges[e].machine)
            .min();
        match child {
            Some(i) => out[j] = Some(i),
            None => stuck = true,
        }
    }
    if stuck {
        let adj: Vec<Vec<usize>> = fractional
            .iter()
            .map(|&j| {
                let mut ms: Vec<usize> = graph.edges.iter().filter(|e| e.job == j).map(|e| e.machine).collect();
                ms.sort_unstable();
                ms
            })
            .collect();
        let matched = bipartite_matching(&adj, machines);
        for (&j, m) in fractional.iter().zip(matched) {
            out[j] = Some(m.ok_or(LpError::Unroundable(j))?);
        }
    }
    Ok(out)
}
