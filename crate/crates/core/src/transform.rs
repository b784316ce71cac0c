//! Turning an arbitrary assignment into a well-structured one.
//!
//! Pipeline: per-job speed shares `Δ` (greedy marginals for submodular
//! speeds, a row-generated LP for fractionally subadditive ones), an extreme
//! point of the covering LP over those shares, an in-degree-one orientation
//! of its support, parent/children classification, and a final shrinking of
//! each children set to the machines whose parent load is below a threshold.

use std::f64::consts::E;

use thiserror::Error;

use crate::lp::{
    build_support_graph, orient_pseudoforest, solve_lp, Direction, LinearProgram, LpError, LpStatus, Node,
    PseudoforestOrientation, Relation, SupportGraph, SUPPORT_TOLERANCE,
};
use crate::model::{is_well_structured, machine_loads, Assignment, ModelError, SpeedModel};
use crate::set::MachineSet;
use crate::speed::{xos_upper_approx, XOS_SUBSET_LIMIT};

/// Load blow-up guaranteed for fractionally subadditive speeds: `2e/(e-1)`.
pub const TRANSFORM_FACTOR: f64 = 2.0 * E / (E - 1.0);

/// Slack below `g_j(S_j)` tolerated for the LP share total.
pub const BUDGET_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("job {job} uses {size} machines, above the subset enumeration limit")]
    TooLarge { job: usize, size: usize },
    #[error("job {job}: shares total {found}, below its speed {required}; the speed is not fractionally subadditive")]
    ShortBudget { job: usize, found: f64, required: f64 },
    #[error("job {job} has neither a parent nor a child machine")]
    OrphanJob { job: usize },
    #[error("job {job} has zero speed on every threshold set")]
    EmptyChoice { job: usize },
    #[error("the covering LP is infeasible")]
    InfeasibleCover,
    #[error("the surrogate needs at least two machines")]
    DegenerateLog,
}

/// How the per-job shares are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMethod {
    /// Marginal gains in ascending machine order; exact for submodular speeds.
    Greedy,
    /// Maximum share vector dominated by the speed on every subset.
    Lp,
}

/// Per-job speed shares `Δ_ij` on the job's assigned machines.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMatrix {
    /// `(machine, Δ)` for every machine of the job's set, ascending.
    pub shares: Vec<Vec<(usize, f64)>>,
    /// Set when a negative marginal was clamped to zero.
    pub clamped: bool,
}

impl DeltaMatrix {
    pub fn get(&self, job: usize, machine: usize) -> f64 {
        self.shares[job].iter().find(|&&(i, _)| i == machine).map_or(0.0, |&(_, d)| d)
    }

    /// Machines with a share above `1e-9`.
    pub fn positive_support(&self, job: usize) -> MachineSet {
        self.shares[job].iter().filter(|&&(_, d)| d > SUPPORT_TOLERANCE).map(|&(i, _)| i).collect()
    }

    pub fn total(&self, job: usize) -> f64 {
        self.shares[job].iter().map(|&(_, d)| d).sum()
    }
}

/// Greedy marginal shares: `Δ_ij = g_j(π_i(S_j)) - g_j(π_i(S_j) \ {i})`,
/// where `π_i(S)` holds the machines of `S` at or before `i` in `order`.
///
/// `order` lists the machines from first to last. Negative marginals, only
/// possible for non-monotone speeds, are clamped to zero and flagged.
pub fn greedy_delta<M: SpeedModel + ?Sized>(model: &M, assignment: &Assignment, order: &[usize]) -> DeltaMatrix {
    let mut clamped = false;
    let shares = assignment
        .sets
        .iter()
        .enumerate()
        .map(|(j, &set)| {
            let mut prefix = MachineSet::EMPTY;
            let mut before = 0.0;
            let mut row = Vec::with_capacity(set.len());
            for &i in order.iter().filter(|&&i| set.contains(i)) {
                prefix = prefix.with(i);
                let now = model.speed(j, prefix);
                let mut d = now - before;
                if d < 0.0 {
                    clamped = true;
                    d = 0.0;
                }
                row.push((i, d));
                before = now;
            }
            row.sort_by_key(|&(i, _)| i);
            row
        })
        .collect();
    DeltaMatrix { shares, clamped }
}

/// Shares from `max Σ_i Δ_i  s.t.  Σ_{i∈T} Δ_i <= g_j(T)  ∀ T ⊆ S_j,  Δ >= 0`,
/// solved by adding the most violated subset constraint until none remains.
pub fn xos_delta_lp<M: SpeedModel + ?Sized>(model: &M, assignment: &Assignment) -> Result<DeltaMatrix, TransformError> {
    let shares = assignment
        .sets
        .iter()
        .enumerate()
        .map(|(j, &set)| job_delta_lp(model, j, set))
        .collect::<Result<_, _>>()?;
    Ok(DeltaMatrix { shares, clamped: false })
}

fn job_delta_lp<M: SpeedModel + ?Sized>(model: &M, job: usize, set: MachineSet) -> Result<Vec<(usize, f64)>, TransformError> {
    if set.len() > XOS_SUBSET_LIMIT {
        return Err(TransformError::TooLarge { job, size: set.len() });
    }
    let machines: Vec<usize> = set.iter().collect();
    let k = machines.len();
    let local = |mask: u64| -> MachineSet { (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| machines[b]).collect() };
    let values: Vec<f64> = (0..1u64 << k).map(|mask| model.speed(job, local(mask))).collect();
    let full = (1u64 << k) - 1;

    let mut lp = LinearProgram::new(Direction::Maximize);
    for _ in 0..k {
        lp.add_nonneg(1.0);
    }
    let add_row = |lp: &mut LinearProgram<f64>, mask: u64| {
        let terms = (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| (b, 1.0)).collect();
        lp.add_constraint(terms, Relation::Le, values[mask as usize]);
    };
    for b in 0..k {
        add_row(&mut lp, 1 << b);
    }
    if k > 1 {
        add_row(&mut lp, full);
    }
    let delta = loop {
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(LpError::InfeasibleLp.into());
        }
        let d = sol.values;
        let mut worst: Option<(u64, f64)> = None;
        for mask in 1..=full {
            let lhs: f64 = (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| d[b]).sum();
            let excess = lhs - values[mask as usize];
            if excess > SUPPORT_TOLERANCE && worst.is_none_or(|(_, w)| excess > w) {
                worst = Some((mask, excess));
            }
        }
        match worst {
            Some((mask, _)) => add_row(&mut lp, mask),
            None => break d,
        }
    };
    let found: f64 = delta.iter().sum();
    let required = values[full as usize];
    if found < required - BUDGET_TOLERANCE {
        return Err(TransformError::ShortBudget { job, found, required });
    }
    Ok(machines.into_iter().zip(delta.into_iter().map(|d| d.max(0.0))).collect())
}

/// The covering LP over positive shares at level `c`:
/// `Σ_{i∈S⁺_j} x_ij >= 1` per job, `Σ_j x_ij / Δ_ij <= c` per machine.
///
/// Returns the program and the `(job, machine)` pair of every variable.
pub fn build_cover_lp(delta: &DeltaMatrix, machines: usize, c: f64) -> (LinearProgram<f64>, Vec<(usize, usize)>) {
    let mut lp = LinearProgram::new(Direction::Feasibility);
    let mut pairs = Vec::new();
    let mut by_machine = vec![Vec::new(); machines];
    for (j, row) in delta.shares.iter().enumerate() {
        let mut cover = Vec::new();
        for &(i, d) in row {
            if d > SUPPORT_TOLERANCE {
                let v = lp.add_nonneg(0.0);
                pairs.push((j, i));
                cover.push((v, 1.0));
                by_machine[i].push((v, 1.0 / d));
            }
        }
        lp.add_constraint(cover, Relation::Ge, 1.0);
    }
    for terms in by_machine {
        if !terms.is_empty() {
            lp.add_constraint(terms, Relation::Le, c);
        }
    }
    (lp, pairs)
}

/// Whether a job keeps only its parent machine or moves to its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentType {
    Parent,
    Children,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kinds: Vec<AssignmentType>,
    /// Machine with an arc into the job, if any.
    pub parent: Vec<Option<usize>>,
    /// Machines the job has arcs into.
    pub children: Vec<MachineSet>,
    /// Per machine, `Σ x_ij / Δ_ij` over the parent-assigned jobs it hosts.
    pub parent_load: Vec<f64>,
    /// Parent singleton or children set per job; always well-structured.
    pub assignment: Assignment,
}

/// Assigns each job to its parent when the parent carries more than half of
/// its LP mass, and to its children otherwise.
pub fn classify(
    graph: &SupportGraph,
    orientation: &PseudoforestOrientation,
    delta: &DeltaMatrix,
) -> Result<Classification, TransformError> {
    let n = graph.jobs;
    let mut parent = vec![None; n];
    let mut parent_x = vec![0.0; n];
    let mut children = vec![MachineSet::EMPTY; n];
    for j in 0..n {
        if let Some(e) = orientation.in_arc(Node::Job(j)) {
            parent[j] = Some(graph.edges[e].machine);
            parent_x[j] = graph.edges[e].value;
        }
        children[j] = orientation.out_arcs(Node::Job(j)).iter().map(|&e| graph.edges[e].machine).collect();
    }
    let mut kinds = Vec::with_capacity(n);
    let mut sets = Vec::with_capacity(n);
    let mut parent_load = vec![0.0; graph.machines];
    for j in 0..n {
        match parent[j] {
            Some(i) if parent_x[j] > 0.5 => {
                kinds.push(AssignmentType::Parent);
                sets.push(MachineSet::singleton(i));
                parent_load[i] += parent_x[j] / delta.get(j, i);
            }
            _ if !children[j].is_empty() => {
                kinds.push(AssignmentType::Children);
                sets.push(children[j]);
            }
            _ => return Err(TransformError::OrphanJob { job: j }),
        }
    }
    Ok(Classification {
        kinds,
        parent,
        children,
        parent_load,
        assignment: Assignment::new(sets),
    })
}

/// Shrinks each children-assigned job to `T(θ) = {i : ℓ_i <= θ}` for the
/// threshold minimizing `max_{i∈T(θ)} 2ℓ_i + f_j(T(θ))`.
///
/// Thresholds range over the distinct parent loads `ℓ_i` of the job's
/// children; ties keep the smaller set.
pub fn reassign_theta<M: SpeedModel + ?Sized>(
    model: &M,
    classification: &Classification,
) -> Result<Assignment, TransformError> {
    let ell = &classification.parent_load;
    let mut sets = classification.assignment.sets.clone();
    for (j, kind) in classification.kinds.iter().enumerate() {
        if *kind != AssignmentType::Children {
            continue;
        }
        let mut order: Vec<usize> = classification.children[j].iter().collect();
        order.sort_by(|&a, &b| ell[a].total_cmp(&ell[b]).then(a.cmp(&b)));
        let mut best: Option<(f64, MachineSet)> = None;
        let mut set = MachineSet::EMPTY;
        let mut k = 0;
        while k < order.len() {
            let theta = ell[order[k]];
            while k < order.len() && ell[order[k]] <= theta {
                set = set.with(order[k]);
                k += 1;
            }
            let g = model.speed(j, set);
            if g <= 0.0 {
                continue;
            }
            let objective = 2.0 * theta + 1.0 / g;
            if best.is_none_or(|(b, _)| objective < b) {
                best = Some((objective, set));
            }
        }
        sets[j] = best.ok_or(TransformError::EmptyChoice { job: j })?.1;
    }
    Ok(Assignment::new(sets))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformReport {
    /// Well-structured output assignment.
    pub assignment: Assignment,
    pub input_load: f64,
    pub output_load: f64,
    /// `output_load / input_load`.
    pub ratio: f64,
    pub parent_jobs: usize,
    pub children_jobs: usize,
    /// Each machine's parent-assigned processing time is at most `2C`.
    pub parent_bound_holds: bool,
    /// Each children-assigned job takes at most `2C` on its children set.
    pub children_bound_holds: bool,
    /// A negative greedy marginal was clamped; the run is outside the
    /// submodular contract.
    pub clamped: bool,
}

/// Runs the full pipeline on `assignment` with shares from `method`.
///
/// The covering LP uses the exact maximum load of the input as its level.
pub fn transform_assignment<M: SpeedModel + ?Sized>(
    model: &M,
    assignment: &Assignment,
    method: DeltaMethod,
) -> Result<TransformReport, TransformError> {
    let input_load = machine_loads(model, assignment)?.max_load;
    let delta = match method {
        DeltaMethod::Greedy => {
            let order: Vec<usize> = (0..model.machine_count()).collect();
            greedy_delta(model, assignment, &order)
        }
        DeltaMethod::Lp => xos_delta_lp(model, assignment)?,
    };
    let mut report = transform_with_delta(model, assignment, &delta, input_load)?;
    report.clamped = delta.clamped;
    Ok(report)
}

fn transform_with_delta<M: SpeedModel + ?Sized>(
    model: &M,
    assignment: &Assignment,
    delta: &DeltaMatrix,
    c: f64,
) -> Result<TransformReport, TransformError> {
    let m = model.machine_count();
    let (lp, pairs) = build_cover_lp(delta, m, c);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(TransformError::InfeasibleCover);
    }
    let x: Vec<_> = pairs.iter().zip(&sol.values).map(|(&(j, i), &v)| (j, i, v)).collect();
    let graph = build_support_graph(&x, assignment.len(), m);
    let orientation = orient_pseudoforest(&graph)?;
    let classification = classify(&graph, &orientation, delta)?;

    let slack = 1e-9 * c.max(1.0);
    let mut parent_time = vec![0.0; m];
    let mut children_bound_holds = true;
    for (j, kind) in classification.kinds.iter().enumerate() {
        let set = classification.assignment.sets[j];
        let f = model.processing_time(j, set)?;
        match kind {
            AssignmentType::Parent => parent_time[set.first().expect("singleton")] += f,
            AssignmentType::Children => children_bound_holds &= f <= 2.0 * c + slack,
        }
    }
    let parent_bound_holds = parent_time.iter().all(|&t| t <= 2.0 * c + slack);

    let out = reassign_theta(model, &classification)?;
    debug_assert!(is_well_structured(&out));
    let output_load = machine_loads(model, &out)?.max_load;
    let parent_jobs = classification.kinds.iter().filter(|&&k| k == AssignmentType::Parent).count();
    Ok(TransformReport {
        assignment: out,
        input_load: c,
        output_load,
        ratio: output_load / c,
        parent_jobs,
        children_jobs: classification.kinds.len() - parent_jobs,
        parent_bound_holds,
        children_bound_holds,
        clamped: false,
    })
}

/// Per-job view replacing each speed by its fractionally subadditive
/// surrogate from [`xos_upper_approx`].
pub struct SurrogateModel<'a, M: ?Sized> {
    inner: &'a M,
}

impl<'a, M: SpeedModel + ?Sized> SurrogateModel<'a, M> {
    pub fn new(inner: &'a M) -> Self {
        SurrogateModel { inner }
    }
}

impl<M: SpeedModel + ?Sized> SpeedModel for SurrogateModel<'_, M> {
    fn job_count(&self) -> usize {
        self.inner.job_count()
    }

    fn machine_count(&self) -> usize {
        self.inner.machine_count()
    }

    /// Panics on sets larger than the enumeration limit or with fewer than
    /// two machines; [`transform_subadditive`] checks both up front.
    fn speed(&self, job: usize, set: MachineSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        let g = |s: MachineSet| self.inner.speed(job, s);
        xos_upper_approx(&g, self.inner.machine_count(), set).expect("surrogate preconditions checked")
    }
}

/// Transformation for subadditive speeds: runs the LP-share pipeline on the
/// surrogate speeds and reports loads under the original speeds.
///
/// The level of the covering LP is the surrogate load of the input.
pub fn transform_subadditive<M: SpeedModel + ?Sized>(
    model: &M,
    assignment: &Assignment,
) -> Result<TransformReport, TransformError> {
    if model.machine_count() < 2 {
        return Err(TransformError::DegenerateLog);
    }
    for (job, set) in assignment.sets.iter().enumerate() {
        if set.len() > XOS_SUBSET_LIMIT {
            return Err(TransformError::TooLarge { job, size: set.len() });
        }
    }
    let input_load = machine_loads(model, assignment)?.max_load;
    let surrogate = SurrogateModel::new(model);
    let surrogate_load = machine_loads(&surrogate, assignment)?.max_load;
    let delta = xos_delta_lp(&surrogate, assignment)?;
    let mut report = transform_with_delta(&surrogate, assignment, &delta, surrogate_load)?;
    report.input_load = input_load;
    report.output_load = machine_loads(model, &report.assignment)?.max_load;
    report.ratio = report.output_load / input_load;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::speed::{BudgetAdditiveSpeed, CoverageSpeed, ExplicitSpeed, Speed};

    fn set(v: &[usize]) -> MachineSet {
        v.iter().copied().collect()
    }

    fn coverage_instance() -> Instance {
        let cov = CoverageSpeed {
            slots: vec![set(&[0, 1]), set(&[1, 2])],
            slot_count: 3,
            load: 1.0,
        };
        Instance::new(2, vec![Speed::Coverage(cov)]).unwrap()
    }

    #[test]
    fn greedy_on_coverage() {
        let inst = coverage_instance();
        let a = Assignment::new(vec![set(&[0, 1])]);
        let d = greedy_delta(&inst, &a, &[0, 1]);
        assert_eq!(d.shares[0], vec![(0, 2.0), (1, 1.0)]);
        let d = greedy_delta(&inst, &a, &[1, 0]);
        assert_eq!(d.shares[0], vec![(0, 1.0), (1, 2.0)]);
    }

    #[test]
    fn greedy_on_additive_gives_singletons() {
        let b = BudgetAdditiveSpeed {
            weights: vec![1.0, 2.0, 4.0],
            budget: 100.0,
            load: 1.0,
        };
        let inst = Instance::new(3, vec![Speed::BudgetAdditive(b)]).unwrap();
        let a = Assignment::new(vec![set(&[0, 2])]);
        let d = greedy_delta(&inst, &a, &[0, 1, 2]);
        assert_eq!(d.shares[0], vec![(0, 1.0), (2, 4.0)]);
    }

    #[test]
    fn lp_shares_match_budget() {
        let inst = coverage_instance();
        let a = Assignment::new(vec![set(&[0, 1])]);
        let d = xos_delta_lp(&inst, &a).unwrap();
        assert!((d.total(0) - 3.0).abs() < 1e-9);
        assert!(d.get(0, 0) <= 2.0 + 1e-9 && d.get(0, 1) <= 2.0 + 1e-9);
    }

    #[test]
    fn lp_shares_detect_superadditive() {
        let t = ExplicitSpeed::from_pairs([(1, 1.0), (2, 1.0), (3, 3.0)]);
        let inst = Instance::new(2, vec![Speed::Explicit(t)]).unwrap();
        let a = Assignment::new(vec![set(&[0, 1])]);
        assert!(matches!(xos_delta_lp(&inst, &a), Err(TransformError::ShortBudget { job: 0, .. })));
    }

    #[test]
    fn single_job_is_kept() {
        let inst = coverage_instance();
        let a = Assignment::new(vec![set(&[0])]);
        let r = transform_assignment(&inst, &a, DeltaMethod::Greedy).unwrap();
        assert_eq!(r.assignment, a);
        assert_eq!(r.ratio, 1.0);
    }

    #[test]
    fn theta_drops_loaded_machine() {
        let speeds = vec![
            Speed::Explicit(ExplicitSpeed::from_pairs([(1, 1.0), (2, 1.0), (3, 2.0)])),
            Speed::Explicit(ExplicitSpeed::from_pairs([(1, 1.0), (2, 1.0), (3, 1.0)])),
        ];
        let inst = Instance::new(2, speeds).unwrap();
        let classification = Classification {
            kinds: vec![AssignmentType::Children, AssignmentType::Parent],
            parent: vec![None, Some(0)],
            children: vec![set(&[0, 1]), MachineSet::EMPTY],
            parent_load: vec![0.9, 0.1],
            assignment: Assignment::new(vec![set(&[0, 1]), set(&[0])]),
        };
        // T(0.1) = {1}: 0.2 + 1 = 1.2; T(0.9) = {0, 1}: 1.8 + 0.5 = 2.3.
        let out = reassign_theta(&inst, &classification).unwrap();
        assert_eq!(out.sets[0], set(&[1]));
    }

    #[test]
    fn factor_value() {
        assert!((TRANSFORM_FACTOR - 3.16395).abs() < 1e-5);
    }
}
