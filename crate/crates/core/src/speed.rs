//! Speed-function oracle families, property checkers and the pointwise
//! fractionally-subadditive surrogate of a subadditive function.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{FlowNetwork, Matroid};
use crate::set::MachineSet;

/// Absolute slack used by the property checkers.
pub const PROPERTY_TOLERANCE: f64 = 1e-9;

/// Largest set on which [`xos_upper_approx`] enumerates subsets.
pub const XOS_SUBSET_LIMIT: usize = 16;

/// A value oracle `g : 2^M -> R>=0`.
pub trait SetFunction {
    fn value(&self, set: MachineSet) -> f64;
}

impl<F: Fn(MachineSet) -> f64> SetFunction for F {
    fn value(&self, set: MachineSet) -> f64 {
        self(set)
    }
}

/// Table of values keyed by machine-set bitmask; missing sets have value 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSpeed {
    #[serde(with = "decimal_keys")]
    pub values: BTreeMap<u64, f64>,
}

/// Bitmask keys as decimal strings, parsed explicitly so that the table also
/// round-trips inside the internally tagged [`Speed`] enum.
mod decimal_keys {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &BTreeMap<u64, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(values.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, f64>, D::Error> {
        BTreeMap::<String, f64>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse::<u64>().map(|k| (k, v)).map_err(|_| D::Error::custom(format!("bad bitmask key {k:?}"))))
            .collect()
    }
}

impl ExplicitSpeed {
    pub fn from_pairs<I: IntoIterator<Item = (u64, f64)>>(pairs: I) -> Self {
        ExplicitSpeed {
            values: pairs.into_iter().collect(),
        }
    }

    /// Tabulates `f` on every subset of `0..m`.
    pub fn tabulate<F: SetFunction + ?Sized>(m: usize, f: &F) -> Self {
        ExplicitSpeed {
            values: MachineSet::full(m)
                .subsets()
                .skip(1)
                .map(|s| (s.bits(), f.value(s)))
                .filter(|&(_, v)| v != 0.0)
                .collect(),
        }
    }
}

impl SetFunction for ExplicitSpeed {
    fn value(&self, set: MachineSet) -> f64 {
        self.values.get(&set.bits()).copied().unwrap_or(0.0)
    }
}

/// `g(S) = |union of slots[i] for i in S| / load`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSpeed {
    /// Slot subset per machine, as slot indices below `slot_count`.
    pub slots: Vec<MachineSet>,
    pub slot_count: usize,
    pub load: f64,
}

impl SetFunction for CoverageSpeed {
    fn value(&self, set: MachineSet) -> f64 {
        let covered = set
            .iter()
            .filter_map(|i| self.slots.get(i))
            .fold(MachineSet::EMPTY, |acc, &b| acc.union(b));
        covered.len() as f64 / self.load
    }
}

/// `g(S) = min(sum of weights over S, budget) / load`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetAdditiveSpeed {
    pub weights: Vec<f64>,
    pub budget: f64,
    pub load: f64,
}

impl SetFunction for BudgetAdditiveSpeed {
    fn value(&self, set: MachineSet) -> f64 {
        let total: f64 = set.iter().filter_map(|i| self.weights.get(i)).sum();
        total.min(self.budget) / self.load
    }
}

/// Weighted bipartite matching between slots and machines, with the matched
/// slots restricted to a partition matroid (at most `rank` slots per group).
///
/// All edges at a slot carry that slot's weight, so `g(S)` is the best total
/// weight of an independent slot set matchable into `S`, divided by `load`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatroidMatchingSpeed {
    pub slot_weights: Vec<f64>,
    /// Machines adjacent to each slot.
    pub edges: Vec<MachineSet>,
    /// Group of each slot.
    pub groups: Vec<usize>,
    pub group_count: usize,
    pub rank: usize,
    pub load: f64,
}

impl MatroidMatchingSpeed {
    /// Maximum matched weight into `set` (before dividing by the load).
    ///
    /// Network: source -> group (capacity `rank`) -> slot (capacity 1, profit
    /// = slot weight) -> adjacent machine in `set` -> sink (capacity 1).
    pub fn matching_weight(&self, set: MachineSet) -> f64 {
        let k = self.slot_weights.len();
        let machines: Vec<usize> = set.iter().collect();
        let source = 0;
        let group_base = 1;
        let slot_base = group_base + self.group_count;
        let machine_base = slot_base + k;
        let sink = machine_base + machines.len();
        let mut net = FlowNetwork::new(sink + 1);
        for g in 0..self.group_count {
            net.add_edge(source, group_base + g, self.rank as i64, 0.0);
        }
        for (l, (&w, &adj)) in self.slot_weights.iter().zip(&self.edges).enumerate() {
            let reachable: Vec<usize> = machines
                .iter()
                .enumerate()
                .filter(|(_, &i)| adj.contains(i))
                .map(|(pos, _)| pos)
                .collect();
            if reachable.is_empty() {
                continue;
            }
            net.add_edge(group_base + self.groups[l], slot_base + l, 1, -w);
            for pos in reachable {
                net.add_edge(slot_base + l, machine_base + pos, 1, 0.0);
            }
        }
        for pos in 0..machines.len() {
            net.add_edge(machine_base + pos, sink, 1, 0.0);
        }
        let (_, cost) = net.min_cost_free_flow(source, sink);
        -cost
    }
}

impl SetFunction for MatroidMatchingSpeed {
    fn value(&self, set: MachineSet) -> f64 {
        self.matching_weight(set) / self.load
    }
}

/// `g(S) = rank(S) / quota`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledMatroidRankSpeed {
    pub matroid: Matroid,
    pub quota: f64,
}

impl SetFunction for ScaledMatroidRankSpeed {
    fn value(&self, set: MachineSet) -> f64 {
        self.matroid.rank_set(set) as f64 / self.quota
    }
}

/// `g(S) = speed` if `S` contains every required machine, else 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllOfSpeed {
    pub required: MachineSet,
    pub speed: f64,
}

impl SetFunction for AllOfSpeed {
    fn value(&self, set: MachineSet) -> f64 {
        if self.required.is_subset(set) && !set.is_empty() {
            self.speed
        } else {
            0.0
        }
    }
}

/// Any of the supported oracle families, as stored in instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Speed {
    Explicit(ExplicitSpeed),
    Coverage(CoverageSpeed),
    BudgetAdditive(BudgetAdditiveSpeed),
    MatroidMatching(MatroidMatchingSpeed),
    MatroidRank(ScaledMatroidRankSpeed),
    AllOf(AllOfSpeed),
}

impl SetFunction for Speed {
    fn value(&self, set: MachineSet) -> f64 {
        match self {
            Speed::Explicit(s) => s.value(set),
            Speed::Coverage(s) => s.value(set),
            Speed::BudgetAdditive(s) => s.value(set),
            Speed::MatroidMatching(s) => s.value(set),
            Speed::MatroidRank(s) => s.value(set),
            Speed::AllOf(s) => s.value(set),
        }
    }
}

fn positive_finite(name: &str, v: f64) -> Result<(), String> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(format!("{name} must be positive and finite, got {v}"))
    }
}

fn nonnegative_finite(name: &str, v: f64) -> Result<(), String> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(format!("{name} must be nonnegative and finite, got {v}"))
    }
}

impl Speed {
    pub fn kind(&self) -> &'static str {
        match self {
            Speed::Explicit(_) => "explicit",
            Speed::Coverage(_) => "coverage",
            Speed::BudgetAdditive(_) => "budget_additive",
            Speed::MatroidMatching(_) => "matroid_matching",
            Speed::MatroidRank(_) => "matroid_rank",
            Speed::AllOf(_) => "all_of",
        }
    }

    /// Checks parameters against a machine count `m`.
    pub fn validate(&self, m: usize) -> Result<(), String> {
        let all = MachineSet::full(m);
        match self {
            Speed::Explicit(s) => {
                if s.values.get(&0).is_some_and(|&v| v != 0.0) {
                    return Err("value of the empty set must be 0".into());
                }
                for (&mask, &v) in &s.values {
                    if !MachineSet::from_bits(mask).is_subset(all) {
                        return Err(format!("key {mask} names machines outside 0..{m}"));
                    }
                    nonnegative_finite("table value", v)?;
                }
            }
            Speed::Coverage(s) => {
                if s.slots.len() != m {
                    return Err(format!("expected {m} slot sets, got {}", s.slots.len()));
                }
                if s.slots.iter().any(|b| !b.is_subset(MachineSet::full(s.slot_count))) {
                    return Err("slot index out of range".into());
                }
                positive_finite("load", s.load)?;
            }
            Speed::BudgetAdditive(s) => {
                if s.weights.len() != m {
                    return Err(format!("expected {m} weights, got {}", s.weights.len()));
                }
                for &w in &s.weights {
                    nonnegative_finite("weight", w)?;
                }
                positive_finite("budget", s.budget)?;
                positive_finite("load", s.load)?;
            }
            Speed::MatroidMatching(s) => {
                let k = s.slot_weights.len();
                if s.edges.len() != k || s.groups.len() != k {
                    return Err("slot weights, edges and groups must have equal length".into());
                }
                if s.groups.iter().any(|&g| g >= s.group_count) {
                    return Err("slot group out of range".into());
                }
                if s.edges.iter().any(|e| !e.is_subset(all)) {
                    return Err("edge to a machine outside the instance".into());
                }
                for &w in &s.slot_weights {
                    nonnegative_finite("slot weight", w)?;
                }
                positive_finite("load", s.load)?;
            }
            Speed::MatroidRank(s) => {
                if s.matroid.size() != m {
                    return Err(format!("matroid ground has {} elements, expected {m}", s.matroid.size()));
                }
                s.matroid.validate()?;
                positive_finite("quota", s.quota)?;
            }
            Speed::AllOf(s) => {
                if !s.required.is_subset(all) {
                    return Err("required machine outside the instance".into());
                }
                positive_finite("speed", s.speed)?;
            }
        }
        Ok(())
    }
}

/// A violated inequality found by a property checker.
#[derive(Debug, Clone, PartialEq)]
pub enum Counterexample {
    /// `g(S+i) - g(S) < g(T+i) - g(T)` with `S ⊆ T`, `i ∉ T`.
    Submodular { smaller: MachineSet, larger: MachineSet, element: usize, gap: f64 },
    /// `g(S ∪ T) > g(S) + g(T)`.
    Subadditive { first: MachineSet, second: MachineSet, gap: f64 },
}

fn submodular_triple<F: SetFunction + ?Sized>(g: &F, s: MachineSet, t: MachineSet, i: usize) -> Result<(), Counterexample> {
    let lhs = g.value(s.with(i)) - g.value(s);
    let rhs = g.value(t.with(i)) - g.value(t);
    if lhs < rhs - PROPERTY_TOLERANCE {
        return Err(Counterexample::Submodular {
            smaller: s,
            larger: t,
            element: i,
            gap: rhs - lhs,
        });
    }
    Ok(())
}

fn subadditive_pair<F: SetFunction + ?Sized>(g: &F, s: MachineSet, t: MachineSet) -> Result<(), Counterexample> {
    let union = g.value(s.union(t));
    let sum = g.value(s) + g.value(t);
    if union > sum + PROPERTY_TOLERANCE {
        return Err(Counterexample::Subadditive {
            first: s,
            second: t,
            gap: union - sum,
        });
    }
    Ok(())
}

/// Checks diminishing returns on every triple `S ⊆ T ⊆ M`, `i ∉ T`.
pub fn check_submodular_exhaustive<F: SetFunction + ?Sized>(g: &F, m: usize) -> Result<(), Counterexample> {
    let all = MachineSet::full(m);
    for t in all.subsets() {
        let outside = all.difference(t);
        if outside.is_empty() {
            continue;
        }
        for s in t.subsets() {
            for i in outside.iter() {
                submodular_triple(g, s, t, i)?;
            }
        }
    }
    Ok(())
}

/// Checks diminishing returns on `trials` random triples.
pub fn check_submodular_sampled<F: SetFunction + ?Sized, R: Rng + ?Sized>(
    g: &F,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> Result<(), Counterexample> {
    let all = MachineSet::full(m);
    for _ in 0..trials {
        let t = MachineSet::from_bits(rng.gen::<u64>()).intersection(all);
        let outside = all.difference(t);
        let Some(k) = (!outside.is_empty()).then(|| rng.gen_range(0..outside.len())) else {
            continue;
        };
        let i = outside.iter().nth(k).unwrap();
        let s = MachineSet::from_bits(rng.gen::<u64>()).intersection(t);
        submodular_triple(g, s, t, i)?;
    }
    Ok(())
}

/// Exhaustive on `m <= 12`, sampled otherwise.
pub fn check_submodular<F: SetFunction + ?Sized, R: Rng + ?Sized>(
    g: &F,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> Result<(), Counterexample> {
    if m <= 12 {
        check_submodular_exhaustive(g, m)
    } else {
        check_submodular_sampled(g, m, trials, rng)
    }
}

pub fn check_subadditive_exhaustive<F: SetFunction + ?Sized>(g: &F, m: usize) -> Result<(), Counterexample> {
    let all = MachineSet::full(m);
    for s in all.subsets() {
        for t in all.subsets() {
            if t.bits() >= s.bits() {
                subadditive_pair(g, s, t)?;
            }
        }
    }
    Ok(())
}

pub fn check_subadditive_sampled<F: SetFunction + ?Sized, R: Rng + ?Sized>(
    g: &F,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> Result<(), Counterexample> {
    let all = MachineSet::full(m);
    for _ in 0..trials {
        let s = MachineSet::from_bits(rng.gen::<u64>()).intersection(all);
        let t = MachineSet::from_bits(rng.gen::<u64>()).intersection(all);
        subadditive_pair(g, s, t)?;
    }
    Ok(())
}

/// Exhaustive on `m <= 10`, sampled otherwise.
pub fn check_subadditive<F: SetFunction + ?Sized, R: Rng + ?Sized>(
    g: &F,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> Result<(), Counterexample> {
    if m <= 10 {
        check_subadditive_exhaustive(g, m)
    } else {
        check_subadditive_sampled(g, m, trials, rng)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurrogateError {
    #[error("set of {size} machines exceeds the subset-enumeration limit of {XOS_SUBSET_LIMIT}")]
    TooLarge { size: usize },
    #[error("surrogate needs at least two machines (ln |M| must be positive)")]
    DegenerateLog,
}

/// Fractionally subadditive surrogate `h(S)` of a subadditive `g`.
///
/// Greedy cover of `S`: repeatedly take the subset `A ⊆ S` minimizing
/// `g(A) / |A \ T|` over uncovered `T`, charge each newly covered machine
/// `g(A) / (|A \ T| ln |M|)`, and return the total charge. Ties prefer the
/// smaller subset, then the lexicographically smaller one.
pub fn xos_upper_approx<F: SetFunction + ?Sized>(g: &F, m: usize, set: MachineSet) -> Result<f64, SurrogateError> {
    Ok(xos_charges(g, m, set)?.iter().map(|&(_, b)| b).sum())
}

/// Per-machine charges `β(i)` of the greedy cover, in the order assigned.
pub fn xos_charges<F: SetFunction + ?Sized>(g: &F, m: usize, set: MachineSet) -> Result<Vec<(usize, f64)>, SurrogateError> {
    if set.len() > XOS_SUBSET_LIMIT {
        return Err(SurrogateError::TooLarge { size: set.len() });
    }
    if m < 2 {
        return Err(SurrogateError::DegenerateLog);
    }
    let log_m = (m as f64).ln();
    let values: Vec<(MachineSet, f64)> = set.subsets().skip(1).map(|a| (a, g.value(a))).collect();
    let mut covered = MachineSet::EMPTY;
    let mut charges = Vec::with_capacity(set.len());
    while covered != set {
        let mut best: Option<(MachineSet, f64, usize)> = None;
        for &(a, value) in &values {
            let fresh = a.difference(covered).len();
            if fresh == 0 {
                continue;
            }
            let ratio = value / fresh as f64;
            let better = match best {
                None => true,
                Some((b, r, _)) => {
                    ratio < r || (ratio == r && a.len().cmp(&b.len()).then_with(|| a.cmp_lex(b)).is_lt())
                }
            };
            if better {
                best = Some((a, ratio, fresh));
            }
        }
        let (a, _, fresh) = best.expect("uncovered machines remain");
        let charge = g.value(a) / (fresh as f64 * log_m);
        for i in a.difference(covered).iter() {
            charges.push((i, charge));
        }
        covered = covered.union(a);
    }
    Ok(charges)
}
