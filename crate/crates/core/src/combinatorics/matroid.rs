//! Matroid oracles and the standard constructions.

use serde::{Deserialize, Serialize};

use crate::set::MachineSet;

/// Independence oracle over the ground set `0..ground_size()`.
pub trait IndependenceOracle {
    fn ground_size(&self) -> usize;

    /// `set` holds distinct ground elements in any order.
    fn is_independent(&self, set: &[usize]) -> bool;

    /// Size of a maximum independent subset, found greedily.
    fn rank(&self, set: &[usize]) -> usize {
        let mut basis = Vec::with_capacity(set.len());
        for &e in set {
            basis.push(e);
            if !self.is_independent(&basis) {
                basis.pop();
            }
        }
        basis.len()
    }
}

/// A matroid built from partition matroids by truncation and direct sums.
///
/// The direct sum places its parts on consecutive blocks of the ground set,
/// in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Matroid {
    /// Element `e` lies in group `groups[e]`; at most `capacities[g]`
    /// elements of group `g` may be chosen.
    Partition { groups: Vec<usize>, capacities: Vec<usize> },
    Truncated { inner: Box<Matroid>, cap: usize },
    DirectSum { parts: Vec<Matroid> },
}

pub fn partition_matroid(groups: Vec<usize>, capacities: Vec<usize>) -> Matroid {
    assert!(
        groups.iter().all(|&g| g < capacities.len()),
        "group index out of range"
    );
    Matroid::Partition { groups, capacities }
}

/// Every subset of size at most `t` is independent.
pub fn uniform_matroid(size: usize, t: usize) -> Matroid {
    partition_matroid(vec![0; size], vec![t])
}

/// Every subset is independent.
pub fn free_matroid(size: usize) -> Matroid {
    uniform_matroid(size, size)
}

pub fn truncate(matroid: Matroid, t: usize) -> Matroid {
    Matroid::Truncated {
        inner: Box::new(matroid),
        cap: t,
    }
}

pub fn direct_sum(parts: Vec<Matroid>) -> Matroid {
    Matroid::DirectSum { parts }
}

impl Matroid {
    pub fn size(&self) -> usize {
        match self {
            Matroid::Partition { groups, .. } => groups.len(),
            Matroid::Truncated { inner, .. } => inner.size(),
            Matroid::DirectSum { parts } => parts.iter().map(Matroid::size).sum(),
        }
    }

    /// Closed-form rank for all constructions.
    pub fn rank_of(&self, set: &[usize]) -> usize {
        match self {
            Matroid::Partition { groups, capacities } => {
                let mut counts = vec![0usize; capacities.len()];
                for &e in set {
                    counts[groups[e]] += 1;
                }
                counts.iter().zip(capacities).map(|(&c, &cap)| c.min(cap)).sum()
            }
            Matroid::Truncated { inner, cap } => inner.rank_of(set).min(*cap),
            Matroid::DirectSum { parts } => self.split(set).iter().zip(parts).map(|(s, p)| p.rank_of(s)).sum(),
        }
    }

    pub fn independent(&self, set: &[usize]) -> bool {
        match self {
            Matroid::Partition { groups, capacities } => {
                let mut counts = vec![0usize; capacities.len()];
                set.iter().all(|&e| {
                    let g = groups[e];
                    counts[g] += 1;
                    counts[g] <= capacities[g]
                })
            }
            Matroid::Truncated { inner, cap } => set.len() <= *cap && inner.independent(set),
            Matroid::DirectSum { parts } => self.split(set).iter().zip(parts).all(|(s, p)| p.independent(s)),
        }
    }

    /// Rank of a machine set, for matroids whose ground set is the machines.
    pub fn rank_set(&self, set: MachineSet) -> usize {
        let items: Vec<usize> = set.iter().filter(|&i| i < self.size()).collect();
        self.rank_of(&items)
    }

    /// Localizes a direct-sum subset into per-part element lists.
    fn split(&self, set: &[usize]) -> Vec<Vec<usize>> {
        let Matroid::DirectSum { parts } = self else {
            return vec![set.to_vec()];
        };
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for p in parts {
            acc += p.size();
            offsets.push(acc);
        }
        let mut out = vec![Vec::new(); parts.len()];
        for &e in set {
            let k = offsets.partition_point(|&o| o <= e) - 1;
            out[k].push(e - offsets[k]);
        }
        out
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        match self {
            Matroid::Partition { groups, capacities } => {
                match groups.iter().find(|&&g| g >= capacities.len()) {
                    Some(g) => Err(format!("partition group {g} has no capacity")),
                    None => Ok(()),
                }
            }
            Matroid::Truncated { inner, .. } => inner.validate(),
            Matroid::DirectSum { parts } => parts.iter().try_for_each(Matroid::validate),
        }
    }
}

impl IndependenceOracle for Matroid {
    fn ground_size(&self) -> usize {
        self.size()
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        self.independent(set)
    }

    fn rank(&self, set: &[usize]) -> usize {
        self.rank_of(set)
    }
}

/// Exhaustively checks the matroid axioms on a ground set of at most 16
/// elements. Returns a description of the first failure.
pub fn check_matroid_axioms<O: IndependenceOracle + ?Sized>(oracle: &O) -> Result<(), String> {
    let n = oracle.ground_size();
    assert!(n <= 16, "exhaustive axiom check is limited to 16 elements");
    let elems = |mask: u32| -> Vec<usize> { (0..n).filter(|&e| mask >> e & 1 == 1).collect() };
    let indep: Vec<bool> = (0..1u32 << n).map(|mask| oracle.is_independent(&elems(mask))).collect();
    if !indep[0] {
        return Err("empty set is dependent".into());
    }
    for mask in 0..1u32 << n {
        if !indep[mask as usize] {
            continue;
        }
        for e in 0..n {
            if mask >> e & 1 == 1 && !indep[(mask & !(1 << e)) as usize] {
                return Err(format!("not hereditary at {:?}", elems(mask)));
            }
        }
        for other in 0..1u32 << n {
            if !indep[other as usize] || other.count_ones() <= mask.count_ones() {
                continue;
            }
            let extendable = (0..n).any(|e| other >> e & 1 == 1 && mask >> e & 1 == 0 && indep[(mask | 1 << e) as usize]);
            if !extendable {
                return Err(format!("exchange fails for {:?} and {:?}", elems(mask), elems(other)));
            }
        }
        let r = oracle.rank(&elems(mask));
        if r != mask.count_ones() as usize {
            return Err(format!("rank of independent {:?} is {r}", elems(mask)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_independent_subset(m: &Matroid, set: &[usize]) -> usize {
        let k = set.len();
        (0..1u32 << k)
            .filter_map(|mask| {
                let sub: Vec<usize> = (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| set[b]).collect();
                m.independent(&sub).then_some(sub.len())
            })
            .max()
            .unwrap()
    }

    #[test]
    fn uniform_rank_is_min() {
        let u = uniform_matroid(5, 2);
        for k in 0..=5 {
            let s: Vec<usize> = (0..k).collect();
            assert_eq!(u.rank_of(&s), k.min(2));
        }
    }

    #[test]
    fn direct_sum_of_two_rank_one() {
        let d = direct_sum(vec![uniform_matroid(2, 1), uniform_matroid(3, 1)]);
        assert_eq!(d.size(), 5);
        assert_eq!(d.rank_of(&[0, 1, 2, 3, 4]), 2);
        assert!(d.independent(&[1, 4]));
        assert!(!d.independent(&[2, 3]));
    }

    #[test]
    fn truncated_partition_rank() {
        let p = partition_matroid(vec![0, 0, 1, 1], vec![2, 2]);
        let t = truncate(p, 3);
        let ground = [0, 1, 2, 3];
        assert_eq!(max_independent_subset(&t, &ground), 3);
        assert_eq!(t.rank_of(&ground), 3);
    }

    #[test]
    fn greedy_rank_matches_closed_form() {
        struct Wrap(Matroid);
        impl IndependenceOracle for Wrap {
            fn ground_size(&self) -> usize {
                self.0.size()
            }
            fn is_independent(&self, set: &[usize]) -> bool {
                self.0.independent(set)
            }
        }
        let m = direct_sum(vec![
            truncate(partition_matroid(vec![0, 1, 1, 0], vec![1, 2]), 2),
            uniform_matroid(3, 2),
        ]);
        let w = Wrap(m.clone());
        for mask in 0u32..128 {
            let s: Vec<usize> = (0..7).filter(|&e| mask >> e & 1 == 1).collect();
            assert_eq!(w.rank(&s), m.rank_of(&s));
        }
    }

    #[test]
    fn constructors_satisfy_axioms() {
        let cases = vec![
            free_matroid(4),
            uniform_matroid(6, 3),
            partition_matroid(vec![0, 1, 2, 0, 1, 2, 0, 1], vec![1, 2, 0]),
            truncate(partition_matroid(vec![0, 0, 1, 1, 2, 2, 2], vec![2, 1, 2]), 3),
            direct_sum(vec![uniform_matroid(3, 1), truncate(free_matroid(4), 2)]),
        ];
        for m in &cases {
            check_matroid_axioms(m).unwrap();
        }
    }

    #[test]
    fn axiom_check_catches_non_matroid() {
        // {0,1} and {2} independent, {0,2},{1,2} not: exchange fails.
        struct Bad;
        impl IndependenceOracle for Bad {
            fn ground_size(&self) -> usize {
                3
            }
            fn is_independent(&self, set: &[usize]) -> bool {
                set.len() <= 1 || (set.len() == 2 && !set.contains(&2))
            }
        }
        assert!(check_matroid_axioms(&Bad).is_err());
    }
}
