//! Bitmask machine sets.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest machine count a [`MachineSet`] can address.
pub const MAX_MACHINES: usize = 64;

/// A subset of machines `0..m`, stored as a 64-bit mask.
///
/// Bit `i` is set iff machine `i` belongs to the set. Serializes as a sorted
/// list of machine indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MachineSet(u64);

impl MachineSet {
    pub const EMPTY: MachineSet = MachineSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        MachineSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All machines `0..m`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_MACHINES, "at most {MAX_MACHINES} machines");
        if m == MAX_MACHINES {
            MachineSet(u64::MAX)
        } else {
            MachineSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        MachineSet(1u64 << i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_MACHINES && self.0 >> i & 1 == 1
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        MachineSet(self.0 | 1u64 << i)
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        MachineSet(self.0 & !(1u64 << i))
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        MachineSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: Self) -> Self {
        MachineSet(self.0 & other.0)
    }

    #[must_use]
    pub fn difference(self, other: Self) -> Self {
        MachineSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest machine index in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Machine indices in ascending order.
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Every subset of `self`, including the empty set and `self`, in
    /// increasing mask order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.0,
            next: Some(0),
        }
    }

    /// Lexicographic comparison of the sorted element lists.
    pub fn cmp_lex(self, other: Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl FromIterator<usize> for MachineSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(MachineSet::EMPTY, MachineSet::with)
    }
}

impl fmt::Debug for MachineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for MachineSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for MachineSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = items.iter().find(|&&i| i >= MAX_MACHINES) {
            return Err(serde::de::Error::custom(format!(
                "machine index {bad} exceeds the {MAX_MACHINES}-machine limit"
            )));
        }
        Ok(items.into_iter().collect())
    }
}

#[derive(Clone)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

pub struct Subsets {
    universe: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = MachineSet;

    fn next(&mut self) -> Option<MachineSet> {
        let cur = self.next?;
        self.next = if cur == self.universe {
            None
        } else {
            Some((cur | !self.universe).wrapping_add(1) & self.universe)
        };
        Some(MachineSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_all() {
        let s: MachineSet = [1, 3, 4].into_iter().collect();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset(s)));
        assert_eq!(subs[0], MachineSet::EMPTY);
        assert_eq!(*subs.last().unwrap(), s);
    }

    #[test]
    fn lex_order() {
        let a: MachineSet = [0, 5].into_iter().collect();
        let b: MachineSet = [1].into_iter().collect();
        assert!(a.cmp_lex(b).is_lt());
        assert!(b.cmp_lex(a).is_gt());
    }

    #[test]
    fn serde_as_index_list() {
        let s: MachineSet = [2, 0].into_iter().collect();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[0,2]");
        let back: MachineSet = serde_json::from_str("[2,0,2]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<MachineSet>("[64]").is_err());
    }

    #[test]
    fn full_set() {
        assert_eq!(MachineSet::full(3).len(), 3);
        assert_eq!(MachineSet::full(64).len(), 64);
        assert!(MachineSet::full(0).is_empty());
    }
}
