use crate::error::{Error, Result};

/// Sorted, duplicate-free set of indices in `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary indices, checking them against `n`.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::InvalidParameter(format!(
                    "index {last} out of range for dimension {n}"
                )));
            }
        }
        Ok(Self { indices })
    }

    /// All indices `0..n`.
    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    /// Indices where `pred` holds, in increasing order.
    pub fn from_predicate(n: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        Self {
            indices: (0..n).filter(|&i| pred(i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let (a, b) = (&self.indices, &other.indices);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IndexSet { indices: out }
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        let b = &other.indices;
        let mut j = 0;
        let mut out = Vec::with_capacity(self.indices.len());
        for &x in &self.indices {
            while j < b.len() && b[j] < x {
                j += 1;
            }
            if j >= b.len() || b[j] != x {
                out.push(x);
            }
        }
        IndexSet { indices: out }
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Boolean membership mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.indices {
            m[i] = true;
        }
        m
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut indices: Vec<usize> = iter.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        IndexSet { indices }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn construction_sorts_and_checks_range() {
        let s = IndexSet::new(vec![3, 1, 3, 0], 4).unwrap();
        assert_eq!(s.as_slice(), &[0, 1, 3]);
        assert!(IndexSet::new(vec![4], 4).is_err());
    }

    proptest! {
        #[test]
        fn set_algebra_matches_btreeset(a in proptest::collection::vec(0usize..30, 0..20),
                                        b in proptest::collection::vec(0usize..30, 0..20)) {
            let sa: IndexSet = a.iter().copied().collect();
            let sb: IndexSet = b.iter().copied().collect();
            let ba: BTreeSet<usize> = a.into_iter().collect();
            let bb: BTreeSet<usize> = b.into_iter().collect();
            let u: Vec<usize> = ba.union(&bb).copied().collect();
            let d: Vec<usize> = ba.difference(&bb).copied().collect();
            prop_assert_eq!(sa.union(&sb).as_slice().to_vec(), u);
            prop_assert_eq!(sa.difference(&sb).as_slice().to_vec(), d);
            for i in 0..30 {
                prop_assert_eq!(sa.contains(i), ba.contains(&i));
            }
        }
    }
}
