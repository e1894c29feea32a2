use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::VarId;

/// Sorted, duplicate-free set of variable ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarSet(Vec<VarId>);

impl VarSet {
    pub fn new() -> Self {
        VarSet(Vec::new())
    }

    pub fn singleton(v: VarId) -> Self {
        VarSet(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, VarId>> {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Position of `v` within the sorted set.
    pub fn position(&self, v: VarId) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn insert(&mut self, v: VarId) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(at) => {
                self.0.insert(at, v);
                true
            }
        }
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_strict_subset(&self, other: &VarSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        VarSet(out)
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.iter().filter(|v| !other.contains(*v)).collect())
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        let mut v: Vec<VarId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VarSet(v)
    }
}

impl From<Vec<VarId>> for VarSet {
    fn from(v: Vec<VarId>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[VarId; N]> for VarSet {
    fn from(v: [VarId; N]) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}
