use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Deref, Index};

use serde::{Deserialize, Serialize};

use super::atom::GroundAtom;

/// A finite set of ground atoms accepted by one context.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeliefSet(BTreeSet<GroundAtom>);

impl BeliefSet {
    pub fn new() -> Self {
        BeliefSet(BTreeSet::new())
    }

    pub fn insert(&mut self, atom: GroundAtom) -> bool {
        self.0.insert(atom)
    }

    pub fn atoms(&self) -> &BTreeSet<GroundAtom> {
        &self.0
    }

    pub fn into_atoms(self) -> BTreeSet<GroundAtom> {
        self.0
    }

    pub fn is_subset(&self, other: &BeliefSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &BTreeSet<GroundAtom>) -> BeliefSet {
        BeliefSet(self.0.intersection(other).cloned().collect())
    }
}

impl Deref for BeliefSet {
    type Target = BTreeSet<GroundAtom>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl FromIterator<GroundAtom> for BeliefSet {
    fn from_iter<I: IntoIterator<Item = GroundAtom>>(iter: I) -> Self {
        BeliefSet(iter.into_iter().collect())
    }
}

impl From<BTreeSet<GroundAtom>> for BeliefSet {
    fn from(s: BTreeSet<GroundAtom>) -> Self {
        BeliefSet(s)
    }
}

impl IntoIterator for BeliefSet {
    type Item = GroundAtom;
    type IntoIter = std::collections::btree_set::IntoIter<GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a BeliefSet {
    type Item = &'a GroundAtom;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for BeliefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for BeliefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// One belief set per context, in context order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeliefState(Vec<BeliefSet>);

impl BeliefState {
    pub fn new(components: Vec<BeliefSet>) -> Self {
        BeliefState(components)
    }

    /// The all-empty state over `n` contexts.
    pub fn empty(n: usize) -> Self {
        BeliefState(vec![BeliefSet::new(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[BeliefSet] {
        &self.0
    }

    pub fn components_mut(&mut self) -> &mut [BeliefSet] {
        &mut self.0
    }

    pub fn into_components(self) -> Vec<BeliefSet> {
        self.0
    }

    /// Componentwise inclusion.
    pub fn le(&self, other: &BeliefState) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset(b))
    }

    /// Componentwise inclusion with at least one strict component.
    pub fn lt(&self, other: &BeliefState) -> bool {
        self.le(other) && self != other
    }

    /// Total number of atoms over all components.
    pub fn size(&self) -> usize {
        self.0.iter().map(|s| s.len()).sum()
    }
}

impl Index<usize> for BeliefState {
    type Output = BeliefSet;

    fn index(&self, i: usize) -> &BeliefSet {
        &self.0[i]
    }
}

impl FromIterator<BeliefSet> for BeliefState {
    fn from_iter<I: IntoIterator<Item = BeliefSet>>(iter: I) -> Self {
        BeliefState(iter.into_iter().collect())
    }
}

impl fmt::Debug for BeliefState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for BeliefState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(">")
    }
}
