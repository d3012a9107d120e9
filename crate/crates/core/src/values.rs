//! Truth-value identifiers and compact sets of them.

use smallvec::SmallVec;
use std::fmt;

/// Index of a truth-value inside one Nmatrix's value list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueId(u32);

impl ValueId {
    pub fn new(index: usize) -> Self {
        ValueId(u32::try_from(index).expect("value index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ValueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A set of values drawn from a universe of fixed size.
///
/// The universe size is implied by the word count; two sets are only
/// comparable when built for the same universe.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ValueSet {
    words: SmallVec<[u64; 2]>,
}

fn word_count(universe: usize) -> usize {
    universe.div_ceil(64)
}

impl ValueSet {
    pub fn empty(universe: usize) -> Self {
        ValueSet {
            words: SmallVec::from_elem(0, word_count(universe)),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for i in 0..universe {
            set.insert(ValueId::new(i));
        }
        set
    }

    pub fn singleton(universe: usize, value: ValueId) -> Self {
        let mut set = Self::empty(universe);
        set.insert(value);
        set
    }

    pub fn from_values(universe: usize, values: impl IntoIterator<Item = ValueId>) -> Self {
        let mut set = Self::empty(universe);
        for v in values {
            set.insert(v);
        }
        set
    }

    pub fn insert(&mut self, value: ValueId) -> bool {
        let (w, b) = (value.index() / 64, value.index() % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, value: ValueId) -> bool {
        let (w, b) = (value.index() / 64, value.index() % 64);
        self.words.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    pub fn union_with(&mut self, other: &ValueSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference(&self, other: &ValueSet) -> ValueSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        out
    }

    pub fn is_subset(&self, other: &ValueSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &ValueSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The single member, if the set has exactly one.
    pub fn as_singleton(&self) -> Option<ValueId> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ValueId> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(ValueId::new(w * 64 + b))
            })
        })
    }
}

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v.index())).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations_across_word_boundary() {
        let mut s = ValueSet::empty(130);
        assert!(s.insert(ValueId::new(3)));
        assert!(s.insert(ValueId::new(64)));
        assert!(s.insert(ValueId::new(129)));
        assert!(!s.insert(ValueId::new(64)));
        assert_eq!(s.len(), 3);
        let members: Vec<usize> = s.iter().map(ValueId::index).collect();
        assert_eq!(members, vec![3, 64, 129]);
        let full = ValueSet::full(130);
        assert!(s.is_subset(&full));
        assert!(!full.is_subset(&s));
        assert_eq!(full.difference(&s).len(), 127);
        assert!(full.difference(&s).is_disjoint(&s));
    }

    #[test]
    fn singleton_detection() {
        let s = ValueSet::singleton(5, ValueId::new(2));
        assert_eq!(s.as_singleton(), Some(ValueId::new(2)));
        assert_eq!(ValueSet::full(5).as_singleton(), None);
        assert!(ValueSet::empty(5).is_empty());
    }
}
