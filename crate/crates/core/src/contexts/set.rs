use super::ContextId;

/// A set of contexts of one poset, stored as a bitset over context ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextSet {
    len: usize,
    words: Vec<u64>,
}

impl ContextSet {
    pub fn empty(len: usize) -> Self {
        ContextSet { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = ContextSet::empty(len);
        for i in 0..len {
            s.insert(ContextId(i));
        }
        s
    }

    pub fn from_ids(len: usize, ids: impl IntoIterator<Item = ContextId>) -> Self {
        let mut s = ContextSet::empty(len);
        for id in ids {
            s.insert(id);
        }
        s
    }

    /// Size of the universe (number of contexts in the poset).
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, id: ContextId) {
        self.words[id.0 / 64] |= 1 << (id.0 % 64);
    }

    pub fn remove(&mut self, id: ContextId) {
        self.words[id.0 / 64] &= !(1 << (id.0 % 64));
    }

    pub fn contains(&self, id: ContextId) -> bool {
        id.0 < self.len && self.words[id.0 / 64] & (1 << (id.0 % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &ContextSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ContextSet) -> ContextSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        ContextSet { len: self.len, words }
    }

    pub fn union(&self, other: &ContextSet) -> ContextSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        ContextSet { len: self.len, words }
    }

    pub fn difference(&self, other: &ContextSet) -> ContextSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        ContextSet { len: self.len, words }
    }

    /// Members in increasing id order.
    pub fn iter(&self) -> impl Iterator<Item = ContextId> + '_ {
        (0..self.len).map(ContextId).filter(move |&id| self.contains(id))
    }
}
