//! Fixed-capacity bitsets used for relation rows and element subsets.

use std::fmt;

/// Largest supported ground set.
pub const MAX_ELEMENTS: usize = 256;

const WORDS: usize = MAX_ELEMENTS / 64;

/// A set of element indices in `0..MAX_ELEMENTS`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSet {
    words: [u64; WORDS],
}

impl BitSet {
    pub const fn new() -> Self {
        BitSet { words: [0; WORDS] }
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ELEMENTS);
        let mut s = BitSet::new();
        for w in 0..WORDS {
            let lo = w * 64;
            if n >= lo + 64 {
                s.words[w] = u64::MAX;
            } else if n > lo {
                s.words[w] = (1u64 << (n - lo)) - 1;
            }
        }
        s
    }

    pub fn singleton(x: usize) -> Self {
        let mut s = BitSet::new();
        s.insert(x);
        s
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        self.words[x >> 6] |= 1u64 << (x & 63);
    }

    #[inline]
    pub fn remove(&mut self, x: usize) {
        self.words[x >> 6] &= !(1u64 << (x & 63));
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        x < MAX_ELEMENTS && self.words[x >> 6] & (1u64 << (x & 63)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn union(&self, other: &BitSet) -> BitSet {
        let mut r = *self;
        for (a, b) in r.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
        r
    }

    #[inline]
    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut r = *self;
        for (a, b) in r.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        r
    }

    #[inline]
    pub fn difference(&self, other: &BitSet) -> BitSet {
        let mut r = *self;
        for (a, b) in r.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
        r
    }

    #[inline]
    pub fn intersection_len(&self, other: &BitSet) -> usize {
        self.words.iter().zip(other.words.iter()).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        for (w, &bits) in self.words.iter().enumerate() {
            if bits != 0 {
                return Some(w * 64 + bits.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> Iter {
        Iter { words: self.words, word: 0 }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for BitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = BitSet::new();
        for x in it {
            s.insert(x);
        }
        s
    }
}

impl IntoIterator for &BitSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let bits = self.words[self.word];
            if bits != 0 {
                let tz = bits.trailing_zeros() as usize;
                self.words[self.word] = bits & (bits - 1);
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
        }
        None
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
