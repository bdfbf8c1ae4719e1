//! Dictated orbit structures: partitions of a poset into antichains.

use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::poset::Poset;

/// A partition of `0..n` into antichains. Blocks are kept sorted by their
/// smallest element, so block indices are a function of the partition.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DictatedOrbitStructure {
    blocks: Vec<BitSet>,
    block_of: Vec<usize>,
}

impl DictatedOrbitStructure {
    /// Validates that `blocks` partition the ground set of `p` into nonempty
    /// antichains.
    pub fn new(p: &Poset, blocks: Vec<BitSet>) -> Result<Self> {
        let s = Self::partition(p.len(), blocks)?;
        if let Some(b) = s.blocks.iter().find(|b| !p.is_antichain(b)) {
            return Err(Error::NotAnAntichainPartition(format!("block {:?} contains a comparable pair", b)));
        }
        Ok(s)
    }

    /// Checks the partition property only.
    pub(crate) fn partition(n: usize, mut blocks: Vec<BitSet>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b.first());
        for (i, b) in blocks.iter().enumerate() {
            for x in b {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, n });
                }
                if block_of[x] != usize::MAX {
                    return Err(Error::NotAnAntichainPartition(format!("element {x} lies in two blocks")));
                }
                block_of[x] = i;
            }
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::NotAnAntichainPartition(format!("element {x} is in no block")));
        }
        Ok(DictatedOrbitStructure { blocks, block_of })
    }

    pub fn singletons(n: usize) -> Self {
        Self::partition(n, (0..n).map(BitSet::singleton).collect()).expect("singletons partition")
    }

    pub fn blocks(&self) -> &[BitSet] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> Result<&BitSet> {
        self.blocks.get(i).ok_or(Error::BlockNotInStructure(i))
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn colors(&self) -> Vec<u32> {
        self.block_of.iter().map(|&b| b as u32).collect()
    }

    /// Structure induced on `elements`, relabeled `elements[i] -> i`.
    pub fn restrict(&self, elements: &[usize]) -> Self {
        let mut blocks = vec![BitSet::new(); self.blocks.len()];
        for (i, &x) in elements.iter().enumerate() {
            blocks[self.block_of[x]].insert(i);
        }
        Self::partition(elements.len(), blocks).expect("restriction of a partition")
    }

    /// Image under a relabeling `x -> perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let blocks = self.blocks.iter().map(|b| b.iter().map(|x| perm[x]).collect()).collect();
        Self::partition(self.block_of.len(), blocks).expect("relabeling preserves a partition")
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &DictatedOrbitStructure) -> bool {
        self.blocks.iter().all(|b| b.is_subset(&coarser.blocks[coarser.block_of(b.first().unwrap())]))
    }

    /// Parses the `.dos` text format: one `b i0 i1 ...` line per block.
    pub fn parse(p: &Poset, text: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            if words.next() != Some("b") {
                return Err(Error::Parse { line: idx + 1, msg: format!("expected `b <elements>`, got {line:?}") });
            }
            let mut block = BitSet::new();
            for w in words {
                let x: usize =
                    w.parse().map_err(|_| Error::Parse { line: idx + 1, msg: format!("bad element index {w:?}") })?;
                if x >= p.len() {
                    return Err(Error::IndexOutOfRange { index: x, n: p.len() });
                }
                block.insert(x);
            }
            blocks.push(block);
        }
        Self::new(p, blocks)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            out.push('b');
            for x in b {
                out.push_str(&format!(" {x}"));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for DictatedOrbitStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.blocks.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_partitions() {
        let c2 = Poset::chain(2);
        assert!(matches!(
            DictatedOrbitStructure::new(&c2, vec![BitSet::from_iter([0, 1])]),
            Err(Error::NotAnAntichainPartition(_))
        ));
        assert!(DictatedOrbitStructure::new(&c2, vec![BitSet::singleton(0)]).is_err());
        let a = Poset::antichain(3);
        let d = DictatedOrbitStructure::new(&a, vec![BitSet::from_iter([2, 1]), BitSet::singleton(0)]).unwrap();
        assert_eq!(d.blocks()[0], BitSet::singleton(0));
        assert_eq!(d.block_of(2), 1);
    }

    #[test]
    fn dos_round_trip() {
        let a = Poset::antichain(4);
        let d = DictatedOrbitStructure::parse(&a, "# two blocks\nb 0 3\n\nb 1 2\n").unwrap();
        assert_eq!(DictatedOrbitStructure::parse(&a, &d.to_text()).unwrap(), d);
        assert!(matches!(DictatedOrbitStructure::parse(&a, "x 0"), Err(Error::Parse { line: 1, .. })));
    }
}
