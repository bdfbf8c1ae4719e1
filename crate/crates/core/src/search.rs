//! Partition refinement and individualization search over colored posets.
//!
//! One engine serves three clients: the automorphism-group builder (which
//! needs complete existence searches), the canonical labeler (which needs the
//! minimum leaf code over the tree) and the enumerator's cheap prefilters.
//! Every function here is a deterministic function of the colored structure,
//! independent of element labels, which is what makes pruning sound.

use crate::bitset::BitSet;

/// A poset with an initial coloring that every mapping must preserve, and an
/// optional unordered equivalence (`same[x]` excludes `x`) that mappings
/// must preserve as a relation.
#[derive(Clone, Debug)]
pub(crate) struct ColoredGraph<'a> {
    pub n: usize,
    pub up: &'a [BitSet],
    pub down: &'a [BitSet],
    pub same: Option<Vec<BitSet>>,
    pub colors: Vec<u32>,
}

/// A stable ordered partition: `colors[x]` is the dense rank of the cell of
/// `x`; `trace` hashes the refinement history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Node {
    pub colors: Vec<u32>,
    pub cells: usize,
    pub trace: u64,
}

impl Node {
    pub fn is_discrete(&self) -> bool {
        self.cells == self.colors.len()
    }

    pub fn cell(&self, c: u32) -> BitSet {
        self.colors.iter().enumerate().filter(|&(_, &k)| k == c).map(|(x, _)| x).collect()
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cells];
        for &c in &self.colors {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Smallest non-singleton cell, lowest color on ties.
    pub fn target_cell(&self) -> Option<u32> {
        self.cell_sizes()
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s > 1)
            .min_by_key(|&(c, &s)| (s, c))
            .map(|(c, _)| c as u32)
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[inline]
fn mix(h: u64, v: u64) -> u64 {
    (h ^ v).wrapping_mul(FNV_PRIME)
}

fn dense_ranks(values: &[u64]) -> (Vec<u32>, usize) {
    let mut sorted: Vec<u64> = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let colors = values.iter().map(|v| sorted.binary_search(v).unwrap() as u32).collect();
    (colors, sorted.len())
}

impl<'a> ColoredGraph<'a> {
    pub fn new(n: usize, up: &'a [BitSet], down: &'a [BitSet]) -> Self {
        ColoredGraph { n, up, down, same: None, colors: vec![0; n] }
    }

    pub fn with_colors(mut self, colors: Vec<u32>) -> Self {
        self.colors = colors;
        self
    }

    /// Encodes a block partition as an unordered equivalence.
    pub fn with_blocks(mut self, blocks: &[BitSet]) -> Self {
        let mut same = vec![BitSet::new(); self.n];
        for b in blocks {
            for x in b {
                let mut row = *b;
                row.remove(x);
                same[x] = row;
            }
        }
        self.same = Some(same);
        self
    }

    pub fn root(&self) -> Node {
        let (colors, cells) = dense_ranks(&self.colors.iter().map(|&c| c as u64).collect::<Vec<_>>());
        self.refine(colors, cells, FNV_OFFSET)
    }

    /// Iterates the signature refinement until the number of cells is stable.
    /// The signature of `x` is its old color followed by, per cell, the number
    /// of strict successors, strict predecessors and same-block partners of
    /// `x` in that cell.
    pub fn refine(&self, mut colors: Vec<u32>, mut cells: usize, mut trace: u64) -> Node {
        let n = self.n;
        let per_cell = if self.same.is_some() { 3 } else { 2 };
        let mut keys: Vec<u32> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        loop {
            let mut members = vec![BitSet::new(); cells];
            for (x, &c) in colors.iter().enumerate() {
                members[c as usize].insert(x);
            }
            let stride = 1 + per_cell * cells;
            keys.clear();
            keys.resize(n * stride, 0);
            for x in 0..n {
                let row = &mut keys[x * stride..(x + 1) * stride];
                row[0] = colors[x];
                for (c, m) in members.iter().enumerate() {
                    row[1 + per_cell * c] = self.up[x].intersection_len(m) as u32;
                    row[2 + per_cell * c] = self.down[x].intersection_len(m) as u32;
                    if let Some(same) = &self.same {
                        row[3 + per_cell * c] = same[x].intersection_len(m) as u32;
                    }
                }
            }
            let key = |x: usize| &keys[x * stride..(x + 1) * stride];
            order.sort_by(|&a, &b| key(a).cmp(key(b)));
            let mut new_colors = vec![0u32; n];
            let mut next = 0u32;
            for (i, &x) in order.iter().enumerate() {
                if i > 0 && key(order[i - 1]) != key(x) {
                    next += 1;
                }
                new_colors[x] = next;
            }
            let new_cells = if n == 0 { 0 } else { next as usize + 1 };
            for &x in &order {
                for &v in key(x) {
                    trace = mix(trace, v as u64);
                }
            }
            trace = mix(trace, new_cells as u64);
            if new_cells == cells {
                return Node { colors, cells, trace };
            }
            colors = new_colors;
            cells = new_cells;
        }
    }

    /// Splits `v` off its cell (placing it first) and refines.
    pub fn individualize(&self, node: &Node, v: usize) -> Node {
        let cv = node.colors[v];
        let raw: Vec<u64> =
            node.colors.iter().enumerate().map(|(u, &c)| 2 * c as u64 + u64::from(c == cv && u != v)).collect();
        let (colors, cells) = dense_ranks(&raw);
        self.refine(colors, cells, mix(node.trace, cv as u64 + 1))
    }

    /// Whether `perm` preserves the order, the initial colors and the
    /// block equivalence.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        (0..self.n).all(|x| {
            if self.colors[perm[x]] != self.colors[x] {
                return false;
            }
            let image: BitSet = self.up[x].iter().map(|y| perm[y]).collect();
            if image != self.up[perm[x]] {
                return false;
            }
            match &self.same {
                Some(same) => {
                    let image: BitSet = same[x].iter().map(|y| perm[y]).collect();
                    image == same[perm[x]]
                }
                None => true,
            }
        })
    }

    fn compatible(left: &Node, right: &Node) -> bool {
        left.trace == right.trace && left.cells == right.cells && left.cell_sizes() == right.cell_sizes()
    }

    /// Searches for an automorphism mapping each cell of `left` onto the
    /// equally colored cell of `right`. Complete: returns `None` only when
    /// no such automorphism exists.
    pub fn find_mapping(&self, left: &Node, right: &Node) -> Option<Vec<usize>> {
        if !Self::compatible(left, right) {
            return None;
        }
        if left.is_discrete() {
            let mut at = vec![0usize; self.n];
            for (y, &c) in right.colors.iter().enumerate() {
                at[c as usize] = y;
            }
            let perm: Vec<usize> = left.colors.iter().map(|&c| at[c as usize]).collect();
            return self.is_automorphism(&perm).then_some(perm);
        }
        let c = left.target_cell().expect("non-discrete node has a target cell");
        let v = left.cell(c).first().expect("cell is nonempty");
        let left_child = self.individualize(left, v);
        for w in &right.cell(c) {
            let right_child = self.individualize(right, w);
            if let Some(p) = self.find_mapping(&left_child, &right_child) {
                return Some(p);
            }
        }
        None
    }

    /// Leaf certificate of a discrete node: relabeled rows, then colors.
    pub fn leaf_code(&self, node: &Node) -> Vec<u8> {
        let n = self.n;
        let mut inv = vec![0usize; n];
        for (x, &c) in node.colors.iter().enumerate() {
            inv[c as usize] = x;
        }
        let row_bytes = n.div_ceil(8);
        let mut code = Vec::with_capacity(2 + n * row_bytes * 2 + 4 * n);
        code.extend_from_slice(&(n as u16).to_be_bytes());
        let push_row = |code: &mut Vec<u8>, row: &BitSet| {
            let start = code.len();
            code.resize(start + row_bytes, 0);
            for y in row {
                let l = node.colors[y] as usize;
                code[start + l / 8] |= 0x80 >> (l % 8);
            }
        };
        for &x in &inv {
            push_row(&mut code, &self.up[x]);
        }
        if let Some(same) = &self.same {
            for &x in &inv {
                push_row(&mut code, &same[x]);
            }
        }
        for &x in &inv {
            code.extend_from_slice(&self.colors[x].to_be_bytes());
        }
        code
    }

    /// Minimum leaf code over the search tree, with the labeling `x ->
    /// position` attaining it.
    pub fn canonical(&self) -> (Vec<u8>, Vec<usize>) {
        let mut state = CanonState { first: None, best: None, autos: Vec::new() };
        let root = self.root();
        self.canon_dfs(&root, &mut Vec::new(), &mut state);
        let (code, colors) = state.best.expect("search tree has at least one leaf");
        (code, colors.iter().map(|&c| c as usize).collect())
    }

    fn canon_dfs(&self, node: &Node, prefix: &mut Vec<usize>, st: &mut CanonState) {
        if node.is_discrete() {
            let code = self.leaf_code(node);
            let labels = &node.colors;
            for (ref_code, ref_labels) in [st.first.as_ref(), st.best.as_ref()].into_iter().flatten() {
                if *ref_code == code {
                    // Both leaves produce the same relabeled structure, so
                    // mapping one labeling onto the other is an automorphism.
                    let mut at = vec![0usize; self.n];
                    for (y, &c) in ref_labels.iter().enumerate() {
                        at[c as usize] = y;
                    }
                    let perm: Vec<usize> = labels.iter().map(|&c| at[c as usize]).collect();
                    if perm.iter().enumerate().any(|(x, &y)| x != y) && self.is_automorphism(&perm) {
                        st.autos.push(perm);
                    }
                    break;
                }
            }
            if st.first.is_none() {
                st.first = Some((code.clone(), labels.clone()));
            }
            if st.best.as_ref().is_none_or(|(b, _)| code < *b) {
                st.best = Some((code, labels.clone()));
            }
            return;
        }
        let c = node.target_cell().expect("non-discrete");
        let cell = node.cell(c);
        let mut explored: Vec<usize> = Vec::new();
        for v in &cell {
            if !explored.is_empty() && self.same_orbit_fixing(prefix, &explored, v, &st.autos) {
                continue;
            }
            explored.push(v);
            let child = self.individualize(node, v);
            prefix.push(v);
            self.canon_dfs(&child, prefix, st);
            prefix.pop();
        }
    }

    /// Whether `v` is in the orbit of some explored point under the group
    /// generated by the known automorphisms that fix `prefix` pointwise.
    fn same_orbit_fixing(&self, prefix: &[usize], explored: &[usize], v: usize, autos: &[Vec<usize>]) -> bool {
        let gens: Vec<&Vec<usize>> = autos.iter().filter(|p| prefix.iter().all(|&b| p[b] == b)).collect();
        if gens.is_empty() {
            return false;
        }
        let mut seen = BitSet::from_iter(explored.iter().copied());
        let mut stack: Vec<usize> = explored.to_vec();
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = g[x];
                if !seen.contains(y) {
                    if y == v {
                        return true;
                    }
                    seen.insert(y);
                    stack.push(y);
                }
            }
        }
        seen.contains(v)
    }
}

struct CanonState {
    first: Option<(Vec<u8>, Vec<u32>)>,
    best: Option<(Vec<u8>, Vec<u32>)>,
    autos: Vec<Vec<usize>>,
}

/// Generators and basic orbit sizes along a base of the color-preserving
/// automorphism group.
#[derive(Clone, Debug)]
pub(crate) struct GroupSearch {
    pub generators: Vec<Vec<usize>>,
    pub orbit_sizes: Vec<usize>,
}

impl<'a> ColoredGraph<'a> {
    /// Computes the full automorphism group by walking a base path and, level
    /// by level from the bottom, deciding for every point of the base cell
    /// whether it lies in the orbit of the base point under the stabilizer of
    /// the prefix.
    pub fn automorphisms(&self) -> GroupSearch {
        let mut path = vec![self.root()];
        let mut base = Vec::new();
        while let Some(c) = path.last().unwrap().target_cell() {
            let node = path.last().unwrap();
            let b = node.cell(c).first().unwrap();
            let child = self.individualize(node, b);
            base.push(b);
            path.push(child);
        }
        let mut generators: Vec<Vec<usize>> = Vec::new();
        let mut orbit_sizes = vec![1; base.len()];
        for level in (0..base.len()).rev() {
            let node = &path[level];
            let b = base[level];
            let cell = node.cell(node.colors[b]);
            let mut orbit = orbit_of(b, &generators);
            for w in &cell {
                if orbit.contains(w) {
                    continue;
                }
                let right = self.individualize(node, w);
                if let Some(perm) = self.find_mapping(&path[level + 1], &right) {
                    generators.push(perm);
                    orbit = orbit_of(b, &generators);
                }
            }
            orbit_sizes[level] = orbit.len();
        }
        GroupSearch { generators, orbit_sizes }
    }
}

pub(crate) fn orbit_of(x: usize, gens: &[Vec<usize>]) -> BitSet {
    let mut seen = BitSet::singleton(x);
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        for g in gens {
            let z = g[y];
            if !seen.contains(z) {
                seen.insert(z);
                stack.push(z);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Poset;

    fn count_autos_brute(p: &Poset) -> usize {
        let n = p.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut count = 0;
        permute(&mut perm, 0, &mut |q| {
            if p.is_automorphism(q) {
                count += 1;
            }
        });
        count
    }

    fn permute(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == a.len() {
            f(a);
            return;
        }
        for i in k..a.len() {
            a.swap(k, i);
            permute(a, k + 1, f);
            a.swap(k, i);
        }
    }

    fn order(p: &Poset) -> usize {
        let g = ColoredGraph::new(p.len(), p.up_rows(), p.down_rows());
        g.automorphisms().orbit_sizes.iter().product()
    }

    #[test]
    fn group_orders_match_brute_force() {
        let cases = [
            Poset::standard_example(4),
            Poset::crown(4),
            Poset::disjoint_chains(3, 2),
            Poset::antichain(5),
            Poset::chain(5),
            Poset::crown(3),
        ];
        for p in &cases {
            assert_eq!(order(p), count_autos_brute(p), "{p:?}");
        }
    }

    #[test]
    fn canonical_code_is_label_invariant() {
        let p = Poset::crown(4);
        let q = p.relabel(&[3, 6, 0, 7, 1, 5, 2, 4]);
        let cp = ColoredGraph::new(8, p.up_rows(), p.down_rows()).canonical();
        let cq = ColoredGraph::new(8, q.up_rows(), q.down_rows()).canonical();
        assert_eq!(cp.0, cq.0);
        assert_eq!(p.relabel(&cp.1), q.relabel(&cq.1));
    }
}
