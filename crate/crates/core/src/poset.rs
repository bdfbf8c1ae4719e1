//! Immutable finite posets on dense indices `0..n`.
//!
//! The strict order is kept twice, as up-rows (`x < y` for `y` in `up(x)`)
//! and down-rows, so that every query is a bitset lookup. Cover pairs are
//! always recomputed as the transitive reduction.

use crate::bitset::{BitSet, MAX_ELEMENTS};
use crate::error::{Error, Result};

/// Alias used where an operation takes a subset of the ground set.
pub type ElementSubset = BitSet;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poset {
    n: usize,
    up: Vec<BitSet>,
    down: Vec<BitSet>,
    covers: Vec<(usize, usize)>,
}

/// Rank levels `R_0, .., R_h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDecomposition {
    pub levels: Vec<Vec<usize>>,
    pub rank: Vec<usize>,
}

impl RankDecomposition {
    pub fn height(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn level_set(&self, k: usize) -> BitSet {
        self.levels.get(k).map(|l| l.iter().copied().collect()).unwrap_or_default()
    }
}

impl Poset {
    /// Parses the `.pos` text format: a header `n <count>` followed by
    /// `c <lower> <upper>` lines. Redundant pairs are accepted and reduced.
    pub fn parse(text: &str) -> Result<Poset> {
        let mut n = None;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: idx + 1, msg };
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |w: &str| w.parse::<usize>().map_err(|_| bad(format!("bad integer {w:?}")));
            match (words[0], words.len(), n) {
                ("n", 2, None) => n = Some(num(words[1])?),
                ("n", _, Some(_)) => return Err(bad("duplicate `n` line".into())),
                ("c", 3, Some(_)) => pairs.push((num(words[1])?, num(words[2])?)),
                ("c", 3, None) => return Err(bad("`c` line before the `n` header".into())),
                _ => return Err(bad(format!("expected `n <count>` or `c <lower> <upper>`, got {line:?}"))),
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "missing `n <count>` header".into() })?;
        Poset::from_cover_pairs(n, &pairs)
    }

    /// Serializes the cover pairs in increasing order.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(a, b) in &self.covers {
            out.push_str(&format!("c {a} {b}\n"));
        }
        out
    }

    /// Builds a poset from (possibly redundant) cover pairs `(lower, upper)`.
    pub fn from_cover_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Poset> {
        if n > MAX_ELEMENTS {
            return Err(Error::CapExceeded { what: "poset size", n, cap: MAX_ELEMENTS });
        }
        let mut succ = vec![BitSet::new(); n];
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, n });
                }
            }
            if a == b {
                return Err(Error::CycleDetected(a));
            }
            succ[a].insert(b);
        }
        // Kahn's algorithm gives a topological order or exposes a cycle.
        let mut indeg = vec![0usize; n];
        for s in &succ {
            for y in s {
                indeg[y] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).rev().filter(|&x| indeg[x] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(x) = stack.pop() {
            topo.push(x);
            for y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    stack.push(y);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&x| indeg[x] > 0).unwrap_or(0);
            return Err(Error::CycleDetected(stuck));
        }
        let mut up = vec![BitSet::new(); n];
        for &x in topo.iter().rev() {
            let mut row = succ[x];
            for y in &succ[x] {
                row = row.union(&up[y]);
            }
            up[x] = row;
        }
        Ok(Poset::from_closed_up_rows(up))
    }

    /// Builds a poset from a strict order given as up-rows. The relation is
    /// transitively closed here; a cycle is reported as an error.
    pub fn from_relation(n: usize, up_rows: &[BitSet]) -> Result<Poset> {
        let mut pairs = Vec::new();
        for (x, row) in up_rows.iter().enumerate().take(n) {
            for y in row {
                pairs.push((x, y));
            }
        }
        Poset::from_cover_pairs(n, &pairs)
    }

    /// `up` must already be a transitively closed strict order.
    pub(crate) fn from_closed_up_rows(up: Vec<BitSet>) -> Poset {
        let n = up.len();
        let mut down = vec![BitSet::new(); n];
        for (x, row) in up.iter().enumerate() {
            for y in row {
                down[y].insert(x);
            }
        }
        let mut covers = Vec::new();
        for x in 0..n {
            let mut implied = BitSet::new();
            for z in &up[x] {
                implied = implied.union(&up[z]);
            }
            for y in &up[x].difference(&implied) {
                covers.push((x, y));
            }
        }
        Poset { n, up, down, covers }
    }

    pub fn antichain(n: usize) -> Poset {
        Poset::from_closed_up_rows(vec![BitSet::new(); n])
    }

    pub fn chain(n: usize) -> Poset {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::from_cover_pairs(n, &pairs).expect("chain is acyclic")
    }

    /// `S_k`: minimal `0..k`, maximal `k..2k`, `i < k + j` iff `i != j`.
    pub fn standard_example(k: usize) -> Poset {
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    pairs.push((i, k + j));
                }
            }
        }
        Poset::from_cover_pairs(2 * k, &pairs).expect("acyclic")
    }

    /// `k` disjoint chains of `len` elements; element `level * k + c` is on
    /// chain `c` at height `level`.
    pub fn disjoint_chains(k: usize, len: usize) -> Poset {
        let mut pairs = Vec::new();
        for level in 1..len {
            for c in 0..k {
                pairs.push(((level - 1) * k + c, level * k + c));
            }
        }
        Poset::from_cover_pairs(k * len, &pairs).expect("acyclic")
    }

    /// The `2k`-crown: minimal `b_i = i`, maximal `t_i = k + i`, with
    /// `b_i < t_i` and `b_i < t_{i+1 mod k}`. Needs `k >= 2`.
    pub fn crown(k: usize) -> Poset {
        let mut pairs = Vec::new();
        for i in 0..k {
            pairs.push((i, k + i));
            pairs.push((i, k + (i + 1) % k));
        }
        Poset::from_cover_pairs(2 * k, &pairs).expect("acyclic")
    }

    pub fn disjoint_union(parts: &[&Poset]) -> Poset {
        let mut pairs = Vec::new();
        let mut offset = 0;
        for p in parts {
            pairs.extend(p.covers.iter().map(|&(a, b)| (a + offset, b + offset)));
            offset += p.n;
        }
        Poset::from_cover_pairs(offset, &pairs).expect("union of posets is acyclic")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Strict order test `x < y`.
    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        x == y || self.up[x].contains(y) || self.down[x].contains(y)
    }

    /// Strict up-set of `x`.
    #[inline]
    pub fn up(&self, x: usize) -> &BitSet {
        &self.up[x]
    }

    /// Strict down-set of `x`.
    #[inline]
    pub fn down(&self, x: usize) -> &BitSet {
        &self.down[x]
    }

    pub fn up_rows(&self) -> &[BitSet] {
        &self.up
    }

    pub fn down_rows(&self) -> &[BitSet] {
        &self.down
    }

    /// Cover pairs `(lower, upper)`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn ground_set(&self) -> BitSet {
        BitSet::full(self.n)
    }

    pub fn upper_covers(&self, x: usize) -> BitSet {
        self.covers.iter().filter(|c| c.0 == x).map(|c| c.1).collect()
    }

    pub fn lower_covers(&self, x: usize) -> BitSet {
        self.covers.iter().filter(|c| c.1 == x).map(|c| c.0).collect()
    }

    pub fn minimal_elements(&self) -> BitSet {
        (0..self.n).filter(|&x| self.down[x].is_empty()).collect()
    }

    pub fn maximal_elements(&self) -> BitSet {
        (0..self.n).filter(|&x| self.up[x].is_empty()).collect()
    }

    pub fn is_antichain(&self, s: &BitSet) -> bool {
        s.iter().all(|x| self.up[x].is_disjoint(s))
    }

    /// `x` and `y` have the same strict up-set and strict down-set.
    pub fn are_twins(&self, x: usize, y: usize) -> bool {
        self.up[x] == self.up[y] && self.down[x] == self.down[y]
    }

    pub fn rank_decomposition(&self) -> RankDecomposition {
        let mut rank = vec![0usize; self.n];
        // Elements sorted by down-set size form a linear extension.
        for &x in &self.linear_extension() {
            rank[x] = self.down[x].iter().map(|z| rank[z] + 1).max().unwrap_or(0);
        }
        let height = rank.iter().copied().max();
        let mut levels = vec![Vec::new(); height.map_or(0, |h| h + 1)];
        for (x, &r) in rank.iter().enumerate() {
            levels[r].push(x);
        }
        RankDecomposition { levels, rank }
    }

    pub fn height(&self) -> usize {
        self.rank_decomposition().height()
    }

    /// Elements ordered so that every element comes after its strict down-set.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| (self.down[x].len(), x));
        order
    }

    /// Size of a largest antichain, as `n` minus a maximum matching in the
    /// bipartite graph `x -> y` for `x < y` (minimum chain cover).
    pub fn width(&self) -> usize {
        let n = self.n;
        let mut match_right: Vec<Option<usize>> = vec![None; n];
        let mut matched = 0;
        for x in 0..n {
            let mut seen = BitSet::new();
            if self.augment(x, &mut seen, &mut match_right) {
                matched += 1;
            }
        }
        n - matched
    }

    fn augment(&self, x: usize, seen: &mut BitSet, match_right: &mut [Option<usize>]) -> bool {
        for y in &self.up[x] {
            if seen.contains(y) {
                continue;
            }
            seen.insert(y);
            let free = match match_right[y] {
                None => true,
                Some(x2) => self.augment(x2, seen, match_right),
            };
            if free {
                match_right[y] = Some(x);
                return true;
            }
        }
        false
    }

    /// Every outside element below (above) some member of `a` is below
    /// (above) all of `a`.
    pub fn is_order_autonomous(&self, a: &ElementSubset) -> Result<bool> {
        if a.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(bad) = a.iter().find(|&x| x >= self.n) {
            return Err(Error::IndexOutOfRange { index: bad, n: self.n });
        }
        let outside = self.ground_set().difference(a);
        Ok(outside.iter().all(|z| {
            let above = self.up[z].intersection_len(a);
            let below = self.down[z].intersection_len(a);
            (above == 0 || above == a.len()) && (below == 0 || below == a.len())
        }))
    }

    /// No partition `P = B ∪ T` into nonempty parts with `B < T`.
    ///
    /// The components of the incomparability graph are the summands of the
    /// finest linear-sum decomposition, so the poset is coconnected exactly
    /// when that graph is connected.
    pub fn is_coconnected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let all = self.ground_set();
        let mut seen = BitSet::singleton(0);
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            let incomparable = all.difference(&self.up[x]).difference(&self.down[x]).difference(&seen);
            for y in &incomparable {
                seen.insert(y);
                stack.push(y);
            }
        }
        seen.len() == self.n
    }

    /// The order-dual.
    pub fn dual(&self) -> Poset {
        Poset::from_closed_up_rows(self.down.clone())
    }

    /// Induced subposet on `elements`, relabeled `elements[i] -> i`.
    pub fn induced(&self, elements: &[usize]) -> Poset {
        let up = elements
            .iter()
            .map(|&x| elements.iter().enumerate().filter(|&(_, &y)| self.up[x].contains(y)).map(|(j, _)| j).collect())
            .collect();
        Poset::from_closed_up_rows(up)
    }

    /// Image of the poset under a relabeling `x -> perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Poset {
        let mut up = vec![BitSet::new(); self.n];
        for x in 0..self.n {
            up[perm[x]] = self.up[x].iter().map(|y| perm[y]).collect();
        }
        Poset::from_closed_up_rows(up)
    }

    /// Lexicographic sum of `pieces` over the index poset `self`. Elements of
    /// piece `t` occupy a contiguous block, in index order.
    pub fn lex_sum(&self, pieces: &[Poset]) -> Result<Poset> {
        if pieces.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: pieces.len() });
        }
        if let Some(t) = pieces.iter().position(|p| p.is_empty()) {
            return Err(Error::ArityMismatch { expected: self.n, got: t });
        }
        let mut offsets = Vec::with_capacity(self.n);
        let mut total = 0;
        for p in pieces {
            offsets.push(total);
            total += p.len();
        }
        if total > MAX_ELEMENTS {
            return Err(Error::CapExceeded { what: "lexicographic sum", n: total, cap: MAX_ELEMENTS });
        }
        let block = |t: usize| BitSet::from_iter(offsets[t]..offsets[t] + pieces[t].len());
        let mut up = vec![BitSet::new(); total];
        for t in 0..self.n {
            let above: BitSet = self.up[t].iter().fold(BitSet::new(), |acc, s| acc.union(&block(s)));
            for (i, row) in pieces[t].up.iter().enumerate() {
                let inner: BitSet = row.iter().map(|j| offsets[t] + j).collect();
                up[offsets[t] + i] = inner.union(&above);
            }
        }
        Ok(Poset::from_closed_up_rows(up))
    }

    /// Whether `perm` is an order automorphism.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        if perm.len() != self.n {
            return false;
        }
        let mut seen = BitSet::new();
        for &p in perm {
            if p >= self.n || seen.contains(p) {
                return false;
            }
            seen.insert(p);
        }
        (0..self.n).all(|x| {
            let image: BitSet = self.up[x].iter().map(|y| perm[y]).collect();
            image == self.up[perm[x]]
        })
    }

    /// Whether `f` is order-preserving (`x <= y` implies `f(x) <= f(y)`).
    pub fn is_order_preserving(&self, f: &[usize]) -> bool {
        self.covers.iter().all(|&(a, b)| f[a] == f[b] || self.lt(f[a], f[b]))
    }
}
