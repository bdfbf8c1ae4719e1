//! Canonical forms and isomorph-free generation of small posets and of
//! flexible tight interdependent orbit unions.
//!
//! Posets grow by adding one maximal element above a down-set of the
//! parent. A child is kept only if the new element lies in the orbit of a
//! canonically chosen maximal element (canonical deletion), and siblings are
//! deduplicated when the parent has nontrivial automorphisms.

use std::collections::HashSet;

use crate::bitset::BitSet;
use crate::catalog::is_max_locked_with_group;
use crate::error::{Error, Result};
use crate::group::{automorphism_group, colored_group, DEFAULT_AUT_CAP};
use crate::orbit::{orbit_graph_of, StructuredPoset};
use crate::poset::Poset;
use crate::search::{ColoredGraph, Node};
use crate::structure::DictatedOrbitStructure;

/// Largest `n` accepted by [`for_each_poset`].
pub const ENUMERATION_CAP: usize = 10;

/// Largest `n` accepted by the collecting [`enumerate_posets`].
pub const COLLECT_CAP: usize = 9;

/// Canonical encoding of a poset, optionally with an unordered block
/// partition. Equal forms mean isomorphic (block-preserving) posets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalForm {
    pub bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn graph<'a>(p: &'a Poset, coloring: Option<&DictatedOrbitStructure>) -> ColoredGraph<'a> {
    let g = ColoredGraph::new(p.len(), p.up_rows(), p.down_rows());
    match coloring {
        Some(d) => g.with_blocks(d.blocks()),
        None => g,
    }
}

pub fn canonical_form(p: &Poset, coloring: Option<&DictatedOrbitStructure>) -> Result<CanonicalForm> {
    canonical_labeling(p, coloring).map(|(f, _)| f)
}

/// The canonical form and a labeling `x -> position` with
/// `p.relabel(labeling)` canonical.
pub fn canonical_labeling(p: &Poset, coloring: Option<&DictatedOrbitStructure>) -> Result<(CanonicalForm, Vec<usize>)> {
    if p.len() > DEFAULT_AUT_CAP {
        return Err(Error::CapExceeded { what: "canonical form", n: p.len(), cap: DEFAULT_AUT_CAP });
    }
    if let Some(d) = coloring {
        if d.element_count() != p.len() {
            return Err(Error::NotAnAntichainPartition(format!(
                "structure covers {} elements, poset has {}",
                d.element_count(),
                p.len()
            )));
        }
    }
    let (mut bytes, labels) = graph(p, coloring).canonical();
    bytes.insert(0, u8::from(coloring.is_some()));
    Ok((CanonicalForm { bytes }, labels))
}

/// Antichains of `p` in a fixed order: the empty set first, then
/// depth-first by increasing element.
pub fn antichains(p: &Poset) -> Vec<BitSet> {
    let mut out = vec![BitSet::new()];
    fn go(p: &Poset, start: usize, current: BitSet, blocked: BitSet, out: &mut Vec<BitSet>) {
        for x in start..p.len() {
            if blocked.contains(x) {
                continue;
            }
            let mut next = current;
            next.insert(x);
            out.push(next);
            let more = blocked.union(p.up(x)).union(p.down(x));
            go(p, x + 1, next, more, out);
        }
    }
    go(p, 0, BitSet::new(), BitSet::new(), &mut out);
    out
}

/// `p` plus a new maximal element `p.len()` above exactly `downset`.
pub fn add_maximal(p: &Poset, downset: &BitSet) -> Poset {
    let k = p.len();
    let mut up: Vec<BitSet> = p.up_rows().to_vec();
    for z in downset {
        up[z].insert(k);
    }
    up.push(BitSet::new());
    Poset::from_closed_up_rows(up)
}

fn down_closure(p: &Poset, a: &BitSet) -> BitSet {
    a.iter().fold(*a, |acc, x| acc.union(p.down(x)))
}

/// Canonical-deletion test for the newest element `x` of `child`. Returns
/// the verdict and, when it had to be computed, the canonical code.
fn canonical_parent_test(g: &ColoredGraph, root: &Node, child: &Poset, x: usize) -> (bool, Option<Vec<u8>>) {
    let maxima = child.maximal_elements();
    let top = maxima.iter().map(|m| root.colors[m]).max().expect("nonempty poset has maxima");
    if root.colors[x] != top {
        return (false, None);
    }
    let candidates = root.cell(top);
    if candidates.len() == 1 {
        return (true, None);
    }
    let (code, labels) = g.canonical();
    let r = candidates.iter().max_by_key(|&m| labels[m]).expect("nonempty");
    let accept = r == x || g.find_mapping(&g.individualize(root, x), &g.individualize(root, r)).is_some();
    (accept, Some(code))
}

struct Generator<'f> {
    n: usize,
    max_width: Option<usize>,
    last_level_filter: &'f dyn Fn(&Poset, &Node) -> bool,
    visit: &'f mut dyn FnMut(&Poset),
}

impl Generator<'_> {
    fn extend(&mut self, parent: &Poset) {
        let k = parent.len();
        if k == self.n {
            (self.visit)(parent);
            return;
        }
        let pg = ColoredGraph::new(k, parent.up_rows(), parent.down_rows());
        let parent_rigid = pg.root().is_discrete() || pg.automorphisms().generators.is_empty();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for a in antichains(parent) {
            let child = add_maximal(parent, &down_closure(parent, &a));
            if self.max_width.is_some_and(|w| child.width() > w) {
                continue;
            }
            let g = ColoredGraph::new(k + 1, child.up_rows(), child.down_rows());
            let root = g.root();
            if k + 1 == self.n && !(self.last_level_filter)(&child, &root) {
                continue;
            }
            let (accept, code) = canonical_parent_test(&g, &root, &child, k);
            if !accept {
                continue;
            }
            if !parent_rigid {
                let code = code.unwrap_or_else(|| g.canonical().0);
                if !seen.insert(code) {
                    continue;
                }
            }
            self.extend(&child);
        }
    }
}

fn generate(
    n: usize,
    max_width: Option<usize>,
    last_level_filter: &dyn Fn(&Poset, &Node) -> bool,
    visit: &mut dyn FnMut(&Poset),
) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded { what: "poset enumeration", n, cap: ENUMERATION_CAP });
    }
    if n == 0 {
        visit(&Poset::antichain(0));
        return Ok(());
    }
    let mut g = Generator { n, max_width, last_level_filter, visit };
    g.extend(&Poset::antichain(0));
    Ok(())
}

/// Calls `visit` once per isomorphism class of `n`-element posets, in a
/// deterministic order.
pub fn for_each_poset(n: usize, max_width: Option<usize>, mut visit: impl FnMut(&Poset)) -> Result<()> {
    generate(n, max_width, &|_, _| true, &mut visit)
}

/// One representative per isomorphism class, optionally of bounded width.
pub fn enumerate_posets(n: usize, max_width: Option<usize>) -> Result<Vec<Poset>> {
    if n > COLLECT_CAP {
        return Err(Error::CapExceeded { what: "collected poset enumeration", n, cap: COLLECT_CAP });
    }
    let mut out = Vec::new();
    for_each_poset(n, max_width, |p| out.push(p.clone()))?;
    Ok(out)
}

/// Set partitions of `set` into blocks of at least two elements, no block
/// containing two twins.
fn twin_free_partitions(p: &Poset, set: &BitSet) -> Vec<Vec<BitSet>> {
    fn go(p: &Poset, rest: BitSet, current: &mut Vec<BitSet>, out: &mut Vec<Vec<BitSet>>) {
        let Some(x) = rest.first() else {
            out.push(current.clone());
            return;
        };
        let mut others = rest;
        others.remove(x);
        let allowed: BitSet = others.iter().filter(|&y| !p.are_twins(x, y)).collect();
        // Blocks containing x: x plus a nonempty twin-free subset of `allowed`.
        let pool = allowed.to_vec();
        let mut block = BitSet::singleton(x);
        choose(p, &pool, 0, &mut block, others, current, out);
    }
    fn choose(
        p: &Poset,
        pool: &[usize],
        i: usize,
        block: &mut BitSet,
        rest: BitSet,
        current: &mut Vec<BitSet>,
        out: &mut Vec<Vec<BitSet>>,
    ) {
        if i == pool.len() {
            if block.len() >= 2 {
                current.push(*block);
                go(p, rest.difference(block), current, out);
                current.pop();
            }
            return;
        }
        let y = pool[i];
        if block.iter().all(|z| !p.are_twins(z, y)) {
            block.insert(y);
            choose(p, pool, i + 1, block, rest, current, out);
            block.remove(y);
        }
        choose(p, pool, i + 1, block, rest, current, out);
    }
    let mut out = Vec::new();
    go(p, *set, &mut Vec::new(), &mut out);
    out
}

/// Every flexible tight interdependent orbit union `(U, D)` with
/// `|U| = n`, one per structured isomorphism class.
///
/// Blocks of a tight union with two or more blocks have at least two
/// elements (a fixed point cannot be related non-uniformly to a block on
/// which the group is transitive), and `Aut_D ⊆ Aut(U)` makes every block
/// lie inside a natural orbit. Blocks free of twins are exactly the blocks
/// without a nontrivial order-autonomous antichain.
pub fn for_each_flexible_tight_iou(n: usize, mut visit: impl FnMut(&StructuredPoset)) -> Result<()> {
    let filter = |p: &Poset, root: &Node| root.cell_sizes().iter().all(|&s| s >= 2) && p.is_coconnected();
    let mut on_poset = |p: &Poset| {
        let aut = automorphism_group(p).expect("within cap");
        let orbits = aut.orbits();
        if orbits.blocks.iter().any(|o| o.len() < 2) || is_max_locked_with_group(p, &aut) {
            return;
        }
        let per_orbit: Vec<Vec<Vec<BitSet>>> = orbits.blocks.iter().map(|o| twin_free_partitions(p, o)).collect();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for_each_product(&per_orbit, &mut |blocks: Vec<BitSet>| {
            let d = DictatedOrbitStructure::new(p, blocks).expect("orbit refinements are antichain partitions");
            let g = colored_group(p, d.colors());
            if g.orbits().blocks != d.blocks() || !orbit_graph_of(p, &d).is_connected() {
                return;
            }
            let form = graph(p, Some(&d)).canonical().0;
            if seen.insert(form) {
                visit(&StructuredPoset::from_parts(p.clone(), d, g));
            }
        });
    };
    generate(n, None, &filter, &mut on_poset)
}

fn for_each_product(choices: &[Vec<Vec<BitSet>>], f: &mut dyn FnMut(Vec<BitSet>)) {
    fn go(choices: &[Vec<Vec<BitSet>>], i: usize, acc: &mut Vec<BitSet>, f: &mut dyn FnMut(Vec<BitSet>)) {
        if i == choices.len() {
            f(acc.clone());
            return;
        }
        for option in &choices[i] {
            let len = acc.len();
            acc.extend_from_slice(option);
            go(choices, i + 1, acc, f);
            acc.truncate(len);
        }
    }
    go(choices, 0, &mut Vec::new(), f);
}

pub fn enumerate_flexible_tight_ious(n: usize) -> Result<Vec<StructuredPoset>> {
    let mut out = Vec::new();
    for_each_flexible_tight_iou(n, |s| out.push(s.clone()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// All posets on `0..n` whose order is contained in the natural order,
    /// classed by the lexicographically smallest relabeled relation matrix.
    fn brute_force_classes(n: usize) -> usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut a: Vec<usize> = (0..n).collect();
        heap_permutations(&mut a, n, &mut perms);
        let mut classes = BTreeSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            let rel = |i: usize, j: usize| i < j && mask >> pairs.iter().position(|&q| q == (i, j)).unwrap() & 1 == 1;
            let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(rel(i, j) && rel(j, k)) || rel(i, k))));
            if !transitive {
                continue;
            }
            let key = perms
                .iter()
                .map(|s| {
                    let mut bits = vec![false; n * n];
                    for i in 0..n {
                        for j in 0..n {
                            bits[s[i] * n + s[j]] = rel(i, j);
                        }
                    }
                    bits
                })
                .min()
                .unwrap();
            classes.insert(key);
        }
        classes.len()
    }

    fn heap_permutations(a: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap_permutations(a, k - 1, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }

    #[test]
    fn class_counts_match_brute_force() {
        for n in 0..=5 {
            assert_eq!(enumerate_posets(n, None).unwrap().len(), brute_force_classes(n), "n = {n}");
        }
    }

    #[test]
    fn known_class_counts() {
        let counts = [1, 1, 2, 5, 16, 63, 318, 2045, 16999];
        for (n, &c) in counts.iter().enumerate() {
            assert_eq!(enumerate_posets(n, None).unwrap().len(), c, "n = {n}");
        }
    }

    #[test]
    fn generated_classes_are_distinct() {
        let posets = enumerate_posets(6, None).unwrap();
        let forms: HashSet<CanonicalForm> = posets.iter().map(|p| canonical_form(p, None).unwrap()).collect();
        assert_eq!(forms.len(), posets.len());
    }

    #[test]
    fn width_filter() {
        let all = enumerate_posets(5, None).unwrap();
        let narrow = enumerate_posets(5, Some(2)).unwrap();
        assert_eq!(narrow.len(), all.iter().filter(|p| p.width() <= 2).count());
    }

    #[test]
    fn canonical_form_examples() {
        let c2 = canonical_form(&Poset::chain(2), None).unwrap();
        assert_ne!(c2, canonical_form(&Poset::antichain(2), None).unwrap());
        let s4 = Poset::standard_example(4);
        assert_eq!(canonical_form(&s4.dual(), None).unwrap(), canonical_form(&s4, None).unwrap());
    }

    #[test]
    fn six_element_unions_contain_catalog_entries() {
        use crate::catalog::{named_configuration, structured_isomorphic, CatalogName};
        let stream = enumerate_flexible_tight_ious(6).unwrap();
        let two_v = named_configuration(CatalogName::TwoV).unwrap();
        assert!(stream.iter().any(|s| structured_isomorphic(s, &two_v, false).unwrap()));
        // Width 2 with exactly two automorphisms: max-locked, so not flexible.
        for name in [CatalogName::TwoC3Star, CatalogName::TwoC3] {
            let m = named_configuration(name).unwrap();
            assert!(m.flags().max_locked && !m.flags().flexible, "{name}");
            assert!(!stream.iter().any(|s| structured_isomorphic(s, &m, false).unwrap()), "{name}");
        }
        for s in &stream {
            let f = s.flags();
            assert!(f.tight && f.is_iou && f.flexible);
        }
    }
}
