//! Permutation groups: automorphism groups from the refinement search, and
//! Schreier–Sims stabilizer chains for membership and pointwise stabilizers.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::search::{orbit_of, ColoredGraph};
use crate::structure::DictatedOrbitStructure;

/// Default largest poset handed to the automorphism search.
pub const DEFAULT_AUT_CAP: usize = 64;

/// A permutation of `0..degree` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    /// Panics unless `images` is a bijection on `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Perm {
        let mut seen = BitSet::new();
        for &y in &images {
            assert!(y < images.len() && !seen.contains(y), "not a permutation: {images:?}");
            seen.insert(y);
        }
        Perm(images)
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&y| other.0[y]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.0[x] == x
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().position(|(x, &y)| x != y)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One-line image form `p i0 i1 ... i(n-1)`.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p")?;
        for y in &self.0 {
            write!(f, " {y}")?;
        }
        Ok(())
    }
}

/// Orbits of a group, sorted by smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitPartition {
    pub blocks: Vec<BitSet>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// A permutation group with exact order. The stabilizer chain for
/// membership queries is built on first use.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    order: BigUint,
    chain: OnceLock<StabChain>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("order", &self.order)
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    /// Order is computed by Schreier–Sims.
    pub fn from_generators(degree: usize, generators: Vec<Perm>) -> PermGroup {
        let generators: Vec<Perm> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        let chain = StabChain::build(degree, &generators, &[]);
        PermGroup { degree, order: chain.order(), generators, chain: OnceLock::from(chain) }
    }

    fn from_search(degree: usize, generators: Vec<Vec<usize>>, orbit_sizes: &[usize]) -> PermGroup {
        let order = orbit_sizes.iter().fold(BigUint::one(), |acc, &s| acc * s);
        let mut generators: Vec<Perm> = generators.into_iter().map(Perm).collect();
        generators.sort();
        PermGroup { degree, generators, order, chain: OnceLock::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| StabChain::build(self.degree, &self.generators, &[]))
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.chain().contains(g)
    }

    pub fn orbit(&self, x: usize) -> BitSet {
        let gens: Vec<Vec<usize>> = self.generators.iter().map(|g| g.0.clone()).collect();
        orbit_of(x, &gens)
    }

    pub fn orbits(&self) -> OrbitPartition {
        let mut blocks = Vec::new();
        let mut covered = BitSet::new();
        for x in 0..self.degree {
            if !covered.contains(x) {
                let o = self.orbit(x);
                covered = covered.union(&o);
                blocks.push(o);
            }
        }
        OrbitPartition { blocks }
    }

    /// Points fixed by every element of the group.
    pub fn fixed_points(&self) -> BitSet {
        (0..self.degree).filter(|&x| self.generators.iter().all(|g| g.fixes(x))).collect()
    }

    /// Order of the subgroup fixing every point of `s`.
    pub fn pointwise_stabilizer_order(&self, s: &BitSet) -> BigUint {
        let prefix = s.to_vec();
        StabChain::build(self.degree, &self.generators, &prefix).order_from(prefix.len())
    }

    /// Every element; intended for small groups in tests and reports.
    pub fn elements(&self) -> Vec<Perm> {
        self.chain().elements()
    }
}

/// Base, strong generators and basic transversals.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    base: Vec<usize>,
    levels: Vec<Level>,
}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    orbit: Vec<usize>,
    /// `transversal[b]` maps `point` to `b`.
    transversal: Vec<Option<Perm>>,
}

impl StabChain {
    /// Builds a chain whose base begins with `prefix` (points may have
    /// trivial basic orbits).
    pub fn build(degree: usize, generators: &[Perm], prefix: &[usize]) -> StabChain {
        let mut strong: Vec<Perm> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<usize> = prefix.to_vec();
        for g in &strong.clone() {
            Self::extend_base(&mut base, g);
        }
        loop {
            let levels = Self::levels(degree, &base, &strong);
            match Self::failing_schreier_generator(&levels, &base, &strong) {
                None => return StabChain { degree, base, levels },
                Some(h) => {
                    Self::extend_base(&mut base, &h);
                    strong.push(h);
                }
            }
        }
    }

    fn extend_base(base: &mut Vec<usize>, g: &Perm) {
        if base.iter().all(|&b| g.fixes(b)) {
            base.push(g.first_moved().expect("non-identity"));
        }
    }

    fn levels(degree: usize, base: &[usize], strong: &[Perm]) -> Vec<Level> {
        (0..base.len())
            .map(|i| {
                let gens: Vec<&Perm> = strong.iter().filter(|g| base[..i].iter().all(|&b| g.fixes(b))).collect();
                let point = base[i];
                let mut transversal: Vec<Option<Perm>> = vec![None; degree];
                transversal[point] = Some(Perm::identity(degree));
                let mut orbit = vec![point];
                let mut k = 0;
                while k < orbit.len() {
                    let x = orbit[k];
                    for g in &gens {
                        let y = g.apply(x);
                        if transversal[y].is_none() {
                            transversal[y] = Some(transversal[x].as_ref().unwrap().then(g));
                            orbit.push(y);
                        }
                    }
                    k += 1;
                }
                Level { point, orbit, transversal }
            })
            .collect()
    }

    /// Sifts `g` through levels `from..`, returning the residue and the
    /// level where sifting stopped.
    fn sift(levels: &[Level], from: usize, g: &Perm) -> (Perm, usize) {
        let mut g = g.clone();
        for (j, level) in levels.iter().enumerate().skip(from) {
            let b = g.apply(level.point);
            match &level.transversal[b] {
                None => return (g, j),
                Some(u) => g = g.then(&u.inverse()),
            }
        }
        (g, levels.len())
    }

    fn failing_schreier_generator(levels: &[Level], base: &[usize], strong: &[Perm]) -> Option<Perm> {
        for i in (0..levels.len()).rev() {
            let gens: Vec<&Perm> = strong.iter().filter(|g| base[..i].iter().all(|&b| g.fixes(b))).collect();
            let level = &levels[i];
            for &beta in &level.orbit {
                let u = level.transversal[beta].as_ref().unwrap();
                for s in &gens {
                    let v = level.transversal[s.apply(beta)].as_ref().unwrap();
                    let g = u.then(s).then(&v.inverse());
                    let (h, j) = Self::sift(levels, i + 1, &g);
                    if j < levels.len() || !h.is_identity() {
                        return Some(h);
                    }
                }
            }
        }
        None
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn basic_orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.order_from(0)
    }

    /// Order of the pointwise stabilizer of the first `k` base points.
    pub fn order_from(&self, k: usize) -> BigUint {
        self.levels[k.min(self.levels.len())..].iter().fold(BigUint::one(), |acc, l| acc * l.orbit.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (h, j) = Self::sift(&self.levels, 0, g);
        j == self.levels.len() && h.is_identity()
    }

    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        // Every element factors uniquely as u_m then ... then u_0.
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for g in &out {
                for &b in &level.orbit {
                    next.push(g.then(level.transversal[b].as_ref().unwrap()));
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { what: "automorphism search", n, cap });
    }
    Ok(())
}

pub fn automorphism_group(p: &Poset) -> Result<PermGroup> {
    automorphism_group_capped(p, DEFAULT_AUT_CAP)
}

pub fn automorphism_group_capped(p: &Poset, cap: usize) -> Result<PermGroup> {
    check_cap(p.len(), cap)?;
    Ok(colored_group(p, vec![0; p.len()]))
}

/// `Aut_D(P)`: automorphisms mapping every block onto itself.
pub fn automorphism_group_respecting(p: &Poset, d: &DictatedOrbitStructure) -> Result<PermGroup> {
    automorphism_group_respecting_capped(p, d, DEFAULT_AUT_CAP)
}

pub fn automorphism_group_respecting_capped(p: &Poset, d: &DictatedOrbitStructure, cap: usize) -> Result<PermGroup> {
    check_cap(p.len(), cap)?;
    if d.element_count() != p.len() {
        return Err(Error::NotAnAntichainPartition(format!(
            "structure covers {} elements, poset has {}",
            d.element_count(),
            p.len()
        )));
    }
    if let Some(b) = d.blocks().iter().find(|b| !p.is_antichain(b)) {
        return Err(Error::NotAnAntichainPartition(format!("block {b:?} contains a comparable pair")));
    }
    Ok(colored_group(p, d.colors()))
}

pub(crate) fn colored_group(p: &Poset, colors: Vec<u32>) -> PermGroup {
    let g = ColoredGraph::new(p.len(), p.up_rows(), p.down_rows()).with_colors(colors);
    let found = g.automorphisms();
    PermGroup::from_search(p.len(), found.generators, &found.orbit_sizes)
}

pub fn orbits(g: &PermGroup) -> OrbitPartition {
    g.orbits()
}

/// `α(S)`: the number of distinct restrictions `Φ|_S` over `Φ ∈ Aut(P)`,
/// as the index of the pointwise stabilizer of `S`.
pub fn alpha_restriction_count(p: &Poset, s: &BitSet) -> Result<BigUint> {
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(x) = s.iter().find(|&x| x >= p.len()) {
        return Err(Error::IndexOutOfRange { index: x, n: p.len() });
    }
    let g = automorphism_group(p)?;
    Ok(alpha_in_group(&g, s))
}

pub fn alpha_in_group(g: &PermGroup, s: &BitSet) -> BigUint {
    if g.is_trivial() {
        return BigUint::one();
    }
    g.order() / g.pointwise_stabilizer_order(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn aut_orders() {
        assert_eq!(automorphism_group(&Poset::standard_example(5)).unwrap().order(), &big(120));
        assert_eq!(automorphism_group(&Poset::crown(4)).unwrap().order(), &big(8));
        assert!(automorphism_group(&Poset::chain(9)).unwrap().is_trivial());
        assert!(matches!(automorphism_group(&Poset::antichain(65)), Err(Error::CapExceeded { n: 65, cap: 64, .. })));
    }

    #[test]
    fn schreier_sims_agrees_with_search() {
        for p in [Poset::standard_example(4), Poset::crown(5), Poset::antichain(6), Poset::disjoint_chains(3, 3)] {
            let g = automorphism_group(&p).unwrap();
            assert_eq!(&g.chain().order(), g.order());
            let elements = g.elements();
            assert_eq!(BigUint::from(elements.len()), *g.order());
            assert!(elements.iter().all(|e| p.is_automorphism(e.images())));
            assert!(elements.iter().all(|e| g.contains(e)));
        }
        let g = automorphism_group(&Poset::crown(4)).unwrap();
        assert!(!g.contains(&Perm::from_images(vec![1, 0, 2, 3, 4, 5, 6, 7])));
    }

    #[test]
    fn orbit_examples() {
        let o = orbits(&automorphism_group(&Poset::crown(4)).unwrap());
        assert_eq!(o.blocks, vec![BitSet::from_iter(0..4), BitSet::from_iter(4..8)]);
        let o = orbits(&automorphism_group(&Poset::chain(5)).unwrap());
        assert_eq!(o.len(), 5);
        let o = orbits(&automorphism_group(&Poset::disjoint_chains(5, 2)).unwrap());
        assert_eq!(o.blocks.iter().map(|b| b.len()).collect::<Vec<_>>(), vec![5, 5]);
    }

    fn restrictions_by_enumeration(p: &Poset, s: &BitSet) -> usize {
        let g = automorphism_group(p).unwrap();
        let set: BTreeSet<Vec<usize>> = g.elements().iter().map(|e| s.iter().map(|x| e.apply(x)).collect()).collect();
        set.len()
    }

    #[test]
    fn alpha_examples() {
        let s5 = Poset::standard_example(5);
        let r0 = s5.minimal_elements();
        assert_eq!(alpha_restriction_count(&s5, &r0).unwrap(), big(120));
        assert_eq!(restrictions_by_enumeration(&s5, &r0), 120);
        let c8 = Poset::crown(4);
        assert_eq!(alpha_restriction_count(&c8, &c8.minimal_elements()).unwrap(), big(8));
        assert_eq!(restrictions_by_enumeration(&c8, &c8.minimal_elements()), 8);
        assert_eq!(alpha_restriction_count(&Poset::chain(4), &BitSet::from_iter([1, 2])).unwrap(), big(1));
        assert_eq!(alpha_restriction_count(&c8, &BitSet::new()), Err(Error::EmptySubset));
        let two_c2 = Poset::disjoint_chains(2, 2);
        let single = BitSet::singleton(0);
        assert_eq!(alpha_restriction_count(&two_c2, &single).unwrap(), big(2));
        assert_eq!(restrictions_by_enumeration(&two_c2, &single), 2);
    }

    #[test]
    fn respecting_singletons_is_trivial() {
        let c8 = Poset::crown(4);
        let d = DictatedOrbitStructure::singletons(8);
        assert!(automorphism_group_respecting(&c8, &d).unwrap().is_trivial());
    }
}
