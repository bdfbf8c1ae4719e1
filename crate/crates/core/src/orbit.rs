//! Structured posets, direct interdependence, orbit graphs and
//! interdependent orbit unions.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::bitset::BitSet;
use crate::catalog::is_max_locked;
use crate::error::{Error, Result};
use crate::group::{automorphism_group, automorphism_group_respecting_capped, PermGroup, DEFAULT_AUT_CAP};
use crate::poset::Poset;
use crate::structure::DictatedOrbitStructure;

/// The orbits of `Aut(P)` as a structure. Every orbit is an antichain since
/// automorphisms preserve rank; a violation is reported, not repaired.
pub fn natural_orbit_structure(p: &Poset) -> Result<DictatedOrbitStructure> {
    let g = automorphism_group(p)?;
    natural_from_group(p, &g)
}

pub(crate) fn natural_from_group(p: &Poset, g: &PermGroup) -> Result<DictatedOrbitStructure> {
    let orbits = g.orbits();
    if let Some(o) = orbits.blocks.iter().find(|o| !p.is_antichain(o)) {
        return Err(Error::OrbitNotAntichain(o.to_vec()));
    }
    DictatedOrbitStructure::new(p, orbits.blocks)
}

/// Some pair across `C`, `D` is comparable and some pair is incomparable.
pub fn directly_interdependent(p: &Poset, d: &DictatedOrbitStructure, c: usize, e: usize) -> Result<bool> {
    let bc = d.block(c)?;
    let be = d.block(e)?;
    if c == e {
        return Err(Error::BlockNotInStructure(e));
    }
    Ok(blocks_interdependent(p, bc, be))
}

pub(crate) fn blocks_interdependent(p: &Poset, c: &BitSet, d: &BitSet) -> bool {
    let comparable: usize = c.iter().map(|x| p.up(x).union(p.down(x)).intersection_len(d)).sum();
    comparable > 0 && comparable < c.len() * d.len()
}

/// Blocks as vertices; an edge joins directly interdependent blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl OrbitGraph {
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    /// Connected components of the vertices in `within`, each sorted,
    /// ordered by smallest vertex.
    pub fn components_within(&self, within: &BitSet) -> Vec<Vec<usize>> {
        let mut seen = BitSet::new();
        let mut out = Vec::new();
        for v in within {
            if seen.contains(v) {
                continue;
            }
            let mut comp = vec![v];
            seen.insert(v);
            let mut k = 0;
            while k < comp.len() {
                for u in self.neighbours(comp[k]) {
                    if within.contains(u) && !seen.contains(u) {
                        seen.insert(u);
                        comp.push(u);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_within(&BitSet::full(self.vertices))
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether removing `v` disconnects the other vertices.
    pub fn is_cutvertex(&self, v: usize) -> bool {
        let mut rest = BitSet::full(self.vertices);
        rest.remove(v);
        self.components_within(&rest).len() > 1
    }
}

pub(crate) fn orbit_graph_of(p: &Poset, d: &DictatedOrbitStructure) -> OrbitGraph {
    let blocks = d.blocks();
    let mut edges = Vec::new();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if blocks_interdependent(p, &blocks[i], &blocks[j]) {
                edges.push((i, j));
            }
        }
    }
    OrbitGraph { vertices: blocks.len(), edges }
}

/// Cached properties of a structured poset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructureFlags {
    pub without_slack: bool,
    pub tight: bool,
    pub is_iou: bool,
    pub flexible: bool,
    pub max_locked: bool,
}

/// A poset with a dictated orbit structure. Groups and flags are computed
/// on first use.
#[derive(Clone, Debug)]
pub struct StructuredPoset {
    poset: Poset,
    structure: DictatedOrbitStructure,
    aut: OnceLock<PermGroup>,
    graph: OnceLock<OrbitGraph>,
    flags: OnceLock<StructureFlags>,
}

impl PartialEq for StructuredPoset {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset && self.structure == other.structure
    }
}

impl Eq for StructuredPoset {}

impl StructuredPoset {
    pub fn new(poset: Poset, structure: DictatedOrbitStructure) -> Result<Self> {
        Self::with_cap(poset, structure, DEFAULT_AUT_CAP)
    }

    /// Computes `Aut_D` eagerly under the given search cap.
    pub fn with_cap(poset: Poset, structure: DictatedOrbitStructure, cap: usize) -> Result<Self> {
        let aut = automorphism_group_respecting_capped(&poset, &structure, cap)?;
        Ok(StructuredPoset {
            poset,
            structure,
            aut: OnceLock::from(aut),
            graph: OnceLock::new(),
            flags: OnceLock::new(),
        })
    }

    pub(crate) fn from_parts(poset: Poset, structure: DictatedOrbitStructure, aut: PermGroup) -> Self {
        StructuredPoset { poset, structure, aut: OnceLock::from(aut), graph: OnceLock::new(), flags: OnceLock::new() }
    }

    /// `(P, N)` with the natural orbit structure.
    pub fn natural(poset: Poset) -> Result<Self> {
        let structure = natural_orbit_structure(&poset)?;
        Self::new(poset, structure)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn structure(&self) -> &DictatedOrbitStructure {
        &self.structure
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn aut(&self) -> &PermGroup {
        self.aut.get().expect("Aut_D is computed on construction")
    }

    pub fn orbit_graph(&self) -> &OrbitGraph {
        self.graph.get_or_init(|| orbit_graph_of(&self.poset, &self.structure))
    }

    pub fn flags(&self) -> StructureFlags {
        *self.flags.get_or_init(|| {
            let without_slack =
                self.structure.blocks().iter().all(|b| twin_classes(&self.poset, b).iter().all(|c| c.len() == 1));
            let transitive = self.aut().orbits().blocks == self.structure.blocks();
            let is_iou = self.orbit_graph().is_connected();
            let max_locked = is_max_locked(&self.poset);
            StructureFlags {
                without_slack,
                tight: without_slack && transitive,
                is_iou,
                flexible: is_iou && !max_locked && self.len() > 1,
                max_locked,
            }
        })
    }

    /// The dual poset with the same blocks.
    pub fn dual(&self) -> StructuredPoset {
        StructuredPoset::from_parts(self.poset.dual(), self.structure.clone(), self.aut().clone())
    }

    /// Induced structured poset on a union of blocks, relabeled in
    /// increasing element order.
    pub fn restrict_to_blocks(&self, blocks: &[usize]) -> StructuredPoset {
        let elements: BitSet = blocks.iter().fold(BitSet::new(), |acc, &b| acc.union(&self.structure.blocks()[b]));
        self.restrict(&elements.to_vec())
    }

    pub fn restrict(&self, elements: &[usize]) -> StructuredPoset {
        let poset = self.poset.induced(elements);
        let structure = self.structure.restrict(elements);
        StructuredPoset::new(poset, structure).expect("restriction of a structured poset stays within the cap")
    }
}

pub fn orbit_graph(s: &StructuredPoset) -> OrbitGraph {
    s.orbit_graph().clone()
}

pub fn structure_flags(s: &StructuredPoset) -> (bool, bool, bool) {
    let f = s.flags();
    (f.without_slack, f.tight, f.flexible)
}

/// Maximal sets of pairwise twins inside `within`, ordered by smallest
/// element. A subset of an antichain is order-autonomous iff its members
/// are pairwise twins, so these are the maximal order-autonomous
/// antichains inside an antichain.
pub fn twin_classes(p: &Poset, within: &BitSet) -> Vec<BitSet> {
    let mut classes: Vec<BitSet> = Vec::new();
    for x in within {
        match classes.iter_mut().find(|c| p.are_twins(c.first().unwrap(), x)) {
            Some(c) => c.insert(x),
            None => classes.push(BitSet::singleton(x)),
        }
    }
    classes
}

/// One connected component of the orbit graph.
#[derive(Clone, Debug)]
pub struct OrbitUnion {
    /// Host elements, increasing; element `i` of `structured` is `elements[i]`.
    pub elements: Vec<usize>,
    /// Host block indices.
    pub blocks: Vec<usize>,
    pub structured: StructuredPoset,
}

impl OrbitUnion {
    pub fn is_singleton(&self) -> bool {
        self.elements.len() == 1
    }
}

pub fn interdependent_orbit_unions(s: &StructuredPoset) -> Vec<OrbitUnion> {
    s.orbit_graph()
        .components()
        .into_iter()
        .map(|blocks| {
            let elements: BitSet = blocks.iter().fold(BitSet::new(), |acc, &b| acc.union(&s.structure().blocks()[b]));
            let elements = elements.to_vec();
            let structured = s.restrict(&elements);
            OrbitUnion { elements, blocks, structured }
        })
        .collect()
}

/// `|Aut(P)|` equals the product of `|Aut_{N|U}(U)|` over the non-singleton
/// natural interdependent orbit unions `U`.
pub fn product_decomposition_check(p: &Poset) -> Result<bool> {
    let s = StructuredPoset::natural(p.clone())?;
    let product = interdependent_orbit_unions(&s)
        .iter()
        .filter(|u| !u.is_singleton())
        .fold(BigUint::one(), |acc, u| acc * u.structured.aut().order());
    Ok(&product == s.aut().order())
}

/// For every union `U`, block `C ⊆ U` and `x ∉ U`: some `c < x` forces
/// `C < x`, and dually.
pub fn union_placement_check(s: &StructuredPoset) -> bool {
    let p = s.poset();
    interdependent_orbit_unions(s).iter().all(|u| {
        let inside: BitSet = u.elements.iter().copied().collect();
        let outside = p.ground_set().difference(&inside);
        u.blocks.iter().all(|&b| {
            let c = &s.structure().blocks()[b];
            outside.iter().all(|x| {
                let below = p.down(x).intersection_len(c);
                let above = p.up(x).intersection_len(c);
                (below == 0 || below == c.len()) && (above == 0 || above == c.len())
            })
        })
    })
}

/// Every `Aut_{D|U}(U)` generator, extended by the identity off `U`, is an
/// automorphism of the host respecting `D`.
pub fn union_extension_check(s: &StructuredPoset) -> bool {
    let p = s.poset();
    interdependent_orbit_unions(s).iter().all(|u| {
        u.structured.aut().generators().iter().all(|g| {
            let mut ext: Vec<usize> = (0..p.len()).collect();
            for (i, &x) in u.elements.iter().enumerate() {
                ext[x] = u.elements[g.apply(i)];
            }
            p.is_automorphism(&ext)
                && ext.iter().enumerate().all(|(x, &y)| s.structure().block_of(x) == s.structure().block_of(y))
        })
    })
}
