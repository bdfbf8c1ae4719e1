//! Removing one block from a tight interdependent orbit union and
//! splitting the automorphism count into a compacted remainder `U_n` and
//! the part `Q` around the removed block.
//!
//! Labels follow the usual convention: the removed block is `D_n`, the
//! blocks of one component of the orbit graph minus `D_n` are
//! `D_1..D_{n-1}` with `D_s..D_{n-1}` adjacent to `D_n`, and every block of
//! the other components is one of `D_{n+1}..D_m`.

use num_bigint::BigUint;
use num_traits::One;

use crate::bitset::BitSet;
use crate::bounds::factorial;
use crate::error::{Error, Result};
use crate::group::{colored_group, Perm};
use crate::orbit::{twin_classes, StructuredPoset};
use crate::structure::DictatedOrbitStructure;

/// One pruned-and-compacted decomposition. Block indices and element sets
/// are host labels unless a field says otherwise.
#[derive(Clone, Debug)]
pub struct PruneDecomposition {
    /// `D_n`.
    pub removed: usize,
    /// `D_1..D_{n-1}`, increasing.
    pub component: Vec<usize>,
    /// `D_s..D_{n-1}`: the component blocks adjacent to `D_n`.
    pub adjacent: Vec<usize>,
    /// `D_{n+1}..D_m`: blocks of every other component.
    pub others: Vec<usize>,
    /// `A^j` for each adjacent block, in the order of `adjacent`: the twin
    /// classes of `D_j` in the component.
    pub autonomous_antichains: Vec<Vec<BitSet>>,
    /// `a_i^j`, the smallest element of each `A_i^j`.
    pub representatives: Vec<Vec<usize>>,
    /// Host elements of `U_n`; element `i` of `un` is `un_elements[i]`.
    pub un_elements: Vec<usize>,
    pub un: StructuredPoset,
    /// Host elements of `Q`; element `i` of `q` is `q_elements[i]`.
    pub q_elements: Vec<usize>,
    /// `(Q, D_Q)` with `D_Q` the orbits of `Aut_{E_Q}(Q)`.
    pub q: StructuredPoset,
    /// `E_Q` in `Q` labels.
    pub e_q: DictatedOrbitStructure,
    /// `S(D_n)`: the blocks of `D_Q` inside `D_n`.
    pub separation: Vec<BitSet>,
    /// `Σ ℓ_j` over the adjacent blocks.
    pub ell_q: usize,
    /// `|D_n|`.
    pub removed_len: usize,
    /// `Σ |D_j|` over the adjacent blocks.
    pub adjacent_len: usize,
    /// `Σ |D_j|` over the other components.
    pub others_len: usize,
}

impl PruneDecomposition {
    /// `n = m`: the removed block is not a cutvertex of the orbit graph.
    pub fn is_pendant_side(&self) -> bool {
        self.others.is_empty()
    }

    /// `Σ_{j≥t} ℓ_j`: classes of the adjacent blocks whose classes are
    /// nontrivial.
    pub fn nontrivial_ell(&self) -> usize {
        self.autonomous_antichains.iter().filter(|a| a.iter().any(|c| c.len() > 1)).map(Vec::len).sum()
    }

    /// Host image of a `Q` automorphism extended by the identity off `Q`.
    pub fn lift(&self, host_len: usize, delta: &Perm) -> Perm {
        let mut images: Vec<usize> = (0..host_len).collect();
        for (i, &x) in self.q_elements.iter().enumerate() {
            images[x] = self.q_elements[delta.apply(i)];
        }
        Perm::from_images(images)
    }

    /// `Φ_n`: `Φ` on the non-adjacent blocks, and `a_i^j` goes to the
    /// representative of `Φ[A_i^j]`. `None` when `Φ` does not respect the
    /// classes.
    pub fn project(&self, phi: &Perm) -> Option<Perm> {
        let mut class_rep = std::collections::HashMap::new();
        for (classes, reps) in self.autonomous_antichains.iter().zip(&self.representatives) {
            for (c, &r) in classes.iter().zip(reps) {
                for x in c {
                    class_rep.insert(x, (r, *c));
                }
            }
        }
        let position: std::collections::HashMap<usize, usize> =
            self.un_elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut images = Vec::with_capacity(self.un_elements.len());
        for &x in &self.un_elements {
            let y = match class_rep.get(&x) {
                Some((_, class)) => {
                    let image: BitSet = class.iter().map(|z| phi.apply(z)).collect();
                    let (r, target) = class_rep.get(&phi.apply(x))?;
                    if image != *target {
                        return None;
                    }
                    *r
                }
                None => phi.apply(x),
            };
            images.push(*position.get(&y)?);
        }
        Some(Perm::from_images(images))
    }
}

fn block_union(s: &StructuredPoset, blocks: &[usize]) -> BitSet {
    blocks.iter().fold(BitSet::new(), |acc, &b| acc.union(&s.structure().blocks()[b]))
}

fn check_preconditions(s: &StructuredPoset, removed: usize) -> Result<()> {
    if removed >= s.structure().len() {
        return Err(Error::BlockNotInStructure(removed));
    }
    let f = s.flags();
    if !(f.tight && f.is_iou) {
        return Err(Error::NotTightIou);
    }
    if s.structure().len() < 3 {
        return Err(Error::TooFewBlocks(s.structure().len()));
    }
    Ok(())
}

/// One decomposition per component of the orbit graph minus `removed`
/// that has at least two blocks. When `removed` is not a cutvertex there is
/// exactly one; for a cutvertex each qualifying component takes the role of
/// `D_1..D_{n-1}` in turn, with every other component on the `Q` side.
///
/// Requires a tight interdependent orbit union with at least three blocks.
pub fn prune_components(s: &StructuredPoset, removed: usize) -> Result<Vec<PruneDecomposition>> {
    check_preconditions(s, removed)?;
    let graph = s.orbit_graph();
    let mut rest = BitSet::full(graph.vertices);
    rest.remove(removed);
    let components = graph.components_within(&rest);
    let out: Vec<PruneDecomposition> = components
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let others: Vec<usize> = rest.iter().filter(|b| !c.contains(b)).collect();
            decompose(s, removed, c.clone(), others)
        })
        .collect();
    if out.is_empty() {
        return Err(Error::TooFewBlocks(1));
    }
    Ok(out)
}

/// The decomposition whose component contains the smallest block index.
pub fn prune(s: &StructuredPoset, removed: usize) -> Result<PruneDecomposition> {
    Ok(prune_components(s, removed)?.swap_remove(0))
}

fn decompose(s: &StructuredPoset, removed: usize, component: Vec<usize>, others: Vec<usize>) -> PruneDecomposition {
    let p = s.poset();
    let blocks = s.structure().blocks();
    let graph = s.orbit_graph();
    let adjacent: Vec<usize> = component.iter().copied().filter(|&b| graph.adjacent(b, removed)).collect();

    // Order-autonomy is taken inside the component, the host minus D_n..D_m.
    let comp_elements = block_union(s, &component).to_vec();
    let comp_poset = p.induced(&comp_elements);
    let local: std::collections::HashMap<usize, usize> =
        comp_elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let autonomous_antichains: Vec<Vec<BitSet>> = adjacent
        .iter()
        .map(|&b| {
            let within: BitSet = blocks[b].iter().map(|x| local[&x]).collect();
            twin_classes(&comp_poset, &within)
                .into_iter()
                .map(|c| c.iter().map(|i| comp_elements[i]).collect())
                .collect()
        })
        .collect();
    let representatives: Vec<Vec<usize>> =
        autonomous_antichains.iter().map(|a| a.iter().map(|c| c.first().unwrap()).collect()).collect();
    let ell_q = representatives.iter().map(Vec::len).sum();

    let non_adjacent: Vec<usize> = component.iter().copied().filter(|b| !adjacent.contains(b)).collect();
    let mut un_set = block_union(s, &non_adjacent);
    for &r in representatives.iter().flatten() {
        un_set.insert(r);
    }
    let un_elements = un_set.to_vec();
    let un = s.restrict(&un_elements);

    let mut q_blocks = adjacent.clone();
    q_blocks.push(removed);
    q_blocks.extend(&others);
    let q_elements = block_union(s, &q_blocks).to_vec();
    let q_local: std::collections::HashMap<usize, usize> =
        q_elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let q_poset = p.induced(&q_elements);
    let mut e_blocks: Vec<BitSet> =
        autonomous_antichains.iter().flatten().map(|c| c.iter().map(|x| q_local[&x]).collect()).collect();
    for &b in std::iter::once(&removed).chain(&others) {
        e_blocks.push(blocks[b].iter().map(|x| q_local[&x]).collect());
    }
    let e_q = DictatedOrbitStructure::new(&q_poset, e_blocks).expect("classes and blocks are antichains");
    let group = colored_group(&q_poset, e_q.colors());
    // Aut_{E_Q} fixes its own orbits, so it is also Aut_{D_Q}.
    let d_q = DictatedOrbitStructure::new(&q_poset, group.orbits().blocks).expect("orbits refine E_Q");
    let removed_local: BitSet = blocks[removed].iter().map(|x| q_local[&x]).collect();
    let separation = d_q
        .blocks()
        .iter()
        .filter(|b| b.is_subset(&removed_local))
        .map(|b| b.iter().map(|i| q_elements[i]).collect())
        .collect();
    let q = StructuredPoset::from_parts(q_poset, d_q, group);

    PruneDecomposition {
        removed,
        component,
        autonomous_antichains,
        representatives,
        un_elements,
        un,
        q_elements,
        q,
        e_q,
        separation,
        ell_q,
        removed_len: blocks[removed].len(),
        adjacent_len: pd_len(blocks, &adjacent),
        others_len: pd_len(blocks, &others),
        adjacent,
        others,
    }
}

fn pd_len(blocks: &[BitSet], indices: &[usize]) -> usize {
    indices.iter().map(|&b| blocks[b].len()).sum()
}

/// Instance checks for one decomposition. `None` marks a bound whose
/// hypothesis does not hold on this instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneReport {
    pub aut_u: BigUint,
    pub aut_un: BigUint,
    pub aut_q: BigUint,
    /// `|Aut_D(U)| ≤ |Aut_{D_n}(U_n)|·|Aut_{D_Q}(Q)|`.
    pub inequality: bool,
    /// Lifted `Aut_{D_Q}(Q)` lies in `Aut_D(U)` and is closed under
    /// conjugation by `Aut_D(U)`.
    pub normal: bool,
    /// Every `Φ ∈ Aut_D(U)` respects the classes and `Φ_n ∈ Aut_{D_n}(U_n)`.
    pub projects: bool,
    /// Every `Φ ∈ Aut_D(U)` maps blocks of `D_Q` onto blocks of `D_Q`.
    pub respects_d_q: bool,
    /// Each adjacent block splits into `ℓ_j > 1` classes of equal size.
    pub classes_uniform: bool,
    /// Distinct members of a class are told apart by some element of `D_n`.
    pub classes_separated: bool,
    /// `(U_n, D_n)` is a tight interdependent orbit union.
    pub un_tight_iou: bool,
    /// `(Q, D_Q)` is tight.
    pub q_tight: bool,
    /// When `Aut_{D_Q}(Q)` acts faithfully on `D_n`: its order is at most
    /// `Π_{S ∈ S(D_n)} |S|!`.
    pub separation_bound: Option<bool>,
    /// When `n = m`: `|Aut_{D_Q}(Q)| ≤ Π |A_i^j|!`.
    pub class_bound: Option<bool>,
    /// When `n = m` and every class is a singleton: `|Aut_D(U)| ≤ |Aut_{D_n}(U_n)|`.
    pub singleton_class_bound: Option<bool>,
}

impl PruneReport {
    pub fn all_hold(&self) -> bool {
        self.inequality
            && self.normal
            && self.projects
            && self.respects_d_q
            && self.classes_uniform
            && self.classes_separated
            && self.un_tight_iou
            && self.q_tight
            && self.separation_bound != Some(false)
            && self.class_bound != Some(false)
            && self.singleton_class_bound != Some(false)
    }
}

pub fn prune_report(s: &StructuredPoset, pd: &PruneDecomposition) -> PruneReport {
    let p = s.poset();
    let n = p.len();
    let d = s.structure();
    let aut_u = s.aut().order().clone();
    let aut_un = pd.un.aut().order().clone();
    let aut_q = pd.q.aut().order().clone();
    let inequality = aut_u <= &aut_un * &aut_q;

    let respects_d = |g: &Perm| (0..n).all(|x| d.block_of(x) == d.block_of(g.apply(x)));
    let lifted: Vec<Perm> = pd.q.aut().generators().iter().map(|g| pd.lift(n, g)).collect();
    let in_kernel = |g: &Perm| {
        let off_q_fixed = (0..n).filter(|x| !pd.q_elements.contains(x)).all(|x| g.fixes(x));
        let local: Vec<usize> =
            pd.q_elements.iter().map(|&x| pd.q_elements.iter().position(|&y| y == g.apply(x)).unwrap()).collect();
        off_q_fixed && pd.q.aut().contains(&Perm::from_images(local))
    };
    let normal = lifted.iter().all(|l| p.is_automorphism(l.images()) && respects_d(l))
        && s.aut().generators().iter().all(|g| lifted.iter().all(|l| in_kernel(&g.inverse().then(l).then(g))));

    let projects = s.aut().generators().iter().all(|g| pd.project(g).is_some_and(|h| pd.un.aut().contains(&h)));

    let d_q_host: Vec<BitSet> =
        pd.q.structure().blocks().iter().map(|b| b.iter().map(|i| pd.q_elements[i]).collect()).collect();
    let respects_d_q = s.aut().generators().iter().all(|g| {
        d_q_host.iter().all(|b| {
            let image: BitSet = b.iter().map(|x| g.apply(x)).collect();
            d_q_host.contains(&image)
        })
    });

    let classes_uniform =
        pd.autonomous_antichains.iter().all(|a| a.len() > 1 && a.iter().all(|c| c.len() == a[0].len()));

    let removed = &d.blocks()[pd.removed];
    let classes_separated = pd.autonomous_antichains.iter().flatten().all(|c| {
        let members = c.to_vec();
        members.iter().enumerate().all(|(i, &x)| {
            members[i + 1..].iter().all(|&y| removed.iter().any(|z| p.comparable(x, z) != p.comparable(y, z)))
        })
    });

    let uf = pd.un.flags();
    let un_tight_iou = uf.tight && uf.is_iou;
    let q_tight = pd.q.flags().tight;

    let removed_local: BitSet = removed.iter().map(|x| pd.q_elements.iter().position(|&y| y == x).unwrap()).collect();
    let faithful = pd.q.aut().pointwise_stabilizer_order(&removed_local).is_one();
    let separation_product = pd.separation.iter().fold(BigUint::one(), |acc, b| acc * factorial(b.len() as u64));
    let separation_bound = faithful.then(|| aut_q <= separation_product);
    let class_product =
        pd.autonomous_antichains.iter().flatten().fold(BigUint::one(), |acc, c| acc * factorial(c.len() as u64));
    let class_bound = pd.is_pendant_side().then(|| aut_q <= class_product);
    let singletons = pd.autonomous_antichains.iter().flatten().all(|c| c.len() == 1);
    let singleton_class_bound = (pd.is_pendant_side() && singletons).then(|| aut_u <= aut_un);

    PruneReport {
        aut_u,
        aut_un,
        aut_q,
        inequality,
        normal,
        projects,
        respects_d_q,
        classes_uniform,
        classes_separated,
        un_tight_iou,
        q_tight,
        separation_bound,
        class_bound,
        singleton_class_bound,
    }
}

/// The product inequality together with normality of the lifted `Q` group,
/// over every decomposition at `removed`.
pub fn prune_inequality_check(s: &StructuredPoset, removed: usize) -> Result<bool> {
    Ok(prune_components(s, removed)?.iter().all(|pd| {
        let r = prune_report(s, pd);
        r.inequality && r.normal
    }))
}

/// Blocks at which a decomposition exists, in increasing order.
pub fn admissible_removals(s: &StructuredPoset) -> Vec<usize> {
    (0..s.structure().len()).filter(|&b| prune_components(s, b).is_ok()).collect()
}
