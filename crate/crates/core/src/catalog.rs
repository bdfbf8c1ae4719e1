//! Max-locked detection, the forbidden-configuration catalog and structured
//! (dual) isomorphism.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;

use crate::bounds::factorial;
use crate::enumerate::{canonical_form, CanonicalForm};
use crate::error::{Error, Result};
use crate::group::{alpha_in_group, automorphism_group, PermGroup};
use crate::orbit::StructuredPoset;
use crate::poset::Poset;
use crate::structure::DictatedOrbitStructure;

/// How two consecutive levels of a stacked max-locked set are joined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerKind {
    /// `S_w`: `l_i < u_j` iff `i != j`.
    S,
    /// `wC_2`: `l_i < u_i`.
    C2,
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayerKind::S => "S",
            LayerKind::C2 => "C2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogName {
    C8,
    TwoC3,
    TwoC3Star,
    TwoV,
    Hat2V,
    Bar2V,
    HatC8,
    BarC8,
    Hat4C2,
    Bar4C2,
    HatS4,
    BarS4,
    TildeS4,
    /// A max-locked set of height 1; `kind` is `None` only if it is
    /// isomorphic to neither `S_w` nor `wC_2`.
    MaxLockedH1 {
        w: usize,
        kind: Option<LayerKind>,
    },
}

impl CatalogName {
    /// The thirteen named configurations, in catalog order.
    pub const NAMED: [CatalogName; 13] = [
        CatalogName::C8,
        CatalogName::TwoC3,
        CatalogName::TwoC3Star,
        CatalogName::TwoV,
        CatalogName::Hat2V,
        CatalogName::Bar2V,
        CatalogName::HatC8,
        CatalogName::BarC8,
        CatalogName::Hat4C2,
        CatalogName::Bar4C2,
        CatalogName::HatS4,
        CatalogName::BarS4,
        CatalogName::TildeS4,
    ];
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CatalogName::C8 => "C8",
            CatalogName::TwoC3 => "2C3",
            CatalogName::TwoC3Star => "2C3star",
            CatalogName::TwoV => "2V",
            CatalogName::Hat2V => "hat2V",
            CatalogName::Bar2V => "bar2V",
            CatalogName::HatC8 => "hatC8",
            CatalogName::BarC8 => "barC8",
            CatalogName::Hat4C2 => "hat4C2",
            CatalogName::Bar4C2 => "bar4C2",
            CatalogName::HatS4 => "hatS4",
            CatalogName::BarS4 => "barS4",
            CatalogName::TildeS4 => "tildeS4",
            CatalogName::MaxLockedH1 { w, kind } => {
                return match kind {
                    Some(k) => write!(f, "maxlocked_h1({w},{k})"),
                    None => write!(f, "maxlocked_h1({w},?)"),
                }
            }
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: CatalogName,
    pub model: StructuredPoset,
}

fn structured(n: usize, pairs: &[(usize, usize)], blocks: &[&[usize]]) -> StructuredPoset {
    let p = Poset::from_cover_pairs(n, pairs).expect("catalog posets are acyclic");
    let blocks = blocks.iter().map(|b| b.iter().copied().collect()).collect();
    let d = DictatedOrbitStructure::new(&p, blocks).expect("catalog blocks are antichains");
    StructuredPoset::new(p, d).expect("catalog posets are small")
}

/// `2V`: `b_1 = 0 < t_1^1 = 2, t_2^1 = 3` and `b_2 = 1 < t_1^2 = 4, t_2^2 = 5`.
fn two_v_pairs() -> Vec<(usize, usize)> {
    vec![(0, 2), (0, 3), (1, 4), (1, 5)]
}

/// Adds `a_1 = n`, `a_2 = n + 1` above (`hat`) or below (`bar`) the maxima
/// `t_1..t_4`, with `a_1` on `t_1, t_3` and `a_2` on `t_2, t_4`.
fn attach_two(n: usize, mut pairs: Vec<(usize, usize)>, minima: &[usize], t: [usize; 4], hat: bool) -> StructuredPoset {
    let (a1, a2) = (n, n + 1);
    for (a, ts) in [(a1, [t[0], t[2]]), (a2, [t[1], t[3]])] {
        for x in ts {
            pairs.push(if hat { (x, a) } else { (a, x) });
        }
    }
    structured(n + 2, &pairs, &[minima, &t, &[a1, a2]])
}

fn crown_pairs() -> Vec<(usize, usize)> {
    Poset::crown(4).covers().to_vec()
}

fn s4_pairs() -> Vec<(usize, usize)> {
    Poset::standard_example(4).covers().to_vec()
}

fn four_c2_pairs() -> Vec<(usize, usize)> {
    (0..4).map(|i| (i, 4 + i)).collect()
}

/// The model of a named configuration with its dictated structure.
pub fn named_configuration(name: CatalogName) -> Result<StructuredPoset> {
    // In crown(4) the maxima 4, 6 and the maxima 5, 7 have no common lower bound.
    let crown_t = [4, 5, 6, 7];
    let s = match name {
        CatalogName::C8 => StructuredPoset::natural(Poset::crown(4))?,
        CatalogName::TwoC3 => StructuredPoset::natural(Poset::disjoint_chains(2, 3))?,
        // b1 b2 m1 m2 t1 t2
        CatalogName::TwoC3Star => {
            structured(6, &[(0, 2), (2, 4), (1, 3), (3, 5), (0, 5), (1, 4)], &[&[0, 1], &[2, 3], &[4, 5]])
        }
        CatalogName::TwoV => structured(6, &two_v_pairs(), &[&[0, 1], &[2, 4], &[3, 5]]),
        CatalogName::Hat2V => attach_two(6, two_v_pairs(), &[0, 1], [2, 3, 4, 5], true),
        CatalogName::Bar2V => attach_two(6, two_v_pairs(), &[0, 1], [2, 3, 4, 5], false),
        CatalogName::HatC8 => attach_two(8, crown_pairs(), &[0, 1, 2, 3], crown_t, true),
        CatalogName::BarC8 => attach_two(8, crown_pairs(), &[0, 1, 2, 3], crown_t, false),
        CatalogName::Hat4C2 => attach_two(8, four_c2_pairs(), &[0, 1, 2, 3], [4, 5, 6, 7], true),
        CatalogName::Bar4C2 => attach_two(8, four_c2_pairs(), &[0, 1, 2, 3], [4, 5, 6, 7], false),
        CatalogName::HatS4 => attach_two(8, s4_pairs(), &[0, 1, 2, 3], [4, 5, 6, 7], true),
        CatalogName::BarS4 => attach_two(8, s4_pairs(), &[0, 1, 2, 3], [4, 5, 6, 7], false),
        // b1..b4 = 0..3, m1 = 4, m2 = 5, t1..t4 = 6..9
        CatalogName::TildeS4 => structured(
            10,
            &[(0, 5), (1, 5), (5, 8), (5, 9), (2, 4), (3, 4), (4, 6), (4, 7), (0, 7), (1, 6), (2, 9), (3, 8)],
            &[&[0, 1, 2, 3], &[4, 5], &[6, 7, 8, 9]],
        ),
        CatalogName::MaxLockedH1 { w, kind } => {
            let kind = kind.ok_or(Error::NotMaxLocked)?;
            StructuredPoset::natural(stacked_max_locked(w, &[kind]))?
        }
    };
    Ok(s)
}

/// The thirteen named configurations followed by the height-1 max-locked
/// sets `S_w`, `wC_2` for `2 <= w <= max_w` (`S_2` and `2C_2` coincide).
pub fn build_catalog(max_w: usize) -> Vec<CatalogEntry> {
    let mut out: Vec<CatalogEntry> = CatalogName::NAMED
        .iter()
        .map(|&name| CatalogEntry { name, model: named_configuration(name).expect("named configurations build") })
        .collect();
    for w in 2..=max_w {
        let kinds: &[LayerKind] = if w == 2 { &[LayerKind::S] } else { &[LayerKind::S, LayerKind::C2] };
        for &kind in kinds {
            let name = CatalogName::MaxLockedH1 { w, kind: Some(kind) };
            out.push(CatalogEntry { name, model: named_configuration(name).expect("stacked sets build") });
        }
    }
    out
}

/// Levels `L_0..L_h` of `w` elements each (level `k` is `k*w..(k+1)*w`),
/// consecutive levels joined as `kinds[k]` prescribes.
pub fn stacked_max_locked(w: usize, kinds: &[LayerKind]) -> Poset {
    let mut pairs = Vec::new();
    for (k, kind) in kinds.iter().enumerate() {
        for i in 0..w {
            for j in 0..w {
                let joined = match kind {
                    LayerKind::S => i != j,
                    LayerKind::C2 => i == j,
                };
                if joined {
                    pairs.push((k * w + i, (k + 1) * w + j));
                }
            }
        }
    }
    Poset::from_cover_pairs(w * (kinds.len() + 1), &pairs).expect("stacked levels are acyclic")
}

/// Coconnected, no point fixed by all of `Aut(P)`, and either width 2
/// with exactly two automorphisms, or a rank level `R_k` with
/// `α(R_k) >= (w-1)!` (`w >= 3`, `w != 4`) or `α(R_k) > 8` (`w = 4`).
pub fn is_max_locked(p: &Poset) -> bool {
    if p.len() < 2 || !p.is_coconnected() {
        return false;
    }
    let Ok(g) = automorphism_group(p) else {
        return false;
    };
    is_max_locked_with_group(p, &g)
}

pub(crate) fn is_max_locked_with_group(p: &Poset, g: &PermGroup) -> bool {
    if p.len() < 2 || !p.is_coconnected() || !g.fixed_points().is_empty() {
        return false;
    }
    let w = p.width();
    match w {
        0 | 1 => false,
        2 => *g.order() == BigUint::from(2u32),
        _ => {
            let levels = p.rank_decomposition().levels;
            let threshold = if w == 4 { BigUint::from(9u32) } else { factorial(w as u64 - 1) };
            levels.iter().any(|l| alpha_in_group(g, &l.iter().copied().collect()) >= threshold)
        }
    }
}

/// For a max-locked `P`: every consecutive pair of rank levels induces
/// `S_w` or `wC_2`, and `|Aut(P)| = w!`.
pub fn verify_max_locked_structure(p: &Poset) -> Result<bool> {
    if !is_max_locked(p) {
        return Err(Error::NotMaxLocked);
    }
    let w = p.width();
    let s_w = canonical_form(&Poset::standard_example(w), None)?;
    let c_w = canonical_form(&Poset::disjoint_chains(w, 2), None)?;
    let levels = p.rank_decomposition().levels;
    for pair in levels.windows(2) {
        let elements: Vec<usize> = pair.concat();
        let f = canonical_form(&p.induced(&elements), None)?;
        if f != s_w && f != c_w {
            return Ok(false);
        }
    }
    Ok(*automorphism_group(p)?.order() == factorial(w as u64))
}

/// An order isomorphism (or, with `allow_dual`, an anti-isomorphism)
/// mapping blocks onto blocks.
pub fn structured_isomorphic(a: &StructuredPoset, b: &StructuredPoset, allow_dual: bool) -> Result<bool> {
    if a.len() != b.len() || a.structure().len() != b.structure().len() {
        return Ok(false);
    }
    let fa = canonical_form(a.poset(), Some(a.structure()))?;
    if fa == canonical_form(b.poset(), Some(b.structure()))? {
        return Ok(true);
    }
    Ok(allow_dual && fa == canonical_form(&b.poset().dual(), Some(b.structure()))?)
}

struct NamedForm {
    name: CatalogName,
    n: usize,
    blocks: usize,
    forms: [CanonicalForm; 2],
}

fn named_forms() -> &'static [NamedForm] {
    static FORMS: OnceLock<Vec<NamedForm>> = OnceLock::new();
    FORMS.get_or_init(|| {
        CatalogName::NAMED
            .iter()
            .map(|&name| {
                let m = named_configuration(name).expect("named configurations build");
                let d = m.structure();
                NamedForm {
                    name,
                    n: m.len(),
                    blocks: d.len(),
                    forms: [
                        canonical_form(m.poset(), Some(d)).expect("small"),
                        canonical_form(&m.poset().dual(), Some(d)).expect("small"),
                    ],
                }
            })
            .collect()
    })
}

/// The catalog name of `s` if it is max-locked of height 1 or structured
/// (dually) isomorphic to a named configuration.
pub fn forbidden_configuration_match(s: &StructuredPoset) -> Option<CatalogName> {
    let p = s.poset();
    if p.height() == 1 && s.flags().max_locked {
        let w = p.width();
        let form = canonical_form(p, None).ok()?;
        let kind = if Some(&form) == canonical_form(&Poset::standard_example(w), None).ok().as_ref() {
            Some(LayerKind::S)
        } else if Some(&form) == canonical_form(&Poset::disjoint_chains(w, 2), None).ok().as_ref() {
            Some(LayerKind::C2)
        } else {
            None
        };
        return Some(CatalogName::MaxLockedH1 { w, kind });
    }
    let candidates: Vec<&NamedForm> =
        named_forms().iter().filter(|f| f.n == s.len() && f.blocks == s.structure().len()).collect();
    if candidates.is_empty() {
        return None;
    }
    let form = canonical_form(p, Some(s.structure())).ok()?;
    candidates.iter().find(|f| f.forms.contains(&form)).map(|f| f.name)
}

/// The 8-crown with the pairwise block structure under which every
/// structure-respecting endomorphism is an automorphism.
pub fn locked_crown() -> StructuredPoset {
    // b1..b4 = 0..3, t1..t4 = 4..7
    structured(
        8,
        &[(0, 4), (0, 6), (1, 5), (1, 7), (2, 6), (2, 5), (3, 7), (3, 4)],
        &[&[4, 5], &[6, 7], &[0, 1], &[2, 3]],
    )
}

/// A 27-element poset with nine 3-element orbits forming two
/// interdependent orbit unions.
///
/// Layout: `A = 0..3`, `B = 3..6`, `C = 6..9`, `D = 9..12`, `M = 12..15`,
/// `Ã = 15..18`, `B̃ = 18..21`, `C̃ = 21..24`, `D̃ = 24..27`.
pub fn transmit_drive() -> Poset {
    let mut pairs = Vec::new();
    let (a, b, c, d, m) = (0, 3, 6, 9, 12);
    let (at, bt, ct, dt) = (15, 18, 21, 24);
    for i in 0..3 {
        let next = (i + 1) % 3;
        let prev = (i + 2) % 3;
        pairs.extend([(a + i, b + i), (a + i, b + next)]);
        pairs.extend([(c + i, d + i), (c + i, d + next)]);
        pairs.extend([(at + i, bt + i), (at + i, bt + prev)]);
        pairs.extend([(ct + i, dt + i), (ct + i, dt + prev)]);
        pairs.extend([(m + i, b + i), (m + i, bt + i), (m + i, bt + next)]);
        pairs.extend([(c + i, dt + i), (ct + i, d + i)]);
        for j in 0..3 {
            pairs.push((b + i, c + j));
            pairs.push((bt + i, ct + j));
        }
    }
    Poset::from_cover_pairs(27, &pairs).expect("acyclic")
}
