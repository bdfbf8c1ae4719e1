//! Exact factorial arithmetic, adequate-bound certificates and the ratio
//! of automorphisms to endomorphisms.
//!
//! A structured poset `(P, D)` is offset by `o` from being `w`-adequately
//! bounded when some `w_1, …, w_M ∈ {0, …, w−1}` satisfy
//! `|Aut_D(P)| ≤ Π w_j!` and `Σ w_j ≤ ⌊(|P| − |D| + o)/2⌋`. Only the
//! multiset of `w_j` matters, and parts below 2 contribute nothing.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::catalog::forbidden_configuration_match;
use crate::endo::{endomorphism_count_capped, endomorphism_count_respecting_capped};
use crate::error::{Error, Result};
use crate::orbit::{interdependent_orbit_unions, StructuredPoset};
use crate::poset::Poset;
use crate::prune::{prune_components, PruneDecomposition};

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn factorial_product(parts: &[u64]) -> BigUint {
    parts.iter().fold(BigUint::one(), |acc, &k| acc * factorial(k))
}

/// Compares `Π b_j!` with `(Σ b_j − m)!` for a sorted vector of length
/// `m ≥ 2` with entries at least 2.
pub fn factorial_product_compare(b: &[u64]) -> Result<Ordering> {
    if b.len() < 2 || b.iter().any(|&x| x < 2) || b.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::BadVector(b.iter().map(|&x| x as u32).collect()));
    }
    let sum: u64 = b.iter().sum();
    Ok(factorial_product(b).cmp(&factorial(sum - b.len() as u64)))
}

/// Vectors where the product exceeds `(Σ b_j − m)!`: `(2, n)`, `(3, 3)`,
/// `(3, 4)` and `(2, 2, 2)`.
pub fn is_factorial_product_exception(b: &[u64]) -> bool {
    matches!(b, [2, _] | [3, 3] | [3, 4] | [2, 2, 2])
}

/// The two vectors with `Π b_j! = (Σ b_j − m)!`.
pub fn is_factorial_product_equality(b: &[u64]) -> bool {
    matches!(b, [2, 2, 3] | [3, 5])
}

/// `k! ((n/k)!)^k < (n−1)!` for a nontrivial divisor `k` of `n ≥ 6`.
pub fn divisor_inequality_check(n: u64, k: u64) -> Result<bool> {
    if n < 6 || k <= 1 || k >= n || !n.is_multiple_of(k) {
        return Err(Error::BadDivisor { n, k });
    }
    let lhs = factorial(k) * Pow::pow(factorial(n / k), k as u32);
    Ok(lhs < factorial(n - 1))
}

/// `⌊(len − blocks + o)/2⌋`.
pub fn adequate_budget(len: usize, blocks: usize, o: i64) -> i64 {
    (len as i64 - blocks as i64 + o).div_euclid(2)
}

/// Parts at most `w − 1` summing to `sum` with the largest factorial
/// product: as many `w − 1` as fit, then the remainder. Swapping a unit from
/// a smaller part into a larger one never lowers the product, so this is
/// optimal. Parts below 2 are dropped.
pub fn greedy_parts(sum: u64, w: u64) -> Vec<u64> {
    let cap = w.saturating_sub(1);
    if cap < 2 {
        return Vec::new();
    }
    let mut parts = vec![cap; (sum / cap) as usize];
    if sum % cap >= 2 {
        parts.push(sum % cap);
    }
    parts
}

/// Smallest-sum parts in `{0, …, w−1}` whose factorial product reaches
/// `bound`, provided that sum is at most `limit`.
pub fn minimal_parts(bound: &BigUint, w: u64, limit: Option<i64>) -> Option<Vec<u64>> {
    if bound.is_one() {
        return (limit.is_none_or(|l| l >= 0)).then(Vec::new);
    }
    if w < 3 {
        return None;
    }
    let mut sum = 2u64;
    loop {
        if limit.is_some_and(|l| sum as i64 > l) {
            return None;
        }
        let parts = greedy_parts(sum, w);
        if &factorial_product(&parts) >= bound {
            return Some(parts);
        }
        sum += 1;
    }
}

/// How a certificate was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateRoute {
    /// A max-locked union: a single part equal to its width.
    MaxLocked,
    /// Two blocks of minimal and maximal elements: a single part from the
    /// smaller block.
    TwoOrbit,
    /// Parts for the compacted remainder followed by parts for the pruned side.
    Prune { removed: usize },
    /// The smallest-sum vector covering `|Aut_D|` directly.
    Direct,
}

/// Witness that a structured poset is offset by `offset` from being
/// `w`-adequately bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCertificate {
    pub w: u64,
    pub offset: i64,
    pub w_values: Vec<u64>,
    pub product: BigUint,
    pub budget: i64,
    pub route: CertificateRoute,
}

impl BoundCertificate {
    fn build(w: u64, offset: i64, w_values: Vec<u64>, budget: i64, route: CertificateRoute) -> Self {
        let product = factorial_product(&w_values);
        BoundCertificate { w, offset, w_values, product, budget, route }
    }

    pub fn sum(&self) -> i64 {
        self.w_values.iter().sum::<u64>() as i64
    }

    /// The defining inequalities against a given automorphism count.
    pub fn is_valid_for(&self, aut_order: &BigUint) -> bool {
        self.w_values.iter().all(|&x| x < self.w)
            && self.sum() <= self.budget
            && &self.product >= aut_order
            && self.product == factorial_product(&self.w_values)
    }
}

/// Checks whether `parts` certify `(len, blocks, aut)` at offset `o`.
pub fn parts_certify(parts: &[u64], w: u64, len: usize, blocks: usize, aut: &BigUint, o: i64) -> bool {
    BoundCertificate::build(w, o, parts.to_vec(), adequate_budget(len, blocks, o), CertificateRoute::Direct)
        .is_valid_for(aut)
}

/// Tries the structural routes first and falls back to the smallest-sum
/// vector, so `None` means no vector exists within the budget.
pub fn find_certificate(s: &StructuredPoset, w: u64, o: i64) -> Option<BoundCertificate> {
    let budget = adequate_budget(s.len(), s.structure().len(), o);
    let aut = s.aut().order();
    let accept = |parts: Vec<u64>, route| {
        let c = BoundCertificate::build(w, o, parts, budget, route);
        c.is_valid_for(aut).then_some(c)
    };
    let flags = s.flags();
    if flags.max_locked {
        if let Some(c) = accept(vec![s.poset().width() as u64], CertificateRoute::MaxLocked) {
            return Some(c);
        }
    }
    if let Some(parts) = two_orbit_parts(s) {
        if let Some(c) = accept(parts, CertificateRoute::TwoOrbit) {
            return Some(c);
        }
    }
    if let Some((removed, parts)) = prune_parts(s, w) {
        if let Some(c) = accept(parts, CertificateRoute::Prune { removed }) {
            return Some(c);
        }
    }
    minimal_parts(aut, w, Some(budget)).and_then(|parts| accept(parts, CertificateRoute::Direct))
}

/// `[|B|]` when the minimal block `B` is smaller than the maximal block
/// `T`, and `[|B| − 1]` when they have equal size.
fn two_orbit_parts(s: &StructuredPoset) -> Option<Vec<u64>> {
    let blocks = s.structure().blocks();
    if blocks.len() != 2 || s.poset().height() != 1 {
        return None;
    }
    let minimal = s.poset().minimal_elements();
    let (b, t) = if blocks[0].is_subset(&minimal) { (&blocks[0], &blocks[1]) } else { (&blocks[1], &blocks[0]) };
    if !b.is_subset(&minimal) || !t.is_subset(&s.poset().maximal_elements()) {
        return None;
    }
    let (small, large) = (b.len().min(t.len()) as u64, b.len().max(t.len()) as u64);
    Some(vec![if small < large { small } else { small.saturating_sub(1) }])
}

/// Removes the smallest block that is not a cutvertex and concatenates the
/// smallest-sum parts for `Aut_{D_n}(U_n)` and `Aut_{D_Q}(Q)`.
fn prune_parts(s: &StructuredPoset, w: u64) -> Option<(usize, Vec<u64>)> {
    let flags = s.flags();
    if !(flags.tight && flags.is_iou) || s.structure().len() < 3 {
        return None;
    }
    let graph = s.orbit_graph();
    let removed = (0..graph.vertices).find(|&b| !graph.is_cutvertex(b))?;
    let pd = prune_components(s, removed).ok()?.swap_remove(0);
    let mut parts = minimal_parts(pd.un.aut().order(), w, None)?;
    parts.extend(minimal_parts(pd.q.aut().order(), w, None)?);
    Some((removed, parts))
}

/// `T_q` for one decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InductionBudget {
    pub q: i64,
    pub t_q: i64,
}

/// `T_q = ⌊½((Σ_{j>n}|D_j| − (m−n)) + (|D_n| − |S(D_n)|) + (Σ_{j=s}^{n−1}|D_j| − ℓ_Q) + q)⌋`.
pub fn induction_budget(pd: &PruneDecomposition, q: i64) -> InductionBudget {
    let others = pd.others_len as i64 - pd.others.len() as i64;
    let removed = pd.removed_len as i64 - pd.separation.len() as i64;
    let adjacent = pd.adjacent_len as i64 - pd.ell_q as i64;
    InductionBudget { q, t_q: (others + removed + adjacent + q).div_euclid(2) }
}

/// Parts showing `(Q, D_Q)` is induction `w`-adequately `q`-bounded.
pub fn induction_certificate(pd: &PruneDecomposition, w: u64, q: i64) -> Option<Vec<u64>> {
    minimal_parts(pd.q.aut().order(), w, Some(induction_budget(pd, q).t_q))
}

/// Outcome of the three combination rules on one decomposition. `None`
/// marks a rule whose hypothesis fails on the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationReport {
    /// `|Aut_D(U)| ≤ |Aut_{D_n}(U_n)|` and `U_n` bounded at offset `o` give
    /// `U` bounded at offset `o − (|D_n| − 1)`.
    pub without_q: Option<bool>,
    /// `U_n` bounded at `o` and `Q` induction `q`-bounded give `U` bounded
    /// at `o + q − (|S(D_n)| − 1)`.
    pub with_q: Option<bool>,
    /// `o = 1`, `Q` induction `(|S(D_n)| − 1)`-bounded and an odd size sum
    /// give `U` bounded at offset 0.
    pub odd_sum: Option<bool>,
}

impl CombinationReport {
    pub fn holds(&self) -> bool {
        [self.without_q, self.with_q, self.odd_sum].iter().all(|r| *r != Some(false))
    }
}

pub fn combination_rules(s: &StructuredPoset, pd: &PruneDecomposition, w: u64, o: i64, q: i64) -> CombinationReport {
    let aut_u = s.aut().order();
    let len = s.len();
    let blocks = s.structure().len();
    let separation = pd.separation.len() as i64;
    let un_parts = find_certificate(&pd.un, w, o).map(|c| c.w_values);

    let without_q = match &un_parts {
        Some(parts) if aut_u <= pd.un.aut().order() => {
            Some(parts_certify(parts, w, len, blocks, aut_u, o - (pd.removed_len as i64 - 1)))
        }
        _ => None,
    };
    let combined = |q_parts: &[u64]| un_parts.as_ref().map(|u| [u.as_slice(), q_parts].concat());
    let with_q = induction_certificate(pd, w, q)
        .and_then(|qp| combined(&qp))
        .map(|parts| parts_certify(&parts, w, len, blocks, aut_u, o + q - (separation - 1)));
    let odd = (pd.others_len - pd.others.len()) + (pd.removed_len - 1) + (pd.adjacent_len - pd.ell_q);
    let odd_sum = if o == 1 && odd % 2 == 1 {
        induction_certificate(pd, w, separation - 1)
            .and_then(|qp| combined(&qp))
            .map(|parts| parts_certify(&parts, w, len, blocks, aut_u, 0))
    } else {
        None
    };
    CombinationReport { without_q, with_q, odd_sum }
}

/// The combination rules on every decomposition at `removed`.
pub fn verify_combination_rules(s: &StructuredPoset, removed: usize, w: u64, o: i64, q: i64) -> Result<bool> {
    Ok(prune_components(s, removed)?.iter().all(|pd| combination_rules(s, pd, w, o, q).holds()))
}

/// A flexible tight interdependent orbit union that is not a forbidden
/// configuration is `max{w(U), 5}`-adequately bounded.
pub fn verify_allowedconf(s: &StructuredPoset) -> Result<bool> {
    let f = s.flags();
    if !(f.flexible && f.tight) {
        return Err(Error::NotFlexibleTightIou);
    }
    if forbidden_configuration_match(s).is_some() {
        return Ok(true);
    }
    let w = s.poset().width().max(5) as u64;
    Ok(find_certificate(s, w, 0).is_some())
}

/// An exact count, or a lower bound when the exact count exceeded its cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Count {
    Exact(BigUint),
    LowerBound(BigUint),
}

impl Count {
    pub fn value(&self) -> &BigUint {
        match self {
            Count::Exact(v) | Count::LowerBound(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Count::Exact(_))
    }
}

/// `⌈2^(h n/(h+1))⌉`, the endomorphism floor for height `h`.
pub fn endomorphism_floor(p: &Poset) -> BigUint {
    let h = p.height() as u32;
    let target: BigUint = Pow::pow(BigUint::from(2u32), h * p.len() as u32);
    let root = target.nth_root(h + 1);
    if Pow::pow(&root, h + 1) < target {
        root + 1u32
    } else {
        root
    }
}

fn end_count(p: &Poset, exact: Result<BigUint>) -> Result<Count> {
    match exact {
        Ok(v) => Ok(Count::Exact(v)),
        Err(Error::CapExceeded { .. }) => Ok(Count::LowerBound(endomorphism_floor(p))),
        Err(e) => Err(e),
    }
}

/// One non-singleton natural interdependent orbit union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IouFactor {
    pub elements: Vec<usize>,
    pub aut: BigUint,
    pub end: Count,
}

impl IouFactor {
    /// `|Aut_{N|U}| / |End_{N|U}|`; an upper bound when `end` is a bound.
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.aut.clone().into(), self.end.value().clone().into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioReport {
    pub aut: BigUint,
    pub end: Count,
    pub factors: Vec<IouFactor>,
    /// `|Aut(P)|/|End(P)| ≤ Π factors`, or `None` when bounds leave it
    /// undecided.
    pub holds: Option<bool>,
}

impl RatioReport {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.aut.clone().into(), self.end.value().clone().into())
    }

    pub fn factor_product(&self) -> BigRational {
        self.factors.iter().fold(BigRational::one(), |acc, f| acc * f.ratio())
    }
}

/// Compares `|Aut(P)|/|End(P)|` with the product of the per-union factors.
/// Endomorphism counts above `end_cap` elements become lower bounds.
pub fn ratio_report(p: &Poset, end_cap: usize) -> Result<RatioReport> {
    let s = StructuredPoset::natural(p.clone())?;
    let end = end_count(p, endomorphism_count_capped(p, end_cap))?;
    let mut factors = Vec::new();
    for u in interdependent_orbit_unions(&s).into_iter().filter(|u| !u.is_singleton()) {
        let sp = &u.structured;
        let e = end_count(sp.poset(), endomorphism_count_respecting_capped(sp.poset(), sp.structure(), end_cap))?;
        factors.push(IouFactor { elements: u.elements.clone(), aut: sp.aut().order().clone(), end: e });
    }
    let mut report = RatioReport { aut: s.aut().order().clone(), end, factors, holds: None };
    // A lower bound on End(P) only raises the left side, so a pass stays a
    // pass; bounded factors leave the right side unknown.
    if report.factors.iter().all(|f| f.end.is_exact()) {
        let holds = report.ratio() <= report.factor_product();
        report.holds = (holds || report.end.is_exact()).then_some(holds);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{named_configuration, stacked_max_locked, CatalogName, LayerKind};
    use crate::enumerate::{enumerate_flexible_tight_ious, enumerate_posets};
    use crate::prune::admissible_removals;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn factorial_compare_examples() {
        assert_eq!(factorial_product_compare(&[2, 2, 3]).unwrap(), Ordering::Equal);
        assert_eq!(factorial_product_compare(&[3, 5]).unwrap(), Ordering::Equal);
        assert_eq!(factorial_product_compare(&[2, 2, 2, 2]).unwrap(), Ordering::Less);
        assert!(factorial_product_compare(&[3, 2]).is_err());
        assert!(factorial_product_compare(&[1, 3]).is_err());
        assert!(factorial_product_compare(&[4]).is_err());
    }

    fn sorted_vectors(max_sum: u64) -> Vec<Vec<u64>> {
        fn extend(prefix: &mut Vec<u64>, min: u64, remaining: u64, out: &mut Vec<Vec<u64>>) {
            if prefix.len() >= 2 {
                out.push(prefix.clone());
            }
            for x in min..=remaining {
                prefix.push(x);
                extend(prefix, x, remaining - x, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        extend(&mut Vec::new(), 2, max_sum, &mut out);
        out
    }

    /// Products and factorials as plain `u128` where they fit, so the
    /// comparison is independent of the big-integer path.
    fn small_factorial(n: u64) -> Option<u128> {
        (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
    }

    #[test]
    fn factorial_compare_sweep() {
        for b in sorted_vectors(25) {
            let got = factorial_product_compare(&b).unwrap();
            if let (Some(lhs), Some(rhs)) = (
                b.iter().try_fold(1u128, |acc, &x| small_factorial(x).and_then(|f| acc.checked_mul(f))),
                small_factorial(b.iter().sum::<u64>() - b.len() as u64),
            ) {
                assert_eq!(got, lhs.cmp(&rhs), "{b:?}");
            }
            if is_factorial_product_exception(&b) {
                assert_eq!(got, Ordering::Greater, "{b:?}");
            } else if is_factorial_product_equality(&b) {
                assert_eq!(got, Ordering::Equal, "{b:?}");
            } else {
                assert_eq!(got, Ordering::Less, "{b:?}");
            }
        }
    }

    #[test]
    fn divisor_examples_and_sweep() {
        assert!(divisor_inequality_check(6, 2).unwrap());
        assert!(divisor_inequality_check(6, 3).unwrap());
        assert_eq!(factorial(2) * Pow::pow(factorial(3), 2u32), big(72));
        assert!(matches!(divisor_inequality_check(6, 4), Err(Error::BadDivisor { .. })));
        assert!(matches!(divisor_inequality_check(4, 2), Err(Error::BadDivisor { .. })));
        for n in 6..=60 {
            for k in (2..n).filter(|k| n % k == 0) {
                assert!(divisor_inequality_check(n, k).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn greedy_is_optimal_for_small_sums() {
        // Oracle: best product over all multisets of parts in 2..w-1.
        fn best(sum: u64, cap: u64) -> BigUint {
            if sum < 2 {
                return BigUint::one();
            }
            (2..=cap.min(sum)).map(|k| factorial(k) * best(sum - k, k)).max().unwrap_or_else(BigUint::one)
        }
        for w in 3..=7 {
            for sum in 0..=16 {
                assert_eq!(
                    factorial_product(&greedy_parts(sum, w)),
                    best(sum, w - 1).max(BigUint::one()),
                    "w={w} sum={sum}"
                );
            }
        }
    }

    #[test]
    fn budget_floors_negative_values() {
        assert_eq!(adequate_budget(8, 2, 0), 3);
        assert_eq!(adequate_budget(2, 2, -1), -1);
        assert_eq!(adequate_budget(2, 2, -2), -1);
    }

    #[test]
    fn crown_needs_offset_four() {
        let c8 = named_configuration(CatalogName::C8).unwrap();
        for o in 0..4 {
            assert!(find_certificate(&c8, 4, o).is_none(), "o={o}");
        }
        let c = find_certificate(&c8, 4, 4).unwrap();
        assert!(c.is_valid_for(&big(8)));
        assert_eq!(c.budget, 5);
    }

    #[test]
    fn two_chains_need_offset_one() {
        let s = StructuredPoset::natural(Poset::disjoint_chains(2, 3)).unwrap();
        assert!(find_certificate(&s, 3, 0).is_none());
        assert!(find_certificate(&s, 3, 1).is_some());
    }

    #[test]
    fn max_locked_single_part() {
        for a in 2..=4usize {
            for m in 3..=4usize {
                if (m, a) == (3, 2) {
                    continue;
                }
                for kind in [LayerKind::S, LayerKind::C2] {
                    if a == 2 && kind == LayerKind::S {
                        continue;
                    }
                    let s = StructuredPoset::natural(stacked_max_locked(a, &vec![kind; m - 1])).unwrap();
                    let c = find_certificate(&s, a as u64 + 1, 0).unwrap_or_else(|| panic!("a={a} m={m}"));
                    assert_eq!(c.route, CertificateRoute::MaxLocked);
                    assert_eq!(c.w_values, vec![a as u64]);
                }
            }
        }
    }

    struct TableRow {
        factors: &'static [u64],
        relation: Ordering,
        factorials: &'static [u64],
        sizes: (u64, u64),
        budget: i64,
    }

    const fn row(
        factors: &'static [u64],
        relation: Ordering,
        factorials: &'static [u64],
        sizes: (u64, u64),
        budget: i64,
    ) -> TableRow {
        TableRow { factors, relation, factorials, sizes, budget }
    }

    /// Rows pair a product of `|Aut|` factors with a factorial vector whose
    /// sum fits the row budget. The tables use the budgets
    /// `⌊(Q1+Q2−6)/2⌋`, `⌊(Q1+Q2−4)/2⌋` and `⌊(|U|−5)/2⌋`.
    const TWO_BAD_TABLES: [(i64, [TableRow; 6]); 3] = [
        (
            -6,
            [
                row(&[36, 36], Ordering::Less, &[4, 5], (12, 12), 9),
                row(&[36, 4], Ordering::Equal, &[4, 3], (12, 8), 7),
                row(&[36, 2], Ordering::Less, &[5], (12, 6), 6),
                row(&[4, 4], Ordering::Less, &[4], (8, 8), 5),
                row(&[4, 2], Ordering::Less, &[4], (8, 6), 4),
                row(&[2, 2], Ordering::Less, &[3], (6, 6), 3),
            ],
        ),
        (
            -4,
            [
                row(&[2, 36, 36], Ordering::Less, &[4, 5], (12, 12), 10),
                row(&[2, 36, 4], Ordering::Less, &[4, 4], (12, 8), 8),
                row(&[2, 36, 2], Ordering::Less, &[5, 2], (12, 6), 7),
                row(&[2, 4, 4], Ordering::Less, &[4, 2], (8, 8), 6),
                row(&[2, 4, 2], Ordering::Less, &[4], (8, 6), 5),
                row(&[2, 2, 2], Ordering::Less, &[4], (6, 6), 4),
            ],
        ),
        (
            -5,
            [
                row(&[4, 36, 36], Ordering::Less, &[5, 5], (28, 0), 11),
                row(&[4, 36, 4], Ordering::Equal, &[4, 4], (24, 0), 9),
                row(&[4, 36, 2], Ordering::Less, &[4, 4], (22, 0), 8),
                row(&[4, 4, 4], Ordering::Less, &[4, 3], (20, 0), 7),
                row(&[4, 4, 2], Ordering::Less, &[4, 2], (18, 0), 6),
                row(&[4, 2, 2], Ordering::Less, &[4], (16, 0), 5),
            ],
        ),
    ];

    #[test]
    fn two_bad_tables() {
        for (shift, rows) in &TWO_BAD_TABLES {
            for r in rows {
                let product: u64 = r.factors.iter().product();
                assert_eq!(big(product).cmp(&factorial_product(r.factorials)), r.relation, "{:?}", r.factors);
                let total = (r.sizes.0 + r.sizes.1) as i64;
                assert_eq!((total + shift).div_euclid(2), r.budget, "{:?}", r.factors);
                assert!(r.factorials.iter().sum::<u64>() as i64 <= r.budget, "{:?}", r.factors);
            }
        }
    }

    #[test]
    fn induction_budget_vanishes_for_singleton_classes() {
        for n in 6..=8 {
            for s in enumerate_flexible_tight_ious(n).unwrap() {
                for b in admissible_removals(&s) {
                    for pd in prune_components(&s, b).unwrap() {
                        let trivial = pd.autonomous_antichains.iter().flatten().all(|c| c.len() == 1);
                        if trivial && pd.separation.len() == pd.removed_len && pd.is_pendant_side() {
                            assert_eq!(induction_budget(&pd, 0).t_q, 0);
                        }
                        let t = induction_budget(&pd, 0).t_q;
                        assert_eq!(induction_budget(&pd, 2).t_q, t + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn allowed_configurations_up_to_eight() {
        for n in 1..=8 {
            for s in enumerate_flexible_tight_ious(n).unwrap() {
                assert!(verify_allowedconf(&s).unwrap(), "{:?} {:?}", s.poset(), s.structure());
            }
        }
        let c8 = named_configuration(CatalogName::C8).unwrap();
        assert!(verify_allowedconf(&c8).unwrap());
        let rigid = StructuredPoset::natural(Poset::chain(3)).unwrap();
        assert!(matches!(verify_allowedconf(&rigid), Err(Error::NotFlexibleTightIou)));
    }

    #[test]
    fn combination_rules_on_small_unions() {
        let mut applied = [0usize; 3];
        for n in 6..=8 {
            for s in enumerate_flexible_tight_ious(n).unwrap() {
                let w = s.poset().width().max(5) as u64;
                for b in admissible_removals(&s) {
                    for pd in prune_components(&s, b).unwrap() {
                        for o in 0..=2 {
                            for q in -1..=pd.separation.len() as i64 {
                                let r = combination_rules(&s, &pd, w, o, q);
                                assert!(r.holds(), "{:?} {:?} block {b} o={o} q={q}: {r:?}", s.poset(), s.structure());
                                for (k, x) in [r.without_q, r.with_q, r.odd_sum].iter().enumerate() {
                                    applied[k] += x.is_some() as usize;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(applied[1] > 0, "{applied:?}");
    }

    #[test]
    fn ratio_examples() {
        let p = Poset::disjoint_chains(3, 2);
        let r = ratio_report(&p, 16).unwrap();
        assert_eq!(r.factors.len(), 1);
        assert!(r.factors[0].ratio() <= BigRational::new(6.into(), 27.into()));
        assert_eq!(r.holds, Some(true));

        let rigid = Poset::chain(4);
        let r = ratio_report(&rigid, 16).unwrap();
        assert!(r.factors.is_empty());
        assert_eq!(r.aut, big(1));
        assert!(r.end.value() >= &endomorphism_floor(&rigid));

        let wide = Poset::antichain(20);
        let r = ratio_report(&wide, 16).unwrap();
        assert!(!r.end.is_exact());
        assert_eq!(r.end.value(), &big(1));
    }

    #[test]
    fn ratio_inequality_up_to_six() {
        for n in 0..=6 {
            for p in enumerate_posets(n, None).unwrap() {
                assert_eq!(ratio_report(&p, 16).unwrap().holds, Some(true), "{p:?}");
            }
        }
    }

    #[test]
    fn floor_rounds_up() {
        // Height 1, four elements: 2^(4/2) = 4 exactly.
        assert_eq!(endomorphism_floor(&Poset::disjoint_chains(2, 2)), big(4));
        // Height 2, three elements: 2^(2) = 4.
        assert_eq!(endomorphism_floor(&Poset::chain(3)), big(4));
        // Height 1, three elements: ⌈2^1.5⌉ = 3.
        assert_eq!(endomorphism_floor(&Poset::from_cover_pairs(3, &[(0, 1), (0, 2)]).unwrap()), big(3));
    }
}
