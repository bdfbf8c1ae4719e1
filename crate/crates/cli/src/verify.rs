//! Exhaustive property suites. Every suite is a list of independent tasks;
//! workers pull tasks by index and results are merged in task order, so
//! the summary does not depend on the number of workers.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::thread;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde_json::{json, Value};

use orbitlock::bounds::{
    divisor_inequality_check, factorial_product_compare, find_certificate, induction_certificate,
    is_factorial_product_equality, is_factorial_product_exception, ratio_report, verify_allowedconf,
    verify_combination_rules,
};
use orbitlock::catalog::{
    build_catalog, forbidden_configuration_match, locked_crown, named_configuration, stacked_max_locked,
    verify_max_locked_structure, CatalogName, LayerKind,
};
use orbitlock::endo::{endo_lower_bound_holds, endomorphism_count, endomorphism_count_respecting, DEFAULT_END_CAP};
use orbitlock::enumerate::{antichains, enumerate_flexible_tight_ious, enumerate_posets};
use orbitlock::group::{alpha_in_group, automorphism_group};
use orbitlock::orbit::{product_decomposition_check, union_extension_check, union_placement_check, StructuredPoset};
use orbitlock::prune::{admissible_removals, prune_components, prune_report};
use orbitlock::{BitSet, Error, Poset};

use crate::Failure;

/// Failures listed per lemma; the counts are always complete.
const FAILURES_SHOWN: usize = 20;

enum Verdict {
    Pass,
    Fail(String),
}

fn verdict(ok: bool, detail: impl FnOnce() -> String) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail(detail())
    }
}

/// One unit of work: `(lemma index, verdict)` pairs.
type Task = Box<dyn Fn() -> Vec<(usize, Verdict)> + Send + Sync>;

struct Suite {
    lemmas: &'static [&'static str],
    tasks: Vec<Task>,
}

pub struct LemmaTally {
    pub name: &'static str,
    pub passed: u64,
    pub failed: u64,
    pub failures: Vec<String>,
}

pub struct Summary {
    pub suite: String,
    pub n_max: usize,
    pub lemmas: Vec<LemmaTally>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.lemmas.iter().all(|l| l.failed == 0)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} (n_max {})\n", self.suite, self.n_max);
        let width = self.lemmas.iter().map(|l| l.name.len()).max().unwrap_or(0);
        for l in &self.lemmas {
            let _ = writeln!(out, "  {:<width$}  passed {:>8}  failed {:>4}", l.name, l.passed, l.failed);
        }
        for l in &self.lemmas {
            for f in &l.failures {
                let _ = writeln!(out, "  FAIL {}: {f}", l.name);
            }
        }
        let _ = writeln!(out, "result: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "suite": self.suite,
            "n_max": self.n_max,
            "passed": self.passed(),
            "lemmas": self.lemmas.iter().map(|l| json!({
                "name": l.name,
                "passed": l.passed,
                "failed": l.failed,
                "failures": l.failures,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs `f` on every item with `jobs` workers; results come back in item order.
fn pool_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let workers = jobs.clamp(1, items.len().max(1));
    let batches: Vec<Vec<(usize, R)>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut got = Vec::new();
                    loop {
                        let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                        if i >= items.len() {
                            break got;
                        }
                        got.push((i, f(&items[i])));
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification worker panicked")).collect()
    });
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    for (i, r) in batches.into_iter().flatten() {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|r| r.expect("every task ran once")).collect()
}

pub fn run_suite(name: &str, n_max: usize, jobs: usize) -> Result<Summary, Failure> {
    let suite = match name {
        "lemmas-core" => lemmas_core(n_max)?,
        "prune" => prune_suite(n_max)?,
        "bounds" => bounds_suite(n_max),
        "catalog" => catalog_suite(n_max),
        "ratios" => ratios_suite(n_max)?,
        _ => return Err(Error::UnknownSuite(name.to_string()).into()),
    };
    let results = pool_map(&suite.tasks, jobs, |task| task());
    let mut lemmas: Vec<LemmaTally> =
        suite.lemmas.iter().map(|&name| LemmaTally { name, passed: 0, failed: 0, failures: Vec::new() }).collect();
    for (lemma, v) in results.into_iter().flatten() {
        let tally = &mut lemmas[lemma];
        match v {
            Verdict::Pass => tally.passed += 1,
            Verdict::Fail(detail) => {
                tally.failed += 1;
                if tally.failures.len() < FAILURES_SHOWN {
                    tally.failures.push(detail);
                }
            }
        }
    }
    Ok(Summary { suite: name.to_string(), n_max, lemmas })
}

fn describe(p: &Poset) -> String {
    format!("n={} covers={:?}", p.len(), p.covers())
}

fn describe_structured(s: &StructuredPoset) -> String {
    let blocks: Vec<Vec<usize>> = s.structure().blocks().iter().map(BitSet::to_vec).collect();
    format!("{} blocks={blocks:?}", describe(s.poset()))
}

fn all_posets(n_max: usize) -> Result<Vec<Arc<Poset>>, Failure> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        out.extend(enumerate_posets(n, None)?.into_iter().map(Arc::new));
    }
    Ok(out)
}

/// Automorphisms that fix everything outside an antichain `A` without a
/// nontrivial order-autonomous antichain are trivial. Inside an antichain,
/// the order-autonomous subsets of size two or more are exactly the sets
/// of pairwise twins, so `A` qualifies when it holds no twin pair.
fn all_but_one_antichain(p: &Poset) -> Result<bool, Failure> {
    let g = automorphism_group(p)?;
    Ok(antichains(p).iter().filter(|a| !a.is_empty()).all(|a| {
        let members = a.to_vec();
        let has_twins = members.iter().enumerate().any(|(i, &x)| members[i + 1..].iter().any(|&y| p.are_twins(x, y)));
        has_twins || g.pointwise_stabilizer_order(&p.ground_set().difference(a)).is_one()
    }))
}

fn lemmas_core(n_max: usize) -> Result<Suite, Failure> {
    let tasks = all_posets(n_max)?
        .into_iter()
        .map(|p| -> Task {
            Box::new(move || {
                let abo = all_but_one_antichain(&p);
                let s = StructuredPoset::natural((*p).clone());
                let product = product_decomposition_check(&p);
                vec![
                    (0, verdict(matches!(abo, Ok(true)), || describe(&p))),
                    (
                        1,
                        verdict(s.as_ref().is_ok_and(|s| union_placement_check(s) && union_extension_check(s)), || {
                            describe(&p)
                        }),
                    ),
                    (2, verdict(matches!(product, Ok(true)), || describe(&p))),
                ]
            })
        })
        .collect();
    Ok(Suite { lemmas: &["allbutoneac", "unionplacement", "getallfromiou"], tasks })
}

const PRUNE_LEMMAS: &[&str] = &[
    "pruneorbit6",
    "pruneorbit1",
    "pruneorbit-structure",
    "pruneorbit7",
    "nontrivgcd",
    "boundsforQ",
    "withandwithoutQ",
    "allowedconf",
];

fn prune_checks(s: &StructuredPoset) -> Vec<(usize, Verdict)> {
    let mut out = Vec::new();
    let blocks = s.structure().blocks();
    let gcd_ok = s.orbit_graph().edges.iter().all(|&(c, d)| blocks[c].len().gcd(&blocks[d].len()) > 1);
    out.push((4, verdict(gcd_ok, || describe_structured(s))));
    let w = s.poset().width().max(5) as u64;
    for b in admissible_removals(s) {
        let Ok(decompositions) = prune_components(s, b) else {
            out.push((0, Verdict::Fail(format!("{} removed {b}: decomposition failed", describe_structured(s)))));
            continue;
        };
        for pd in &decompositions {
            let r = prune_report(s, pd);
            let at = || format!("{} removed {b}", describe_structured(s));
            out.push((0, verdict(r.inequality && r.normal, at)));
            out.push((1, verdict(r.classes_uniform && r.classes_separated, at)));
            out.push((2, verdict(r.projects && r.respects_d_q && r.un_tight_iou && r.q_tight, at)));
            let bounds = [r.separation_bound, r.class_bound, r.singleton_class_bound];
            out.push((3, verdict(bounds.iter().all(|b| *b != Some(false)), at)));
            if pd.is_pendant_side() && pd.nontrivial_ell() >= 3 {
                let top = pd.separation.len() as i64 - 1;
                let ok = (0..=top).any(|q| induction_certificate(pd, w, q).is_some());
                out.push((5, verdict(ok, at)));
            }
        }
        let separation = decompositions.iter().map(|pd| pd.separation.len() as i64).max().unwrap_or(1);
        let rules = (0..=1).all(|o| (0..separation).all(|q| verify_combination_rules(s, b, w, o, q).unwrap_or(false)));
        out.push((6, verdict(rules, || format!("{} removed {b}", describe_structured(s)))));
    }
    out.push((
        7,
        verdict(matches!(verify_allowedconf(s), Ok(true)), || {
            format!("{} |Aut_D|={} no offset-0 certificate at w={w}", describe_structured(s), s.aut().order())
        }),
    ));
    out
}

fn prune_suite(n_max: usize) -> Result<Suite, Failure> {
    let mut tasks: Vec<Task> = Vec::new();
    for n in 1..=n_max {
        for s in enumerate_flexible_tight_ious(n)? {
            let s = Arc::new(s);
            tasks.push(Box::new(move || prune_checks(&s)));
        }
    }
    Ok(Suite { lemmas: PRUNE_LEMMAS, tasks })
}

/// Sorted vectors with entries `>= 2`, length `>= 2` and sum `<= max_sum`.
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

fn bounds_suite(n_max: usize) -> Suite {
    let mut tasks: Vec<Task> = Vec::new();
    for b in sorted_vectors(n_max as u64) {
        tasks.push(Box::new(move || {
            let want = if is_factorial_product_exception(&b) {
                Ordering::Greater
            } else if is_factorial_product_equality(&b) {
                Ordering::Equal
            } else {
                Ordering::Less
            };
            let got = factorial_product_compare(&b);
            vec![(0, verdict(got.as_ref() == Ok(&want), || format!("{b:?}: got {got:?}, want {want:?}")))]
        }));
    }
    for n in 6..=n_max as u64 {
        tasks.push(Box::new(move || {
            (2..n)
                .filter(|k| n % k == 0)
                .map(|k| (1, verdict(matches!(divisor_inequality_check(n, k), Ok(true)), || format!("n={n} k={k}"))))
                .collect()
        }));
    }
    Suite { lemmas: &["factprodcombine", "noverklem"], tasks }
}

const CATALOG_LEMMAS: &[&str] = &[
    "forbconfdef",
    "forboff1from5adeq",
    "forbconfbound",
    "maxlockeddescr",
    "maxlock2lev",
    "maxlockobserv",
    "maxlockh1presrank",
    "EndDlimit",
];

/// `(elements, |Aut_D|)` of the named configurations.
const NAMED_SIZES: [(CatalogName, usize, u64); 13] = [
    (CatalogName::C8, 8, 8),
    (CatalogName::TwoC3, 6, 2),
    (CatalogName::TwoC3Star, 6, 2),
    (CatalogName::TwoV, 6, 2),
    (CatalogName::Hat2V, 8, 4),
    (CatalogName::Bar2V, 8, 4),
    (CatalogName::HatC8, 10, 8),
    (CatalogName::BarC8, 10, 8),
    (CatalogName::Hat4C2, 10, 8),
    (CatalogName::Bar4C2, 10, 8),
    (CatalogName::HatS4, 10, 8),
    (CatalogName::BarS4, 10, 8),
    (CatalogName::TildeS4, 10, 8),
];

fn named_checks(name: CatalogName, n: usize, aut: u64) -> Vec<(usize, Verdict)> {
    let Ok(s) = named_configuration(name) else {
        return vec![(0, Verdict::Fail(format!("{name}: model does not build")))];
    };
    let mut out = Vec::new();
    let sized = s.len() == n && *s.aut().order() == BigUint::from(aut);
    let matched = forbidden_configuration_match(&s) == Some(name);
    out.push((0, verdict(sized && matched, || format!("{name}: n={} |Aut_D|={}", s.len(), s.aut().order()))));
    if s.structure().len() == 3 {
        // Type i: 2^i automorphisms on 4 + 2i points, offset exactly 1.
        let w = s.poset().width().max(5) as u64;
        let typed = (1..=3u32).any(|i| s.len() == 4 + 2 * i as usize && aut == 1 << i);
        let offset_one = find_certificate(&s, w, 0).is_none() && find_certificate(&s, w, 1).is_some();
        out.push((1, verdict(typed && offset_one, || format!("{name}: type or offset mismatch"))));
    }
    let end = endomorphism_count_respecting(s.poset(), s.structure());
    let ok = end.as_ref().is_ok_and(|e| {
        BigRational::new(s.aut().order().clone().into(), e.clone().into()) <= BigRational::new(3.into(), 4.into())
    });
    out.push((2, verdict(ok, || format!("{name}: |Aut_D|/|End_D| above 3/4 ({end:?})"))));
    out
}

/// No two elements of a rank level below the top share their upper covers.
fn upper_covers_distinct(p: &Poset) -> bool {
    let levels = p.rank_decomposition().levels;
    levels[..levels.len().saturating_sub(1)].iter().all(|level| {
        level.iter().enumerate().all(|(i, &x)| level[i + 1..].iter().all(|&y| p.upper_covers(x) != p.upper_covers(y)))
    })
}

fn stacked_checks(w: usize, kinds: &[LayerKind]) -> Vec<(usize, Verdict)> {
    let p = stacked_max_locked(w, kinds);
    let at = || format!("w={w} layers={kinds:?}");
    let described = verify_max_locked_structure(&p).unwrap_or(false);
    let mut out = vec![(3, verdict(described, at)), (5, verdict(upper_covers_distinct(&p), at))];
    if kinds.len() == 1 {
        let alpha = automorphism_group(&p).map(|g| {
            let levels = p.rank_decomposition().levels;
            let set = |k: usize| levels[k].iter().copied().collect::<BitSet>();
            alpha_in_group(&g, &set(0)) == alpha_in_group(&g, &set(1))
        });
        out.push((4, verdict(alpha == Ok(true), at)));
    }
    out
}

/// `n_max` raises the widest stacked family above the default of 6.
fn catalog_suite(n_max: usize) -> Suite {
    let mut tasks: Vec<Task> = Vec::new();
    for (name, n, aut) in NAMED_SIZES {
        tasks.push(Box::new(move || named_checks(name, n, aut)));
    }
    for entry in build_catalog(4).into_iter().skip(CatalogName::NAMED.len()) {
        let entry = Arc::new(entry);
        tasks.push(Box::new(move || {
            let matched = forbidden_configuration_match(&entry.model) == Some(entry.name);
            vec![(0, verdict(matched, || format!("{} does not match itself", entry.name)))]
        }));
    }
    for w in 3..=n_max.max(6) {
        for h in 1..=4u32 {
            for mask in 0..1u32 << h {
                let kinds: Vec<LayerKind> =
                    (0..h).map(|k| if mask >> k & 1 == 1 { LayerKind::S } else { LayerKind::C2 }).collect();
                tasks.push(Box::new(move || stacked_checks(w, &kinds)));
            }
        }
    }
    tasks.push(Box::new(|| {
        (2..=4u32)
            .flat_map(|w| {
                let chains = StructuredPoset::natural(Poset::disjoint_chains(w as usize, 2)).ok();
                let standard = StructuredPoset::natural(Poset::standard_example(w as usize)).ok();
                let end = |s: &Option<StructuredPoset>| {
                    s.as_ref().and_then(|s| endomorphism_count_respecting(s.poset(), s.structure()).ok())
                };
                let (ec, es) = (end(&chains), end(&standard));
                let wb = BigUint::from(w);
                [
                    (
                        6,
                        verdict(ec.as_ref().is_some_and(|e| *e >= Pow::pow(&wb, w)), || {
                            format!("End_N({w}C2) = {ec:?}")
                        }),
                    ),
                    (
                        6,
                        verdict(es.as_ref().is_some_and(|e| *e >= Pow::pow(&wb - 1u32, w)), || {
                            format!("End_N(S_{w}) = {es:?}")
                        }),
                    ),
                ]
            })
            .collect()
    }));
    tasks.push(Box::new(|| {
        let s = locked_crown();
        let end = endomorphism_count_respecting(s.poset(), s.structure());
        vec![(
            7,
            verdict(end.as_ref() == Ok(s.aut().order()), || format!("|Aut_D|={} |End_D|={end:?}", s.aut().order())),
        )]
    }));
    Suite { lemmas: CATALOG_LEMMAS, tasks }
}

fn ratios_suite(n_max: usize) -> Result<Suite, Failure> {
    let tasks = all_posets(n_max)?
        .into_iter()
        .map(|p| -> Task {
            Box::new(move || {
                let ratio = ratio_report(&p, DEFAULT_END_CAP);
                let end = endomorphism_count(&p);
                let aut = automorphism_group(&p);
                let floor = end.as_ref().is_ok_and(|e| endo_lower_bound_holds(&p, e));
                let aut_le_end = matches!((&aut, &end), (Ok(g), Ok(e)) if g.order() <= e);
                vec![
                    (0, verdict(ratio.as_ref().is_ok_and(|r| r.holds == Some(true)), || describe(&p))),
                    (1, verdict(floor, || describe(&p))),
                    (2, verdict(aut_le_end, || describe(&p))),
                ]
            })
        })
        .collect();
    Ok(Suite { lemmas: &["usingEndD", "2tonforbddwidth", "aut-le-end"], tasks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        for jobs in [1, 3, 16] {
            assert_eq!(pool_map(&items, jobs, |x| x * x), items.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }

    #[test]
    fn summaries_do_not_depend_on_jobs() {
        let one = run_suite("lemmas-core", 5, 1).unwrap().to_json();
        let many = run_suite("lemmas-core", 5, 7).unwrap().to_json();
        assert_eq!(one, many);
        assert_eq!(one["passed"], true);
    }

    #[test]
    fn vectors_are_sorted_and_bounded() {
        let v = sorted_vectors(6);
        assert_eq!(v, vec![vec![2, 2], vec![2, 2, 2], vec![2, 3], vec![2, 4], vec![3, 3]]);
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", 3, 1), Err(Failure::Parse(_))));
    }
}
