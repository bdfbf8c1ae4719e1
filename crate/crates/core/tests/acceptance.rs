//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are
//! exact; the only tolerances are the wall-clock budgets below.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Pow;

use orbitlock::bounds::{
    divisor_inequality_check, factorial, factorial_product_compare, find_certificate, is_factorial_product_equality,
    is_factorial_product_exception, ratio_report,
};
use orbitlock::catalog::{
    forbidden_configuration_match, locked_crown, named_configuration, stacked_max_locked, verify_max_locked_structure,
    CatalogName, LayerKind,
};
use orbitlock::endo::{endo_lower_bound_check, endomorphism_count_respecting, DEFAULT_END_CAP};
use orbitlock::enumerate::{enumerate_flexible_tight_ious, for_each_poset};
use orbitlock::orbit::{product_decomposition_check, union_extension_check, union_placement_check, StructuredPoset};
use orbitlock::prune::{admissible_removals, prune_components, prune_report};
use orbitlock::Poset;

const CATALOG_BUDGET: Duration = Duration::from_secs(1);
const RATIO_BUDGET: Duration = Duration::from_secs(10);
const MAX_LOCKED_BUDGET: Duration = Duration::from_secs(30);
const PRODUCT_BUDGET: Duration = Duration::from_secs(600);
const PRUNE_BUDGET: Duration = Duration::from_secs(600);
const ARITHMETIC_BUDGET: Duration = Duration::from_secs(5);
const MAIN_BOUND_BUDGET: Duration = Duration::from_secs(1800);
const END_FLOOR_BUDGET: Duration = Duration::from_secs(120);
const END_CONSTANTS_BUDGET: Duration = Duration::from_secs(60);
const LOCKED_BUDGET: Duration = Duration::from_secs(1);
const RATIO_PROPERTY_BUDGET: Duration = Duration::from_secs(300);

/// Largest flexible tight IOUs examined.
const IOU_MAX: usize = 10;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn catalog_exactness() -> Outcome {
    let mut out = Outcome::new();
    let expected: [(CatalogName, usize, u64); 13] = [
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
    for (name, n, aut) in expected {
        let s = named_configuration(name).unwrap();
        out.check(s.len() == n && s.aut().order() == &big(aut), || {
            format!("{name}: got ({}, {}), want ({n}, {aut})", s.len(), s.aut().order())
        });
    }
    out.detail = "13 configurations".into();
    out
}

fn ratio_bound() -> Outcome {
    let mut out = Outcome::new();
    let limit = BigRational::new(3.into(), 4.into());
    for name in CatalogName::NAMED {
        let s = named_configuration(name).unwrap();
        let end = endomorphism_count_respecting(s.poset(), s.structure()).unwrap();
        let ratio = BigRational::new(s.aut().order().clone().into(), end.clone().into());
        out.check(ratio <= limit, || format!("{name}: {}/{end} > 3/4", s.aut().order()));
    }
    out.detail = "13 configurations, |Aut_D|/|End_D| <= 3/4".into();
    out
}

fn max_locked_family() -> Outcome {
    let mut out = Outcome::new();
    let mut count = 0;
    for w in 3..=6 {
        for h in 1..=4u32 {
            for mask in 0..(1u32 << h) {
                let kinds: Vec<LayerKind> =
                    (0..h).map(|k| if mask >> k & 1 == 1 { LayerKind::S } else { LayerKind::C2 }).collect();
                let p = stacked_max_locked(w, &kinds);
                let ok = verify_max_locked_structure(&p).unwrap_or(false)
                    && orbitlock::group::automorphism_group(&p).unwrap().order() == &factorial(w as u64);
                out.check(ok, || format!("w={w} kinds={kinds:?}"));
                count += 1;
            }
        }
    }
    out.detail = format!("{count} stacked sets");
    out
}

fn product_decomposition() -> Outcome {
    let mut out = Outcome::new();
    let mut count = 0u64;
    for n in 0..=8 {
        for_each_poset(n, None, |p| {
            count += 1;
            let s = StructuredPoset::natural(p.clone()).unwrap();
            let ok = product_decomposition_check(p).unwrap() && union_placement_check(&s) && union_extension_check(&s);
            out.check(ok, || format!("{p:?}"));
        })
        .unwrap();
    }
    out.detail = format!("{count} posets with n <= 8");
    out
}

fn prune_inequality(ious: &[StructuredPoset]) -> Outcome {
    let mut out = Outcome::new();
    let mut count = 0;
    for s in ious {
        for b in admissible_removals(s) {
            for pd in prune_components(s, b).unwrap() {
                count += 1;
                let r = prune_report(s, &pd);
                out.check(r.inequality && r.normal, || {
                    format!("{:?} {:?} removed {b}: {r:?}", s.poset(), s.structure())
                });
            }
        }
    }
    out.detail = format!("{} unions, {count} decompositions", ious.len());
    out
}

fn arithmetic_lemmas() -> Outcome {
    let mut out = Outcome::new();
    let mut vectors = 0;
    let mut stack: Vec<Vec<u64>> = (2..=25).map(|x| vec![x]).collect();
    while let Some(b) = stack.pop() {
        let sum: u64 = b.iter().sum();
        for x in *b.last().unwrap()..=25 - sum {
            let mut next = b.clone();
            next.push(x);
            stack.push(next);
        }
        if b.len() < 2 {
            continue;
        }
        vectors += 1;
        let got = factorial_product_compare(&b).unwrap();
        let want = if is_factorial_product_exception(&b) {
            std::cmp::Ordering::Greater
        } else if is_factorial_product_equality(&b) {
            std::cmp::Ordering::Equal
        } else {
            std::cmp::Ordering::Less
        };
        out.check(got == want, || format!("{b:?}: {got:?}"));
    }
    let mut pairs = 0;
    for n in 6..=60u64 {
        for k in (2..n).filter(|k| n % k == 0) {
            pairs += 1;
            out.check(divisor_inequality_check(n, k).unwrap(), || format!("n={n} k={k}"));
        }
    }
    out.detail = format!("{vectors} vectors, {pairs} divisor pairs");
    out
}

fn main_bound(ious: &[StructuredPoset]) -> Outcome {
    let mut out = Outcome::new();
    let mut uncatalogued = 0;
    for s in ious {
        if forbidden_configuration_match(s).is_some() {
            continue;
        }
        uncatalogued += 1;
        let w = s.poset().width().max(5) as u64;
        out.check(find_certificate(s, w, 0).is_some(), || {
            format!(
                "no offset-0 certificate at w={w}: n={} |Aut_D|={} covers={:?} blocks={:?}",
                s.len(),
                s.aut().order(),
                s.poset().covers(),
                s.structure().blocks()
            )
        });
    }
    for name in CatalogName::NAMED {
        let s = named_configuration(name).unwrap();
        if s.structure().len() == 3 {
            let w = s.poset().width().max(5) as u64;
            out.check(find_certificate(&s, w, 1).is_some(), || format!("{name}: no offset-1 certificate"));
        }
    }
    let c8 = named_configuration(CatalogName::C8).unwrap();
    out.check(find_certificate(&c8, c8.poset().width() as u64, 4).is_some(), || "C8: no offset-4 certificate".into());
    out.detail = format!("{uncatalogued} uncatalogued unions with n <= {IOU_MAX}");
    out
}

fn end_floor() -> Outcome {
    let mut out = Outcome::new();
    let mut count = 0;
    for n in 0..=7 {
        for_each_poset(n, None, |p| {
            count += 1;
            out.check(endo_lower_bound_check(p).unwrap(), || format!("{p:?}"));
        })
        .unwrap();
    }
    out.detail = format!("{count} posets with n <= 7");
    out
}

fn end_constants() -> Outcome {
    let mut out = Outcome::new();
    for w in 2..=4u32 {
        let chains = StructuredPoset::natural(Poset::disjoint_chains(w as usize, 2)).unwrap();
        let e = endomorphism_count_respecting(chains.poset(), chains.structure()).unwrap();
        out.check(e >= Pow::pow(big(w as u64), w), || format!("End_N({w}C2) = {e}"));
        let s = StructuredPoset::natural(Poset::standard_example(w as usize)).unwrap();
        let e = endomorphism_count_respecting(s.poset(), s.structure()).unwrap();
        out.check(e >= Pow::pow(big(w as u64 - 1), w), || format!("End_N(S_{w}) = {e}"));
    }
    out.detail = "w in 2..=4".into();
    out
}

fn locked_witness() -> Outcome {
    let mut out = Outcome::new();
    let s = locked_crown();
    let end = endomorphism_count_respecting(s.poset(), s.structure()).unwrap();
    out.check(s.aut().order() == &end, || format!("|Aut_D| = {}, |End_D| = {end}", s.aut().order()));
    out.detail = format!("|Aut_D| = |End_D| = {end}");
    out
}

fn ratio_property() -> Outcome {
    let mut out = Outcome::new();
    let mut count = 0;
    for n in 0..=7 {
        for_each_poset(n, None, |p| {
            count += 1;
            let r = ratio_report(p, DEFAULT_END_CAP).unwrap();
            out.check(r.holds == Some(true), || format!("{p:?}: {:?}", r.holds));
        })
        .unwrap();
    }
    out.detail = format!("{count} posets with n <= 7");
    out
}

fn report(index: usize, title: &str, budget: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = outcome.failures.is_empty() && in_time;
    println!(
        "criterion {index:>2} {title}: {} ({}; {:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    for f in outcome.failures.iter().take(10) {
        println!("    {f}");
    }
    if outcome.failures.len() > 10 {
        println!("    ... {} more", outcome.failures.len() - 10);
    }
    if !in_time {
        println!("    over the time budget");
    }
    pass
}

fn main() {
    let ious: Vec<StructuredPoset> = (1..=IOU_MAX).flat_map(|n| enumerate_flexible_tight_ious(n).unwrap()).collect();
    let results = [
        report(1, "catalog exactness", CATALOG_BUDGET, catalog_exactness),
        report(2, "ratio bound for forbidden configurations", RATIO_BUDGET, ratio_bound),
        report(3, "max-locked family", MAX_LOCKED_BUDGET, max_locked_family),
        report(4, "product decomposition", PRODUCT_BUDGET, product_decomposition),
        report(5, "prune inequality", PRUNE_BUDGET, || prune_inequality(&ious)),
        report(6, "arithmetic lemmas", ARITHMETIC_BUDGET, arithmetic_lemmas),
        report(7, "main bound at desk scale", MAIN_BOUND_BUDGET, || main_bound(&ious)),
        report(8, "endomorphism floor", END_FLOOR_BUDGET, end_floor),
        report(9, "endomorphism floor constants", END_CONSTANTS_BUDGET, end_constants),
        report(10, "locked-structure witness", LOCKED_BUDGET, locked_witness),
        report(11, "ratio inequality", RATIO_PROPERTY_BUDGET, ratio_property),
    ];
    let failed = results.iter().filter(|&&r| !r).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
