//! The `analyze` pipeline: one poset in, one report out.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde_json::{json, Value};

use orbitlock::bounds::{find_certificate, ratio_report, BoundCertificate, CertificateRoute, Count};
use orbitlock::catalog::forbidden_configuration_match;
use orbitlock::endo::{endo_lower_bound_holds, endomorphism_count_capped, endomorphism_count_respecting_capped};
use orbitlock::group::{automorphism_group_capped, DEFAULT_AUT_CAP};
use orbitlock::orbit::{
    interdependent_orbit_unions, natural_orbit_structure, product_decomposition_check, union_extension_check,
    union_placement_check, StructuredPoset,
};
use orbitlock::{BitSet, DictatedOrbitStructure, Error, Poset};

use crate::Failure;

pub struct Options {
    pub dual: bool,
    pub cap_aut: usize,
    pub cap_end: usize,
    pub timestamps: bool,
}

pub struct Report {
    pub json: Value,
    pub text: String,
    /// Consistency checks that failed; nonempty means a library bug.
    pub violations: Vec<String>,
}

fn big(v: &BigUint) -> Value {
    Value::String(v.to_string())
}

fn count_json(c: &Count) -> Value {
    json!({ "value": big(c.value()), "bound": !c.is_exact() })
}

fn blocks_json(blocks: &[BitSet]) -> Value {
    blocks.iter().map(|b| b.to_vec()).collect()
}

fn route_name(r: CertificateRoute) -> String {
    match r {
        CertificateRoute::MaxLocked => "max-locked".into(),
        CertificateRoute::TwoOrbit => "two-orbit".into(),
        CertificateRoute::Prune { removed } => format!("prune({removed})"),
        CertificateRoute::Direct => "direct".into(),
    }
}

pub fn certificate_json(c: &BoundCertificate) -> Value {
    json!({
        "w": c.w,
        "o": c.offset,
        "w_values": c.w_values,
        "product": big(&c.product),
        "budget": c.budget,
        "route": route_name(c.route),
    })
}

/// The certificate at the smallest nonnegative offset. Offsets past
/// `2|U|` would give a budget above `|U|`, which always suffices.
fn smallest_offset_certificate(s: &StructuredPoset) -> Option<BoundCertificate> {
    let w = s.poset().width().max(5) as u64;
    (0..=2 * s.len() as i64 + 2).find_map(|o| find_certificate(s, w, o))
}

fn end_count(p: &Poset, exact: orbitlock::Result<BigUint>) -> Result<Count, Failure> {
    match exact {
        Ok(v) => Ok(Count::Exact(v)),
        Err(Error::CapExceeded { .. }) => Ok(Count::LowerBound(orbitlock::bounds::endomorphism_floor(p))),
        Err(e) => Err(e.into()),
    }
}

pub fn analyze(pos: &str, dos: Option<&str>, options: &Options) -> Result<Report, Failure> {
    let mut poset = Poset::parse(pos)?;
    if options.dual {
        poset = poset.dual();
    }
    let cap = options.cap_aut.min(DEFAULT_AUT_CAP);
    let aut = automorphism_group_capped(&poset, cap)?;
    let natural = natural_orbit_structure(&poset)?;
    let (structure, source) = match dos {
        Some(text) => (DictatedOrbitStructure::parse(&poset, text)?, "file"),
        None => (natural.clone(), "natural"),
    };
    let s = StructuredPoset::with_cap(poset.clone(), structure, cap)?;
    let mut violations = Vec::new();

    let ranks = poset.rank_decomposition();
    let rank_sizes: Vec<usize> = ranks.levels.iter().map(Vec::len).collect();
    let end = end_count(&poset, endomorphism_count_capped(&poset, options.cap_end))?;
    let end_d = end_count(&poset, endomorphism_count_respecting_capped(&poset, s.structure(), options.cap_end))?;

    if aut.order() % s.aut().order() != BigUint::from(0u32) {
        violations.push(format!("|Aut_D| = {} does not divide |Aut| = {}", s.aut().order(), aut.order()));
    }
    if end.is_exact() && aut.order() > end.value() {
        violations.push("|Aut| exceeds |End|".into());
    }
    if end_d.is_exact() && s.aut().order() > end_d.value() {
        violations.push("|Aut_D| exceeds |End_D|".into());
    }
    let floor = orbitlock::bounds::endomorphism_floor(&poset);
    let floor_holds = end.is_exact().then(|| endo_lower_bound_holds(&poset, end.value()));
    if floor_holds == Some(false) {
        violations.push("|End| is below the height floor".into());
    }

    let natural_s = StructuredPoset::with_cap(poset.clone(), natural.clone(), cap)?;
    let product = product_decomposition_check(&poset)?;
    if !product {
        violations.push("|Aut| differs from the product over orbit unions".into());
    }
    let placement = union_placement_check(&natural_s) && union_extension_check(&natural_s);
    if !placement {
        violations.push("orbit-union placement or extension fails".into());
    }
    let ratio = ratio_report(&poset, options.cap_end)?;
    if ratio.holds == Some(false) {
        violations.push("|Aut|/|End| exceeds the product of union factors".into());
    }

    let graph = s.orbit_graph();
    let mut ious = Vec::new();
    let mut forbidden = Vec::new();
    let mut text = String::new();
    let _ = writeln!(text, "elements: {}  covers: {}", poset.len(), poset.covers().len());
    let _ = writeln!(text, "width: {}  height: {}  rank sizes: {rank_sizes:?}", poset.width(), poset.height());
    let flag = |c: &Count| if c.is_exact() { "" } else { " (lower bound)" };
    let _ = writeln!(text, "|Aut|: {}  |End|: {}{}", aut.order(), end.value(), flag(&end));
    let _ = writeln!(
        text,
        "structure ({source}): {} blocks  |Aut_D|: {}  |End_D|: {}{}",
        s.structure().len(),
        s.aut().order(),
        end_d.value(),
        flag(&end_d)
    );
    let _ = writeln!(text, "orbit graph edges: {:?}", graph.edges);

    for u in interdependent_orbit_unions(&s) {
        let us = &u.structured;
        let f = us.flags();
        let name = if u.is_singleton() { None } else { forbidden_configuration_match(us) };
        if let Some(n) = name {
            forbidden.push(n.to_string());
        }
        let certificate = if u.is_singleton() { None } else { smallest_offset_certificate(us) };
        let _ = writeln!(
            text,
            "union {:?}: |Aut|={} tight={} max_locked={} flexible={} forbidden={} certificate={}",
            u.elements,
            us.aut().order(),
            f.tight,
            f.max_locked,
            f.flexible,
            name.map_or("-".to_string(), |n| n.to_string()),
            certificate.as_ref().map_or("-".to_string(), |c| format!(
                "w={} o={} parts={:?} budget={}",
                c.w, c.offset, c.w_values, c.budget
            )),
        );
        ious.push(json!({
            "elements": u.elements,
            "blocks": u.blocks,
            "singleton": u.is_singleton(),
            "aut_order": big(us.aut().order()),
            "tight": f.tight,
            "max_locked": f.max_locked,
            "flexible": f.flexible,
            "forbidden": name.map(|n| n.to_string()),
            "certificate": certificate.as_ref().map(certificate_json),
        }));
    }
    let _ = writeln!(text, "product decomposition: {product}  union placement: {placement}");
    let _ = writeln!(
        text,
        "ratio |Aut|/|End| = {} <= {} : {}",
        ratio.ratio(),
        ratio.factor_product(),
        ratio.holds.map_or("undecided".to_string(), |h| h.to_string())
    );
    for v in &violations {
        let _ = writeln!(text, "VIOLATION: {v}");
    }

    let mut json = json!({
        "schema": 1,
        "poset": { "n": poset.len(), "covers": poset.covers() },
        "dual": options.dual,
        "width": poset.width(),
        "height": poset.height(),
        "rank_sizes": rank_sizes,
        "aut_order": big(aut.order()),
        "end": count_json(&end),
        "orbits": natural.len(),
        "natural_orbits": blocks_json(natural.blocks()),
        "structure": {
            "source": source,
            "blocks": blocks_json(s.structure().blocks()),
            "aut_order": big(s.aut().order()),
            "end": count_json(&end_d),
        },
        "orbit_graph": { "vertices": s.structure().len(), "edges": graph.edges },
        "ious": ious,
        "forbidden": forbidden,
        "product_decomposition": product,
        "union_placement": placement,
        "ratio": {
            "aut_over_end": ratio.ratio().to_string(),
            "factor_product": ratio.factor_product().to_string(),
            "holds": ratio.holds,
            "factors": ratio.factors.iter().map(|f| json!({
                "elements": f.elements,
                "aut": big(&f.aut),
                "end": count_json(&f.end),
            })).collect::<Vec<_>>(),
        },
        "end_floor": { "value": big(&floor), "holds": floor_holds },
        "violations": violations,
    });
    if options.timestamps {
        let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        json["generated_at"] = json!(now);
    }
    Ok(Report { json, text, violations })
}
