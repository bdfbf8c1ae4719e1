//! Text and JSON dumps: the catalog and enumeration streams.
//!
//! A record is a `.pos` body optionally followed by `.dos` block lines;
//! records are separated by `---` lines. Metadata rides in `#` comments,
//! which both formats ignore.

use std::io::{self, Write};

use serde_json::{json, Value};

use orbitlock::bounds::Count;
use orbitlock::catalog::build_catalog;
use orbitlock::endo::endomorphism_count_respecting_capped;
use orbitlock::enumerate::{for_each_flexible_tight_iou, for_each_poset};
use orbitlock::orbit::StructuredPoset;
use orbitlock::{BitSet, Error};

use crate::Failure;

pub const SEPARATOR: &str = "---";

fn record(s: &StructuredPoset) -> String {
    format!("{}{}", s.poset().to_text(), s.structure().to_text())
}

fn end_d(s: &StructuredPoset, cap: usize) -> Result<Count, Failure> {
    match endomorphism_count_respecting_capped(s.poset(), s.structure(), cap) {
        Ok(v) => Ok(Count::Exact(v)),
        Err(Error::CapExceeded { .. }) => Ok(Count::LowerBound(orbitlock::bounds::endomorphism_floor(s.poset()))),
        Err(e) => Err(e.into()),
    }
}

pub fn catalog(max_w: usize, cap_end: usize, as_json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let entries = build_catalog(max_w);
    if as_json {
        let mut list = Vec::new();
        for e in &entries {
            let s = &e.model;
            let end = end_d(s, cap_end)?;
            list.push(json!({
                "name": e.name.to_string(),
                "n": s.len(),
                "covers": s.poset().covers(),
                "blocks": s.structure().blocks().iter().map(BitSet::to_vec).collect::<Vec<_>>(),
                "width": s.poset().width(),
                "aut_d": s.aut().order().to_string(),
                "end_d": { "value": end.value().to_string(), "bound": !end.is_exact() },
                "max_locked": s.flags().max_locked,
            }));
        }
        let doc: Value = json!({ "schema": 1, "max_w": max_w, "entries": list });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("values serialize"))?;
        return Ok(());
    }
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            writeln!(out, "{SEPARATOR}")?;
        }
        let s = &e.model;
        let end = end_d(s, cap_end)?;
        let bound = if end.is_exact() { "" } else { " (lower bound)" };
        writeln!(out, "# {}", e.name)?;
        writeln!(out, "# aut_d {}  end_d {}{bound}  width {}", s.aut().order(), end.value(), s.poset().width())?;
        write!(out, "{}", record(s))?;
    }
    Ok(())
}

/// Streams every record through `emit`, remembering the first write error
/// so the enumeration callback itself stays infallible.
struct Stream<'a> {
    out: &'a mut dyn Write,
    first: bool,
    error: Option<io::Error>,
}

impl<'a> Stream<'a> {
    fn new(out: &'a mut dyn Write) -> Self {
        Stream { out, first: true, error: None }
    }

    fn emit(&mut self, text: &str) {
        if self.error.is_some() {
            return;
        }
        let result = if self.first { write!(self.out, "{text}") } else { write!(self.out, "{SEPARATOR}\n{text}") };
        self.first = false;
        if let Err(e) = result {
            self.error = Some(e);
        }
    }

    fn finish(self) -> Result<(), Failure> {
        self.error.map_or(Ok(()), |e| Err(e.into()))
    }
}

pub fn enumerate_posets(n: usize, max_width: Option<usize>, out: &mut dyn Write) -> Result<(), Failure> {
    let mut stream = Stream::new(out);
    for_each_poset(n, max_width, |p| stream.emit(&p.to_text()))?;
    stream.finish()
}

pub fn enumerate_unions(n: usize, out: &mut dyn Write) -> Result<(), Failure> {
    let mut stream = Stream::new(out);
    for_each_flexible_tight_iou(n, |s| stream.emit(&record(s)))?;
    stream.finish()
}
