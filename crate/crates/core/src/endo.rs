//! Exact counts of order-preserving self-maps.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Pow;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::structure::DictatedOrbitStructure;

/// Default largest poset whose endomorphisms are counted exactly.
pub const DEFAULT_END_CAP: usize = 16;

/// Counts stay below `24^24 < 2^128` under this hard ceiling.
pub const END_HARD_CAP: usize = 24;

pub fn endomorphism_count(p: &Poset) -> Result<BigUint> {
    endomorphism_count_capped(p, DEFAULT_END_CAP)
}

pub fn endomorphism_count_capped(p: &Poset, cap: usize) -> Result<BigUint> {
    let allowed = vec![p.ground_set(); p.len()];
    count(p, allowed, cap)
}

/// `|End_D(P)|`: order-preserving maps with `f[D] ⊆ D` for every block.
pub fn endomorphism_count_respecting(p: &Poset, d: &DictatedOrbitStructure) -> Result<BigUint> {
    endomorphism_count_respecting_capped(p, d, DEFAULT_END_CAP)
}

pub fn endomorphism_count_respecting_capped(p: &Poset, d: &DictatedOrbitStructure, cap: usize) -> Result<BigUint> {
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
    let allowed = (0..p.len()).map(|x| d.blocks()[d.block_of(x)]).collect();
    count(p, allowed, cap)
}

fn count(p: &Poset, allowed: Vec<BitSet>, cap: usize) -> Result<BigUint> {
    let cap = cap.min(END_HARD_CAP);
    if p.len() > cap {
        return Err(Error::CapExceeded { what: "endomorphism count", n: p.len(), cap });
    }
    let order = p.linear_extension();
    let mut position = vec![0; p.len()];
    for (i, &x) in order.iter().enumerate() {
        position[x] = i;
    }
    let closed_up: Vec<BitSet> = (0..p.len())
        .map(|y| {
            let mut s = *p.up(y);
            s.insert(y);
            s
        })
        .collect();
    let upper: Vec<Vec<usize>> =
        order.iter().map(|&x| p.upper_covers(x).iter().map(|y| position[y]).collect()).collect();
    let state: Vec<BitSet> = order.iter().map(|&x| allowed[x]).collect();
    let mut counter = Counter { closed_up, upper, order, memo: HashMap::new() };
    Ok(BigUint::from(counter.run(0, state)))
}

/// Assigns images along a linear extension. `state[j]` is the set of images
/// still available to the `j`-th element: its own allowed set intersected
/// with the closed up-sets of the images of its assigned lower covers.
struct Counter {
    closed_up: Vec<BitSet>,
    upper: Vec<Vec<usize>>,
    order: Vec<usize>,
    memo: HashMap<(usize, Vec<BitSet>), u128>,
}

impl Counter {
    fn run(&mut self, step: usize, state: Vec<BitSet>) -> u128 {
        if step == self.order.len() {
            return 1;
        }
        let key = (step, state[step..].to_vec());
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let mut total = 0u128;
        for y in &state[step] {
            let mut next = state.clone();
            let mut dead = false;
            for &j in &self.upper[step] {
                next[j] = next[j].intersection(&self.closed_up[y]);
                dead |= next[j].is_empty();
            }
            if !dead {
                total += self.run(step + 1, next);
            }
        }
        self.memo.insert(key, total);
        total
    }
}

/// `|End(P)|^(h+1) >= 2^(h n)`, the integer form of
/// `|End(P)| >= 2^(h n / (h+1))` with `h` the height.
pub fn endo_lower_bound_check(p: &Poset) -> Result<bool> {
    let end = endomorphism_count(p)?;
    Ok(endo_lower_bound_holds(p, &end))
}

pub fn endo_lower_bound_holds(p: &Poset, end: &BigUint) -> bool {
    let h = p.height() as u32;
    let n = p.len() as u32;
    Pow::pow(end, h + 1) >= Pow::pow(BigUint::from(2u32), h * n)
}
