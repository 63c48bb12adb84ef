//! Max-to-min greedy saturation over the unclassified population.

use alloc::collections::BTreeSet;
use core::cmp::Ordering;
use core::f64::consts::LN_2;

use crate::pool::Pool;
use crate::population::PriorVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Key {
    p: f64,
    item: usize,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    // Largest p first; equal p by ascending index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.p.total_cmp(&self.p).then(self.item.cmp(&other.item))
    }
}

/// Sort `items` into the canonical order: descending p, ties by ascending index.
pub fn sort_by_priority(items: &mut [usize], prior: &PriorVector) {
    items.sort_unstable_by(|&a, &b| Key { p: prior.p(a), item: a }.cmp(&Key { p: prior.p(b), item: b }));
}

/// The yet-to-be-classified items, ordered by descending defect probability.
#[derive(Debug, Clone)]
pub struct UnclassifiedPopulation<'a> {
    prior: &'a PriorVector,
    keys: BTreeSet<Key>,
}

impl<'a> UnclassifiedPopulation<'a> {
    /// Every item of `prior` is unclassified.
    pub fn full(prior: &'a PriorVector) -> Self {
        Self::from_items(prior, 0..prior.len())
    }

    pub fn from_items(prior: &'a PriorVector, items: impl IntoIterator<Item = usize>) -> Self {
        let mut pop = Self { prior, keys: BTreeSet::new() };
        pop.reinsert(items);
        pop
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.keys.contains(&Key { p: self.prior.p(item), item })
    }

    pub fn peek_max(&self) -> Option<usize> {
        self.keys.first().map(|k| k.item)
    }

    pub fn pop_max(&mut self) -> Option<usize> {
        self.keys.pop_first().map(|k| k.item)
    }

    /// Returns items to the population.
    pub fn reinsert(&mut self, items: impl IntoIterator<Item = usize>) {
        let prior = self.prior;
        for item in items {
            let fresh = self.keys.insert(Key { p: prior.p(item), item });
            debug_assert!(fresh, "item {item} reinserted twice");
        }
    }

    /// Remaining items in priority order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.keys.iter().map(|k| k.item)
    }
}

/// Removes the largest-probability items from `pop` until the pool is
/// saturated (`P_S <= 1/2`), or `pop` runs dry.
///
/// The pool's items come out in descending-p order.
pub fn saturate(pop: &mut UnclassifiedPopulation<'_>, prior: &PriorVector) -> Result<Pool> {
    if pop.is_empty() {
        return Err(Error::Usage("cannot form a set from an empty population"));
    }
    let mut pool = Pool::empty();
    while !pool.is_saturated() {
        match pop.pop_max() {
            Some(item) => pool.push(item, prior),
            None => break,
        }
    }
    Ok(pool)
}

/// Set formation for the laminar baseline: grow greedily until
/// `P_S <= 3/4`; keep the last item only if that leaves `P_S >= 1/2`.
pub fn form_half_to_three_quarters(pop: &mut UnclassifiedPopulation<'_>, prior: &PriorVector) -> Result<Pool> {
    if pop.is_empty() {
        return Err(Error::Usage("cannot form a set from an empty population"));
    }
    let upper = libm::log(0.75);
    let mut pool = Pool::empty();
    while pool.ln_clean_prob() > upper {
        let Some(item) = pop.pop_max() else {
            return Ok(pool);
        };
        pool.push(item, prior);
    }
    if pool.ln_clean_prob() < -LN_2 && pool.len() > 1 {
        let mut items = pool.into_items();
        let last = items.pop().expect("pool holds at least two items");
        pop.reinsert([last]);
        return Ok(Pool::from_items(items, prior));
    }
    Ok(pool)
}

/// `mu_S < 1 - (p_max - p_min)` over the members of `pool`.
pub fn spread_bound_holds(pool: &Pool, prior: &PriorVector) -> bool {
    let (lo, hi) = pool
        .items()
        .iter()
        .map(|&i| prior.p(i))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p), hi.max(p)));
    pool.mu() < 1.0 - (hi - lo)
}
