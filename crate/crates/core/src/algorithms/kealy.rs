//! Binned baseline approximation.
//!
//! Items are binned by probability scale, `(2^-(k+1), 2^-k]`, with a tail bin
//! for everything below `theta`. Within a bin, sets are filled greedily until
//! their mean reaches 1/2; the under-filled remainders of all bins are
//! grouped the same way after the bins are done. A positive set is walked down its code tree to the
//! leftmost defective; the untested right siblings are merged into one new
//! group, which is root-tested and walked the same way until nothing is left.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{descend_tree, Recovery, RunRecord};
use crate::oracle::Oracle;
use crate::population::PriorVector;
use crate::saturation::sort_by_priority;
use crate::split::build_sfh_tree;
use crate::{Error, Pool, Result};

pub const DEFAULT_THETA: f64 = 1e-5;

/// Bins in processing order (largest probabilities first, tail bin last);
/// items within a bin are in descending-p order.
pub fn kealy_bins(prior: &PriorVector, theta: f64) -> Result<Vec<Vec<usize>>> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::Config(alloc::format!("theta {theta} outside (0, 0.5)")));
    }
    let mut bins: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let tail_key = u32::MAX;
    for (item, &p) in prior.probs().iter().enumerate() {
        let key = if p < theta { tail_key } else { libm::floor(libm::log2(1.0 / p)) as u32 };
        bins.entry(key).or_default().push(item);
    }
    Ok(bins
        .into_values()
        .map(|mut items| {
            sort_by_priority(&mut items, prior);
            items
        })
        .collect())
}

pub fn run_kealy(prior: &PriorVector, oracle: &mut Oracle, theta: f64) -> Result<RunRecord> {
    let mut recovery = Recovery::new(prior.len());
    // Under-filled remainders of every bin, grouped together at the end.
    let mut leftovers = Vec::new();
    for bin in kealy_bins(prior, theta)? {
        let mut set = Pool::empty();
        for item in bin {
            set.push(item, prior);
            if set.mu() >= 0.5 {
                resolve_set(core::mem::take(&mut set), prior, oracle, &mut recovery)?;
            }
        }
        leftovers.extend(set.into_items());
    }
    let mut set = Pool::empty();
    for item in leftovers {
        set.push(item, prior);
        if set.mu() >= 0.5 {
            resolve_set(core::mem::take(&mut set), prior, oracle, &mut recovery)?;
        }
    }
    if !set.is_empty() {
        resolve_set(set, prior, oracle, &mut recovery)?;
    }
    recovery.finish(oracle)
}

fn resolve_set(set: Pool, prior: &PriorVector, oracle: &mut Oracle, recovery: &mut Recovery) -> Result<()> {
    let mut current = set;
    loop {
        if !oracle.test_root(current.items())? {
            recovery.clean(current.items());
            return Ok(());
        }
        let tree = build_sfh_tree(&current, prior)?;
        let mut inconclusive = Vec::new();
        let (item, tests) = descend_tree(&tree, oracle, recovery, |right| inconclusive.extend_from_slice(right))?;
        recovery.defective(item, tests + 1);
        if inconclusive.is_empty() {
            return Ok(());
        }
        sort_by_priority(&mut inconclusive, prior);
        current = Pool::from_items(inconclusive, prior);
    }
}
