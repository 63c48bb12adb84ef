//! End-to-end adaptive testing strategies.
//!
//! Every strategy drives an [`Oracle`] until each item is classified and
//! returns a [`RunRecord`]. The two refined laminar algorithms form sets by
//! greedy saturation, descend only into left children and hand untested right
//! siblings back to the unclassified population. The three baselines
//! ([`Algorithm::Li`], [`Algorithm::LiImproved`], [`Algorithm::Kealy`]) are
//! approximations of published schemes kept for comparison.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::oracle::Oracle;
use crate::population::{InfectionVector, PriorVector};
use crate::split::{me_split, CodeLengths, NodeKind, SfhTree};
use crate::{Error, Pool, Result};

mod kealy;
mod li;
mod refined;

pub use kealy::{kealy_bins, run_kealy, DEFAULT_THETA};
pub use li::{run_li_improved, run_li_laminar};
pub use refined::{run_refined_laminar_me, run_refined_laminar_sfh, run_refined_laminar_tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    RefinedSfh,
    RefinedMe,
    Li,
    LiImproved,
    Kealy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::RefinedSfh, Algorithm::RefinedMe, Algorithm::Li, Algorithm::LiImproved, Algorithm::Kealy];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RefinedSfh => "sfh",
            Algorithm::RefinedMe => "me",
            Algorithm::Li => "li",
            Algorithm::LiImproved => "li-improved",
            Algorithm::Kealy => "kealy",
        }
    }

    /// Baselines are reconstructions, not reference implementations.
    pub fn is_baseline(self) -> bool {
        matches!(self, Algorithm::Li | Algorithm::LiImproved | Algorithm::Kealy)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(alloc::format!("unknown algorithm `{s}`")))
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub total_tests: usize,
    pub negative_root_tests: usize,
    /// `(item, tests)` for every defective: the first-stage test of the set in
    /// which it was caught plus the descent tests that isolated it.
    pub per_defective_costs: Vec<(usize, usize)>,
    pub recovered: InfectionVector,
    /// Sets formed by greedy saturation, in formation order (refined algorithms only).
    pub formed_sets: Vec<FormedSet>,
    /// Filled in by callers that time the run.
    pub wall_time: f64,
}

/// Summary of one set produced by greedy saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormedSet {
    pub size: usize,
    pub mu: f64,
    pub clean_prob: f64,
    pub p_max: f64,
    pub p_min: f64,
    pub saturated: bool,
}

impl FormedSet {
    pub fn of(pool: &Pool, prior: &PriorVector) -> Self {
        let ps = pool.items().iter().map(|&i| prior.p(i));
        Self {
            size: pool.len(),
            mu: pool.mu(),
            clean_prob: pool.clean_prob(),
            p_max: ps.clone().fold(f64::NEG_INFINITY, f64::max),
            p_min: ps.fold(f64::INFINITY, f64::min),
            saturated: pool.is_saturated(),
        }
    }

    /// `mu_S < 1 - (p_max - p_min)` and `mu_S >= 1/2`; vacuous for an unsaturated final set.
    pub fn spread_bound_holds(&self) -> bool {
        !self.saturated || (self.mu < 1.0 - (self.p_max - self.p_min) && self.mu >= 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Tail-bin threshold for [`Algorithm::Kealy`].
    pub theta: f64,
    /// Code tree lengths for [`Algorithm::RefinedSfh`].
    pub code_lengths: CodeLengths,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { theta: DEFAULT_THETA, code_lengths: CodeLengths::Capped }
    }
}

pub fn run(algorithm: Algorithm, prior: &PriorVector, oracle: &mut Oracle, options: &RunOptions) -> Result<RunRecord> {
    match algorithm {
        Algorithm::RefinedSfh => run_refined_laminar_tree(prior, oracle, options.code_lengths),
        Algorithm::RefinedMe => run_refined_laminar_me(prior, oracle),
        Algorithm::Li => run_li_laminar(prior, oracle),
        Algorithm::LiImproved => run_li_improved(prior, oracle),
        Algorithm::Kealy => run_kealy(prior, oracle, options.theta),
    }
}

/// Exact equality of the recovered and the true infection vectors.
pub fn verify_zero_error(record: &RunRecord, truth: &InfectionVector) -> bool {
    record.recovered == *truth
}

/// Defectives whose cost reaches `log2(1/p_i) + 2`; always zero for the SFH variant.
pub fn sfh_cost_violations(record: &RunRecord, prior: &PriorVector) -> usize {
    record
        .per_defective_costs
        .iter()
        .filter(|&&(item, cost)| cost as f64 >= libm::log2(1.0 / prior.p(item)) + 2.0)
        .count()
}

/// Defectives whose cost exceeds `ceil(log2(1/p_i)) + 2`. The ME branch bound
/// ignores quantisation, so this can be nonzero.
pub fn me_branch_bound_violations(record: &RunRecord, prior: &PriorVector) -> usize {
    record
        .per_defective_costs
        .iter()
        .filter(|&&(item, cost)| cost as f64 > libm::ceil(libm::log2(1.0 / prior.p(item))) + 2.0)
        .count()
}

/// Classification state of every item.
pub(crate) struct Recovery {
    status: Vec<Option<bool>>,
    classified: usize,
    costs: Vec<(usize, usize)>,
    pub(crate) formed_sets: Vec<FormedSet>,
}

impl Recovery {
    pub(crate) fn new(len: usize) -> Self {
        Self { status: alloc::vec![None; len], classified: 0, costs: Vec::new(), formed_sets: Vec::new() }
    }

    pub(crate) fn clean(&mut self, items: &[usize]) {
        for &i in items {
            debug_assert!(self.status[i].is_none(), "item {i} classified twice");
            self.status[i] = Some(false);
        }
        self.classified += items.len();
    }

    pub(crate) fn defective(&mut self, item: usize, cost: usize) {
        debug_assert!(self.status[item].is_none(), "item {item} classified twice");
        self.status[item] = Some(true);
        self.classified += 1;
        self.costs.push((item, cost));
    }

    pub(crate) fn classified(&self) -> usize {
        self.classified
    }

    pub(crate) fn finish(self, oracle: &Oracle) -> Result<RunRecord> {
        let status = self
            .status
            .into_iter()
            .map(|s| s.ok_or(Error::Usage("run ended with unclassified items")))
            .collect::<Result<Vec<bool>>>()?;
        Ok(RunRecord {
            total_tests: oracle.test_count(),
            negative_root_tests: oracle.negative_root_count(),
            per_defective_costs: self.costs,
            recovered: InfectionVector::new(status),
            formed_sets: self.formed_sets,
            wall_time: 0.0,
        })
    }
}

/// Walks a contaminated tree to its leftmost defective, testing left children
/// only. Returns the defective and the number of tests spent; every right
/// sibling left untested is passed to `untested_right`.
pub(crate) fn descend_tree(
    tree: &SfhTree,
    oracle: &mut Oracle,
    recovery: &mut Recovery,
    mut untested_right: impl FnMut(&[usize]),
) -> Result<(usize, usize)> {
    let mut node = tree.root();
    let mut tests = 0;
    loop {
        match tree.node(node).kind {
            NodeKind::Leaf => return Ok((tree.items(node)[0], tests)),
            NodeKind::Internal { left, right } => {
                tests += 1;
                if oracle.test(tree.items(left))? {
                    untested_right(tree.items(right));
                    node = left;
                } else {
                    recovery.clean(tree.items(left));
                    node = right;
                }
            }
        }
    }
}

/// Same walk as [`descend_tree`], cutting each contaminated pool at its
/// maximum-entropy prefix on the fly.
pub(crate) fn descend_me(
    pool: Pool,
    prior: &PriorVector,
    oracle: &mut Oracle,
    recovery: &mut Recovery,
    mut untested_right: impl FnMut(&[usize]),
) -> Result<(usize, usize)> {
    let mut current = pool;
    let mut tests = 0;
    while current.len() > 1 {
        let (left, right) = me_split(&current, prior)?;
        tests += 1;
        if oracle.test(left.items())? {
            untested_right(right.items());
            current = left;
        } else {
            recovery.clean(left.items());
            current = right;
        }
    }
    Ok((current.items()[0], tests))
}
