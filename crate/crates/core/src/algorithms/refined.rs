use super::{descend_me, descend_tree, FormedSet, Recovery, RunRecord};
use crate::oracle::Oracle;
use crate::population::PriorVector;
use crate::saturation::{saturate, UnclassifiedPopulation};
use crate::split::{build_code_tree, CodeLengths};
use crate::Result;

/// Refined laminar algorithm with code trees.
///
/// Codeword lengths are [`CodeLengths::Capped`]: never longer than an item's
/// Shannon length `ceil(log2(mu_S / p_i))`.
///
/// Repeatedly: saturate a set from the unclassified items and root-test it.
/// A negative set is classified clean. A positive set gets a code tree; walk
/// it by testing left children only. A negative left child is clean and its
/// right sibling is known contaminated; a positive left child sends its right
/// sibling back to the unclassified population. The leaf reached is defective
/// without a further test. The tree is discarded after each defective.
pub fn run_refined_laminar_sfh(prior: &PriorVector, oracle: &mut Oracle) -> Result<RunRecord> {
    run_refined_laminar_tree(prior, oracle, CodeLengths::Capped)
}

/// [`run_refined_laminar_sfh`] with a choice of codeword lengths.
pub fn run_refined_laminar_tree(prior: &PriorVector, oracle: &mut Oracle, lengths: CodeLengths) -> Result<RunRecord> {
    let mut pop = UnclassifiedPopulation::full(prior);
    let mut recovery = Recovery::new(prior.len());
    while !pop.is_empty() {
        debug_assert_eq!(pop.len() + recovery.classified(), prior.len());
        let set = saturate(&mut pop, prior)?;
        recovery.formed_sets.push(FormedSet::of(&set, prior));
        if !oracle.test_root(set.items())? {
            recovery.clean(set.items());
            continue;
        }
        let tree = build_code_tree(&set, prior, lengths)?;
        let (item, tests) = descend_tree(&tree, oracle, &mut recovery, |right| pop.reinsert(right.iter().copied()))?;
        recovery.defective(item, tests + 1);
    }
    recovery.finish(oracle)
}

/// Refined laminar algorithm with maximum-entropy prefix cuts in place of
/// the code tree.
pub fn run_refined_laminar_me(prior: &PriorVector, oracle: &mut Oracle) -> Result<RunRecord> {
    let mut pop = UnclassifiedPopulation::full(prior);
    let mut recovery = Recovery::new(prior.len());
    while !pop.is_empty() {
        debug_assert_eq!(pop.len() + recovery.classified(), prior.len());
        let set = saturate(&mut pop, prior)?;
        recovery.formed_sets.push(FormedSet::of(&set, prior));
        if !oracle.test_root(set.items())? {
            recovery.clean(set.items());
            continue;
        }
        let (item, tests) = descend_me(set, prior, oracle, &mut recovery, |right| pop.reinsert(right.iter().copied()))?;
        recovery.defective(item, tests + 1);
    }
    recovery.finish(oracle)
}
