use alloc::vec::Vec;

use super::{Recovery, RunRecord};
use crate::oracle::Oracle;
use crate::population::PriorVector;
use crate::saturation::{form_half_to_three_quarters, UnclassifiedPopulation};
use crate::split::me_split;
use crate::{Pool, Result};

/// Laminar baseline: disjoint sets with `1/2 <= P_S <= 3/4`, each contaminated
/// node cut by maximum entropy and both children tested.
pub fn run_li_laminar(prior: &PriorVector, oracle: &mut Oracle) -> Result<RunRecord> {
    run_laminar(prior, oracle, false)
}

/// As [`run_li_laminar`], but a right child whose left sibling tested negative
/// is known contaminated and is not tested.
pub fn run_li_improved(prior: &PriorVector, oracle: &mut Oracle) -> Result<RunRecord> {
    run_laminar(prior, oracle, true)
}

fn run_laminar(prior: &PriorVector, oracle: &mut Oracle, infer_right: bool) -> Result<RunRecord> {
    let mut pop = UnclassifiedPopulation::full(prior);
    let mut sets = Vec::new();
    while !pop.is_empty() {
        sets.push(form_half_to_three_quarters(&mut pop, prior)?);
    }

    let mut recovery = Recovery::new(prior.len());
    // Known-contaminated pools with the number of tests on their path so far.
    let mut stack: Vec<(Pool, usize)> = Vec::new();
    for set in sets {
        if !oracle.test_root(set.items())? {
            recovery.clean(set.items());
            continue;
        }
        stack.push((set, 1));
        while let Some((pool, path)) = stack.pop() {
            if pool.len() == 1 {
                recovery.defective(pool.items()[0], path);
                continue;
            }
            let (left, right) = me_split(&pool, prior)?;
            let left_positive = oracle.test(left.items())?;
            let (right_positive, right_path) =
                if infer_right && !left_positive { (true, path) } else { (oracle.test(right.items())?, path + 1) };
            if right_positive {
                stack.push((right, right_path));
            } else {
                recovery.clean(right.items());
            }
            if left_positive {
                stack.push((left, path + 1));
            } else {
                recovery.clean(left.items());
            }
        }
    }
    recovery.finish(oracle)
}
