use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::population::PriorVector;
use crate::{Error, Result};

/// An ordered set of item indices with cached `ln P_S` and `mu_S`.
///
/// `P_S`, the probability that no member is defective, is kept as a sum of
/// `ln(1 - p_i)` so that pools of many tiny probabilities do not underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    items: Vec<usize>,
    ln_clean: f64,
    mu: f64,
}

impl Default for Pool {
    fn default() -> Self {
        Self::empty()
    }
}

impl Pool {
    pub const fn empty() -> Self {
        Self { items: Vec::new(), ln_clean: 0.0, mu: 0.0 }
    }

    /// Builds a pool, checking that every index is valid and unique.
    pub fn new(items: Vec<usize>, prior: &PriorVector) -> Result<Self> {
        if items.iter().any(|&i| i >= prior.len()) {
            return Err(Error::Usage("pool index out of range"));
        }
        let mut sorted = items.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Usage("pool indices must be unique"));
        }
        Ok(Self::from_items(items, prior))
    }

    pub(crate) fn from_items(items: Vec<usize>, prior: &PriorVector) -> Self {
        let mut pool = Self { items: Vec::with_capacity(items.len()), ln_clean: 0.0, mu: 0.0 };
        for item in items {
            pool.push(item, prior);
        }
        pool
    }

    pub(crate) fn push(&mut self, item: usize, prior: &PriorVector) {
        let p = prior.p(item);
        self.items.push(item);
        self.ln_clean += libm::log1p(-p);
        self.mu += p;
    }

    #[inline]
    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn into_items(self) -> Vec<usize> {
        self.items
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `ln P_S`.
    #[inline]
    pub fn ln_clean_prob(&self) -> f64 {
        self.ln_clean
    }

    /// `P_S = prod (1 - p_i)`.
    pub fn clean_prob(&self) -> f64 {
        libm::exp(self.ln_clean)
    }

    /// `1 - P_S`, evaluated without cancellation.
    pub fn contamination_prob(&self) -> f64 {
        -libm::expm1(self.ln_clean)
    }

    /// `mu_S = sum p_i`.
    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `P_S <= 1/2`.
    pub fn is_saturated(&self) -> bool {
        self.ln_clean <= -LN_2
    }

    /// Splits into the first `at` items and the rest.
    pub fn split_at(&self, at: usize, prior: &PriorVector) -> (Pool, Pool) {
        let (left, right) = self.items.split_at(at);
        (Pool::from_items(left.to_vec(), prior), Pool::from_items(right.to_vec(), prior))
    }
}

/// Probability that `sub` is contaminated given that `parent` is:
/// `(1 - P_sub) / (1 - P_parent)`.
pub fn conditional_contamination(sub: &Pool, parent: &Pool) -> Result<f64> {
    debug_assert!(sub.items().iter().all(|i| parent.items().contains(i)));
    let denom = parent.contamination_prob();
    if denom <= 0.0 {
        return Err(Error::NumericDomain("parent pool can never be contaminated"));
    }
    Ok(sub.contamination_prob() / denom)
}
