//! Closed-form bounds on the expected number of tests.

use crate::population::PriorVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet {
    /// `H(X)`: no zero-error scheme can do better on average.
    pub entropy_lb: f64,
    /// `H + 3 mu + 1`, the refined SFH algorithm on any independent prior.
    pub ours_inid: f64,
    /// `H + 2 mu + 1`, the same algorithm on an i.i.d. prior.
    pub ours_iid: f64,
    /// `2H + 6 mu`.
    pub li: f64,
    /// `H + 4 mu + 2 sqrt(mu (-log2(2 theta))) + 1`.
    pub kealy: f64,
    /// `2 mu + 1`, most negative first-stage sets.
    pub partitions_max: f64,
    /// `mu + 1`, expected negative first-stage sets, i.i.d. only.
    pub etn_iid: f64,
}

impl BoundSet {
    /// Bounds from `H(X)` and `mu` directly.
    pub fn from_moments(entropy: f64, mu: f64, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self {
            entropy_lb: entropy,
            ours_inid: entropy + 3.0 * mu + 1.0,
            ours_iid: entropy + 2.0 * mu + 1.0,
            li: 2.0 * entropy + 6.0 * mu,
            kealy: entropy + 4.0 * mu + kealy_additive_term(mu, theta) + 1.0,
            partitions_max: 2.0 * mu + 1.0,
            etn_iid: mu + 1.0,
        })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 0.5 {
        Ok(())
    } else {
        Err(Error::Config(alloc::format!("theta {theta} outside (0, 0.5)")))
    }
}

/// `2 sqrt(mu (-log2(2 theta)))`.
pub fn kealy_additive_term(mu: f64, theta: f64) -> f64 {
    2.0 * libm::sqrt(mu * -libm::log2(2.0 * theta))
}

pub fn compute_bounds(prior: &PriorVector, theta: f64) -> Result<BoundSet> {
    BoundSet::from_moments(prior.entropy(), prior.mu(), theta)
}

/// Expected number of i.i.d. items classified up to and including the first
/// clean set of `n`: `((1-p)^-n - 1) / p`.
pub fn expected_items_to_clean_set(p: f64, n: u32) -> f64 {
    // (1-p)^-n - 1 = expm1(-n ln(1-p)), accurate for small p.
    libm::expm1(-(n as f64) * libm::log1p(-p)) / p
}

/// Greedy saturated set size for an i.i.d. prior: the least `n` with `(1-p)^n <= 1/2`.
pub fn iid_saturated_size(p: f64) -> u32 {
    libm::ceil(libm::log(0.5) / libm::log1p(-p)) as u32
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtnBound {
    /// `mu + 1`.
    pub bound: f64,
    /// `|P| / E[N_n] + 1 = mu / ((1-p)^-n - 1) + 1`, never above `bound`.
    pub intermediate: f64,
    pub set_size: u32,
}

/// Bound on the expected number of negative first-stage sets, i.i.d. priors only.
pub fn etn_iid_bound(prior: &PriorVector) -> Result<EtnBound> {
    if !prior.is_iid() {
        return Err(Error::Usage("negative-set bound holds for i.i.d. priors only"));
    }
    let p = prior.p(0);
    let n = iid_saturated_size(p);
    let mu = prior.mu();
    Ok(EtnBound {
        bound: mu + 1.0,
        intermediate: prior.len() as f64 / expected_items_to_clean_set(p, n) + 1.0,
        set_size: n,
    })
}
