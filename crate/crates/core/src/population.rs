//! Populations with independent, non-identical defect probabilities.

use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::{Distribution, Exp, Exp1};

use crate::seed::{rng_from_seed, Rng};
use crate::{Error, Result};

/// Smallest probability a generated prior may hold; keeps code lengths finite.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Per-item defect probabilities, each strictly inside `(0, 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVector {
    probs: Vec<f64>,
}

impl PriorVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Usage("prior vector must hold at least one item"));
        }
        if let Some(bad) = probs.iter().find(|&&p| !(p > 0.0 && p < 0.5)) {
            return Err(Error::Config(alloc::format!("defect probability {bad} outside (0, 0.5)")));
        }
        Ok(Self { probs })
    }

    pub fn iid(p: f64, size: usize) -> Result<Self> {
        Self::new(alloc::vec![p; size])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn p(&self, item: usize) -> f64 {
        self.probs[item]
    }

    /// Expected number of defectives.
    pub fn mu(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Entropy of the infection vector in bits.
    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }

    /// True when every entry is bit-identical to the first.
    pub fn is_iid(&self) -> bool {
        let first = self.probs[0];
        self.probs.iter().all(|&p| p == first)
    }

    /// Concatenates two priors (item indices of `other` are shifted).
    pub fn concat(&self, other: &PriorVector) -> PriorVector {
        let mut probs = self.probs.clone();
        probs.extend_from_slice(&other.probs);
        PriorVector { probs }
    }
}

/// `h(p) = p log2(1/p) + (1-p) log2(1/(1-p))`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * libm::log2(x) };
    term(p) + term(1.0 - p)
}

/// Entropy in bits of independent Bernoulli items. Accepts any `p` in `[0, 1]`.
pub fn entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| binary_entropy(p)).sum()
}

/// Hidden ground truth: `true` marks a defective item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfectionVector {
    status: Vec<bool>,
}

impl InfectionVector {
    pub fn new(status: Vec<bool>) -> Self {
        Self { status }
    }

    pub fn clean(len: usize) -> Self {
        Self::new(alloc::vec![false; len])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.status.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    #[inline]
    pub fn is_defective(&self, item: usize) -> bool {
        self.status[item]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.status
    }

    pub fn defective_count(&self) -> usize {
        self.status.iter().filter(|&&x| x).count()
    }

    pub fn defectives(&self) -> impl Iterator<Item = usize> + '_ {
        self.status.iter().enumerate().filter_map(|(i, &x)| x.then_some(i))
    }
}

/// A prior family with its dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind {
    /// Every item defective with the same probability.
    Iid { size: usize, p: f64 },
    /// Flat Dirichlet vector scaled so that it sums to `scale`.
    Dirichlet { size: usize, scale: f64 },
    /// I.i.d. exponential values with the given rate, truncated below 1/2.
    TruncatedExponential { size: usize, rate: f64 },
}

impl PriorKind {
    pub fn size(&self) -> usize {
        match *self {
            PriorKind::Iid { size, .. }
            | PriorKind::Dirichlet { size, .. }
            | PriorKind::TruncatedExponential { size, .. } => size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size() == 0 {
            return Err(Error::Config("population size must be at least 1".into()));
        }
        match *self {
            PriorKind::Iid { p, .. } if !(p > 0.0 && p < 0.5) => {
                Err(Error::Config(alloc::format!("iid probability {p} outside (0, 0.5)")))
            }
            PriorKind::Dirichlet { size, scale } if !(scale > 0.0 && scale < 0.5 * size as f64) => {
                Err(Error::Config(alloc::format!("dirichlet scale {scale} outside (0, size/2)")))
            }
            PriorKind::TruncatedExponential { rate, .. } if !(rate > 0.0 && rate.is_finite()) => {
                Err(Error::Config(alloc::format!("exponential rate {rate} must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// Draws a prior from this family using `rng`.
    pub fn sample(&self, rng: &mut Rng) -> Result<PriorVector> {
        self.validate()?;
        let probs = match *self {
            PriorKind::Iid { size, p } => alloc::vec![p; size],
            PriorKind::Dirichlet { size, scale } => {
                // Flat Dirichlet = normalised i.i.d. Exp(1). An entry that
                // lands at or above 1/2 is redrawn against the original total.
                let mut raw: Vec<f64> = (0..size).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = raw.iter().sum();
                let factor = scale / total;
                for g in raw.iter_mut() {
                    while *g * factor >= 0.5 {
                        *g = Exp1.sample(rng);
                    }
                    *g = (*g * factor).max(PROBABILITY_FLOOR);
                }
                raw
            }
            PriorKind::TruncatedExponential { size, rate } => {
                let exp = Exp::new(rate).map_err(|_| Error::Config("invalid exponential rate".into()))?;
                (0..size)
                    .map(|_| loop {
                        let x: f64 = exp.sample(rng);
                        if x < 0.5 {
                            break x.max(PROBABILITY_FLOOR);
                        }
                    })
                    .collect()
            }
        };
        PriorVector::new(probs)
    }
}

/// A prior family plus the seed that makes its draw reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub seed: u64,
}

pub fn generate_prior(spec: &PriorSpec) -> Result<PriorVector> {
    spec.kind.sample(&mut rng_from_seed(spec.seed))
}

/// Independent Bernoulli draws `X_i ~ Bernoulli(p_i)`.
pub fn sample_infections_with(prior: &PriorVector, rng: &mut Rng) -> InfectionVector {
    InfectionVector::new(prior.probs().iter().map(|&p| rng.random::<f64>() < p).collect())
}

pub fn sample_infections(prior: &PriorVector, seed: u64) -> InfectionVector {
    sample_infections_with(prior, &mut rng_from_seed(seed))
}
