//! Paired Monte Carlo sweeps.
//!
//! Trial `t` at grid point `k` draws its prior and ground truth from streams
//! derived from `(seed, k, t)` alone, and every requested algorithm runs on
//! that same pair. Trials run in parallel; results are reduced in trial order
//! so output does not depend on the thread count.

use std::time::Instant;

use gtlab_core::algorithms::{me_branch_bound_violations, sfh_cost_violations};
use gtlab_core::bounds::BoundSet;
use gtlab_core::population::sample_infections_with;
use gtlab_core::seed::{derive_seed, rng_from_seed, PRIOR_STREAM, TRUTH_STREAM};
use gtlab_core::{run, verify_zero_error, Algorithm, Oracle, PriorKind, RunOptions};
use rayon::prelude::*;

use crate::config::SweepConfig;
use crate::{HarnessError, Result};

/// Trials needed before a confidence interval is reported.
pub const MIN_TRIALS_FOR_CI: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmStats {
    pub algorithm: Algorithm,
    pub mean_tests: f64,
    pub std_tests: f64,
    /// `1.96 std / sqrt(trials)`; `None` below [`MIN_TRIALS_FOR_CI`] trials.
    pub ci95: Option<f64>,
    pub mean_negative_root: f64,
    pub negative_root_ci95: Option<f64>,
    /// Runs whose negative first-stage count exceeded `2 mu + 1`.
    pub negative_bound_violations: usize,
    /// Defectives over the per-item cost bound (strict for SFH, soft for ME).
    pub cost_bound_violations: usize,
    /// Saturated sets breaking `mu_S < 1 - (p_max - p_min)` or `mu_S >= 1/2`.
    pub spread_bound_violations: usize,
    pub mean_wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: usize,
    /// The grid value (Dirichlet scale, exponential mean or iid `p`).
    pub parameter: f64,
    /// Trial means, since the prior is redrawn every trial.
    pub mu: f64,
    pub entropy: f64,
    /// Trial means of every bound.
    pub bounds: BoundSet,
    pub stats: Vec<AlgorithmStats>,
}

impl SweepRow {
    pub fn stats_for(&self, algorithm: Algorithm) -> Option<&AlgorithmStats> {
        self.stats.iter().find(|s| s.algorithm == algorithm)
    }
}

struct RunSummary {
    tests: usize,
    negative_root: usize,
    negative_violation: bool,
    cost_violations: usize,
    spread_bound_violations: usize,
    wall_time: f64,
}

struct TrialResult {
    mu: f64,
    entropy: f64,
    bounds: BoundSet,
    runs: Vec<RunSummary>,
}

fn run_trial(
    kind: PriorKind,
    algorithms: &[Algorithm],
    theta: f64,
    master: u64,
    point: usize,
    trial: usize,
) -> Result<TrialResult> {
    let seed = derive_seed(master, &[point as u64, trial as u64]);
    let prior = kind.sample(&mut rng_from_seed(derive_seed(seed, &[PRIOR_STREAM])))?;
    let truth = sample_infections_with(&prior, &mut rng_from_seed(derive_seed(seed, &[TRUTH_STREAM])));
    let mu = prior.mu();
    let entropy = prior.entropy();
    let options = RunOptions { theta, ..RunOptions::default() };
    let mut runs = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        let mut oracle = Oracle::new(truth.clone());
        let start = Instant::now();
        let record = run(algorithm, &prior, &mut oracle, &options)?;
        let wall_time = start.elapsed().as_secs_f64();
        if !verify_zero_error(&record, &truth) {
            return Err(HarnessError::ZeroError { algorithm, point, trial, seed });
        }
        let cost_violations = match algorithm {
            Algorithm::RefinedSfh => sfh_cost_violations(&record, &prior),
            Algorithm::RefinedMe => me_branch_bound_violations(&record, &prior),
            _ => 0,
        };
        runs.push(RunSummary {
            tests: record.total_tests,
            negative_root: record.negative_root_tests,
            negative_violation: record.negative_root_tests as f64 > 2.0 * mu + 1.0,
            cost_violations,
            spread_bound_violations: record.formed_sets.iter().filter(|s| !s.spread_bound_holds()).count(),
            wall_time,
        });
    }
    Ok(TrialResult { mu, entropy, bounds: BoundSet::from_moments(entropy, mu, theta)?, runs })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (zero for a single value).
fn std_dev(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

fn ci95(std: f64, n: usize) -> Option<f64> {
    (n >= MIN_TRIALS_FOR_CI).then(|| 1.96 * std / (n as f64).sqrt())
}

fn mean_bounds(trials: &[TrialResult]) -> BoundSet {
    let avg = |f: fn(&BoundSet) -> f64| mean(&trials.iter().map(|t| f(&t.bounds)).collect::<Vec<_>>());
    BoundSet {
        entropy_lb: avg(|b| b.entropy_lb),
        ours_inid: avg(|b| b.ours_inid),
        ours_iid: avg(|b| b.ours_iid),
        li: avg(|b| b.li),
        kealy: avg(|b| b.kealy),
        partitions_max: avg(|b| b.partitions_max),
        etn_iid: avg(|b| b.etn_iid),
    }
}

fn aggregate(point: usize, parameter: f64, algorithms: &[Algorithm], trials: &[TrialResult]) -> SweepRow {
    let n = trials.len();
    let stats = algorithms
        .iter()
        .enumerate()
        .map(|(slot, &algorithm)| {
            let runs = || trials.iter().map(move |t| &t.runs[slot]);
            let tests: Vec<f64> = runs().map(|r| r.tests as f64).collect();
            let negatives: Vec<f64> = runs().map(|r| r.negative_root as f64).collect();
            let mean_tests = mean(&tests);
            let std_tests = std_dev(&tests, mean_tests);
            let mean_negative_root = mean(&negatives);
            AlgorithmStats {
                algorithm,
                mean_tests,
                std_tests,
                ci95: ci95(std_tests, n),
                mean_negative_root,
                negative_root_ci95: ci95(std_dev(&negatives, mean_negative_root), n),
                negative_bound_violations: runs().filter(|r| r.negative_violation).count(),
                cost_bound_violations: runs().map(|r| r.cost_violations).sum(),
                spread_bound_violations: runs().map(|r| r.spread_bound_violations).sum(),
                mean_wall_time: mean(&runs().map(|r| r.wall_time).collect::<Vec<_>>()),
            }
        })
        .collect();
    SweepRow {
        point,
        parameter,
        mu: mean(&trials.iter().map(|t| t.mu).collect::<Vec<_>>()),
        entropy: mean(&trials.iter().map(|t| t.entropy).collect::<Vec<_>>()),
        bounds: mean_bounds(trials),
        stats,
    }
}

/// Runs every grid point of `config`, rows in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let algorithms = config.parsed_algorithms()?;
    let grid = config.grid();
    let body = || {
        grid.iter()
            .enumerate()
            .map(|(point, &value)| {
                let kind = config.prior.kind(config.population_size, value);
                let trials = (0..config.trials)
                    .into_par_iter()
                    .map(|trial| run_trial(kind, &algorithms, config.theta, config.seed, point, trial))
                    .collect::<Result<Vec<_>>>()?;
                log::debug!("point {point} ({value}) done");
                Ok(aggregate(point, value, &algorithms, &trials))
            })
            .collect::<Result<Vec<_>>>()
    };
    match thread_count()? {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .install(body),
        None => body(),
    }
}

/// `GTLAB_THREADS`, when set.
pub fn thread_count() -> Result<Option<usize>> {
    match std::env::var("GTLAB_THREADS") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| HarnessError::Config(format!("GTLAB_THREADS=`{raw}` is not a positive integer"))),
        Err(_) => Ok(None),
    }
}
