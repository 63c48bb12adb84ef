//! End-to-end acceptance checks. Prints one `PASS`/`FAIL` line per criterion
//! and fails if any criterion fails.
//!
//! Runs both desk-scale experiments, so build with optimisations (the
//! workspace test profile does).

use std::path::PathBuf;
use std::time::Instant;

use gtlab::{run_sweep, write_csv, PriorFamily, SweepConfig, SweepRow};
use gtlab_core::algorithms::{run_li_laminar, run_refined_laminar_sfh, sfh_cost_violations};
use gtlab_core::bounds::expected_items_to_clean_set;
use gtlab_core::population::sample_infections;
use gtlab_core::seed::{derive_seed, rng_from_seed};
use gtlab_core::{run, verify_zero_error, Algorithm, Oracle, PriorKind, PriorVector, RunOptions};
use rand::Rng;

struct Report {
    failed: Vec<&'static str>,
}

impl Report {
    fn check(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(name);
        }
    }
}

#[derive(Default)]
struct Tally {
    runs: usize,
    zero_error_failures: usize,
    negative_violations: usize,
    cost_violations: usize,
    spread_bound_violations: usize,
    defectives: usize,
}

impl Tally {
    fn absorb_sweep(&mut self, rows: &[SweepRow]) {
        for row in rows {
            for stats in &row.stats {
                self.spread_bound_violations += stats.spread_bound_violations;
                if matches!(stats.algorithm, Algorithm::RefinedSfh | Algorithm::RefinedMe) {
                    self.negative_violations += stats.negative_bound_violations;
                }
                if stats.algorithm == Algorithm::RefinedSfh {
                    self.cost_violations += stats.cost_bound_violations;
                }
            }
        }
    }
}

fn config(name: &str) -> SweepConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let mut config = SweepConfig::load(&path).unwrap();
    config.output = None;
    config
}

/// A small instance from one of the three prior families, `|P| <= 50`.
fn small_prior(seed: u64) -> PriorVector {
    let mut rng = rng_from_seed(derive_seed(seed, &[0]));
    let size = rng.random_range(1..=50usize);
    let kind = match rng.random_range(0..3) {
        0 => PriorKind::Iid { size, p: rng.random_range(0.001..0.49) },
        1 if size >= 3 => PriorKind::Dirichlet { size, scale: rng.random_range(0.2..(size as f64 / 2.0).min(5.0)) },
        _ => PriorKind::TruncatedExponential { size, rate: rng.random_range(2.0..200.0) },
    };
    kind.sample(&mut rng).unwrap()
}

fn sfh(row: &SweepRow) -> &gtlab::AlgorithmStats {
    row.stats_for(Algorithm::RefinedSfh).unwrap()
}

#[test]
fn acceptance() {
    let mut report = Report { failed: Vec::new() };
    let mut tally = Tally::default();

    // Zero error over small mixed instances, all five algorithms.
    let start = Instant::now();
    for seed in 0..10_000u64 {
        let prior = small_prior(seed);
        let truth = sample_infections(&prior, derive_seed(seed, &[1]));
        for algorithm in Algorithm::ALL {
            let mut oracle = Oracle::new(truth.clone());
            let record = run(algorithm, &prior, &mut oracle, &RunOptions::default()).unwrap();
            tally.runs += 1;
            if !verify_zero_error(&record, &truth) {
                tally.zero_error_failures += 1;
            }
            tally.spread_bound_violations += record.formed_sets.iter().filter(|s| !s.spread_bound_holds()).count();
            if matches!(algorithm, Algorithm::RefinedSfh | Algorithm::RefinedMe)
                && record.negative_root_tests as f64 > 2.0 * prior.mu() + 1.0
            {
                tally.negative_violations += 1;
            }
            if algorithm == Algorithm::RefinedSfh {
                tally.cost_violations += sfh_cost_violations(&record, &prior);
                tally.defectives += record.per_defective_costs.len();
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report.check(
        "zero-error",
        tally.zero_error_failures == 0 && elapsed < 60.0,
        format!("{} failures in {} runs, {elapsed:.1}s", tally.zero_error_failures, tally.runs),
    );

    // Experiment 1: Dirichlet sweep, refined SFH against the entropy.
    let start = Instant::now();
    let exp1 = run_sweep(&config("experiment1.json")).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    tally.absorb_sweep(&exp1);
    let gaps: Vec<f64> = exp1.iter().map(|r| sfh(r).mean_tests - r.entropy).collect();
    let worst = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let within = gaps.iter().filter(|&&g| g < 1.0).count();
    report.check(
        "entropy-gap",
        within == exp1.len() && elapsed < 300.0,
        format!(
            "mean tests - H(X) < 1 at {within}/{} points (mu {:.1}..{:.1}), worst gap {worst:.3}, {elapsed:.1}s",
            exp1.len(),
            exp1.first().unwrap().mu,
            exp1.last().unwrap().mu
        ),
    );

    // Experiment 2: truncated exponential sweep, all five algorithms.
    let exp2_config = config("experiment2.json");
    let exp2 = run_sweep(&exp2_config).unwrap();
    tally.absorb_sweep(&exp2);

    let mut sandwich_bad = Vec::new();
    for (label, rows) in [("exp1", &exp1), ("exp2", &exp2)] {
        for row in rows.iter() {
            let s = sfh(row);
            let ci = s.ci95.unwrap_or(0.0);
            if s.mean_tests < row.entropy - 2.0 * ci || s.mean_tests > row.bounds.ours_inid {
                sandwich_bad.push(format!("{label}#{}", row.point));
            }
        }
    }
    report.check(
        "bound-sandwich",
        sandwich_bad.is_empty(),
        format!("H(X) - 2*CI95 <= mean <= H+3mu+1 violated at {:?}", sandwich_bad),
    );

    // Mean negative root tests for iid populations.
    let mut iid_means = Vec::new();
    for p in [0.01, 0.05, 0.1] {
        let cfg = SweepConfig {
            population_size: 1000,
            prior: PriorFamily::Iid,
            grid_start: p,
            grid_end: p,
            grid_points: 1,
            trials: 500,
            algorithms: vec!["sfh".into(), "me".into()],
            seed: 2023,
            theta: 1e-5,
            output: None,
        };
        let rows = run_sweep(&cfg).unwrap();
        tally.absorb_sweep(&rows);
        let row = &rows[0];
        for stats in &row.stats {
            let limit = row.mu + 1.0 + 2.0 * stats.negative_root_ci95.unwrap();
            iid_means.push((
                p,
                stats.algorithm,
                stats.mean_negative_root,
                row.mu + 1.0,
                stats.mean_negative_root <= limit,
            ));
        }
    }
    let iid_means_ok = iid_means.iter().all(|c| c.4);
    report.check(
        "negative-groups",
        tally.negative_violations == 0 && iid_means_ok,
        format!(
            "{} runs over 2mu+1; iid means {}",
            tally.negative_violations,
            iid_means
                .iter()
                .map(|(p, a, m, b, _)| format!("p={p} {a} {m:.2} vs mu+1={b:.2}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );

    report.check(
        "per-defective-cost",
        tally.cost_violations == 0,
        format!(
            "{} violations (small instances: {} defectives, plus all sweeps)",
            tally.cost_violations, tally.defectives
        ),
    );

    // Run-length simulation: items drawn up to the end of the first n consecutive clean ones.
    let mut rng = rng_from_seed(derive_seed(2024, &[]));
    let mut run_lengths = Vec::new();
    for (p, n) in [(0.1, 7u32), (0.2, 4u32)] {
        let samples = 1_000_000u64;
        let mut total = 0u64;
        for _ in 0..samples {
            let mut run = 0;
            while run < n {
                total += 1;
                run = if rng.random::<f64>() < p { 0 } else { run + 1 };
            }
        }
        let simulated = total as f64 / samples as f64;
        let formula = expected_items_to_clean_set(p, n);
        run_lengths.push((p, n, simulated, formula, ((simulated - formula) / formula).abs()));
    }
    report.check(
        "clean-run-length",
        run_lengths.iter().all(|l| l.4 < 0.01),
        run_lengths
            .iter()
            .map(|(p, n, s, f, e)| format!("(p={p}, n={n}) sim {s:.4} vs {f:.4} ({:.3}%)", 100.0 * e))
            .collect::<Vec<_>>()
            .join(", "),
    );

    report.check("saturated-set-spread", tally.spread_bound_violations == 0, format!("{} violations", tally.spread_bound_violations));

    // Ordering on experiment 2.
    let mut good_points = 0;
    let mut li_improved_ok = true;
    for row in &exp2 {
        let m = |a| row.stats_for(a).unwrap().mean_tests;
        let ci = row.stats_for(Algorithm::RefinedSfh).unwrap().ci95.unwrap_or(0.0);
        let best = m(Algorithm::RefinedSfh).max(m(Algorithm::RefinedMe));
        let baseline = m(Algorithm::Li).min(m(Algorithm::LiImproved)).min(m(Algorithm::Kealy));
        if m(Algorithm::RefinedSfh) <= m(Algorithm::RefinedMe) + ci && best < baseline {
            good_points += 1;
        }
        li_improved_ok &= m(Algorithm::LiImproved) < m(Algorithm::Li);
    }
    report.check(
        "algorithm-ordering",
        good_points >= 23 && li_improved_ok,
        format!("{good_points}/{} points ordered, li-improved < li everywhere: {li_improved_ok}", exp2.len()),
    );

    // Paired dominance on small mixed instances.
    let mut worse = 0;
    for seed in 0..1000u64 {
        let prior = small_prior(derive_seed(seed, &[7]));
        let truth = sample_infections(&prior, derive_seed(seed, &[8]));
        let a = run_refined_laminar_sfh(&prior, &mut Oracle::new(truth.clone())).unwrap();
        let b = run_li_laminar(&prior, &mut Oracle::new(truth)).unwrap();
        if a.total_tests > b.total_tests {
            worse += 1;
        }
    }
    report.check("paired-dominance", worse == 0, format!("refined SFH above Li in {worse}/1000 pairs"));

    // Determinism: experiment 2 twice, byte for byte.
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_csv(&exp2, &a).unwrap();
    write_csv(&run_sweep(&exp2_config).unwrap(), &b).unwrap();
    let same = std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap();
    report.check("determinism", same, format!("experiment 2 CSVs identical: {same}"));

    assert!(report.failed.is_empty(), "failed criteria: {:?}", report.failed);
}
