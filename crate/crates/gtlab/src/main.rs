use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use gtlab::{parse_prior, run_sweep, write_csv, HarnessError, SweepConfig};
use gtlab_core::algorithms::DEFAULT_THETA;
use gtlab_core::bounds::{compute_bounds, etn_iid_bound};
use gtlab_core::population::sample_infections_with;
use gtlab_core::seed::{derive_seed, rng_from_seed, PRIOR_STREAM, TRUTH_STREAM};
use gtlab_core::{run, verify_zero_error, Algorithm, Oracle, RunOptions};

#[derive(Parser)]
#[command(name = "gtlab", version, about = "Zero-error adaptive group testing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep described by a JSON config and write its CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run one algorithm on one sampled population.
    Simulate {
        #[arg(long, value_parser = parse_algorithm)]
        algorithm: Algorithm,
        /// e.g. `dirichlet:size=1000,scale=5`, `texp:size=500,mean=0.0025`, `iid:size=100,p=0.05`
        #[arg(long)]
        prior: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        /// Print every test as it was issued.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the closed-form bounds for a sampled prior.
    Bounds {
        #[arg(long)]
        prior: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        /// Emit a CSV header and row instead of a table.
        #[arg(long)]
        csv: bool,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: gtlab_core::Error| e.to_string())
}

fn label(algorithm: Algorithm) -> String {
    if algorithm.is_baseline() {
        format!("{algorithm} (baseline approximation)")
    } else {
        algorithm.to_string()
    }
}

fn sweep(config: PathBuf, output: Option<PathBuf>) -> anyhow::Result<()> {
    let mut config = SweepConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
    if output.is_some() {
        config.output = output;
    }
    let start = Instant::now();
    let rows = run_sweep(&config)?;
    println!("{:>5} {:>10} {:>10} {:>28} {:>10} {:>8}", "point", "mu", "H(X)", "algorithm", "mean", "ci95");
    for row in &rows {
        for s in &row.stats {
            let ci = s.ci95.map_or_else(|| "-".to_owned(), |c| format!("{c:.3}"));
            println!(
                "{:>5} {:>10.4} {:>10.4} {:>28} {:>10.4} {:>8}",
                row.point,
                row.mu,
                row.entropy,
                label(s.algorithm),
                s.mean_tests,
                ci
            );
        }
    }
    eprintln!("{} points x {} trials in {:.2?}", rows.len(), config.trials, start.elapsed());
    if let Some(path) = &config.output {
        write_csv(&rows, path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn simulate(algorithm: Algorithm, prior: &str, seed: u64, theta: f64, verbose: bool) -> anyhow::Result<()> {
    let kind = parse_prior(prior)?;
    let prior = kind.sample(&mut rng_from_seed(derive_seed(seed, &[PRIOR_STREAM])))?;
    let truth = sample_infections_with(&prior, &mut rng_from_seed(derive_seed(seed, &[TRUTH_STREAM])));
    let mut oracle = if verbose { Oracle::with_log(truth.clone()) } else { Oracle::new(truth.clone()) };
    let start = Instant::now();
    let options = RunOptions { theta, ..RunOptions::default() };
    let mut record = run(algorithm, &prior, &mut oracle, &options)?;
    record.wall_time = start.elapsed().as_secs_f64();

    if let Some(log) = oracle.log() {
        for (k, entry) in log.0.iter().enumerate() {
            let role = if entry.root { "set" } else { "child" };
            let result = if entry.contaminated { "+" } else { "-" };
            println!("T{:<5} {role:<5} {result} {:?}", k + 1, entry.items);
        }
        for (item, cost) in &record.per_defective_costs {
            println!("defective {item} (p = {:.6}) found with {cost} tests", prior.p(*item));
        }
    }
    println!("algorithm           {}", label(algorithm));
    println!("population          {}", prior.len());
    println!("mu                  {:.6}", prior.mu());
    println!("entropy             {:.6}", prior.entropy());
    println!("defectives          {}", truth.defective_count());
    println!("total tests         {}", record.total_tests);
    println!("negative set tests  {}", record.negative_root_tests);
    println!("wall time           {:.6} s", record.wall_time);
    if !verify_zero_error(&record, &truth) {
        return Err(HarnessError::ZeroError { algorithm, point: 0, trial: 0, seed }.into());
    }
    Ok(())
}

fn bounds(prior: &str, seed: u64, theta: f64, csv: bool) -> anyhow::Result<()> {
    let kind = parse_prior(prior)?;
    let prior = kind.sample(&mut rng_from_seed(derive_seed(seed, &[PRIOR_STREAM])))?;
    let b = compute_bounds(&prior, theta)?;
    let mut table = vec![
        ("mu", prior.mu()),
        ("entropy_lb", b.entropy_lb),
        ("ours_inid", b.ours_inid),
        ("ours_iid", b.ours_iid),
        ("li", b.li),
        ("kealy", b.kealy),
        ("partitions_max", b.partitions_max),
        ("etn_iid", b.etn_iid),
    ];
    if let Ok(etn) = etn_iid_bound(&prior) {
        table.push(("etn_iid_intermediate", etn.intermediate));
    }
    if csv {
        println!("{}", table.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(","));
        println!("{}", table.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>().join(","));
    } else {
        for (name, value) in table {
            println!("{name:<22} {value:.6}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep { config, output } => sweep(config, output),
        Command::Simulate { algorithm, prior, seed, theta, verbose } => {
            simulate(algorithm, &prior, seed, theta, verbose)
        }
        Command::Bounds { prior, seed, theta, csv } => bounds(&prior, seed, theta, csv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if matches!(err.downcast_ref::<HarnessError>(), Some(HarnessError::ZeroError { .. })) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
