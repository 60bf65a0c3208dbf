//! `hsp-sim run` and `hsp-sim verify`. Exit codes: 0 pass, 1 failures,
//! 2 configuration error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heisenberg_hsp::experiment::{read_config_file, run_experiment, verify_suite, ExperimentConfig, VerifyConfig};
use heisenberg_hsp::HspError;

#[derive(Parser)]
#[command(name = "hsp-sim", version, about = "Hidden subgroup experiments over Weyl-Heisenberg groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded recovery trials and write a JSON report.
    #[command(alias = "run-experiment")]
    Run(RunArgs),
    /// Run the invariant checks and print one line per check.
    #[command(alias = "verify-suite")]
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// abelian, normal or any.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// dense, structured or analytic.
    #[arg(long)]
    backend: Option<String>,
    /// Subgroup literal `p,n;gen=x|y|z;...` planted in every trial.
    #[arg(long)]
    subgroup: Option<String>,
    /// JSON output path; CSV histograms are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// discard or negate_first.
    #[arg(long)]
    policy: Option<String>,
    /// Pins dim S_H of random plants.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    min_success: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated wire permutation applied to the circuit (negative control).
    #[arg(long)]
    permute_wires: Option<String>,
}

fn base(config: &Option<PathBuf>) -> Result<BTreeMap<String, String>, HspError> {
    match config {
        Some(path) => read_config_file(path),
        None => Ok(BTreeMap::new()),
    }
}

fn set<T: ToString>(map: &mut BTreeMap<String, String>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        map.insert(key.to_string(), v.to_string());
    }
}

fn run(args: RunArgs) -> Result<bool, HspError> {
    let mut m = base(&args.config)?;
    set(&mut m, "p", &args.p);
    set(&mut m, "n", &args.n);
    set(&mut m, "case", &args.case);
    set(&mut m, "trials", &args.trials);
    set(&mut m, "seed", &args.seed);
    set(&mut m, "backend", &args.backend);
    set(&mut m, "subgroup", &args.subgroup);
    set(&mut m, "out", &args.out.as_ref().map(|p| p.display().to_string()));
    set(&mut m, "policy", &args.policy);
    set(&mut m, "dim", &args.dim);
    set(&mut m, "min_success", &args.min_success);
    let config = ExperimentConfig::from_map(&m)?;
    let report = run_experiment(&config)?;
    match &config.out {
        Some(path) => {
            report.write(path)?;
            eprintln!(
                "{}/{} recovered, mean accepted rounds {:.2}, mean queries {:.2} -> {}",
                report.successes,
                report.trials,
                report.mean_accepted_rounds,
                report.mean_queries,
                path.display()
            );
        }
        None => print!("{}", report.to_json()),
    }
    Ok(report.success_rate() >= config.min_success)
}

fn verify(args: VerifyArgs) -> Result<bool, HspError> {
    let mut m = base(&args.config)?;
    set(&mut m, "p", &args.p);
    set(&mut m, "n", &args.n);
    set(&mut m, "seed", &args.seed);
    set(&mut m, "permute_wires", &args.permute_wires);
    let config = VerifyConfig::from_map(&m)?;
    let report = verify_suite(&config)?;
    println!("{report}");
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
    };
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
