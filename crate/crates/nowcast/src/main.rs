use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nowcast::config::Config;
use nowcast::error::Error;
use nowcast::montecarlo::{self, Design};
use nowcast::pipeline::{run_pipeline, Execution, Stages};
use nowcast::report::write_outputs;

/// Output directory used when neither --out nor the environment override is set.
const DEFAULT_OUT: &str = "nowcast-out";
const OUT_ENV: &str = "NOWCAST_OUT_DIR";

#[derive(Parser)]
#[command(name = "nowcast", version, about = "Unemployment nowcasting with search-intensity indicators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ADF and KPSS tests over levels, logs and differences
    Stationarity(RunArgs),
    /// Differenced rate on log-differenced search intensity with HAC errors
    Elasticity(RunArgs),
    /// Lag-restricted nowcasting regression with and without the indicator
    Nowcast(RunArgs),
    /// Rolling one-step AR versus VAR forecasts and the Diebold-Mariano test
    Forecast(RunArgs),
    /// Granger causality in both directions
    Causality(RunArgs),
    /// Every stage
    All(RunArgs),
    /// Size and power simulations
    Montecarlo(MonteCarloArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides NOWCAST_OUT_DIR)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only run this country code
    #[arg(long)]
    country: Option<String>,
}

#[derive(Args)]
struct MonteCarloArgs {
    #[arg(long, default_value_t = montecarlo::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    size_reps: usize,
    #[arg(long, default_value_t = 500)]
    power_reps: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.8])]
    coupling: Vec<f64>,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn run(args: RunArgs, stages: Stages) -> Result<(), Error> {
    let mut config = Config::load(&args.config)?;
    if let Some(code) = &args.country {
        config = config.filter(code)?;
    }
    let execution = if config.parallel { Execution::Concurrent } else { Execution::Sequential };
    let report = run_pipeline(&config, stages, execution).map_err(Error::Pipeline)?;
    for path in write_outputs(&report, &out_dir(args.out))? {
        println!("{}", path.display());
    }
    Ok(())
}

fn simulate(args: MonteCarloArgs) -> Result<(), Error> {
    let design = Design::default();
    let size = montecarlo::size_study(args.seed, args.size_reps, design).map_err(Error::Simulation)?;
    println!("seed = {}", args.seed);
    println!("size.replications = {}", size.replications);
    println!("size.granger_rejection_5pct = {:.4}", size.granger);
    println!("size.nowcast_rejection_5pct = {:.4}", size.nowcast);
    println!("size.dm_rejection_5pct = {:.4}", size.dm);
    for c in args.coupling {
        let design = Design { coupling: c, ..design };
        let power = montecarlo::power_study(args.seed, args.power_reps, design).map_err(Error::Simulation)?;
        println!("power[{c}].replications = {}", power.replications);
        println!("power[{c}].granger_rejection_5pct = {:.4}", power.granger);
        println!("power[{c}].nowcast_rejection_5pct = {:.4}", power.nowcast);
        println!("power[{c}].var_beats_ar = {:.4}", power.var_beats_ar);
    }
    Ok(())
}

fn only(set: fn(&mut Stages)) -> Stages {
    let mut s = Stages::NONE;
    set(&mut s);
    s
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Stationarity(a) => run(a, only(|s| s.stationarity = true)),
        Command::Elasticity(a) => run(a, only(|s| s.elasticity = true)),
        Command::Nowcast(a) => run(a, only(|s| s.nowcast = true)),
        Command::Forecast(a) => run(a, only(|s| s.forecast = true)),
        Command::Causality(a) => run(a, only(|s| s.causality = true)),
        Command::All(a) => run(a, Stages::ALL),
        Command::Montecarlo(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Pipeline(errors)) => {
            for e in &errors {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
