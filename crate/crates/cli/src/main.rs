use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dbp::presets::preset;
use dbp::{CliError, Config, Table};
use dbp_core::model::DEFAULT_BYTES_PER_ENTRY;

#[derive(Parser)]
#[command(name = "dbp", version, about = "Decentralized feedforward equalization: analysis and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled configuration (analyze, fig5, rate-qpsk, rate-16qam, rate-qpsk-loss, rate-16qam-loss).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; CSV goes to stdout if neither this nor output.dir is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic SINR over a (beta, Es/N0) grid.
    Analyze(RunArgs),
    /// Monte Carlo symbol error rates next to the analytic prediction.
    Simulate(RunArgs),
    /// Minimum BS-to-UE antenna ratio for a target rate and SNR loss.
    RateSearch(RunArgs),
    /// Data gathered at the central unit per coherence block.
    Volumes {
        #[arg(long, default_value_t = 16)]
        users: u64,
        #[arg(long, default_value_t = 1200)]
        subcarriers: u64,
        #[arg(long, default_value_t = 14)]
        symbols: u64,
        #[arg(long, default_value_t = 4)]
        clusters: u64,
        #[arg(long, default_value_t = DEFAULT_BYTES_PER_ENTRY)]
        bytes_per_entry: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Validate {
        #[arg(long, hide = true)]
        corrupt_fusion_weights: bool,
    },
}

fn load(args: &RunArgs) -> Result<Config, CliError> {
    match (&args.config, &args.preset) {
        (Some(path), _) => Config::load(path),
        (None, Some(name)) => preset(name),
        (None, None) => Err(CliError::Config("either --config or --preset is required".into())),
    }
}

fn emit(table: &Table, cfg: &Config, out: Option<&PathBuf>, default_name: &str) -> Result<(), CliError> {
    match out.or(cfg.output.dir.as_ref()) {
        Some(dir) => {
            let path = dir.join(cfg.output.file.as_deref().unwrap_or(default_name));
            table.save(&path)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
            Ok(())
        }
        None => table.write_csv(std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let cfg = load(&args)?;
            emit(&dbp::analyze(&cfg)?, &cfg, args.out.as_ref(), "analyze.csv")?;
        }
        Command::Simulate(args) => {
            let cfg = load(&args)?;
            let table = dbp::simulate(&cfg, args.seed, args.workers)?;
            emit(&table, &cfg, args.out.as_ref(), "simulate.csv")?;
        }
        Command::RateSearch(args) => {
            let cfg = load(&args)?;
            let table = dbp::rate_search(&cfg, args.workers)?;
            emit(&table, &cfg, args.out.as_ref(), "rate-search.csv")?;
        }
        Command::Volumes { users, subcarriers, symbols, clusters, bytes_per_entry, out } => {
            if users == 0 || subcarriers == 0 || symbols == 0 || clusters == 0 || bytes_per_entry == 0 {
                return Err(CliError::Config("volume parameters must be positive".into()));
            }
            let (_, table) = dbp::volumes(users, subcarriers, symbols, clusters, bytes_per_entry);
            println!("U = {users}, N_sc = {subcarriers}, N_sym = {symbols}, C = {clusters}");
            for row in &table.rows {
                println!("{:<3} {:>10} MiB", row[0].to_uppercase(), row[2]);
            }
            if let Some(dir) = out {
                table.save(&dir.join("volumes.csv"))?;
            }
        }
        Command::Validate { corrupt_fusion_weights } => {
            let report = dbp::validate(corrupt_fusion_weights);
            print!("{}", dbp::format_report(&report));
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
