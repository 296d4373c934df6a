use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bansim::commands::{self, Format, SimulateOptions};
use bansim::{effective_registry, CliError};
use bansim_core::csma::{MacTimingConstants, PriorityClass};
use bansim_core::efficiency::OverheadProfile;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Simulation and analysis toolkit for IEEE 802.15.6 body area networks.
#[derive(Debug, Parser)]
#[command(name = "bansim", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file and write per-node statistics.
    Simulate(SimulateArgs),
    /// Analytic bandwidth efficiency over payload sizes.
    Efficiency(EfficiencyArgs),
    /// Build or parse PHY frames.
    #[command(subcommand)]
    Frame(FrameCommand),
    /// Print the PHY configuration registry with information data rates.
    Rates,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    scenario: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the event trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Number of replicas, with consecutive seeds.
    #[arg(long)]
    replicas: Option<usize>,
    /// Run replicas on this many threads.
    #[arg(long, default_value_t = 1)]
    sweep_parallel: usize,
}

#[derive(Debug, Args)]
struct EfficiencyArgs {
    /// Registry names; defaults to the 21 rate-table rows.
    #[arg(long = "config")]
    configs: Vec<String>,
    /// Every registry entry.
    #[arg(long, conflicts_with = "configs")]
    all: bool,
    /// Payload sizes in bytes, e.g. `1-255` or `10,50,100`.
    #[arg(long, default_value = "1-255")]
    payloads: String,
    /// pSIFS in µs.
    #[arg(long)]
    psifs_us: Option<u64>,
    /// CSMA slot length in µs.
    #[arg(long)]
    slot_us: Option<u64>,
    /// User priority whose CWmin sets the mean backoff.
    #[arg(long)]
    priority: Option<u8>,
}

#[derive(Debug, Subcommand)]
enum FrameCommand {
    /// Build a frame and print its annotated hex dump.
    Build {
        #[arg(long)]
        config: String,
        /// MAC header as hex; defaults to a data frame from node 1.
        #[arg(long)]
        header: Option<String>,
        /// Frame body as hex.
        #[arg(long)]
        body: Option<String>,
        /// Frame body as text.
        #[arg(long)]
        text: Option<String>,
    },
    /// Parse a frame given as hex and list its fields.
    Parse {
        #[arg(long)]
        config: String,
        hex: String,
    },
}

fn profile(args: &EfficiencyArgs) -> Result<OverheadProfile, CliError> {
    let mut p = OverheadProfile::default();
    if let Some(v) = args.psifs_us {
        p.timing.psifs_us = v;
    }
    if let Some(v) = args.slot_us {
        p.timing.slot_us = v;
    }
    if let Some(up) = args.priority {
        p.priority = PriorityClass::for_priority(up).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    MacTimingConstants::validate(&p.timing).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Table => Format::Table,
    };
    let registry = effective_registry()?;
    let text = match cli.command {
        Command::Rates => commands::rates(&registry, format),
        Command::Efficiency(args) => {
            let names = if args.all {
                registry.iter().map(|e| e.name.clone()).collect()
            } else if args.configs.is_empty() {
                commands::table_names()
            } else {
                args.configs.clone()
            };
            let payloads = commands::parse_payloads(&args.payloads)?;
            let points = commands::efficiency_points(&registry, &names, &payloads, &profile(&args)?)?;
            commands::format_efficiency(&points, format)
        }
        Command::Frame(FrameCommand::Build { config, header, body, text }) => {
            let body = commands::frame_body(body.as_deref(), text.as_deref())?;
            commands::frame_build(&registry, &config, header.as_deref(), &body)?
        }
        Command::Frame(FrameCommand::Parse { config, hex }) => commands::frame_parse(&registry, &config, &hex)?,
        Command::Simulate(args) => {
            let file = commands::load_scenario(&args.scenario, &registry)?;
            let opts = SimulateOptions {
                seed: args.seed,
                stats: cli.out.clone(),
                trace: args.trace,
                replicas: args.replicas,
                threads: args.sweep_parallel,
                format,
            };
            let runs = commands::simulate(&file, &opts)?;
            return commands::write_outputs(&file, &opts, &runs);
        }
    };
    match &cli.out {
        Some(path) => {
            commands::write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
