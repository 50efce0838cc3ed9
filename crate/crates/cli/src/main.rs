use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tracksim_cli::config::parse_config;
use tracksim_cli::{run, CliError, Command};

/// Steady-state simulator for RLGC ladder networks approximating
/// (possibly damaged) transmission lines.
#[derive(Parser)]
#[command(name = "tracksim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Compare ladder approximations against the closed-form uniform-line
    /// solution for several generation counts.
    Validate {
        /// Run configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Generation counts, e.g. 5,10,50; overrides validate.generations.
        #[arg(long, value_delimiter = ',')]
        generations: Option<Vec<usize>>,
    },
    /// Emit per-node voltage/current phasors for one damage case.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the receiver current over a train passage.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the transmitter impedance and voltage gain over a frequency
    /// grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, config_path, out_path) = match cli.command {
        CliCommand::Validate {
            config,
            out,
            generations,
        } => (Command::Validate { generations }, config, out),
        CliCommand::Simulate { config, out } => (Command::Simulate, config, out),
        CliCommand::Train { config, out } => (Command::Train, config, out),
        CliCommand::Sweep { config, out } => (Command::Sweep, config, out),
    };

    let text = fs::read_to_string(&config_path)?;
    let config = parse_config(&text)?;

    match out_path {
        Some(path) => {
            let file = fs::File::create(&path)?;
            let mut writer = BufWriter::new(file);
            run(&command, &config, &mut writer)?;
            writer.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            run(&command, &config, &mut writer)?;
            writer.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
