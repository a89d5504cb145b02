use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use cqc_core::sweep::{registered_targets, SweepSpec};
use cqc_core::{Logic, ProtocolConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A fully resolved run request: one subcommand, one output sink.
#[derive(Debug, Clone)]
pub struct CliInvocation {
    pub command: Command,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum Command {
    /// Single barrier, `ε = π/(2 n_A)`, `laps` round trips.
    Toy {
        n_a: u32,
        laps: u32,
        mirror: bool,
    },
    Protocol {
        config: ProtocolConfig,
        snapshots: bool,
    },
    Expectation(ProtocolConfig),
    Flux(ProtocolConfig),
    Mirror(ProtocolConfig),
    Riemann {
        n: u32,
    },
    Sweep(SweepSpec),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Toy { .. } => "toy",
            Command::Protocol { .. } => "protocol",
            Command::Expectation(_) => "expectation",
            Command::Flux(_) => "flux",
            Command::Mirror(_) => "mirror",
            Command::Riemann { .. } => "riemann",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cqc",
    version,
    about = "Two-barrier cavity simulator and modular-momentum bookkeeping"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Single-barrier cavity with Bob's end open (logic 0) or mirrored (logic 1).
    Toy(RunArgs),
    /// Full two-barrier protocol; per-cycle summary unless --snapshots.
    Protocol {
        #[command(flatten)]
        run: RunArgs,
        /// Emit every (j_A, j_B) snapshot instead of the per-cycle summary.
        #[arg(long)]
        snapshots: bool,
    },
    /// Exchange expectation of the open/mirrored pair, split by region.
    Expectation(RunArgs),
    /// Cycle-by-cycle flow of the exchange expectation into the channel.
    Flux(RunArgs),
    /// Mirror in superposition; --cycles defaults to 2·n_A.
    Mirror(RunArgs),
    /// Riemann sum of the barrier-A transfer.
    Riemann {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convergence sweep over (n_A, n_B) pairs.
    Sweep {
        /// Depth k of the ladder (25·2^k, 2500·4^k), k = 0..=LADDER.
        #[arg(long, default_value_t = 3, conflicts_with = "pairs")]
        ladder: u32,
        /// Explicit pairs, e.g. `50:5000,100:10000`.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
        pairs: Option<Vec<(u32, u32)>>,
        /// Observable to sweep.
        #[arg(long, default_value = "exchange_total")]
        target: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long = "n-a", default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    n_a: u32,
    #[arg(long = "n-b", default_value_t = 10_000, value_parser = clap::value_parser!(u32).range(1..))]
    n_b: u32,
    /// Outer cycles N (default n_A).
    #[arg(long)]
    cycles: Option<u32>,
    /// Bob's bit: 0/open or 1/mirror.
    #[arg(long, default_value = "0")]
    logic: Logic,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected N_A:N_B, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("`{x}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, msg)
}

impl RunArgs {
    fn config(&self, default_cycles: u32) -> Result<ProtocolConfig, clap::Error> {
        let cfg = ProtocolConfig::new(self.n_a, self.n_b, self.logic)
            .map_err(|e| usage(ErrorKind::ValueValidation, format!("--n-a/--n-b: {e}")))?;
        Ok(cfg.with_cycles(self.cycles.unwrap_or(default_cycles)))
    }

    fn finish(self, command: Command) -> CliInvocation {
        CliInvocation {
            command,
            format: self.output.format,
            out: self.output.out,
        }
    }
}

/// Parses the arguments after the program name.
///
/// Errors carry clap's exit code: 2 for usage errors, 0 for `--help`.
pub fn parse_invocation<I, T>(args: I) -> Result<CliInvocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("cqc")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv)?;
    Ok(match cli.command {
        CliCommand::Toy(run) => {
            let command = Command::Toy {
                n_a: run.n_a,
                laps: run.cycles.unwrap_or(run.n_a),
                mirror: run.logic == Logic::Mirrored,
            };
            run.finish(command)
        }
        CliCommand::Protocol { run, snapshots } => {
            let config = run.config(run.n_a)?;
            run.finish(Command::Protocol { config, snapshots })
        }
        CliCommand::Expectation(run) => {
            let cfg = run.config(run.n_a)?;
            run.finish(Command::Expectation(cfg))
        }
        CliCommand::Flux(run) => {
            let cfg = run.config(run.n_a)?;
            run.finish(Command::Flux(cfg))
        }
        CliCommand::Mirror(run) => {
            let cfg = run.config(run.n_a.saturating_mul(2))?;
            if cfg.cycles == 0 {
                return Err(usage(
                    ErrorKind::ValueValidation,
                    "--cycles: mirror run needs at least one cycle",
                ));
            }
            run.finish(Command::Mirror(cfg))
        }
        CliCommand::Riemann { n, output } => CliInvocation {
            command: Command::Riemann { n },
            format: output.format,
            out: output.out,
        },
        CliCommand::Sweep {
            ladder,
            pairs,
            target,
            output,
        } => {
            let spec = match pairs {
                Some(pairs) => SweepSpec::new(pairs, &target, cqc_core::sweep::CyclesRule::Full),
                None => SweepSpec::ladder(ladder, &target),
            }
            .map_err(|e| {
                let known: Vec<_> = registered_targets().map(|t| t.name()).collect();
                usage(
                    ErrorKind::InvalidValue,
                    format!("--target/--ladder: {e} (targets: {})", known.join(", ")),
                )
            })?;
            CliInvocation {
                command: Command::Sweep(spec),
                format: output.format,
                out: output.out,
            }
        }
    })
}
