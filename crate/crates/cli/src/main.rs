//! `kforce`: batch front end for the machine, the transpiler and the playground.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use kforce::report::{self, ChiMode, TraceFormat};

#[derive(Parser)]
#[command(name = "kforce", version, about = "Krivine machine with forcing: run, transform, check")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print it canonically
    Parse { file: PathBuf },
    /// Run `t ⋆ stack` on the machine
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = kforce::machine::DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, value_enum)]
        trace: Option<Trace>,
        /// Comma-separated stack items, top first; free variables become opaque constants
        #[arg(long, default_value = "")]
        stack: String,
    },
    /// Translate a quasi-proof `t` into `t*`
    Transform { file: PathBuf },
    /// Print `p ⊩ F`
    Force {
        #[arg(long)]
        cond: String,
        file: PathBuf,
    },
    /// Synthesize a coercion between two condition terms
    Synth {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
    },
    /// Check a derivation and print the extracted term
    Check { file: PathBuf },
    /// Print the bridge terms of a formula
    Chi {
        #[arg(value_enum)]
        mode: Chi,
        file: PathBuf,
    },
    /// Eventually periodic sets
    Play {
        #[command(subcommand)]
        mode: Play,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Trace {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chi {
    Pair,
    #[value(name = "01")]
    ZeroOne,
    Pm,
}

#[derive(Subcommand)]
enum Play {
    /// Meet of sets given as `prefix:period`
    Meet { sets: Vec<String> },
    /// `f(j)` table and image of a decreasing chain
    Chain {
        sets: Vec<String>,
        #[arg(long, default_value_t = 8)]
        rows: u64,
    },
    /// First element of each partition class
    Prem {
        #[arg(long)]
        set: String,
        /// `mod<k>` or `div<k>`
        #[arg(long)]
        partition: String,
        #[arg(long)]
        bound: u64,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

fn execute(cmd: Command) -> Result<(String, bool), Failure> {
    let input = |p: &Path| read(p).map_err(Failure::Usage);
    let done = |r: Result<String, report::ReportError>| r.map(|s| (s, true)).map_err(|e| Failure::Domain(e.into()));
    match cmd {
        Command::Parse { file } => done(report::parse(&input(&file)?)),
        Command::Run { file, fuel, trace, stack } => {
            let trace = trace.map(|t| match t {
                Trace::Json => TraceFormat::Json,
                Trace::Text => TraceFormat::Text,
            });
            report::run(&input(&file)?, &stack, fuel, trace).map_err(|e| Failure::Domain(e.into()))
        }
        Command::Transform { file } => done(report::transform(&input(&file)?)),
        Command::Force { cond, file } => done(report::force(&cond, &input(&file)?)),
        Command::Synth { src, dst } => done(report::synth(&src, &dst)),
        Command::Check { file } => done(report::check(&input(&file)?)),
        Command::Chi { mode, file } => {
            let mode = match mode {
                Chi::Pair => ChiMode::Pair,
                Chi::ZeroOne => ChiMode::ZeroOne,
                Chi::Pm => ChiMode::PlusMinus,
            };
            done(report::chi(mode, &input(&file)?))
        }
        Command::Play { mode } => match mode {
            Play::Meet { sets } => done(report::play_meet(&sets)),
            Play::Chain { sets, rows } => done(report::play_chain(&sets, rows)),
            Play::Prem { set, partition, bound } => done(report::play_prem(&set, &partition, bound)),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok((out, halted)) => {
            print!("{out}");
            if halted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
