//! `qudit-optics`: batch front end for NS gates, gate synthesis, cluster
//! patterns, coloring QAOA and resource sweeps.
//!
//! Every run writes one self-describing document that embeds the tool
//! version and the full configuration, so identical arguments give
//! byte-identical output.

mod angle;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(name = "qudit-optics", version, about = "Multi-rail photonic qudit toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Master seed; overrides any seed stored in an input file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the document here instead of stdout.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Output format; defaults to csv for `resources` and json otherwise.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads for parallel restarts and sweeps.
    #[arg(long, env = "QUDIT_OPTICS_THREADS", global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    #[serde(skip)]
    pub verbose: u8,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal postselected nonlinear phase shift for one phase.
    Ns(commands::NsArgs),
    /// Synthesize a postselected gate from a named target or a problem file.
    Synth(commands::SynthArgs),
    /// Run a measurement pattern on a cluster.
    Mbqc(commands::MbqcArgs),
    /// QAOA for graph coloring.
    Qaoa(commands::QaoaArgs),
    /// Cluster sizes for one cost layer, qubit versus qudit.
    Resources(commands::ResourcesArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Ns(a) => commands::ns(a, g),
        Command::Synth(a) => commands::synth(a, g),
        Command::Mbqc(a) => commands::mbqc(a, g),
        Command::Qaoa(a) => commands::qaoa(a, g),
        Command::Resources(a) => commands::resources(a, g),
    };
    match result.and_then(|(doc, status)| {
        output::emit(&doc, g)?;
        status.map_or(Ok(()), Err)
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
