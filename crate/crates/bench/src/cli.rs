//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use crate::compare::{compare, load_traces, write_comparison};
use crate::runner::{load_config, run_to_file, snapshot, sweep, Failure, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "ist-bench",
    version,
    about = "Benchmark harness for multi-goal path planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one instance and write its trace.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Record measured wall time instead of zeros (output is then not reproducible).
        #[arg(long)]
        wall_time: bool,
    },
    /// Run seeds 0..k of an instance, one trace per seed.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        wall_time: bool,
    },
    /// Summarize two directories of traces.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the planner state after a number of batches (2D only).
    Snapshot {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            f.exit_code()
        }
    }
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Outcome<()> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Planner)
}

fn execute(command: Command) -> Outcome<()> {
    match command {
        Command::Run {
            config,
            out,
            wall_time,
        } => {
            let cfg = load_config(&config)?;
            run_to_file(&cfg, &out, wall_time)?;
        }
        Command::Sweep {
            config,
            seeds,
            out_dir,
            wall_time,
        } => {
            if seeds == 0 {
                return Err(Failure::Usage(anyhow::anyhow!("--seeds must be positive")));
            }
            let cfg = load_config(&config)?;
            sweep(&cfg, seeds, &out_dir, wall_time)?;
        }
        Command::Compare { a, b, out } => {
            let a = load_traces(&a).map_err(Failure::Usage)?;
            let b = load_traces(&b).map_err(Failure::Usage)?;
            let cmp = compare(&a, &b).map_err(Failure::Usage)?;
            let mut buf = Vec::new();
            write_comparison(&mut buf, &cmp).expect("writing to memory");
            write_file(&out, &buf)?;
        }
        Command::Snapshot { config, iter, out } => {
            let cfg = load_config(&config)?;
            let svg = snapshot(&cfg, iter)?;
            write_file(&out, svg.as_bytes())?;
        }
    }
    Ok(())
}
