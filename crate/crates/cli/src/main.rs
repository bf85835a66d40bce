use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use mlorc::harness::{self, compare_runs, read_records};
use mlorc::metrics::{measured_state_elements, memory_count, LoraAdamWFootprint, MemoryMethod};
use mlorc::optim::{AdamWState, GaLoreState, MLorcAdamWState};

#[derive(Parser)]
#[command(
    name = "mlorc",
    version,
    about = "Compressed-momentum optimizer experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        config: PathBuf,
        /// Write here instead of the config's output_path.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Relative loss divergence between two records.csv files.
    Compare { a: PathBuf, b: PathBuf },
    /// Run every *.json config in a directory.
    Sweep { dir: PathBuf },
    /// Optimizer-state element counts for one m x n weight at rank r.
    Memtable {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
}

fn run(config: PathBuf, output_dir: Option<PathBuf>) -> Result<()> {
    let cfg = harness::load_config(&config)?;
    let dir = output_dir.unwrap_or_else(|| harness::output_dir(&cfg));
    let out = harness::run_to_dir(&cfg, &dir)
        .with_context(|| format!("run failed, partial output in {}", dir.display()))?;
    let last = out.records.last().expect("at least one record");
    println!(
        "{} steps, {} records, loss {:.6e} at step {} -> {}",
        cfg.steps,
        out.records.len(),
        last.loss,
        last.step,
        dir.display()
    );
    Ok(())
}

fn compare(a: PathBuf, b: PathBuf) -> Result<()> {
    let ra = read_records(&a)?;
    let rb = read_records(&b)?;
    let report = compare_runs(&ra, &rb)?;
    println!("records        {}", report.steps.len());
    println!("max_loss_rel   {:.6e}", report.max_loss_rel);
    println!("mean_loss_rel  {:.6e}", report.mean_loss_rel);
    Ok(())
}

fn sweep(dir: PathBuf) -> Result<()> {
    let entries = harness::sweep_dir(&dir)?;
    if entries.is_empty() {
        bail!("no *.json configs in {}", dir.display());
    }
    let mut failed = 0;
    for e in &entries {
        match &e.result {
            Ok(n) => println!("ok    {} ({n} records)", e.config_path.display()),
            Err(err) => {
                failed += 1;
                println!("FAIL  {}: {err}", e.config_path.display());
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} configs failed", entries.len());
    }
    Ok(())
}

fn memtable(m: usize, n: usize, r: usize) -> Result<()> {
    println!(
        "{:<12} {:>14} {:>14} {:>14}",
        "method", "weights", "states", "measured"
    );
    for method in MemoryMethod::ALL {
        let count = memory_count(method, m, n, r)?;
        let measured = match method {
            MemoryMethod::FullAdamW => measured_state_elements(&AdamWState::new(m, n)),
            MemoryMethod::LoraAdamW => measured_state_elements(&LoraAdamWFootprint::new(m, n, r)),
            MemoryMethod::GaLore => measured_state_elements(&GaLoreState::new(m, n, r)?),
            MemoryMethod::MLorcAdamW => measured_state_elements(&MLorcAdamWState::new(m, n, r, 0)),
        };
        println!(
            "{:<12} {:>14} {:>14} {:>14}",
            method, count.weights, count.optimizer_states, measured
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output_dir } => run(config, output_dir),
        Command::Compare { a, b } => compare(a, b),
        Command::Sweep { dir } => sweep(dir),
        Command::Memtable { m, n, r } => memtable(m, n, r),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
