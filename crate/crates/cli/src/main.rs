use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dams::{build_oracle_table, TopologyKind};
use dams_cli::{compare_files, execute_plan, parse_config};

#[derive(Parser)]
#[command(
    name = "dams",
    version,
    about = "Distributed adaptive metaheuristic selection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every point of an experiment configuration and write CSVs.
    Run {
        config: PathBuf,
        /// Output directory (overrides `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Master seed (overrides `seed` in the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Record per-round operator frequencies.
        #[arg(long)]
        trace: bool,
    },
    /// Mann-Whitney comparison of the rounds column of two runs.csv files.
    Compare { a: PathBuf, b: PathBuf },
    /// Derive the sequential oracle table and write it as CSV.
    OracleTable {
        #[arg(long = "l")]
        length: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a topology's edge list.
    Edges { topology: TopologyKind, n: usize },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            workers,
            seed,
            trace,
        } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut plan =
                parse_config(&text).with_context(|| format!("parsing {}", config.display()))?;
            if let Some(out) = out {
                plan.out_dir = out;
            }
            if let Some(seed) = seed {
                plan.master_seed = seed;
            }
            plan.trace |= trace;
            let report = execute_plan(&plan, workers)?;
            for pr in &report.points {
                let rounds: Vec<f64> = pr.runs.iter().map(|r| r.rounds_to_optimum as f64).collect();
                let s = dams::stats::summarize(&rounds)?;
                let p = &pr.point;
                println!(
                    "point {:>3}  {:<10} {:<8} n={:<3} lambda={:<3} pmut={:<8} mean_rounds={:.1} std={:.1}",
                    p.index,
                    p.strategy,
                    p.topology,
                    p.nodes,
                    p.lambda,
                    p.p_mut.map_or("-".into(), |x| x.to_string()),
                    s.mean,
                    s.std_dev
                );
            }
            println!(
                "wrote {} files to {}",
                report.files.len(),
                plan.out_dir.display()
            );
        }
        Command::Compare { a, b } => println!("{}", compare_files(&a, &b)?),
        Command::OracleTable {
            length,
            lambda,
            out,
        } => {
            let table = build_oracle_table(length, lambda)?;
            fs::write(&out, table.to_csv())
                .with_context(|| format!("writing {}", out.display()))?;
            for (lo, hi, op) in table.regimes() {
                println!(
                    "fitness {lo:>6}..={hi:<6} -> {}",
                    dams::STANDARD_OPERATORS[op.0]
                );
            }
        }
        Command::Edges { topology, n } => print!("{}", topology.build(n)?.edge_list_text()),
    }
    Ok(())
}
