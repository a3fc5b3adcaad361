//! Plan execution and CSV output.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use dams::stats::summarize;
use dams::{build_oracle_table, OracleTable, RunResult, StrategyKind};
use rayon::prelude::*;

use crate::plan::{ExperimentPlan, PlanPoint, StrategyName};

/// Formats a float with six significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').unwrap();
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// All runs of one plan point, in run-index order.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub point: PlanPoint,
    pub runs: Vec<RunResult>,
}

impl PointResult {
    /// Index of the run with the median number of rounds (lower median,
    /// lowest run index among equals).
    pub fn median_run(&self) -> usize {
        let mut idx: Vec<usize> = (0..self.runs.len()).collect();
        idx.sort_by_key(|&i| (self.runs[i].rounds_to_optimum, i));
        idx[(idx.len() - 1) / 2]
    }
}

#[derive(Clone, Debug)]
pub struct ExecutionReport {
    pub points: Vec<PointResult>,
    pub files: Vec<PathBuf>,
}

fn strategy_for(
    point: &PlanPoint,
    tables: &HashMap<(usize, usize), Arc<OracleTable>>,
    loaded: Option<&Arc<OracleTable>>,
) -> StrategyKind {
    match point.strategy {
        StrategyName::Sbm => StrategyKind::SelectBestMutate {
            p_mut: point.p_mut.unwrap_or(0.0),
        },
        StrategyName::Random => StrategyKind::Random,
        StrategyName::SeqOracle => StrategyKind::SequentialOracle(
            loaded
                .cloned()
                .unwrap_or_else(|| tables[&(point.length, point.lambda)].clone()),
        ),
    }
}

/// Runs every point of the plan on `workers` threads and writes the CSVs
/// into `plan.out_dir`. Output depends only on the plan.
pub fn execute_plan(plan: &ExperimentPlan, workers: usize) -> Result<ExecutionReport> {
    let loaded = match &plan.oracle_table {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(Arc::new(OracleTable::from_csv(&text)?))
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("building worker pool")?;

    let results = pool.install(|| -> Result<Vec<PointResult>> {
        let mut needed: Vec<(usize, usize)> = plan
            .points
            .iter()
            .filter(|p| p.strategy == StrategyName::SeqOracle && loaded.is_none())
            .map(|p| (p.length, p.lambda))
            .collect();
        needed.sort_unstable();
        needed.dedup();
        let tables = needed
            .into_par_iter()
            .map(|(l, lambda)| Ok(((l, lambda), Arc::new(build_oracle_table(l, lambda)?))))
            .collect::<Result<HashMap<_, _>>>()?;

        let jobs: Vec<(usize, usize)> = (0..plan.points.len())
            .flat_map(|p| (0..plan.runs).map(move |r| (p, r)))
            .collect();
        let runs = jobs
            .par_iter()
            .map(|&(p, r)| {
                let point = &plan.points[p];
                let cfg = point.sim_config(
                    strategy_for(point, &tables, loaded.as_ref()),
                    plan.run_seed(p, r),
                    plan.trace,
                );
                dams::run(&cfg).with_context(|| format!("point {p} run {r}"))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut runs = runs.into_iter();
        Ok(plan
            .points
            .iter()
            .map(|point| PointResult {
                point: point.clone(),
                runs: runs.by_ref().take(plan.runs).collect(),
            })
            .collect())
    })?;

    let files = write_outputs(&plan.out_dir, &results, plan.trace)?;
    Ok(ExecutionReport {
        points: results,
        files,
    })
}

fn point_columns(p: &PlanPoint) -> Vec<String> {
    vec![
        p.index.to_string(),
        p.strategy.to_string(),
        p.topology.to_string(),
        p.nodes.to_string(),
        p.lambda.to_string(),
        p.p_mut.map(fmt_sig).unwrap_or_default(),
        p.length.to_string(),
    ]
}

const POINT_HEADER: [&str; 7] = [
    "point", "strategy", "topology", "n", "lambda", "pmut", "length",
];

fn write_outputs(dir: &Path, results: &[PointResult], trace: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();

    let path = dir.join("summary.csv");
    let mut w =
        csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    let mut header: Vec<&str> = POINT_HEADER.to_vec();
    header.extend([
        "runs",
        "mean_rounds",
        "std_rounds",
        "median_rounds",
        "mean_evaluations",
        "mean_messages",
        "hit_cap_runs",
    ]);
    w.write_record(&header)?;
    for pr in results {
        let rounds: Vec<f64> = pr.runs.iter().map(|r| r.rounds_to_optimum as f64).collect();
        let evals: Vec<f64> = pr.runs.iter().map(|r| r.evaluations as f64).collect();
        let msgs: Vec<f64> = pr.runs.iter().map(|r| r.messages as f64).collect();
        let s = summarize(&rounds)?;
        let mut row = point_columns(&pr.point);
        row.extend([
            pr.runs.len().to_string(),
            fmt_sig(s.mean),
            fmt_sig(s.std_dev),
            fmt_sig(s.median),
            fmt_sig(summarize(&evals)?.mean),
            fmt_sig(summarize(&msgs)?.mean),
            pr.runs.iter().filter(|r| r.hit_cap).count().to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    files.push(path);

    let path = dir.join("runs.csv");
    let mut w =
        csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    let mut header: Vec<&str> = POINT_HEADER.to_vec();
    header.extend([
        "run",
        "seed",
        "rounds",
        "evaluations",
        "messages",
        "hit_cap",
    ]);
    w.write_record(&header)?;
    for pr in results {
        for (i, r) in pr.runs.iter().enumerate() {
            let mut row = point_columns(&pr.point);
            row.extend([
                i.to_string(),
                r.seed.to_string(),
                r.rounds_to_optimum.to_string(),
                r.evaluations.to_string(),
                r.messages.to_string(),
                r.hit_cap.to_string(),
            ]);
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    files.push(path);

    if trace {
        for pr in results {
            files.push(write_median_trace(dir, pr)?);
            files.push(write_average_trace(dir, pr)?);
        }
    }
    Ok(files)
}

fn op_header(m: usize) -> Vec<String> {
    (0..m).map(|k| format!("count_op{k}")).collect()
}

/// Operator counts of the median run, one row per round.
fn write_median_trace(dir: &Path, pr: &PointResult) -> Result<PathBuf> {
    let path = dir.join(format!("freq_{}.csv", pr.point.index));
    let run = &pr.runs[pr.median_run()];
    let ops = run
        .operator_frequency_trace
        .as_ref()
        .context("run was not traced")?;
    let m = ops.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_path(&path)?;
    let mut header = vec!["round".to_string()];
    header.extend(op_header(m));
    header.push("max_fitness".into());
    w.write_record(&header)?;
    for (i, (counts, best)) in ops.iter().zip(&run.best_fitness_trace).enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(counts.iter().map(usize::to_string));
        row.push(best.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(path)
}

/// Per-round operator counts averaged over the runs still going at that
/// round. Rows sum to n.
fn write_average_trace(dir: &Path, pr: &PointResult) -> Result<PathBuf> {
    let path = dir.join(format!("freq_avg_{}.csv", pr.point.index));
    let traces: Vec<&Vec<Vec<usize>>> = pr
        .runs
        .iter()
        .map(|r| {
            r.operator_frequency_trace
                .as_ref()
                .context("run was not traced")
        })
        .collect::<Result<_>>()?;
    let m = traces.iter().find_map(|t| t.first()).map_or(0, Vec::len);
    let longest = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_path(&path)?;
    let mut header = vec!["round".to_string(), "active_runs".to_string()];
    header.extend(op_header(m));
    header.push("max_fitness".into());
    w.write_record(&header)?;
    for round in 0..longest {
        let active: Vec<usize> = (0..traces.len())
            .filter(|&i| traces[i].len() > round)
            .collect();
        let k = active.len() as f64;
        let mut row = vec![(round + 1).to_string(), active.len().to_string()];
        let mut sums = vec![0usize; m];
        for &i in &active {
            for (sum, c) in sums.iter_mut().zip(&traces[i][round]) {
                *sum += c;
            }
        }
        row.extend(sums.iter().map(|&t| fmt_sig(t as f64 / k)));
        let best: usize = active
            .iter()
            .map(|&i| pr.runs[i].best_fitness_trace[round])
            .sum();
        row.push(fmt_sig(best as f64 / k));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(path)
}
