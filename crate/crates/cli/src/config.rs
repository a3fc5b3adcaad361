//! Line-oriented `key = value` experiment configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! strategy = sbm, random, seq-oracle
//! topology = complete, grid, cycle
//! n        = 4, 8, 16, 36, 64
//! lambda   = 50
//! pmut     = 0.001
//! runs     = 20
//! ```
//!
//! Sweep axes (`strategy`, `topology`, `n`, `lambda`, `pmut`, `lambda_n`)
//! take comma lists; points are their cross product. `lambda_n` lists
//! `λxn` pairs and replaces the `n` and `lambda` axes.

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use dams::engine::DEFAULT_MAX_ROUNDS;
use dams::TopologyKind;
use thiserror::Error;

use crate::plan::{ExperimentPlan, PlanPoint, StrategyName};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("configuration is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
}

const KEYS: &[&str] = &[
    "strategy",
    "topology",
    "n",
    "lambda",
    "lambda_n",
    "pmut",
    "runs",
    "length",
    "seed",
    "max_rounds",
    "trace",
    "out",
    "oracle_table",
];

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

struct Entries<'a>(HashMap<&'a str, Entry<'a>>);

impl<'a> Entries<'a> {
    fn err(line: usize, message: impl Into<String>) -> ParseError {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }

    fn list<T: FromStr>(
        &self,
        key: &str,
        default: Option<&str>,
    ) -> Result<Option<(usize, Vec<T>)>, ParseError>
    where
        T::Err: std::fmt::Display,
    {
        let (line, raw) = match (self.0.get(key), default) {
            (Some(e), _) => (e.line, e.value),
            (None, Some(d)) => (0, d),
            (None, None) => return Ok(None),
        };
        let mut items = Vec::new();
        for part in raw.split(',') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Self::err(line, format!("empty item in '{key}'")));
            }
            let v = part
                .parse::<T>()
                .map_err(|e| Self::err(line, format!("bad {key} value '{part}': {e}")))?;
            items.push(v);
        }
        Ok(Some((line, items)))
    }

    fn single<T: FromStr>(&self, key: &str, default: T) -> Result<T, ParseError>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse::<T>()
                .map_err(|err| Self::err(e.line, format!("bad {key} value '{}': {err}", e.value))),
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.0.get(key).map_or(0, |e| e.line)
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (l, n) = s
        .split_once('x')
        .ok_or_else(|| format!("expected LAMBDAxN, got '{s}'"))?;
    let l = l.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let n = n.trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok((l, n))
}

#[derive(Clone, Copy)]
struct Pair(usize, usize);

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_pair(s).map(|(l, n)| Pair(l, n))
    }
}

struct Probability(f64);

impl FromStr for Probability {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let p: f64 = s
            .parse()
            .map_err(|e: std::num::ParseFloatError| e.to_string())?;
        if (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err("not in [0, 1]".into())
        }
    }
}

/// Parses a configuration into a fully expanded plan.
pub fn parse_config(text: &str) -> Result<ExperimentPlan, ParseError> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            Entries::err(line, format!("expected 'key = value', got '{content}'"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Entries::err(line, format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(Entries::err(line, format!("'{key}' has no value")));
        }
        if map.insert(key, Entry { line, value }).is_some() {
            return Err(Entries::err(line, format!("duplicate key '{key}'")));
        }
    }
    if map.is_empty() {
        return Err(ParseError::Empty);
    }
    let e = Entries(map);

    let (_, strategies) = e.list::<StrategyName>("strategy", Some("sbm"))?.unwrap();
    let (_, topologies) = e
        .list::<TopologyKind>("topology", Some("complete"))?
        .unwrap();
    let (_, pmuts) = e.list::<Probability>("pmut", Some("0.001"))?.unwrap();
    let sizes: Vec<(usize, usize)> = match e.list::<Pair>("lambda_n", None)? {
        Some((line, pairs)) => {
            for key in ["n", "lambda"] {
                if e.0.contains_key(key) {
                    return Err(Entries::err(
                        line,
                        format!("'lambda_n' cannot be combined with '{key}'"),
                    ));
                }
            }
            pairs.into_iter().map(|p| (p.0, p.1)).collect()
        }
        None => {
            let (_, ns) = e
                .list::<usize>("n", None)?
                .ok_or(ParseError::Missing("n"))?;
            let (_, lambdas) = e.list::<usize>("lambda", Some("50"))?.unwrap();
            ns.iter()
                .flat_map(|&n| lambdas.iter().map(move |&l| (l, n)))
                .collect()
        }
    };
    let runs: usize = e.single("runs", 20)?;
    let length: usize = e.single("length", 10_000)?;
    let master_seed: u64 = e.single("seed", 0)?;
    let max_rounds: u64 = e.single("max_rounds", DEFAULT_MAX_ROUNDS)?;
    let trace: bool = e.single("trace", false)?;
    let out_dir: PathBuf = e.single("out", PathBuf::from("results"))?;
    let oracle_table: Option<PathBuf> = e.0.get("oracle_table").map(|x| PathBuf::from(x.value));

    for (key, bad) in [
        ("runs", runs == 0),
        ("length", length == 0),
        ("max_rounds", max_rounds == 0),
    ] {
        if bad {
            return Err(Entries::err(
                e.line_of(key),
                format!("'{key}' must be positive"),
            ));
        }
    }
    let size_line = e.line_of(if e.0.contains_key("lambda_n") {
        "lambda_n"
    } else {
        "n"
    });

    let mut points = Vec::new();
    for &strategy in &strategies {
        for &topology in &topologies {
            for &(lambda, nodes) in &sizes {
                if lambda == 0 || nodes == 0 {
                    return Err(Entries::err(size_line, "n and lambda must be positive"));
                }
                topology.build(nodes).map_err(|err| {
                    Entries::err(
                        size_line,
                        format!("{topology} topology with n = {nodes}: {err}"),
                    )
                })?;
                let p_values: Vec<Option<f64>> = if strategy == StrategyName::Sbm {
                    pmuts.iter().map(|p| Some(p.0)).collect()
                } else {
                    vec![None]
                };
                for p_mut in p_values {
                    points.push(PlanPoint {
                        index: points.len(),
                        strategy,
                        topology,
                        nodes,
                        lambda,
                        p_mut,
                        length,
                        max_rounds,
                    });
                }
            }
        }
    }

    Ok(ExperimentPlan {
        points,
        runs,
        master_seed,
        trace,
        out_dir,
        oracle_table,
    })
}
