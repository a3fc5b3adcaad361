use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dams::rng::mix_seed;
use dams::{SimConfig, StrategyKind, TopologyKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyName {
    Sbm,
    Random,
    SeqOracle,
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyName::Sbm => "sbm",
            StrategyName::Random => "random",
            StrategyName::SeqOracle => "seq-oracle",
        })
    }
}

impl FromStr for StrategyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sbm" => Ok(StrategyName::Sbm),
            "random" | "rnd" => Ok(StrategyName::Random),
            "seq-oracle" | "oracle" => Ok(StrategyName::SeqOracle),
            other => Err(format!(
                "unknown strategy '{other}' (expected sbm, random or seq-oracle)"
            )),
        }
    }
}

/// One configuration of the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanPoint {
    pub index: usize,
    pub strategy: StrategyName,
    pub topology: TopologyKind,
    pub nodes: usize,
    pub lambda: usize,
    /// Operator mutation rate; only meaningful for SBM.
    pub p_mut: Option<f64>,
    pub length: usize,
    pub max_rounds: u64,
}

impl PlanPoint {
    /// The engine configuration for this point, given the strategy object.
    pub fn sim_config(&self, strategy: StrategyKind, seed: u64, trace: bool) -> SimConfig {
        let mut cfg = SimConfig::new(
            self.topology,
            self.nodes,
            self.lambda,
            self.length,
            strategy,
        )
        .with_seed(seed)
        .with_trace(trace);
        cfg.max_rounds = self.max_rounds;
        cfg
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub points: Vec<PlanPoint>,
    pub runs: usize,
    pub master_seed: u64,
    pub trace: bool,
    pub out_dir: PathBuf,
    /// Sequential-oracle table to load instead of deriving one per (l, λ).
    pub oracle_table: Option<PathBuf>,
}

impl ExperimentPlan {
    /// Seed of run `run` at point `point`. Depends only on the master seed
    /// and the two indices.
    pub fn run_seed(&self, point: usize, run: usize) -> u64 {
        mix_seed(&[self.master_seed, point as u64, run as u64])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn seeds_are_injective_over_the_grid() {
        let plan = ExperimentPlan {
            points: Vec::new(),
            runs: 50,
            master_seed: 9,
            trace: false,
            out_dir: PathBuf::from("x"),
            oracle_table: None,
        };
        let seeds: HashSet<u64> = (0..200)
            .flat_map(|p| (0..50).map(move |r| (p, r)))
            .map(|(p, r)| plan.run_seed(p, r))
            .collect();
        assert_eq!(seeds.len(), 200 * 50);
        assert_eq!(plan.run_seed(3, 4), plan.run_seed(3, 4));
    }

    #[test]
    fn strategy_names() {
        for s in [
            StrategyName::Sbm,
            StrategyName::Random,
            StrategyName::SeqOracle,
        ] {
            assert_eq!(s.to_string().parse::<StrategyName>().unwrap(), s);
        }
        assert!("dmab".parse::<StrategyName>().is_err());
    }
}
