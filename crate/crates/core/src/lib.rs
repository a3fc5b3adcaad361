//! Distributed adaptive metaheuristic selection on a simulated network.
//!
//! Nodes of a graph each hold one solution and repeatedly (1) exchange
//! `(reward, operator, solution)` with their neighbors, (2) migrate to a
//! strictly better incoming solution, (3) choose a mutation operator from
//! what the neighborhood reports, and (4) run one (1+λ)-EA iteration with it.
//! The Select-Best-and-Mutate policy adopts the best-rewarded operator seen
//! and explores with a small operator mutation rate.

pub mod bitstring;
pub mod engine;
pub mod error;
pub mod operators;
pub mod oracle;
pub mod problem;
pub mod rng;
pub mod stats;
pub mod strategy;
pub mod topology;
pub mod types;

pub use bitstring::{hamming_distance, BitString};
pub use engine::{run, run_batch, run_with, RunResult, SimConfig, Simulation};
pub use error::{Error, Result};
pub use operators::{MutationKind, OperatorSet, STANDARD_OPERATORS};
pub use oracle::{build_oracle_table, GainDistribution, OracleTable};
pub use problem::{OneMax, Problem};
pub use strategy::{NeighborhoodReport, Selector, StrategyKind};
pub use topology::{Graph, TopologyKind};
pub use types::{Envelope, Fitness, NodeState, OperatorId, Reward};
