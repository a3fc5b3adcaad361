//! Shared domain vocabulary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::rng::{node_stream, NodeRng};

/// Count of 1-bits (or, generally, the problem's objective value).
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct Fitness(pub usize);

/// Position of an operator in the configured operator set.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct OperatorId(pub usize);

/// Fitness gain of the most recent atomic application. Signed so that
/// non-elitist acceptance rules can report losses.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct Reward(pub i64);

impl Reward {
    pub fn gain(old: Fitness, new: Fitness) -> Self {
        Reward(new.0 as i64 - old.0 as i64)
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "op{}", self.0)
    }
}

impl fmt::Display for Reward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Everything a node knows about itself between rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub node_id: usize,
    pub solution: BitString,
    /// Cached objective value of `solution`.
    pub fitness: Fitness,
    pub operator: OperatorId,
    pub reward: Reward,
    pub rng: NodeRng,
}

impl NodeState {
    pub fn new(
        node_id: usize,
        master_seed: u64,
        solution: BitString,
        fitness: Fitness,
        operator: OperatorId,
    ) -> Self {
        NodeState {
            node_id,
            solution,
            fitness,
            operator,
            reward: Reward(0),
            rng: node_stream(master_seed, node_id),
        }
    }

    /// Snapshot of what this node sends to each neighbor.
    pub fn envelope(&self) -> Envelope {
        Envelope {
            reward: self.reward,
            operator: self.operator,
            solution: self.solution.clone(),
            fitness: self.fitness,
        }
    }
}

/// Message payload `(r, k, P)`. The sender's fitness rides along so
/// receivers need not re-evaluate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub reward: Reward,
    pub operator: OperatorId,
    pub solution: BitString,
    pub fitness: Fitness,
}
