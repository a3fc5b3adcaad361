//! Round-synchronous simulator.
//!
//! Every round each node, reading only the round-start snapshot of its
//! neighbors: migrates to a strictly fitter incoming solution, picks an
//! operator from the neighborhood's `(reward, operator)` pairs, and runs
//! one (1+λ)-EA iteration with it. Each node draws randomness only from its
//! own stream, so the outcome does not depend on the order nodes are
//! processed in.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{MutationKind, OperatorSet, STANDARD_OPERATORS};
use crate::problem::{OneMax, Problem};
use crate::strategy::{NeighborhoodReport, SelectionContext, Selector, StrategyKind};
use crate::topology::{Graph, TopologyKind};
use crate::types::{Envelope, Fitness, NodeState, OperatorId};

pub const DEFAULT_MAX_ROUNDS: u64 = 1_000_000;

/// Full parameterization of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub topology: TopologyKind,
    pub nodes: usize,
    pub lambda: usize,
    pub length: usize,
    pub operators: Vec<MutationKind>,
    pub strategy: StrategyKind,
    /// Operator every node starts with; `None` draws one uniformly per node.
    pub initial_operator: Option<OperatorId>,
    pub max_rounds: u64,
    pub seed: u64,
    /// Record per-round operator counts.
    pub trace_operators: bool,
}

impl SimConfig {
    /// Standard four operators, uniform initial operators, default round cap.
    pub fn new(
        topology: TopologyKind,
        nodes: usize,
        lambda: usize,
        length: usize,
        strategy: StrategyKind,
    ) -> Self {
        SimConfig {
            topology,
            nodes,
            lambda,
            length,
            operators: STANDARD_OPERATORS.to_vec(),
            strategy,
            initial_operator: None,
            max_rounds: DEFAULT_MAX_ROUNDS,
            seed: 0,
            trace_operators: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace_operators = on;
        self
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    /// Rounds executed, including the one that reached the optimum.
    pub rounds_to_optimum: u64,
    pub evaluations: u64,
    pub messages: u64,
    pub hit_cap: bool,
    /// Best fitness in the network after each round.
    pub best_fitness_trace: Vec<usize>,
    /// Per round, how many nodes ran each operator.
    pub operator_frequency_trace: Option<Vec<Vec<usize>>>,
}

/// A network of nodes mid-run.
pub struct Simulation<'a, P: Problem + ?Sized, S: Selector + ?Sized> {
    problem: &'a P,
    selector: &'a S,
    operators: OperatorSet,
    graph: Graph,
    nodes: Vec<NodeState>,
    round: u64,
    evaluations: u64,
    messages: u64,
    best_trace: Vec<usize>,
    op_trace: Option<Vec<Vec<usize>>>,
}

impl<'a, P: Problem + ?Sized, S: Selector + ?Sized> Simulation<'a, P, S> {
    pub fn new(config: &SimConfig, problem: &'a P, selector: &'a S) -> Result<Self> {
        if config.nodes == 0 {
            return Err(Error::Config("need at least one node".into()));
        }
        if config.max_rounds == 0 {
            return Err(Error::Config("max_rounds must be positive".into()));
        }
        if problem.length() != config.length {
            return Err(Error::Config(format!(
                "problem length {} differs from configured {}",
                problem.length(),
                config.length
            )));
        }
        let graph = config
            .topology
            .build(config.nodes)
            .map_err(|e| Error::Config(format!("{} topology: {e}", config.topology)))?;
        let operators = OperatorSet::new(config.operators.clone(), config.lambda, config.length)?;
        selector.validate(operators.len(), config.length)?;
        if let Some(op) = config.initial_operator {
            operators
                .kind(op)
                .map_err(|e| Error::Config(e.to_string()))?;
        }

        let start = problem.initial_solution();
        let start_fitness = problem.evaluate(&start)?;
        let nodes = (0..config.nodes)
            .map(|id| {
                let mut node =
                    NodeState::new(id, config.seed, start.clone(), start_fitness, OperatorId(0));
                node.operator = match config.initial_operator {
                    Some(op) => op,
                    None => OperatorId(node.rng.random_range(0..operators.len())),
                };
                node
            })
            .collect();

        Ok(Simulation {
            problem,
            selector,
            operators,
            graph,
            nodes,
            round: 0,
            evaluations: 0,
            messages: 0,
            best_trace: Vec::new(),
            op_trace: config.trace_operators.then(Vec::new),
        })
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn best_fitness(&self) -> Fitness {
        self.nodes
            .iter()
            .map(|n| n.fitness)
            .max()
            .unwrap_or_default()
    }

    pub fn reached_optimum(&self) -> bool {
        self.best_fitness() >= self.problem.optimum()
    }

    /// One synchronous round with nodes processed in index order.
    pub fn step(&mut self) -> Result<()> {
        let order: Vec<usize> = (0..self.nodes.len()).collect();
        self.step_in_order(&order)
    }

    /// One synchronous round, visiting nodes in `order` (a permutation of
    /// the node ids). The result is the same for every permutation.
    pub fn step_in_order(&mut self, order: &[usize]) -> Result<()> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&v| v >= n || std::mem::replace(&mut seen[v], true))
        {
            return Err(Error::InvalidInput(
                "node order is not a permutation".into(),
            ));
        }

        // Distributed level: every message carries the round-start state.
        let inbox: Vec<Envelope> = self.nodes.iter().map(NodeState::envelope).collect();
        let m = self.operators.len();
        let mut report = NeighborhoodReport::default();
        for &v in order {
            let neighbors = self.graph.neighbors(v);
            let node = &mut self.nodes[v];

            migrate(node, neighbors, &inbox);

            // Metaheuristic selection level.
            report.clear_to((inbox[v].reward, inbox[v].operator));
            for &w in neighbors {
                report.push((inbox[w].reward, inbox[w].operator));
            }
            let ctx = SelectionContext {
                report: &report,
                fitness: node.fitness,
                operator_count: m,
            };
            let op = self.selector.select(&ctx, &mut node.rng)?;

            // Atomic low level.
            node.reward = self.operators.ea_step_in_place(
                self.problem,
                &mut node.solution,
                &mut node.fitness,
                op,
                &mut node.rng,
            )?;
            node.operator = op;
        }

        self.round += 1;
        self.evaluations += (self.operators.lambda() * n) as u64;
        self.messages += self.graph.edge_count() as u64;
        self.best_trace.push(self.best_fitness().0);
        if let Some(trace) = &mut self.op_trace {
            let mut counts = vec![0; m];
            for node in &self.nodes {
                counts[node.operator.0] += 1;
            }
            trace.push(counts);
        }
        Ok(())
    }

    /// Steps until some node holds an optimal solution or `max_rounds`
    /// rounds have run.
    pub fn run_to_end(mut self, seed: u64, max_rounds: u64) -> Result<RunResult> {
        while !self.reached_optimum() && self.round < max_rounds {
            self.step()?;
        }
        Ok(self.into_result(seed))
    }

    pub fn into_result(self, seed: u64) -> RunResult {
        let hit_cap = !self.reached_optimum();
        RunResult {
            seed,
            rounds_to_optimum: self.round,
            evaluations: self.evaluations,
            messages: self.messages,
            hit_cap,
            best_fitness_trace: self.best_trace,
            operator_frequency_trace: self.op_trace,
        }
    }
}

/// Elitist migration: adopt one of the fittest incoming solutions if it is
/// strictly fitter than the node's own. Ties are broken uniformly.
fn migrate(node: &mut NodeState, neighbors: &[usize], inbox: &[Envelope]) {
    let Some(best) = neighbors.iter().map(|&w| inbox[w].fitness).max() else {
        return;
    };
    if best <= node.fitness {
        return;
    }
    let tied = neighbors
        .iter()
        .filter(|&&w| inbox[w].fitness == best)
        .count();
    let pick = if tied == 1 {
        0
    } else {
        node.rng.random_range(0..tied)
    };
    let src = neighbors
        .iter()
        .copied()
        .filter(|&w| inbox[w].fitness == best)
        .nth(pick)
        .unwrap();
    node.solution.clone_from(&inbox[src].solution);
    node.fitness = best;
}

/// Runs one OneMax simulation to completion.
pub fn run(config: &SimConfig) -> Result<RunResult> {
    let problem = OneMax::new(config.length).map_err(|e| Error::Config(e.to_string()))?;
    run_with(config, &problem, &config.strategy)
}

/// Runs one simulation on an arbitrary problem and selection policy.
pub fn run_with<P, S>(config: &SimConfig, problem: &P, selector: &S) -> Result<RunResult>
where
    P: Problem + ?Sized,
    S: Selector + ?Sized,
{
    Simulation::new(config, problem, selector)?.run_to_end(config.seed, config.max_rounds)
}

/// `num_runs` independent runs with seeds `seed_base + i`, in seed order.
pub fn run_batch(config: &SimConfig, num_runs: usize, seed_base: u64) -> Result<Vec<RunResult>> {
    if num_runs == 0 {
        return Err(Error::Config("a batch needs at least one run".into()));
    }
    (0..num_runs as u64)
        .into_par_iter()
        .map(|i| run(&config.clone().with_seed(seed_base.wrapping_add(i))))
        .collect()
}
