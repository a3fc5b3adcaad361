use std::sync::Arc;

use dams::{
    build_oracle_table, run, run_batch, OneMax, SimConfig, Simulation, StrategyKind, TopologyKind,
};

fn strategies(l: usize, lambda: usize) -> Vec<StrategyKind> {
    vec![
        StrategyKind::SelectBestMutate { p_mut: 1e-3 },
        StrategyKind::Random,
        StrategyKind::SequentialOracle(Arc::new(build_oracle_table(l, lambda).unwrap())),
    ]
}

#[test]
fn every_strategy_and_topology_reaches_the_optimum() {
    for topology in TopologyKind::ALL {
        for strategy in strategies(300, 4) {
            let cfg = SimConfig::new(topology, 9, 4, 300, strategy).with_seed(5);
            let r = run(&cfg).unwrap();
            assert!(!r.hit_cap);
            assert_eq!(*r.best_fitness_trace.last().unwrap(), 300);
            assert!(r.best_fitness_trace[..r.best_fitness_trace.len() - 1]
                .iter()
                .all(|&f| f < 300));
        }
    }
}

#[test]
fn complete_graph_shares_the_best_solution_each_round() {
    let strategy = StrategyKind::Random;
    let cfg = SimConfig::new(TopologyKind::Complete, 6, 3, 400, strategy.clone()).with_seed(9);
    let problem = OneMax::new(400).unwrap();
    let mut sim = Simulation::new(&cfg, &problem, &strategy).unwrap();
    for _ in 0..30 {
        let best_before = sim.best_fitness();
        sim.step().unwrap();
        // everyone migrated to at least the round-start best
        assert!(sim.nodes().iter().all(|v| v.fitness >= best_before));
    }
}

#[test]
fn cycle_spreads_information_slower_than_complete() {
    let sbm = StrategyKind::SelectBestMutate { p_mut: 1e-3 };
    let mean = |topology| {
        let cfg = SimConfig::new(topology, 16, 5, 1_000, sbm.clone());
        let rs = run_batch(&cfg, 8, 100).unwrap();
        rs.iter().map(|r| r.rounds_to_optimum as f64).sum::<f64>() / rs.len() as f64
    };
    assert!(mean(TopologyKind::Complete) < mean(TopologyKind::Cycle));
}
