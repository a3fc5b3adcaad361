//! Metaheuristic selection: Select-Best-and-Mutate and the two baselines.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::OracleTable;
use crate::types::{Fitness, OperatorId, Reward};

/// The `(reward, operator)` pairs a node sees in one round: its own pair
/// first, then one per neighbor.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NeighborhoodReport {
    entries: Vec<(Reward, OperatorId)>,
}

impl NeighborhoodReport {
    pub fn new(own: (Reward, OperatorId)) -> Self {
        NeighborhoodReport { entries: vec![own] }
    }

    pub fn from_entries(entries: Vec<(Reward, OperatorId)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput(
                "a report always holds the node's own entry".into(),
            ));
        }
        Ok(NeighborhoodReport { entries })
    }

    pub fn push(&mut self, entry: (Reward, OperatorId)) {
        self.entries.push(entry);
    }

    pub fn clear_to(&mut self, own: (Reward, OperatorId)) {
        self.entries.clear();
        self.entries.push(own);
    }

    pub fn entries(&self) -> &[(Reward, OperatorId)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Operator of a maximal-reward entry; ties are broken uniformly over the
/// tied entries.
fn select_best<R: Rng + ?Sized>(report: &NeighborhoodReport, rng: &mut R) -> OperatorId {
    let entries = report.entries();
    let best = entries
        .iter()
        .map(|e| e.0)
        .max()
        .expect("report is never empty");
    let tied = entries.iter().filter(|e| e.0 == best).count();
    let pick = if tied == 1 {
        0
    } else {
        rng.random_range(0..tied)
    };
    entries.iter().filter(|e| e.0 == best).nth(pick).unwrap().1
}

/// Select-Best-and-Mutate: adopt the best-rewarded operator of the
/// neighborhood, or with probability `p_mut` one of the other `m - 1`.
pub fn sbm_select<R: Rng + ?Sized>(
    report: &NeighborhoodReport,
    p_mut: f64,
    m: usize,
    rng: &mut R,
) -> Result<OperatorId> {
    validate_sbm(p_mut, m)?;
    if report.is_empty() {
        return Err(Error::InvalidInput("empty neighborhood report".into()));
    }
    let best = select_best(report, rng);
    if best.0 >= m {
        return Err(Error::InvalidInput(format!(
            "{best} is not in a set of {m}"
        )));
    }
    if rng.random::<f64>() < p_mut {
        let other = rng.random_range(0..m - 1);
        Ok(OperatorId(if other >= best.0 { other + 1 } else { other }))
    } else {
        Ok(best)
    }
}

fn validate_sbm(p_mut: f64, m: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p_mut) {
        return Err(Error::Config(format!("p_mut {p_mut} is not a probability")));
    }
    if m == 0 {
        return Err(Error::Config("operator set is empty".into()));
    }
    if m < 2 && p_mut > 0.0 {
        return Err(Error::Config(
            "operator mutation needs at least two operators".into(),
        ));
    }
    Ok(())
}

/// Uniform pick among all `m` operators.
pub fn random_select<R: Rng + ?Sized>(m: usize, rng: &mut R) -> OperatorId {
    assert!(m >= 1, "operator set is empty");
    OperatorId(rng.random_range(0..m))
}

/// The sequential oracle's choice at `fitness`.
pub fn oracle_select(fitness: Fitness, table: &OracleTable) -> Result<OperatorId> {
    table.get(fitness)
}

/// Inputs available to a selector at the metaheuristic selection level.
#[derive(Clone, Copy, Debug)]
pub struct SelectionContext<'a> {
    pub report: &'a NeighborhoodReport,
    /// Fitness of the node's solution after migration.
    pub fitness: Fitness,
    pub operator_count: usize,
}

/// A metaheuristic selection policy. Implementations must draw randomness
/// only from the supplied node stream.
pub trait Selector: Send + Sync {
    fn select(&self, ctx: &SelectionContext<'_>, rng: &mut dyn rand::RngCore)
        -> Result<OperatorId>;

    /// Rejects configurations the policy cannot run under.
    fn validate(&self, operator_count: usize, length: usize) -> Result<()>;
}

/// The built-in selection policies.
#[derive(Clone, Debug, PartialEq)]
pub enum StrategyKind {
    SelectBestMutate { p_mut: f64 },
    Random,
    SequentialOracle(Arc<OracleTable>),
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::SelectBestMutate { .. } => "sbm",
            StrategyKind::Random => "random",
            StrategyKind::SequentialOracle(_) => "seq-oracle",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Selector for StrategyKind {
    fn select(
        &self,
        ctx: &SelectionContext<'_>,
        rng: &mut dyn rand::RngCore,
    ) -> Result<OperatorId> {
        match self {
            StrategyKind::SelectBestMutate { p_mut } => {
                sbm_select(ctx.report, *p_mut, ctx.operator_count, rng)
            }
            StrategyKind::Random => Ok(random_select(ctx.operator_count, rng)),
            StrategyKind::SequentialOracle(table) => oracle_select(ctx.fitness, table),
        }
    }

    fn validate(&self, operator_count: usize, length: usize) -> Result<()> {
        match self {
            StrategyKind::SelectBestMutate { p_mut } => validate_sbm(*p_mut, operator_count),
            StrategyKind::Random => {
                if operator_count == 0 {
                    return Err(Error::Config("operator set is empty".into()));
                }
                Ok(())
            }
            StrategyKind::SequentialOracle(table) => {
                if table.length() != length {
                    return Err(Error::Config(format!(
                        "oracle table covers length {}, run uses {length}",
                        table.length()
                    )));
                }
                if let Some(op) = table.choices().iter().find(|op| op.0 >= operator_count) {
                    return Err(Error::Config(format!(
                        "oracle table names {op} outside the operator set"
                    )));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn report(entries: &[(i64, usize)]) -> NeighborhoodReport {
        NeighborhoodReport::from_entries(
            entries
                .iter()
                .map(|&(r, k)| (Reward(r), OperatorId(k)))
                .collect(),
        )
        .unwrap()
    }

    fn within_3_sigma(count: usize, trials: usize, p: f64) -> bool {
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - trials as f64 * p).abs() <= 3.0 * sd
    }

    #[test]
    fn sbm_unique_argmax_without_mutation() {
        let r = report(&[(3, 0), (7, 1), (5, 2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sbm_select(&r, 0.0, 4, &mut rng).unwrap(), OperatorId(1));
        }
    }

    #[test]
    fn sbm_forced_mutation_is_uniform_over_others() {
        let r = report(&[(7, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 30_000;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[sbm_select(&r, 1.0, 4, &mut rng).unwrap().0] += 1;
        }
        assert_eq!(counts[1], 0);
        for k in [0, 2, 3] {
            assert!(within_3_sigma(counts[k], trials, 1.0 / 3.0), "{counts:?}");
        }
    }

    #[test]
    fn sbm_ties_split_evenly() {
        let r = report(&[(5, 0), (5, 3)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 10_000;
        let mut zero = 0;
        for _ in 0..trials {
            match sbm_select(&r, 0.0, 4, &mut rng).unwrap().0 {
                0 => zero += 1,
                3 => {}
                other => panic!("picked {other}"),
            }
        }
        assert!(within_3_sigma(zero, trials, 0.5), "{zero}");
    }

    #[test]
    fn sbm_mutation_rate_statistics() {
        let r = report(&[(2, 2), (1, 0), (0, 3)]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trials = 40_000;
        let p_mut = 0.2;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[sbm_select(&r, p_mut, 4, &mut rng).unwrap().0] += 1;
        }
        assert!(within_3_sigma(trials - counts[2], trials, p_mut));
        for k in [0, 1, 3] {
            assert!(within_3_sigma(counts[k], trials, p_mut / 3.0), "{counts:?}");
        }
    }

    #[test]
    fn sbm_configuration_errors() {
        let r = report(&[(0, 0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(matches!(
            sbm_select(&r, 0.5, 1, &mut rng),
            Err(Error::Config(_))
        ));
        assert!(sbm_select(&r, 0.0, 1, &mut rng).is_ok());
        assert!(sbm_select(&r, 1.5, 4, &mut rng).is_err());
        assert!(NeighborhoodReport::from_entries(vec![]).is_err());
    }

    #[test]
    fn random_select_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!((0..100).all(|_| random_select(1, &mut rng) == OperatorId(0)));
        let trials = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[random_select(4, &mut rng).0] += 1;
        }
        assert!(
            counts.iter().all(|&c| within_3_sigma(c, trials, 0.25)),
            "{counts:?}"
        );
    }

    #[test]
    fn oracle_select_is_a_lookup() {
        let table =
            OracleTable::from_choices(vec![OperatorId(2), OperatorId(1), OperatorId(0)], Some(1))
                .unwrap();
        assert_eq!(oracle_select(Fitness(0), &table).unwrap(), OperatorId(2));
        assert_eq!(
            oracle_select(Fitness(1), &table).unwrap(),
            oracle_select(Fitness(1), &table).unwrap()
        );
        assert!(oracle_select(Fitness(3), &table).is_err());
    }

    #[test]
    fn strategy_validation() {
        let table = Arc::new(OracleTable::from_choices(vec![OperatorId(3); 11], None).unwrap());
        let s = StrategyKind::SequentialOracle(table);
        assert!(s.validate(4, 10).is_ok());
        assert!(s.validate(3, 10).is_err());
        assert!(s.validate(4, 11).is_err());
        assert!(StrategyKind::SelectBestMutate { p_mut: 0.1 }
            .validate(1, 10)
            .is_err());
        assert!(StrategyKind::Random.validate(1, 10).is_ok());
    }

    fn entries() -> impl Strategy<Value = Vec<(i64, usize)>> {
        prop::collection::vec((0i64..6, 0usize..4), 1..40)
    }

    proptest! {
        #[test]
        fn sbm_without_mutation_returns_an_argmax(e in entries(), seed: u64) {
            let r = report(&e);
            let best = e.iter().map(|x| x.0).max().unwrap();
            let op = sbm_select(&r, 0.0, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            prop_assert!(e.iter().any(|&(rw, k)| rw == best && k == op.0));
        }

        #[test]
        fn sbm_is_shift_invariant(e in entries(), shift in -50i64..50, p_mut in 0.0f64..=1.0, seed: u64) {
            let shifted: Vec<_> = e.iter().map(|&(r, k)| (r + shift, k)).collect();
            let a = sbm_select(&report(&e), p_mut, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let b = sbm_select(&report(&shifted), p_mut, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
