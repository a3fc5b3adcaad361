//! Exact single-offspring gain laws on OneMax and the quantities derived
//! from them: expected (1+λ)-EA gain, the selfish sequential oracle table,
//! and the probability that a whole network of bit-flip nodes beats a
//! five-bit gain in one round.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{MutationKind, STANDARD_OPERATORS};
use crate::types::{Fitness, OperatorId};

/// Truncated binomial mass left out of rate-flip mixtures.
pub const TAIL_EPSILON: f64 = 1e-12;

/// Law of `f(child) - f(parent)` for one offspring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainDistribution {
    pub operator: MutationKind,
    pub fitness: usize,
    pub length: usize,
    /// `(gain, probability)` sorted by gain, zero-probability points omitted.
    pub support: Vec<(i64, f64)>,
}

impl GainDistribution {
    pub fn total_probability(&self) -> f64 {
        self.support.iter().map(|&(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|&(g, p)| g as f64 * p).sum()
    }

    /// `P(gain >= g)`.
    pub fn survival(&self, g: i64) -> f64 {
        self.support
            .iter()
            .filter(|&&(x, _)| x >= g)
            .map(|&(_, p)| p)
            .sum()
    }

    pub fn max_gain(&self) -> i64 {
        self.support.last().map_or(0, |&(g, _)| g)
    }
}

/// Normalized weights from log-weights, robust to huge dynamic range.
fn normalize_logs(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|&x| (x - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Hypergeometric law of the number of zeros hit when `b` distinct bits are
/// flipped in a string with `zeros` zeros and `ones` ones. Returns
/// `(first_i, probabilities)`.
fn zeros_hit_law(zeros: usize, ones: usize, b: usize) -> (usize, Vec<f64>) {
    let lo = b.saturating_sub(ones);
    let hi = b.min(zeros);
    // log w(i+1) - log w(i) = ln[(zeros-i)(b-i)] - ln[(i+1)(ones-b+i+1)]
    let mut logs = Vec::with_capacity(hi - lo + 1);
    let mut acc = 0.0;
    logs.push(acc);
    for i in lo..hi {
        let num = ((zeros - i) as f64).ln() + ((b - i) as f64).ln();
        let den = ((i + 1) as f64).ln() + ((ones + i + 1 - b) as f64).ln();
        acc += num - den;
        logs.push(acc);
    }
    (lo, normalize_logs(&logs))
}

fn check_fitness(f: usize, l: usize) -> Result<()> {
    if f > l {
        return Err(Error::InvalidInput(format!(
            "fitness {f} exceeds length {l}"
        )));
    }
    Ok(())
}

/// Gain law of the exact-`b` operator at fitness `f`:
/// `P(gain = 2i - b) = C(l-f, i) C(f, b-i) / C(l, b)`.
pub fn gain_distribution_exact_b(f: usize, b: usize, l: usize) -> Result<GainDistribution> {
    check_fitness(f, l)?;
    if b > l {
        return Err(Error::InvalidInput(format!("cannot flip {b} of {l} bits")));
    }
    let (lo, probs) = zeros_hit_law(l - f, f, b);
    let support = probs
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > 0.0)
        .map(|(j, p)| (2 * (lo + j) as i64 - b as i64, p))
        .collect();
    Ok(GainDistribution {
        operator: MutationKind::ExactBits(b),
        fitness: f,
        length: l,
        support,
    })
}

/// `P(K = k)` for `K ~ Binomial(l, 1/l)`, for every `k` until the terms
/// underflow or reach `l`.
pub fn flip_count_pmf(l: usize) -> Vec<f64> {
    if l == 0 {
        return vec![1.0];
    }
    if l == 1 {
        return vec![0.0, 1.0];
    }
    let lf = l as f64;
    let mut pmf = vec![(lf * (-1.0 / lf).ln_1p()).exp()];
    for k in 0..l {
        // P(k+1) = P(k) (l-k) / ((k+1)(l-1))
        let next = pmf[k] * (l - k) as f64 / ((k + 1) as f64 * (lf - 1.0));
        if next == 0.0 {
            break;
        }
        pmf.push(next);
    }
    pmf
}

/// `P(K > k)` for every `k` covered by `pmf`, summed from the far tail.
fn upper_tails(pmf: &[f64]) -> Vec<f64> {
    let mut tails = vec![0.0; pmf.len()];
    let mut acc = 0.0;
    for k in (0..pmf.len()).rev() {
        tails[k] = acc;
        acc += pmf[k];
    }
    tails
}

/// Smallest flip count `k` whose Binomial(l, 1/l) upper tail `P(K > k)` is
/// below [`TAIL_EPSILON`].
pub fn rate_tail_cut(l: usize) -> usize {
    let pmf = flip_count_pmf(l);
    upper_tails(&pmf)
        .iter()
        .position(|&t| t < TAIL_EPSILON)
        .unwrap_or(pmf.len() - 1)
}

/// Gain law of the rate-1/l bit-flip operator at fitness `f`: a mixture over
/// the flip count `k <= tail_cut` of the exact-`k` laws, renormalized.
pub fn gain_distribution_rate(f: usize, l: usize, tail_cut: usize) -> Result<GainDistribution> {
    check_fitness(f, l)?;
    let pmf = flip_count_pmf(l);
    let cut = tail_cut.min(l).min(pmf.len() - 1);
    // gains lie in [-cut, cut]; index = gain + cut
    let mut mass = vec![0.0; 2 * cut + 1];
    for (k, &pk) in pmf.iter().enumerate().take(cut + 1) {
        if pk == 0.0 {
            continue;
        }
        let (lo, probs) = zeros_hit_law(l - f, f, k);
        for (j, p) in probs.into_iter().enumerate() {
            let gain = 2 * (lo + j) as i64 - k as i64;
            mass[(gain + cut as i64) as usize] += pk * p;
        }
    }
    let total: f64 = mass.iter().sum();
    let support = mass
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > 0.0)
        .map(|(idx, p)| (idx as i64 - cut as i64, p / total))
        .collect();
    Ok(GainDistribution {
        operator: MutationKind::RateFlip,
        fitness: f,
        length: l,
        support,
    })
}

/// Gain law of any operator kind, with the default tail cut for rate flips.
pub fn gain_distribution(kind: MutationKind, f: usize, l: usize) -> Result<GainDistribution> {
    match kind {
        MutationKind::ExactBits(b) => gain_distribution_exact_b(f, b, l),
        MutationKind::RateFlip => gain_distribution_rate(f, l, rate_tail_cut(l)),
    }
}

/// `E[max(0, G_1, ..., G_λ)]` for iid gains `G_i ~ dist`, i.e. the expected
/// reward of one elitist (1+λ)-EA iteration:
/// `sum_{g >= 1} 1 - (1 - P(G >= g))^λ`.
pub fn expected_ea_gain(dist: &GainDistribution, lambda: usize) -> f64 {
    let lambda = lambda as f64;
    let mut total = 0.0;
    let mut survival = 0.0;
    // Walk gains from the top so P(G >= g) accumulates without cancellation.
    let mut points = dist.support.iter().rev().peekable();
    for g in (1..=dist.max_gain()).rev() {
        while let Some(&&(x, p)) = points.peek() {
            if x < g {
                break;
            }
            survival += p;
            points.next();
        }
        let s = survival.clamp(0.0, 1.0);
        total += -(lambda * (-s).ln_1p()).exp_m1();
    }
    total
}

/// Per-fitness operator choice of the selfish sequential oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleTable {
    length: usize,
    /// Offspring count the table was derived for, when known.
    lambda: Option<usize>,
    choices: Vec<OperatorId>,
}

impl OracleTable {
    pub fn from_choices(choices: Vec<OperatorId>, lambda: Option<usize>) -> Result<Self> {
        if choices.is_empty() {
            return Err(Error::InvalidInput("oracle table is empty".into()));
        }
        Ok(OracleTable {
            length: choices.len() - 1,
            lambda,
            choices,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn lambda(&self) -> Option<usize> {
        self.lambda
    }

    pub fn choices(&self) -> &[OperatorId] {
        &self.choices
    }

    pub fn get(&self, fitness: Fitness) -> Result<OperatorId> {
        self.choices.get(fitness.0).copied().ok_or_else(|| {
            Error::InvalidInput(format!(
                "fitness {} outside table range 0..={}",
                fitness.0, self.length
            ))
        })
    }

    /// Maximal runs of equal choices as `(first_fitness, last_fitness, op)`.
    pub fn regimes(&self) -> Vec<(usize, usize, OperatorId)> {
        let mut out: Vec<(usize, usize, OperatorId)> = Vec::new();
        for (f, &op) in self.choices.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.2 == op => last.1 = f,
                _ => out.push((f, f, op)),
            }
        }
        out
    }

    /// `fitness,operator` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fitness,operator\n");
        for (f, op) in self.choices.iter().enumerate() {
            out.push_str(&format!("{f},{}\n", op.0));
        }
        out
    }

    /// Parses the format written by [`OracleTable::to_csv`]. Rows must cover
    /// fitness `0..=l` in order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim() == "fitness,operator" => {}
            _ => {
                return Err(Error::InvalidInput(
                    "oracle table needs a 'fitness,operator' header".into(),
                ))
            }
        }
        let mut choices = Vec::new();
        for (lineno, line) in lines {
            let bad = || Error::InvalidInput(format!("oracle table line {}: '{line}'", lineno + 1));
            let (f, op) = line.trim().split_once(',').ok_or_else(bad)?;
            let f: usize = f.trim().parse().map_err(|_| bad())?;
            let op: usize = op.trim().parse().map_err(|_| bad())?;
            if f != choices.len() {
                return Err(bad());
            }
            choices.push(OperatorId(op));
        }
        Self::from_choices(choices, None)
    }
}

/// Oracle table over an arbitrary operator list: at each fitness, the
/// operator with the highest expected (1+λ) gain, lowest index on ties.
pub fn build_oracle_table_for(
    kinds: &[MutationKind],
    l: usize,
    lambda: usize,
) -> Result<OracleTable> {
    if l == 0 || lambda == 0 || kinds.is_empty() {
        return Err(Error::InvalidInput(
            "oracle table needs l >= 1, lambda >= 1 and operators".into(),
        ));
    }
    let tail_cut = rate_tail_cut(l);
    let mut choices = Vec::with_capacity(l + 1);
    for f in 0..=l {
        let mut best = (OperatorId(0), f64::NEG_INFINITY);
        for (idx, &kind) in kinds.iter().enumerate() {
            let dist = match kind {
                MutationKind::ExactBits(b) => gain_distribution_exact_b(f, b, l)?,
                MutationKind::RateFlip => gain_distribution_rate(f, l, tail_cut)?,
            };
            let gain = expected_ea_gain(&dist, lambda);
            if gain > best.1 {
                best = (OperatorId(idx), gain);
            }
        }
        choices.push(best.0);
    }
    OracleTable::from_choices(choices, Some(lambda))
}

/// Oracle table for the four standard operators.
pub fn build_oracle_table(l: usize, lambda: usize) -> Result<OracleTable> {
    build_oracle_table_for(&STANDARD_OPERATORS, l, lambda)
}

/// `α(l)`: probability that one rate-1/l mutation flips at most five bits.
pub fn prob_at_most_five_flips(l: usize) -> f64 {
    1.0 - prob_more_than_five_flips(l)
}

fn prob_more_than_five_flips(l: usize) -> f64 {
    flip_count_pmf(l).iter().skip(6).rev().sum()
}

/// Probability that at least one of `λ·n` independent rate-1/l offspring
/// flips more than five bits, `1 - α^{λ n}`. Starting from the all-zeros
/// string this is the chance that a bit-flip network gains more than five in
/// its first round.
pub fn prob_network_gain_exceeds_five(l: usize, lambda: usize, n: usize) -> f64 {
    let beyond = prob_more_than_five_flips(l);
    let trials = (lambda * n) as f64;
    -(trials * (-beyond).ln_1p()).exp_m1()
}
