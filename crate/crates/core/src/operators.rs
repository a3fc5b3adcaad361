//! Mutation operators and the one-iteration (1+λ)-EA built on them.

use std::fmt;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::types::{Fitness, OperatorId, Reward};

/// How an operator picks the bits it flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationKind {
    /// Flip exactly `b` distinct positions chosen uniformly.
    ExactBits(usize),
    /// Flip every bit independently with probability 1/l.
    RateFlip,
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationKind::ExactBits(b) => write!(f, "{b}-bit"),
            MutationKind::RateFlip => f.write_str("bit-flip"),
        }
    }
}

/// The four operators used throughout the OneMax experiments, in index order.
pub const STANDARD_OPERATORS: [MutationKind; 4] = [
    MutationKind::ExactBits(1),
    MutationKind::ExactBits(3),
    MutationKind::ExactBits(5),
    MutationKind::RateFlip,
];

/// Samples `count` distinct positions in `0..len` into `out` (Floyd's algorithm).
fn sample_positions<R: Rng + ?Sized>(rng: &mut R, len: usize, count: usize, out: &mut Vec<usize>) {
    debug_assert!(count <= len);
    out.clear();
    if count > 32 {
        out.extend(rand::seq::index::sample(rng, len, count).iter());
        return;
    }
    for j in (len - count)..len {
        let t = rng.random_range(0..=j);
        if out.contains(&t) {
            out.push(j);
        } else {
            out.push(t);
        }
    }
}

fn apply_flips(x: &mut BitString, flips: &[usize]) {
    for &i in flips {
        x.flip(i);
    }
}

/// Copy of `x` with exactly `b` distinct uniformly chosen bits flipped.
pub fn mutate_exact_b<R: Rng + ?Sized>(x: &BitString, b: usize, rng: &mut R) -> Result<BitString> {
    if b == 0 || b > x.len() {
        return Err(Error::InvalidInput(format!(
            "cannot flip exactly {b} bits of a {}-bit string",
            x.len()
        )));
    }
    let mut flips = Vec::with_capacity(b);
    sample_positions(rng, x.len(), b, &mut flips);
    let mut child = x.clone();
    apply_flips(&mut child, &flips);
    Ok(child)
}

/// Copy of `x` with each bit flipped independently with probability 1/l.
pub fn mutate_rate<R: Rng + ?Sized>(x: &BitString, rng: &mut R) -> BitString {
    let mut child = x.clone();
    if x.is_empty() {
        return child;
    }
    let p = 1.0 / x.len() as f64;
    for i in 0..x.len() {
        if rng.random::<f64>() < p {
            child.flip(i);
        }
    }
    child
}

/// Result of one atomic application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub solution: BitString,
    pub fitness: Fitness,
    pub reward: Reward,
    pub evaluations: u64,
}

/// An ordered operator set bound to a genome length, plus the offspring
/// count λ of each atomic (1+λ)-EA iteration.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    kinds: Vec<MutationKind>,
    lambda: usize,
    length: usize,
    flip_count: Binomial,
}

impl OperatorSet {
    pub fn new(kinds: Vec<MutationKind>, lambda: usize, length: usize) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::Config("operator set is empty".into()));
        }
        if lambda == 0 {
            return Err(Error::Config("lambda must be at least 1".into()));
        }
        if length == 0 {
            return Err(Error::Config("genome length must be at least 1".into()));
        }
        for k in &kinds {
            if let MutationKind::ExactBits(b) = *k {
                if b == 0 || b > length {
                    return Err(Error::Config(format!(
                        "{b}-bit mutation is undefined on {length}-bit strings"
                    )));
                }
            }
        }
        let flip_count = Binomial::new(length as u64, 1.0 / length as f64)
            .map_err(|e| Error::Config(format!("flip-count distribution: {e}")))?;
        Ok(OperatorSet {
            kinds,
            lambda,
            length,
            flip_count,
        })
    }

    /// The four standard operators.
    pub fn standard(lambda: usize, length: usize) -> Result<Self> {
        Self::new(STANDARD_OPERATORS.to_vec(), lambda, length)
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn kinds(&self) -> &[MutationKind] {
        &self.kinds
    }

    pub fn kind(&self, op: OperatorId) -> Result<MutationKind> {
        self.kinds.get(op.0).copied().ok_or_else(|| {
            Error::InvalidInput(format!("{op} is not in a set of {}", self.kinds.len()))
        })
    }

    /// Draws the flip set of one offspring into `out`.
    pub fn sample_flips<R: Rng + ?Sized>(
        &self,
        kind: MutationKind,
        rng: &mut R,
        out: &mut Vec<usize>,
    ) {
        let count = match kind {
            MutationKind::ExactBits(b) => b,
            MutationKind::RateFlip => self.flip_count.sample(rng) as usize,
        };
        sample_positions(rng, self.length, count, out);
    }

    /// One (1+λ)-EA iteration, updating `x` and `fx` in place.
    ///
    /// The first offspring with the highest fitness replaces the parent if it
    /// is strictly fitter. Returns the reward `f(x_new) - f(x)`.
    pub fn ea_step_in_place<P, R>(
        &self,
        problem: &P,
        x: &mut BitString,
        fx: &mut Fitness,
        op: OperatorId,
        rng: &mut R,
    ) -> Result<Reward>
    where
        P: Problem + ?Sized,
        R: Rng + ?Sized,
    {
        if x.len() != self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                actual: x.len(),
            });
        }
        let kind = self.kind(op)?;
        let mut flips = Vec::new();
        let mut best_flips = Vec::new();
        let mut best = *fx;
        for _ in 0..self.lambda {
            self.sample_flips(kind, rng, &mut flips);
            let f = problem.evaluate_flipped(x, *fx, &flips);
            if f > best {
                best = f;
                std::mem::swap(&mut best_flips, &mut flips);
            }
        }
        let reward = Reward::gain(*fx, best);
        if best > *fx {
            apply_flips(x, &best_flips);
            *fx = best;
        }
        Ok(reward)
    }

    /// One (1+λ)-EA iteration on a copy of `x`.
    pub fn ea_step<P, R>(
        &self,
        problem: &P,
        x: &BitString,
        op: OperatorId,
        rng: &mut R,
    ) -> Result<StepOutcome>
    where
        P: Problem + ?Sized,
        R: Rng + ?Sized,
    {
        let mut solution = x.clone();
        let mut fitness = problem.evaluate(x)?;
        let reward = self.ea_step_in_place(problem, &mut solution, &mut fitness, op, rng)?;
        Ok(StepOutcome {
            solution,
            fitness,
            reward,
            evaluations: self.lambda as u64,
        })
    }
}
