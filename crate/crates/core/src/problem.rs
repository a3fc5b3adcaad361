//! Objective functions over bit strings.

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::types::Fitness;

/// A pseudo-Boolean maximization problem with a known optimum.
pub trait Problem: Send + Sync {
    /// Genome length in bits.
    fn length(&self) -> usize;

    /// Fitness value at which a run stops.
    fn optimum(&self) -> Fitness;

    fn evaluate(&self, x: &BitString) -> Result<Fitness>;

    /// Starting point for every node.
    fn initial_solution(&self) -> BitString;

    /// Fitness of `parent` with the bits at `flips` inverted. `flips` holds
    /// distinct in-range positions. The default materializes the offspring;
    /// problems with cheap incremental evaluation should override it.
    fn evaluate_flipped(
        &self,
        parent: &BitString,
        parent_fitness: Fitness,
        flips: &[usize],
    ) -> Fitness {
        let _ = parent_fitness;
        let mut child = parent.clone();
        for &i in flips {
            child.flip(i);
        }
        self.evaluate(&child)
            .expect("offspring keeps the parent's length")
    }
}

/// Maximize the number of 1-bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OneMax {
    length: usize,
}

impl OneMax {
    pub fn new(length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidInput("OneMax needs at least one bit".into()));
        }
        Ok(OneMax { length })
    }
}

impl Problem for OneMax {
    fn length(&self) -> usize {
        self.length
    }

    fn optimum(&self) -> Fitness {
        Fitness(self.length)
    }

    fn evaluate(&self, x: &BitString) -> Result<Fitness> {
        if x.len() != self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                actual: x.len(),
            });
        }
        Ok(Fitness(x.count_ones()))
    }

    fn initial_solution(&self) -> BitString {
        BitString::zeros(self.length)
    }

    #[inline]
    fn evaluate_flipped(
        &self,
        parent: &BitString,
        parent_fitness: Fitness,
        flips: &[usize],
    ) -> Fitness {
        let ones = flips.iter().filter(|&&i| parent.get(i)).count();
        Fitness(parent_fitness.0 + (flips.len() - ones) - ones)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn evaluate_examples() {
        assert_eq!(
            OneMax::new(10)
                .unwrap()
                .evaluate(&BitString::zeros(10))
                .unwrap(),
            Fitness(0)
        );
        assert_eq!(
            OneMax::new(4)
                .unwrap()
                .evaluate(&"1101".parse().unwrap())
                .unwrap(),
            Fitness(3)
        );
        let big = OneMax::new(10_000).unwrap();
        assert_eq!(
            big.evaluate(&BitString::ones(10_000)).unwrap(),
            Fitness(10_000)
        );
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let p = OneMax::new(4).unwrap();
        assert!(matches!(
            p.evaluate(&BitString::zeros(5)),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 5
            })
        ));
    }

    #[test]
    fn initial_solution_is_all_zeros() {
        let p = OneMax::new(4).unwrap();
        assert_eq!(p.initial_solution().to_string(), "0000");
        assert_eq!(p.evaluate(&p.initial_solution()).unwrap(), Fitness(0));
        let big = OneMax::new(10_000).unwrap();
        let x = big.initial_solution();
        assert_eq!(x.len(), 10_000);
        assert_eq!(x.count_ones(), 0);
    }

    #[test]
    fn zero_length_rejected() {
        assert!(OneMax::new(0).is_err());
    }

    proptest! {
        #[test]
        fn complement_sums_to_length(bits in prop::collection::vec(any::<bool>(), 1..300)) {
            let x = BitString::from_bools(&bits);
            let p = OneMax::new(x.len()).unwrap();
            let f = p.evaluate(&x).unwrap().0 + p.evaluate(&x.complement()).unwrap().0;
            prop_assert_eq!(f, x.len());
        }

        #[test]
        fn shuffle_preserves_fitness(mut bits in prop::collection::vec(any::<bool>(), 1..300), seed: u64) {
            let p = OneMax::new(bits.len()).unwrap();
            let before = p.evaluate(&BitString::from_bools(&bits)).unwrap();
            bits.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(p.evaluate(&BitString::from_bools(&bits)).unwrap(), before);
        }

        #[test]
        fn incremental_matches_full(bits in prop::collection::vec(any::<bool>(), 8..100), seed: u64) {
            let x = BitString::from_bools(&bits);
            let p = OneMax::new(x.len()).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let flips = rand::seq::index::sample(&mut rng, x.len(), 5).into_vec();
            let fx = p.evaluate(&x).unwrap();
            let mut child = x.clone();
            for &i in &flips { child.flip(i); }
            prop_assert_eq!(p.evaluate_flipped(&x, fx, &flips), p.evaluate(&child).unwrap());
        }
    }
}
