//! Exact-b gain laws against hypergeometric terms in exact integer
//! arithmetic.

use dams::oracle::{gain_distribution_exact_b, prob_at_most_five_flips};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    q.to_f64().unwrap() * 2f64.powi(-shift as i32)
}

#[test]
fn exact_b_matches_hypergeometric_at_full_length() {
    let l = 10_000;
    for b in [1, 3, 5] {
        for f in [0, 1, 2, 500, 5_000, 8_000, 9_990, 9_997, 9_999, 10_000] {
            let dist = gain_distribution_exact_b(f, b, l).unwrap();
            let total = binomial(l, b);
            for j in 0..=b {
                // j of the b flipped positions were zeros
                let want = ratio(&(binomial(l - f, j) * binomial(f, b - j)), &total);
                let gain = 2 * j as i64 - b as i64;
                let got = dist
                    .support
                    .iter()
                    .find(|&&(g, _)| g == gain)
                    .map_or(0.0, |&(_, p)| p);
                assert!(
                    (got - want).abs() <= 1e-13 * want.max(1e-300) + 1e-300,
                    "b={b} f={f} gain={gain}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn alpha_matches_exact_sum() {
    for l in [10, 100, 10_000] {
        let den = BigUint::from(l).pow(l as u32);
        let num = (0..=5usize.min(l)).fold(BigUint::zero(), |acc, i| {
            acc + binomial(l, i) * BigUint::from(l - 1).pow((l - i) as u32)
        });
        let want = ratio(&num, &den);
        let got = prob_at_most_five_flips(l);
        assert!((got - want).abs() <= 1e-14, "l={l}: {got} vs {want}");
    }
}
