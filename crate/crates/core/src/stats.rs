//! Sample summaries and the Mann-Whitney U test.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Significance level used when comparing strategies.
pub const SIGNIFICANCE_LEVEL: f64 = 0.01;

/// Largest combined sample size handled by exact enumeration.
pub const EXACT_MAX_COMBINED: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased (n - 1) standard deviation; 0 for a single sample.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

pub fn summarize(samples: &[f64]) -> Result<SampleSummary> {
    if samples.is_empty() {
        return Err(Error::InvalidInput(
            "cannot summarize an empty sample".into(),
        ));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("sample contains NaN".into()));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std_dev = if n > 1 {
        (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(SampleSummary {
        count: n,
        mean,
        std_dev,
        min: sorted[0],
        max: sorted[n - 1],
        median,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PValueMethod {
    Exact,
    NormalApproximation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U of the first sample: the number of (a, b) pairs with a > b, ties
    /// counting one half.
    pub u: f64,
    pub p_two_sided: f64,
    pub method: PValueMethod,
}

impl MannWhitney {
    pub fn significant(&self) -> bool {
        self.p_two_sided < SIGNIFICANCE_LEVEL
    }
}

/// Midranks of `a ++ b` scaled by two so that they are integers.
fn doubled_midranks(a: &[f64], b: &[f64]) -> Vec<u64> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && pooled[idx[end]] == pooled[idx[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end; twice their mean
        let doubled = (start + 1 + end) as u64;
        for &i in &idx[start..end] {
            ranks[i] = doubled;
        }
        start = end;
    }
    ranks
}

fn tie_group_sizes(a: &[f64], b: &[f64]) -> Vec<usize> {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    pooled.chunk_by(|x, y| x == y).map(<[f64]>::len).collect()
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput(
            "Mann-Whitney needs two non-empty samples".into(),
        ));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("sample contains NaN".into()));
    }
    Ok(())
}

fn u_statistic(a_len: usize, doubled_rank_sum: u64) -> f64 {
    doubled_rank_sum as f64 / 2.0 - (a_len * (a_len + 1)) as f64 / 2.0
}

/// Exact permutation p-value: the share of all `C(N, |a|)` ways to assign
/// the pooled midranks to the first sample whose U lies at least as far
/// from its mean as the observed one.
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check_samples(a, b)?;
    let total_len = a.len() + b.len();
    if total_len > 60 {
        return Err(Error::InvalidInput(format!(
            "exact test limited to 60 observations, got {total_len}"
        )));
    }
    let ranks = doubled_midranks(a, b);
    let observed: u64 = ranks[..a.len()].iter().sum();
    let k = a.len();
    let max_sum: u64 = ranks.iter().sum();

    // ways[j][s]: subsets of size j with doubled rank sum s
    let width = max_sum as usize + 1;
    let mut ways = vec![vec![0u128; width]; k + 1];
    ways[0][0] = 1;
    for &r in &ranks {
        for j in (1..=k).rev() {
            let (lower, upper) = ways.split_at_mut(j);
            let (src, dst) = (&lower[j - 1], &mut upper[0]);
            for s in (r as usize..width).rev() {
                dst[s] += src[s - r as usize];
            }
        }
    }
    // Mean doubled rank sum is k (N + 1); compare distances in doubled units.
    let centre = (k * (total_len + 1)) as i64;
    let observed_dev = (observed as i64 - centre).abs();
    let (mut extreme, mut all) = (0u128, 0u128);
    for (s, &count) in ways[k].iter().enumerate() {
        all += count;
        if (s as i64 - centre).abs() >= observed_dev {
            extreme += count;
        }
    }
    Ok(MannWhitney {
        u: u_statistic(k, observed),
        p_two_sided: extreme as f64 / all as f64,
        method: PValueMethod::Exact,
    })
}

/// Normal approximation with tie and continuity corrections.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check_samples(a, b)?;
    let ranks = doubled_midranks(a, b);
    let u = u_statistic(a.len(), ranks[..a.len()].iter().sum());
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let ties: f64 = tie_group_sizes(a, b)
        .into_iter()
        .map(|t| (t as f64).powi(3) - t as f64)
        .sum();
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let p = if variance <= 0.0 {
        1.0
    } else {
        let z = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(MannWhitney {
        u,
        p_two_sided: p,
        method: PValueMethod::NormalApproximation,
    })
}

/// Two-sided Mann-Whitney U test; exact for small combined samples, normal
/// approximation otherwise.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.len() + b.len() <= EXACT_MAX_COMBINED {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_normal(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn summary_examples() {
        let s = summarize(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((s.mean, s.std_dev), (5.0, 0.0));
        let s = summarize(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max), (2.5, 2.5, 1.0, 4.0));
        assert!((s.std_dev - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let s = summarize(&[2.0]).unwrap();
        assert_eq!((s.std_dev, s.min, s.max), (0.0, 2.0, 2.0));
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn midranks_with_ties() {
        assert_eq!(
            doubled_midranks(&[1.0, 2.0, 2.0], &[4.0, 2.0]),
            vec![2, 6, 6, 10, 6]
        );
        assert_eq!(
            tie_group_sizes(&[1.0, 2.0, 2.0], &[4.0, 2.0]),
            vec![1, 3, 1]
        );
    }

    #[test]
    fn separated_triplets() {
        let r = mann_whitney(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.method, PValueMethod::Exact);
        assert_eq!(r.u, 0.0);
        assert!((r.p_two_sided - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_samples() {
        let a = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = mann_whitney(&a, &a).unwrap();
        assert_eq!(r.u, 12.5);
        assert!(r.p_two_sided > 0.99);
        let big: Vec<f64> = (0..20).map(|i| (i * 7 % 13) as f64).collect();
        let r = mann_whitney(&big, &big).unwrap();
        assert_eq!(r.method, PValueMethod::NormalApproximation);
        assert_eq!(r.u, 200.0);
        assert_eq!(r.p_two_sided, 1.0);
    }

    #[test]
    fn disjoint_twenty_is_significant() {
        let a: Vec<f64> = (0..20).map(f64::from).collect();
        let b: Vec<f64> = (100..120).map(f64::from).collect();
        let r = mann_whitney(&a, &b).unwrap();
        assert_eq!(r.u, 0.0);
        assert!(r.p_two_sided < 0.01 && r.significant());
    }

    #[test]
    fn constant_pool_has_p_one() {
        let r = mann_whitney_normal(&[1.0; 10], &[1.0; 10]).unwrap();
        assert_eq!(r.p_two_sided, 1.0);
        let r = mann_whitney_exact(&[1.0; 3], &[1.0; 4]).unwrap();
        assert_eq!(r.p_two_sided, 1.0);
    }

    #[test]
    fn empty_samples_rejected() {
        assert!(mann_whitney(&[], &[1.0]).is_err());
        assert!(mann_whitney(&[1.0], &[f64::NAN]).is_err());
    }

    fn pair(lo: usize, hi: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (
            prop::collection::vec(0u32..40, lo..=hi),
            prop::collection::vec(0u32..40, lo..=hi),
        )
            .prop_map(|(a, b)| {
                (
                    a.into_iter().map(f64::from).collect(),
                    b.into_iter().map(f64::from).collect(),
                )
            })
    }

    proptest! {
        #[test]
        fn u_duality((a, b) in pair(1, 30)) {
            let ab = mann_whitney(&a, &b).unwrap();
            let ba = mann_whitney(&b, &a).unwrap();
            prop_assert!((ab.u + ba.u - (a.len() * b.len()) as f64).abs() < 1e-9);
            prop_assert!((ab.p_two_sided - ba.p_two_sided).abs() < 1e-12);
        }

        #[test]
        fn rank_based_invariance((a, b) in pair(2, 12)) {
            let t = |v: &[f64]| v.iter().map(|x| (x * 0.3).exp() + 7.0).collect::<Vec<_>>();
            for f in [mann_whitney_exact, mann_whitney_normal] {
                let r1 = f(&a, &b).unwrap();
                let r2 = f(&t(&a), &t(&b)).unwrap();
                prop_assert_eq!(r1.u, r2.u);
                prop_assert!((r1.p_two_sided - r2.p_two_sided).abs() < 1e-12);
            }
        }

        #[test]
        fn u_counts_pairs((a, b) in pair(1, 15)) {
            let direct: f64 = a.iter().flat_map(|x| b.iter().map(move |y| {
                if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 }
            })).sum();
            prop_assert_eq!(mann_whitney(&a, &b).unwrap().u, direct);
        }
    }
}
