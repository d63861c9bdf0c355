//! Wilcoxon rank-sum test with exact tie-aware null distribution.
//!
//! Ranks are kept doubled so midranks stay integral; the exact distribution
//! counts, for every attainable rank sum, how many size-`n` subsets of the
//! pooled ranks produce it.

use statrs::function::erf::erfc;

use super::HarnessError;

/// Largest `C(n+m, n)` for which the automatic choice uses the exact method.
pub const EXACT_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// Rank sum of the first sample (midranks for ties).
    pub statistic: f64,
    /// Evidence that the first sample tends to be smaller.
    pub p_less: f64,
    /// Evidence that the first sample tends to be larger.
    pub p_greater: f64,
    pub p_two_sided: f64,
    pub method: Method,
}

/// Doubled midranks of the pooled sample, in input order (`xs` then `ys`).
fn doubled_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share rank ((i+1) + j) / 2.
        let doubled = (i + 1 + j) as u64;
        for &k in &order[i..j] {
            ranks[k] = doubled;
        }
        i = j;
    }
    ranks
}

fn choose(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        match acc.checked_mul(n - i) {
            Some(v) => acc = v / (i + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Counts of size-`n` subsets of `ranks` by (doubled) sum.
fn subset_sum_counts(ranks: &[u64], n: usize) -> Vec<u128> {
    let max_sum: u64 = ranks.iter().sum();
    let width = max_sum as usize + 1;
    let mut dp = vec![vec![0u128; width]; n + 1];
    dp[0][0] = 1;
    for (seen, &r) in ranks.iter().enumerate() {
        let r = r as usize;
        for c in (1..=n.min(seen + 1)).rev() {
            let (lower, upper) = dp.split_at_mut(c);
            let from = &lower[c - 1];
            let to = &mut upper[0];
            for s in (r..width).rev() {
                if from[s - r] != 0 {
                    to[s] += from[s - r];
                }
            }
        }
    }
    dp.swap_remove(n)
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn clamp_p(p: f64) -> f64 {
    p.clamp(f64::MIN_POSITIVE, 1.0)
}

pub fn wilcoxon_rank_sum(xs: &[f64], ys: &[f64]) -> Result<TestResult, HarnessError> {
    wilcoxon_rank_sum_with(xs, ys, MethodChoice::Auto)
}

pub fn wilcoxon_rank_sum_with(
    xs: &[f64],
    ys: &[f64],
    choice: MethodChoice,
) -> Result<TestResult, HarnessError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(HarnessError::NonFinite);
    }
    let (n, m) = (xs.len(), ys.len());
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let observed: u64 = ranks[..n].iter().sum();
    let statistic = observed as f64 / 2.0;

    let method = match choice {
        MethodChoice::Exact => Method::Exact,
        MethodChoice::NormalApprox => Method::NormalApprox,
        MethodChoice::Auto => {
            if choose((n + m) as u128, n as u128) <= EXACT_LIMIT {
                Method::Exact
            } else {
                Method::NormalApprox
            }
        }
    };

    let (p_less, p_greater) = match method {
        Method::Exact => {
            let counts = subset_sum_counts(&ranks, n);
            let total: u128 = counts.iter().sum();
            let at_most: u128 = counts[..=observed as usize].iter().sum();
            let at_least: u128 = counts[observed as usize..].iter().sum();
            (
                at_most as f64 / total as f64,
                at_least as f64 / total as f64,
            )
        }
        Method::NormalApprox => {
            let big_n = (n + m) as f64;
            let mean = n as f64 * (big_n + 1.0) / 2.0;
            let mut tie_term = 0.0;
            let mut sorted = ranks.clone();
            sorted.sort_unstable();
            for group in sorted.chunk_by(|a, b| a == b) {
                let t = group.len() as f64;
                tie_term += t * t * t - t;
            }
            let variance = (n * m) as f64 / 12.0
                * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)).max(1.0));
            if variance <= 0.0 {
                (1.0, 1.0)
            } else {
                let sd = variance.sqrt();
                (
                    normal_cdf((statistic - mean + 0.5) / sd),
                    1.0 - normal_cdf((statistic - mean - 0.5) / sd),
                )
            }
        }
    };
    let p_less = clamp_p(p_less);
    let p_greater = clamp_p(p_greater);
    Ok(TestResult {
        statistic,
        p_less,
        p_greater,
        p_two_sided: clamp_p(2.0 * p_less.min(p_greater)),
        method,
    })
}
