//! Paired Wilcoxon signed-rank test and Bonferroni correction.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Largest non-zero sample size that gets the exact null distribution.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("x and y differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("every paired difference is zero")]
    AllZeroDifferences,
    #[error("empty sample")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    #[default]
    TwoSided,
    /// x tends to be smaller than y.
    Less,
    /// x tends to be larger than y.
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// min(W+, W-).
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub method: Method,
}

/// Average ranks (1-based) of `values`, plus the sizes of tied groups.
fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

/// Null distribution of 2·W+ when each rank's sign is a fair coin.
/// Works on doubled ranks so tied (half-integer) ranks stay integral.
fn doubled_rank_distribution(doubled: &[usize]) -> Vec<f64> {
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in doubled {
        reach += r;
        for s in (r..=reach).rev() {
            counts[s] += counts[s - r];
        }
    }
    let denom = 2f64.powi(doubled.len() as i32);
    counts.iter().map(|c| c / denom).collect()
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alternative: Alternative) -> Result<WilcoxonResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(StatsError::Empty);
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|v| *v != 0.0).collect();
    if d.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    let n = d.len();
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).fold(0.0, |acc, (_, r)| acc + r);
    let w_minus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v < 0.0).fold(0.0, |acc, (_, r)| acc + r);
    let statistic = w_plus.min(w_minus);

    let (p_value, method) = if n <= EXACT_MAX_N {
        let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
        let dist = doubled_rank_distribution(&doubled);
        let obs = (w_plus * 2.0).round() as usize;
        let le: f64 = dist[..=obs].iter().sum();
        let ge: f64 = dist[obs..].iter().sum();
        let p = match alternative {
            Alternative::Less => le,
            Alternative::Greater => ge,
            Alternative::TwoSided => (2.0 * le.min(ge)).min(1.0),
        };
        (p, Method::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 2.0;
        let sd = ((nf * (nf + 1.0) * (2.0 * nf + 1.0) - tie_term) / 24.0).sqrt();
        let diff = w_plus - mean;
        let correction = match alternative {
            Alternative::Greater => 0.5,
            Alternative::Less => -0.5,
            Alternative::TwoSided => 0.5 * diff.signum(),
        };
        let z = (diff - correction) / sd;
        let std = Normal::new(0.0, 1.0).expect("unit normal");
        let p = match alternative {
            Alternative::Greater => std.sf(z),
            Alternative::Less => std.cdf(z),
            Alternative::TwoSided => (2.0 * std.sf(z.abs())).min(1.0),
        };
        (p, Method::Normal)
    };
    Ok(WilcoxonResult { statistic, w_plus, w_minus, p_value, n, method })
}

/// Per-comparison significance level for `m` comparisons.
pub fn bonferroni(alpha: f64, m: usize) -> f64 {
    assert!(m >= 1, "at least one comparison");
    alpha / m as f64
}

/// One line of the stats output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub comparison: String,
    pub property: String,
    pub n: usize,
    pub statistic: f64,
    pub p: f64,
    pub alpha_adjusted: f64,
    pub significant: bool,
}

impl ComparisonRecord {
    pub fn new(comparison: &str, property: &str, result: &WilcoxonResult, alpha: f64, m: usize) -> Self {
        let alpha_adjusted = bonferroni(alpha, m);
        ComparisonRecord {
            comparison: comparison.to_string(),
            property: property.to_string(),
            n: result.n,
            statistic: result.statistic,
            p: result.p_value,
            alpha_adjusted,
            significant: result.p_value < alpha_adjusted,
        }
    }
}
