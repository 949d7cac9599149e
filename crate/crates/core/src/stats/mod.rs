//! Uniformity tests on digit and block counts: Pearson chi-squared, Good's
//! serial statistic for sliding windows, z-scores, Bonferroni critical
//! values, and log-log convergence fits.

pub mod special;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::Base;
use crate::stream::{block_label, Category, CounterBank};

pub use special::{gamma_p, gamma_q, normal_isf, normal_sf};

/// Pearson statistic against the uniform expectation `total / cells`.
pub fn chi_squared(counts: &[u64], total: u64) -> Result<(f64, u64)> {
    if counts.is_empty() {
        return Err(Error::InvalidInput("no cells".into()));
    }
    if total == 0 {
        return Err(Error::InvalidInput("total count is zero".into()));
    }
    let expected = total as f64 / counts.len() as f64;
    let stat = counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff
        })
        .sum::<f64>()
        / expected;
    Ok((stat, counts.len() as u64 - 1))
}

/// Upper tail `P(chi2_df >= x)`.
pub fn chi_squared_pvalue(x: f64, df: u64) -> f64 {
    assert!(df >= 1, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, x / 2.0)
}

/// Lower tail `P(chi2_df < x)`.
pub fn chi_squared_cdf(x: f64, df: u64) -> f64 {
    assert!(df >= 1, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    gamma_p(df as f64 / 2.0, x / 2.0)
}

/// Good's serial statistic `chi2(k) - chi2(k-1)` with `b^k - b^(k-1)` df.
pub fn good_serial(chi2_k: f64, chi2_km1: f64, base: u32, k: u32) -> Result<(f64, u64)> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "serial statistic needs block length >= 2, got {k}"
        )));
    }
    let b = base as u64;
    Ok((chi2_k - chi2_km1, b.pow(k) - b.pow(k - 1)))
}

/// Standardized deviations `(C - total/b) / sqrt(total (1/b)(1 - 1/b))`.
pub fn z_scores(counts: &[u64], total: u64, base: u32) -> Vec<f64> {
    let p = 1.0 / base as f64;
    let n = total as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    counts.iter().map(|&c| (c as f64 - n * p) / sd).collect()
}

/// Two-sided critical |z| after a Bonferroni correction over `m_tests`.
pub fn bonferroni_z(m_tests: u64, alpha: f64) -> Result<f64> {
    if m_tests == 0 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!(
            "need m >= 1 and 0 < alpha < 1, got m = {m_tests}, alpha = {alpha}"
        )));
    }
    Ok(normal_isf(alpha / (2.0 * m_tests as f64)))
}

/// `dev ~ coefficient * D^exponent` fitted on logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ln dev` on `ln D`.
pub fn loglog_regression(points: &[(f64, f64)]) -> Result<RegressionFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(bad) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "non-positive point ({}, {})",
            bad.0, bad.1
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all D values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(RegressionFit {
        coefficient: intercept.exp(),
        exponent: slope,
        r_squared: r_squared.clamp(0.0, 1.0),
    })
}

/// Largest `|count / total - 1/cells|`, ties to the smallest cell index.
pub fn max_abs_deviation(counts: &[u64], total: u64) -> (f64, usize) {
    let expect = 1.0 / counts.len() as f64;
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, &c) in counts.iter().enumerate() {
        let dev = (c as f64 / total as f64 - expect).abs();
        if dev > best.0 {
            best = (dev, i);
        }
    }
    best
}

/// Test results for one block length over one set of counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub base: Base,
    pub k: usize,
    /// Digits in the stream the counts came from.
    pub digits: u64,
    /// Number of blocks tallied.
    pub total: u64,
    pub naive_chi2: f64,
    pub naive_df: u64,
    pub p_naive: f64,
    pub good_delta_chi2: Option<f64>,
    pub good_df: Option<u64>,
    pub p_good: Option<f64>,
    pub max_abs_deviation: f64,
    pub argmax_block: String,
}

impl StatReport {
    /// Builds a report from `k`-block counts and, for `k >= 2`, the
    /// `(k-1)`-block counts of the same stream.
    pub fn from_counts(
        base: Base,
        k: usize,
        digits: u64,
        counts: &[u64],
        lower: Option<&[u64]>,
    ) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        let (naive_chi2, naive_df) = chi_squared(counts, total)?;
        let p_naive = chi_squared_pvalue(naive_chi2, naive_df);
        let (good_delta_chi2, good_df, p_good) = match (k, lower) {
            (1, _) | (_, None) => (None, None, None),
            (_, Some(lower)) => {
                let lower_total: u64 = lower.iter().sum();
                let (chi2_lower, _) = chi_squared(lower, lower_total)?;
                let (delta, df) = good_serial(naive_chi2, chi2_lower, base.get(), k as u32)?;
                (Some(delta), Some(df), Some(chi_squared_pvalue(delta.max(0.0), df)))
            }
        };
        let (max_abs_deviation, arg) = max_abs_deviation(counts, total);
        Ok(StatReport {
            base,
            k,
            digits,
            total,
            naive_chi2,
            naive_df,
            p_naive,
            good_delta_chi2,
            good_df,
            p_good,
            max_abs_deviation,
            argmax_block: block_label(arg, k, base),
        })
    }

    /// Reports for every `k <= k_max` of a bank.
    pub fn for_bank(bank: &CounterBank) -> Result<Vec<StatReport>> {
        (1..=bank.k_max())
            .map(|k| {
                let lower = (k > 1).then(|| bank.blocks(k - 1));
                StatReport::from_counts(bank.base(), k, bank.total_digits(), bank.blocks(k), lower)
            })
            .collect()
    }
}

/// Uniformity tests restricted to one positional category.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryReport {
    pub k: usize,
    pub category: Category,
    pub total: u64,
    pub naive_chi2: Option<f64>,
    pub naive_df: u64,
    pub p_naive: Option<f64>,
    pub good_delta_chi2: Option<f64>,
    pub good_df: Option<u64>,
    pub p_good: Option<f64>,
}

/// Per-category reports for every `k <= k_max` of a positional bank; empty
/// when the bank was streamed without positional counters. Statistics are
/// `None` for categories with no blocks.
pub fn category_reports(bank: &CounterBank) -> Vec<CategoryReport> {
    let b = bank.base().get() as u64;
    let mut out = Vec::new();
    for k in 1..=bank.k_max() {
        let Some(pos) = bank.positional(k) else {
            return out;
        };
        for cat in Category::ALL {
            let counts = pos.get(cat);
            let total = pos.total(cat);
            let naive = chi_squared(counts, total).ok().map(|(x, _)| x);
            let lower = if k > 1 {
                bank.positional(k - 1).and_then(|p| {
                    chi_squared(p.get(cat), p.total(cat)).ok().map(|(x, _)| x)
                })
            } else {
                None
            };
            let good = match (naive, lower) {
                (Some(x), Some(y)) => Some(x - y),
                _ => None,
            };
            let naive_df = b.pow(k as u32) - 1;
            let good_df = (k > 1).then(|| b.pow(k as u32) - b.pow(k as u32 - 1));
            out.push(CategoryReport {
                k,
                category: cat,
                total,
                naive_chi2: naive,
                naive_df,
                p_naive: naive.map(|x| chi_squared_pvalue(x, naive_df)),
                good_delta_chi2: good,
                good_df,
                p_good: good.zip(good_df).map(|(x, df)| chi_squared_pvalue(x.max(0.0), df)),
            });
        }
    }
    out
}
