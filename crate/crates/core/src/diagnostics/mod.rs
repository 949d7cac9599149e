//! Per-term (ε,k)-normality deltas and censuses, plus the structural
//! baselines the concatenation is compared against: Benford leading digits,
//! Pisano-periodic trailing digits, and the iid maximum-deviation scale.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::pisano::{pisano_period, residues};
use crate::sequence::{Base, DigitString};
use crate::stream::{partition_starts, TermDigits};

/// Thresholds of the single-digit census tables.
pub const DEFAULT_EPSILONS: [f64; 5] = [0.05, 0.02, 0.01, 0.005, 0.002];
/// Terms shorter than this are left out of censuses by default.
pub const CENSUS_MIN_LENGTH: u64 = 10;
/// Terms shorter than this are left out of the baseline-ratio statistic.
pub const RATIO_MIN_LENGTH: u64 = 200;
/// Trials behind the Monte Carlo baseline constant.
pub const MONTE_CARLO_TRIALS: u64 = 1_000_000;
const MONTE_CARLO_SEED: u64 = 0x5EED_F1B0;

/// Largest deviation of any `k`-block frequency in one term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermDelta {
    /// Term index; 0 for a string not tied to a term.
    pub n: u64,
    pub digit_length: u64,
    pub k: usize,
    pub delta: f64,
}

/// `max_w |N(w) / len - b^-k|` over all `b^k` blocks, where `N(w)` counts
/// sliding windows and `len` is the digit count.
pub fn block_delta(digits: &[u8], base: Base, k: usize) -> Result<f64> {
    if k == 0 || digits.len() < k {
        return Err(Error::InsufficientLength {
            len: digits.len(),
            k,
        });
    }
    let b = base.get() as u64;
    let len = digits.len() as f64;
    let windows = (digits.len() - k + 1) as u64;
    let cells = b.checked_pow(k as u32);
    let expected = (b as f64).powi(-(k as i32));

    let (min, max) = if k == 1 {
        let mut tally = vec![0u64; b as usize];
        for &d in digits {
            tally[d as usize] += 1;
        }
        extremes(tally.into_iter())
    } else if let Some(modulus) = cells {
        let mut tally: HashMap<u64, u64> = HashMap::new();
        let mut code = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            code = (code % (modulus / b)) * b + d as u64;
            if i + 1 >= k {
                *tally.entry(code).or_default() += 1;
            }
        }
        let (lo, hi) = extremes(tally.values().copied());
        (if (tally.len() as u64) < modulus { 0 } else { lo }, hi)
    } else {
        // b^k exceeds u64, so some block is always missing
        let mut tally: HashMap<&[u8], u64> = HashMap::new();
        for w in digits.windows(k) {
            *tally.entry(w).or_default() += 1;
        }
        (0, extremes(tally.values().copied()).1)
    };
    debug_assert!(max <= windows);
    let over = max as f64 / len - expected;
    let under = expected - min as f64 / len;
    Ok(over.abs().max(under.abs()))
}

fn extremes(counts: impl Iterator<Item = u64>) -> (u64, u64) {
    counts.fold((u64::MAX, 0), |(lo, hi), c| (lo.min(c), hi.max(c)))
}

/// Delta of a standalone digit string (`n` is reported as 0).
pub fn term_delta(digits: &DigitString, k: usize) -> Result<TermDelta> {
    Ok(TermDelta {
        n: 0,
        digit_length: digits.len() as u64,
        k,
        delta: block_delta(digits.digits(), digits.base(), k)?,
    })
}

/// Deltas of `F_first ..= F_last`, one pass over consecutive terms. Terms
/// shorter than `k` are skipped.
pub fn per_term_deltas(base: u32, first: u64, last: u64, k: usize) -> Result<Vec<TermDelta>> {
    let base = Base::new(base)?;
    if k == 0 {
        return Err(Error::InvalidInput("block length must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(last.saturating_sub(first) as usize + 1);
    let mut terms = TermDigits::new(base, first.max(1))?;
    while terms.index() <= last {
        let n = terms.index();
        let digits = terms.digits();
        if digits.len() >= k {
            out.push(TermDelta {
                n,
                digit_length: digits.len() as u64,
                k,
                delta: block_delta(digits, base, k)?,
            });
        }
        terms.advance();
    }
    Ok(out)
}

/// [`per_term_deltas`] over `1..=terms`, split across `parts` threads.
pub fn per_term_deltas_parallel(base: u32, terms: u64, k: usize, parts: usize) -> Result<Vec<TermDelta>> {
    let starts = partition_starts(terms, parts);
    let chunks: Vec<Result<Vec<TermDelta>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let e = starts.get(i + 1).map_or(terms, |&e| e - 1);
                scope.spawn(move || per_term_deltas(base, s, e, k))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("per-term thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(terms as usize);
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}

/// One census threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusRow {
    pub epsilon: f64,
    /// Qualifying terms with `delta > epsilon`.
    pub count: u64,
    /// `count` over the number of qualifying terms (0 when there are none).
    pub fraction: f64,
}

/// Counts terms of at least `min_length` digits whose delta exceeds each ε.
pub fn census(deltas: &[TermDelta], epsilons: &[f64], min_length: u64) -> Result<Vec<CensusRow>> {
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {e}")));
    }
    let qualifying: Vec<f64> = deltas
        .iter()
        .filter(|d| d.digit_length >= min_length)
        .map(|d| d.delta)
        .collect();
    Ok(epsilons
        .iter()
        .map(|&epsilon| {
            let count = qualifying.iter().filter(|&&d| d > epsilon).count() as u64;
            let fraction = if qualifying.is_empty() {
                0.0
            } else {
                count as f64 / qualifying.len() as f64
            };
            CensusRow {
                epsilon,
                count,
                fraction,
            }
        })
        .collect())
}

/// Expected `max_d |C_d / K - 1/b|` for `K` iid uniform digits.
///
/// Base 10 uses `1.86 sqrt(0.09 / K)` and base 2 the exact folded-normal
/// mean `sqrt(2/pi) / (2 sqrt K)`. Other bases use the Gaussian limit
/// `sqrt(p / K) E[max_d |G_d - mean(G)|]` with the expectation estimated by
/// seeded Monte Carlo.
pub fn iid_max_dev_baseline(k_digits: u64, base: u32) -> Result<f64> {
    let base = Base::new(base)?;
    if k_digits == 0 {
        return Err(Error::InvalidInput("digit count must be at least 1".into()));
    }
    let root_k = (k_digits as f64).sqrt();
    Ok(match base.get() {
        10 => 1.86 * 0.3 / root_k,
        2 => (2.0 / std::f64::consts::PI).sqrt() / (2.0 * root_k),
        b => monte_carlo_constant(b) / root_k,
    })
}

fn monte_carlo_constant(base: u32) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&c) = cache.lock().unwrap().get(&base) {
        return c;
    }
    let c = gaussian_max_constant(base, MONTE_CARLO_TRIALS, MONTE_CARLO_SEED);
    cache.lock().unwrap().insert(base, c);
    c
}

/// `sqrt(1/b) E[max_d |G_d - mean(G)|]` for `b` iid standard normals.
pub(crate) fn gaussian_max_constant(base: u32, trials: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = vec![0f64; base as usize];
    let mut acc = 0.0;
    for _ in 0..trials {
        for x in g.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
        }
        let mean = g.iter().sum::<f64>() / base as f64;
        acc += g.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    }
    (acc / trials as f64) / (base as f64).sqrt()
}

/// Mean and spread of `delta_n / baseline(|F_n|)` over long terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSummary {
    pub count: u64,
    pub mean: f64,
    pub std_dev: f64,
}

/// Compares single-digit deltas with the iid baseline at each term's length.
pub fn baseline_ratios(deltas: &[TermDelta], base: u32, min_length: u64) -> Result<RatioSummary> {
    let mut ratios = Vec::new();
    for d in deltas.iter().filter(|d| d.k == 1 && d.digit_length >= min_length) {
        ratios.push(d.delta / iid_max_dev_baseline(d.digit_length, base)?);
    }
    if ratios.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no single-digit deltas with at least {min_length} digits"
        )));
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    Ok(RatioSummary {
        count: ratios.len() as u64,
        mean,
        std_dev: var.sqrt(),
    })
}

/// Benford probability `log_b(1 + 1/d)` of leading digit `d`.
pub fn benford_freq(d: u32, base: u32) -> Result<f64> {
    let b = Base::new(base)?.get();
    if d == 0 || d >= b {
        return Err(Error::domain(
            "leading digit",
            format!("{d} is not a valid leading digit in base {b}"),
        ));
    }
    Ok((1.0 + 1.0 / d as f64).ln() / (b as f64).ln())
}

/// Last digits of `F_1 ..= F_pi(b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrailingDistribution {
    pub base: Base,
    pub period: u64,
    /// `counts[d]` = terms in one period ending in digit `d`.
    pub counts: Vec<u64>,
}

impl TrailingDistribution {
    pub fn frequency(&self, d: usize) -> f64 {
        self.counts[d] as f64 / self.period as f64
    }

    /// Reduced `(numerator, denominator)` of the frequency of `d`.
    pub fn fraction(&self, d: usize) -> (u64, u64) {
        let g = self.counts[d].gcd(&self.period);
        (self.counts[d] / g, self.period / g)
    }
}

pub fn trailing_digit_distribution(base: u32) -> Result<TrailingDistribution> {
    let base = Base::new(base)?;
    let m = base.get() as u64;
    let period = pisano_period(m)?;
    let mut counts = vec![0u64; m as usize];
    for r in residues(m, period) {
        counts[r as usize] += 1;
    }
    Ok(TrailingDistribution {
        base,
        period,
        counts,
    })
}

/// Leading-digit frequencies of `F_1 ..= F_N`, indexed by digit.
pub fn leading_digit_empirical(terms: u64, base: u32) -> Result<Vec<f64>> {
    let base = Base::new(base)?;
    if terms == 0 {
        return Err(Error::InvalidInput("term count must be at least 1".into()));
    }
    let mut counts = vec![0u64; base.get() as usize];
    let mut walk = TermDigits::new(base, 1)?;
    while walk.index() <= terms {
        counts[walk.leading_digit() as usize] += 1;
        walk.advance();
    }
    Ok(counts.into_iter().map(|c| c as f64 / terms as f64).collect())
}

#[cfg(test)]
mod tests;
