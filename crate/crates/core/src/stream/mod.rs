//! Streaming analysis of the concatenation `F_1 F_2 F_3 ...` in base `b`.
//!
//! The expansion is never materialized. A [`Streamer`] emits one term at a
//! time into a [`CounterBank`]; ranges of terms can be streamed
//! independently and joined with [`CounterBank::merge`], and a run can be
//! checkpointed at any term boundary.

mod bank;
mod checkpoint;
mod classify;
mod scan;

use std::path::PathBuf;

pub use bank::{block_label, CounterBank, PositionalCounts};
pub use checkpoint::{checkpoint_load, checkpoint_save, CHECKPOINT_VERSION};
pub use classify::{classify_block, BlockPosition, BlockStart, Category};
pub use scan::{Streamer, TermDigits, MAX_K};

use crate::error::{Error, Result};
use crate::sequence::{Base, FibPair};

/// Largest `b^k_max` accepted for a counter array.
pub const MAX_CELLS: u64 = 100_000_000;
/// Bound on all counter cells of a bank, positional arrays included (8 bytes each).
pub const MAX_TOTAL_CELLS: u64 = 125_000_000;
/// Counters are `u64`; `D` must stay below this.
pub const MAX_DIGITS: u64 = 9_000_000_000_000_000_000;

/// Immutable parameters shared by every bank of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamConfig {
    pub base: Base,
    pub k_max: usize,
    pub positional: bool,
}

impl StreamConfig {
    pub fn new(base: u32, k_max: usize, positional: bool) -> Result<Self> {
        let base = Base::new(base)?;
        if !(1..=MAX_K).contains(&k_max) {
            return Err(Error::InvalidInput(format!(
                "k_max = {k_max}; supported range is 1..={MAX_K}"
            )));
        }
        let b = base.get() as u64;
        let top = b.checked_pow(k_max as u32).unwrap_or(u64::MAX);
        if top > MAX_CELLS {
            return Err(Error::Capacity(format!(
                "{b}^{k_max} = {top} counters exceeds the bound {MAX_CELLS}"
            )));
        }
        let per_array: u64 = (1..=k_max as u32).map(|k| b.pow(k)).sum();
        let arrays = if positional { 5 } else { 1 };
        if per_array * arrays > MAX_TOTAL_CELLS {
            return Err(Error::Capacity(format!(
                "{} counter cells exceeds the bound {MAX_TOTAL_CELLS}",
                per_array * arrays
            )));
        }
        Ok(StreamConfig {
            base,
            k_max,
            positional,
        })
    }

    /// Upper bound on `D(N)`: sum of `n log_b(phi) + 1` over `n <= N`.
    pub fn digits_upper_bound(&self, terms: u64) -> f64 {
        let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln() / (self.base.get() as f64).ln();
        let n = terms as f64;
        n * (n + 1.0) / 2.0 * log_phi + n
    }

    /// Rejects runs whose digit count could overflow the counters.
    pub fn check_terms(&self, terms: u64) -> Result<()> {
        if terms == 0 {
            return Err(Error::InvalidInput("term count must be at least 1".into()));
        }
        if self.digits_upper_bound(terms) >= MAX_DIGITS as f64 {
            return Err(Error::Capacity(format!(
                "{terms} terms may emit more than {MAX_DIGITS} digits"
            )));
        }
        Ok(())
    }
}

/// Exact streaming state at a term boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibCursor {
    pub base: Base,
    /// Next term to emit.
    pub n: u64,
    /// `(F_n, F_{n+1})`.
    pub pair: FibPair,
    /// Offset inside `F_n`; checkpoints are taken at term boundaries, so 0.
    pub pos_in_term: u64,
    /// Last `min(k_max - 1, D)` digits emitted.
    pub suffix_carry: Vec<u8>,
}

/// When and where to checkpoint a sequential run.
#[derive(Debug, Clone, Default)]
pub struct CheckpointPolicy {
    pub path: Option<PathBuf>,
    /// Save after every this many terms; 0 saves only at the end.
    pub every_terms: u64,
    /// Continue from `path` when it exists.
    pub resume: bool,
}

impl CheckpointPolicy {
    pub fn none() -> Self {
        Self::default()
    }
}

/// Streams terms `1..=terms` and returns their counters.
pub fn stream_analyze(config: StreamConfig, terms: u64, policy: &CheckpointPolicy) -> Result<CounterBank> {
    stream_with_progress(config, terms, policy, |_| {})
}

/// As [`stream_analyze`], calling `progress` with the bank after each chunk.
pub fn stream_with_progress(
    config: StreamConfig,
    terms: u64,
    policy: &CheckpointPolicy,
    mut progress: impl FnMut(&CounterBank),
) -> Result<CounterBank> {
    config.check_terms(terms)?;
    let mut streamer = match (&policy.path, policy.resume) {
        (Some(path), true) if path.exists() => {
            let (cursor, bank) = checkpoint_load(path)?;
            if bank.config() != config || bank.first_term() != 1 {
                return Err(Error::IncompatibleBanks(format!(
                    "checkpoint {} was written for a different run",
                    path.display()
                )));
            }
            Streamer::resume(&cursor, bank)
        }
        _ => Streamer::new(config, 1)?,
    };
    if streamer.next_term() > terms + 1 {
        return Err(Error::InvalidInput(format!(
            "checkpoint is already past term {terms}"
        )));
    }
    let chunk = match policy.every_terms {
        0 => 1000.max(terms / 100),
        n => n,
    };
    while streamer.next_term() <= terms {
        let stop = (streamer.next_term() + chunk - 1).min(terms);
        streamer.run_through(stop);
        if let (Some(path), true) = (&policy.path, policy.every_terms > 0) {
            checkpoint_save(&streamer.cursor(), streamer.bank(), path)?;
        }
        progress(streamer.bank());
    }
    if let Some(path) = &policy.path {
        checkpoint_save(&streamer.cursor(), streamer.bank(), path)?;
    }
    Ok(streamer.into_bank())
}

/// Streams the terms `first..=last` as an independent partition.
pub fn stream_range(config: StreamConfig, first: u64, last: u64) -> Result<CounterBank> {
    if first == 0 {
        return Err(Error::InvalidInput("terms are numbered from 1".into()));
    }
    let mut streamer = Streamer::new(config, first)?;
    streamer.run_through(last);
    Ok(streamer.into_bank())
}

/// Splits `1..=terms` into `parts` contiguous ranges of roughly equal digit
/// count. Returns the first term of each range.
pub fn partition_starts(terms: u64, parts: usize) -> Vec<u64> {
    let parts = (parts.max(1) as u64).min(terms.max(1));
    // digits grow linearly in n, so cumulative digits grow like n^2
    let mut starts: Vec<u64> = (0..parts)
        .map(|j| 1 + ((terms as f64) * (j as f64 / parts as f64).sqrt()).round() as u64)
        .collect();
    starts.dedup();
    starts.retain(|&s| s <= terms);
    starts
}

/// Streams `1..=terms` in `parts` concurrent partitions and merges them.
/// The result equals the sequential run exactly.
pub fn stream_partitioned(config: StreamConfig, terms: u64, parts: usize) -> Result<CounterBank> {
    config.check_terms(terms)?;
    let starts = partition_starts(terms, parts);
    let ranges: Vec<(u64, u64)> = starts
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, starts.get(i + 1).map_or(terms, |&e| e - 1)))
        .collect();
    let banks: Vec<Result<CounterBank>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(s, e)| scope.spawn(move || stream_range(config, s, e)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("partition thread panicked"))
            .collect()
    });
    let mut iter = banks.into_iter();
    let mut acc = iter.next().expect("at least one partition")?;
    for bank in iter {
        acc = acc.merge(&bank?)?;
    }
    Ok(acc)
}
