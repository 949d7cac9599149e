use std::collections::BTreeMap;

use serde::Serialize;

use super::classify::Category;
use super::StreamConfig;
use crate::error::{Error, Result};
use crate::sequence::Base;

/// Block counts split by positional category, one array per category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalCounts {
    pub by_category: [Vec<u64>; 4],
}

impl PositionalCounts {
    fn zeros(cells: usize) -> Self {
        PositionalCounts {
            by_category: std::array::from_fn(|_| vec![0; cells]),
        }
    }

    pub fn get(&self, cat: Category) -> &[u64] {
        &self.by_category[cat.index()]
    }

    pub fn total(&self, cat: Category) -> u64 {
        self.get(cat).iter().sum()
    }
}

/// Mergeable digit and block tallies over a contiguous range of terms.
///
/// `head` and `tail` hold the first and last `k_max - 1` digits of the range,
/// which is what a merge needs to rebuild the blocks crossing a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterBank {
    pub(crate) config: StreamConfig,
    pub(crate) first_term: u64,
    pub(crate) terms_consumed: u64,
    pub(crate) total_digits: u64,
    pub(crate) blocks: Vec<Vec<u64>>,
    pub(crate) positional: Option<Vec<PositionalCounts>>,
    pub(crate) head: Vec<u8>,
    pub(crate) tail: Vec<u8>,
}

impl CounterBank {
    /// An empty bank for a range starting at `first_term`.
    pub fn new(config: StreamConfig, first_term: u64) -> Self {
        let b = config.base.get() as usize;
        let blocks = (1..=config.k_max)
            .map(|k| vec![0; b.pow(k as u32)])
            .collect();
        let positional = config.positional.then(|| {
            (1..=config.k_max)
                .map(|k| PositionalCounts::zeros(b.pow(k as u32)))
                .collect()
        });
        CounterBank {
            config,
            first_term,
            terms_consumed: 0,
            total_digits: 0,
            blocks,
            positional,
            head: Vec::new(),
            tail: Vec::new(),
        }
    }

    pub fn config(&self) -> StreamConfig {
        self.config
    }

    pub fn base(&self) -> Base {
        self.config.base
    }

    pub fn k_max(&self) -> usize {
        self.config.k_max
    }

    pub fn first_term(&self) -> u64 {
        self.first_term
    }

    pub fn terms_consumed(&self) -> u64 {
        self.terms_consumed
    }

    /// Index of the last term counted, or `first_term - 1` when empty.
    pub fn last_term(&self) -> u64 {
        self.first_term + self.terms_consumed - 1
    }

    /// Total digits emitted, `D`.
    pub fn total_digits(&self) -> u64 {
        self.total_digits
    }

    /// Single-digit counts (the `k = 1` block counts).
    pub fn single(&self) -> &[u64] {
        &self.blocks[0]
    }

    /// Sliding `k`-block counts, indexed by the block's value read in base `b`.
    pub fn blocks(&self, k: usize) -> &[u64] {
        &self.blocks[k - 1]
    }

    /// Number of `k`-windows, `max(D - k + 1, 0)`.
    pub fn windows(&self, k: usize) -> u64 {
        (self.total_digits + 1).saturating_sub(k as u64)
    }

    pub fn positional(&self, k: usize) -> Option<&PositionalCounts> {
        self.positional.as_ref().map(|p| &p[k - 1])
    }

    pub fn head(&self) -> &[u8] {
        &self.head
    }

    pub fn tail(&self) -> &[u8] {
        &self.tail
    }

    pub fn is_empty(&self) -> bool {
        self.terms_consumed == 0 && self.total_digits == 0
    }

    /// Combines a bank over terms `[i..=m]` with one over `[m+1..=n]`.
    ///
    /// Counters are summed and the blocks crossing the junction, which are
    /// all `Boundary`, are rebuilt from `self.tail ++ next.head`.
    pub fn merge(&self, next: &CounterBank) -> Result<CounterBank> {
        if self.config != next.config {
            return Err(Error::IncompatibleBanks(format!(
                "configurations differ: {:?} vs {:?}",
                self.config, next.config
            )));
        }
        if next.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(next.clone());
        }
        if next.first_term != self.first_term + self.terms_consumed {
            return Err(Error::IncompatibleBanks(format!(
                "ranges are not contiguous: first ends at term {}, second starts at term {}",
                self.last_term(),
                next.first_term
            )));
        }
        let keep = self.config.k_max - 1;
        let mut out = self.clone();
        out.terms_consumed += next.terms_consumed;
        out.total_digits += next.total_digits;
        for (acc, add) in out.blocks.iter_mut().zip(&next.blocks) {
            for (a, b) in acc.iter_mut().zip(add) {
                *a += b;
            }
        }
        if let (Some(acc), Some(add)) = (out.positional.as_mut(), next.positional.as_ref()) {
            for (pa, pb) in acc.iter_mut().zip(add) {
                for (ca, cb) in pa.by_category.iter_mut().zip(&pb.by_category) {
                    for (a, b) in ca.iter_mut().zip(cb) {
                        *a += b;
                    }
                }
            }
        }

        // blocks starting in self and ending in next
        let stitch: Vec<u8> = self.tail.iter().chain(&next.head).copied().collect();
        let split = self.tail.len();
        let b = self.config.base.get() as usize;
        for k in 2..=self.config.k_max {
            for start in split.saturating_sub(k - 1)..split {
                if start + k > stitch.len() {
                    break;
                }
                let code = stitch[start..start + k]
                    .iter()
                    .fold(0usize, |acc, &d| acc * b + d as usize);
                out.blocks[k - 1][code] += 1;
                if let Some(p) = out.positional.as_mut() {
                    p[k - 1].by_category[Category::Boundary.index()][code] += 1;
                }
            }
        }

        out.head = self.head.iter().chain(&next.head).take(keep).copied().collect();
        let joined: Vec<u8> = self.tail.iter().chain(&next.tail).copied().collect();
        out.tail = joined[joined.len().saturating_sub(keep)..].to_vec();
        Ok(out)
    }

    /// Canonical JSON view: sorted keys, integer counts.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BankJson::from(self)).expect("bank serializes")
    }

    /// Canonical serialized form; equal banks give identical bytes.
    pub fn to_canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&BankJson::from(self)).expect("bank serializes")
    }
}

/// Label of a block: one symbol per digit (`0-9a-z`) up to base 36, else
/// three-digit decimal groups joined by `.`. Both sort like the block value.
pub fn block_label(code: usize, k: usize, base: Base) -> String {
    let b = base.get() as usize;
    let mut digits = vec![0usize; k];
    let mut c = code;
    for slot in digits.iter_mut().rev() {
        *slot = c % b;
        c /= b;
    }
    if b <= 36 {
        digits
            .iter()
            .map(|&d| char::from_digit(d as u32, 36).expect("digit < 36"))
            .collect()
    } else {
        digits
            .iter()
            .map(|d| format!("{d:03}"))
            .collect::<Vec<_>>()
            .join(".")
    }
}

pub(crate) fn labelled(counts: &[u64], k: usize, base: Base) -> BTreeMap<String, u64> {
    counts
        .iter()
        .enumerate()
        .map(|(code, &c)| (block_label(code, k, base), c))
        .collect()
}

#[derive(Serialize)]
struct BankJson {
    base: u32,
    blocks: BTreeMap<String, BTreeMap<String, u64>>,
    first_term: u64,
    head: String,
    k_max: usize,
    positional: Option<BTreeMap<String, BTreeMap<&'static str, BTreeMap<String, u64>>>>,
    tail: String,
    terms_consumed: u64,
    total_digits: u64,
}

fn digits_label(digits: &[u8], base: Base) -> String {
    if digits.is_empty() {
        return String::new();
    }
    let code_label: Vec<String> = digits
        .iter()
        .map(|&d| block_label(d as usize, 1, base))
        .collect();
    if base.get() <= 36 {
        code_label.concat()
    } else {
        code_label.join(".")
    }
}

impl From<&CounterBank> for BankJson {
    fn from(bank: &CounterBank) -> Self {
        let base = bank.config.base;
        let blocks = (1..=bank.config.k_max)
            .map(|k| (k.to_string(), labelled(bank.blocks(k), k, base)))
            .collect();
        let positional = bank.positional.as_ref().map(|all| {
            all.iter()
                .enumerate()
                .map(|(i, p)| {
                    let k = i + 1;
                    let cats = Category::ALL
                        .iter()
                        .map(|&c| (c.name(), labelled(p.get(c), k, base)))
                        .collect();
                    (k.to_string(), cats)
                })
                .collect()
        });
        BankJson {
            base: base.get(),
            blocks,
            first_term: bank.first_term,
            head: digits_label(&bank.head, base),
            k_max: bank.config.k_max,
            positional,
            tail: digits_label(&bank.tail, base),
            terms_consumed: bank.terms_consumed,
            total_digits: bank.total_digits,
        }
    }
}
