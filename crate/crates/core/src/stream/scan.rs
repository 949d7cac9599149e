//! The streaming loop: Fibonacci terms are kept as radix-`b^m` limbs, so
//! each step is one limb-wise addition and emitting a term's digits is a
//! linear read-off.

use super::bank::CounterBank;
use super::classify::{classify_ending, Category};
use super::{FibCursor, StreamConfig};
use crate::error::Result;
use crate::sequence::{fib_pair, Base, FibPair, LimbRadix, RadixConverter};

/// Maximum supported block length.
pub const MAX_K: usize = 8;

/// Single-owner streaming state for one contiguous range of terms.
pub struct Streamer {
    layout: LimbRadix,
    /// `F_n` and `F_{n+1}` as little-endian limbs, `n` = next term to emit.
    cur: Vec<u64>,
    next: Vec<u64>,
    n: u64,
    bank: CounterBank,
    /// `window[k]` is the value of the last `k` digits emitted.
    window: [usize; MAX_K + 1],
    digits: Vec<u8>,
}

impl Streamer {
    /// Starts a fresh range at term `first` (1-based).
    pub fn new(config: StreamConfig, first: u64) -> Result<Self> {
        let pair = fib_pair(first)?;
        Ok(Self::from_parts(config, &pair, CounterBank::new(config, first)))
    }

    /// Resumes from a checkpointed cursor and bank.
    pub fn resume(cursor: &FibCursor, bank: CounterBank) -> Self {
        Self::from_parts(bank.config, &cursor.pair, bank)
    }

    fn from_parts(config: StreamConfig, pair: &FibPair, bank: CounterBank) -> Self {
        let mut conv = RadixConverter::new(config.base);
        let cur = conv.to_limbs(&pair.f_n);
        let next = conv.to_limbs(&pair.f_n1);
        let b = config.base.get() as usize;
        let mut window = [0usize; MAX_K + 1];
        for &d in bank.tail.iter() {
            for k in (2..=config.k_max).rev() {
                window[k] = window[k - 1] * b + d as usize;
            }
            window[1] = d as usize;
        }
        Streamer {
            layout: conv.layout,
            cur,
            next,
            n: pair.n,
            bank,
            window,
            digits: Vec::new(),
        }
    }

    /// Index of the next term to be emitted.
    pub fn next_term(&self) -> u64 {
        self.n
    }

    pub fn bank(&self) -> &CounterBank {
        &self.bank
    }

    pub fn into_bank(self) -> CounterBank {
        self.bank
    }

    /// Exact resumable state at the current term boundary.
    pub fn cursor(&self) -> FibCursor {
        let mut conv = RadixConverter::new(self.bank.config.base);
        FibCursor {
            base: self.bank.config.base,
            n: self.n,
            pair: FibPair {
                n: self.n,
                f_n: conv.from_limbs(&self.cur),
                f_n1: conv.from_limbs(&self.next),
            },
            pos_in_term: 0,
            suffix_carry: self.bank.tail.clone(),
        }
    }

    /// Streams terms until `last` has been emitted.
    pub fn run_through(&mut self, last: u64) {
        while self.n <= last {
            self.step();
        }
    }

    /// Emits the current term and advances the pair.
    pub fn step(&mut self) {
        let mut digits = std::mem::take(&mut self.digits);
        digits.clear();
        render(&self.layout, &self.cur, &mut digits);
        self.consume(&digits);
        self.digits = digits;

        add_assign(&mut self.cur, &self.next, self.layout.radix);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.n += 1;
    }

    fn consume(&mut self, digits: &[u8]) {
        let cfg = self.bank.config;
        let b = cfg.base.get() as usize;
        let emitted = self.bank.total_digits;
        let len = digits.len();

        if self.bank.positional.is_some() {
            // ends at 0..k_max-1 and len-1 need classification; the rest are middle
            let bulk_start = cfg.k_max.min(len);
            let bulk_end = if len > bulk_start { len - 1 } else { bulk_start };
            for (i, &d) in digits[..bulk_start].iter().enumerate() {
                self.push_classified(d, i, len, emitted);
            }
            if bulk_end > bulk_start {
                self.bulk_positional(&digits[bulk_start..bulk_end]);
            }
            for (i, &d) in digits.iter().enumerate().skip(bulk_end.max(bulk_start)) {
                self.push_classified(d, i, len, emitted);
            }
        } else {
            // the first k_max - 1 digits of the range may complete only short windows
            let warm = (cfg.k_max as u64 - 1).saturating_sub(emitted).min(len as u64) as usize;
            for (i, &d) in digits[..warm].iter().enumerate() {
                let seen = emitted + i as u64 + 1;
                self.shift(d, b);
                for k in 1..=cfg.k_max {
                    if seen >= k as u64 {
                        self.bank.blocks[k - 1][self.window[k]] += 1;
                    }
                }
            }
            let rest = &digits[warm..];
            match cfg.k_max {
                1 => scan_plain::<1>(rest, b, &mut self.window, &mut self.bank.blocks),
                2 => scan_plain::<2>(rest, b, &mut self.window, &mut self.bank.blocks),
                3 => scan_plain::<3>(rest, b, &mut self.window, &mut self.bank.blocks),
                4 => scan_plain::<4>(rest, b, &mut self.window, &mut self.bank.blocks),
                5 => scan_plain::<5>(rest, b, &mut self.window, &mut self.bank.blocks),
                6 => scan_plain::<6>(rest, b, &mut self.window, &mut self.bank.blocks),
                7 => scan_plain::<7>(rest, b, &mut self.window, &mut self.bank.blocks),
                _ => scan_plain::<8>(rest, b, &mut self.window, &mut self.bank.blocks),
            }
        }

        let keep = cfg.k_max - 1;
        if self.bank.head.len() < keep {
            let need = keep - self.bank.head.len();
            self.bank.head.extend(digits.iter().take(need));
        }
        if keep > 0 {
            let tail = &mut self.bank.tail;
            tail.extend_from_slice(&digits[len.saturating_sub(keep)..]);
            if tail.len() > keep {
                tail.drain(..tail.len() - keep);
            }
        }
        self.bank.total_digits += len as u64;
        self.bank.terms_consumed += 1;
    }

    #[inline]
    fn shift(&mut self, d: u8, b: usize) {
        for k in (2..=self.bank.config.k_max).rev() {
            self.window[k] = self.window[k - 1] * b + d as usize;
        }
        self.window[1] = d as usize;
    }

    fn push_classified(&mut self, d: u8, end: usize, len: usize, emitted: u64) {
        let cfg = self.bank.config;
        self.shift(d, cfg.base.get() as usize);
        let positional = self.bank.positional.as_mut().expect("positional mode");
        for k in 1..=cfg.k_max {
            if let Some(cat) = classify_ending(end, len, k, emitted) {
                let code = self.window[k];
                self.bank.blocks[k - 1][code] += 1;
                positional[k - 1].by_category[cat.index()][code] += 1;
            }
        }
    }

    fn bulk_positional(&mut self, digits: &[u8]) {
        let cfg = self.bank.config;
        let b = cfg.base.get() as usize;
        let positional = self.bank.positional.as_mut().expect("positional mode");
        let middle = Category::Middle.index();
        for &d in digits {
            for k in (2..=cfg.k_max).rev() {
                self.window[k] = self.window[k - 1] * b + d as usize;
            }
            self.window[1] = d as usize;
            for k in 1..=cfg.k_max {
                let code = self.window[k];
                self.bank.blocks[k - 1][code] += 1;
                positional[k - 1].by_category[middle][code] += 1;
            }
        }
    }
}

#[inline]
fn scan_plain<const K: usize>(
    digits: &[u8],
    b: usize,
    window: &mut [usize; MAX_K + 1],
    blocks: &mut [Vec<u64>],
) {
    let mut w = [0usize; MAX_K + 1];
    w[..=K].copy_from_slice(&window[..=K]);
    let blocks = &mut blocks[..K];
    if K == 1 && digits.len() >= 1024 {
        // four interleaved tallies break store-to-load chains on digit runs
        let cells = blocks[0].len();
        let mut lanes = vec![0u64; 4 * cells];
        let mut chunks = digits.chunks_exact(4);
        for c in &mut chunks {
            lanes[c[0] as usize] += 1;
            lanes[cells + c[1] as usize] += 1;
            lanes[2 * cells + c[2] as usize] += 1;
            lanes[3 * cells + c[3] as usize] += 1;
        }
        for &d in chunks.remainder() {
            lanes[d as usize] += 1;
        }
        for lane in lanes.chunks_exact(cells) {
            for (c, &x) in blocks[0].iter_mut().zip(lane) {
                *c += x;
            }
        }
        if let Some(&d) = digits.last() {
            w[1] = d as usize;
        }
    } else {
        for &d in digits {
            for k in (2..=K).rev() {
                w[k] = w[k - 1] * b + d as usize;
            }
            w[1] = d as usize;
            for k in 1..=K {
                blocks[k - 1][w[k]] += 1;
            }
        }
    }
    window[..=K].copy_from_slice(&w[..=K]);
}

/// Walks consecutive Fibonacci terms in base `b`, exposing each term's digits
/// without touching the counters. Used by per-term diagnostics.
pub struct TermDigits {
    layout: LimbRadix,
    cur: Vec<u64>,
    next: Vec<u64>,
    n: u64,
    digits: Vec<u8>,
    rendered: bool,
}

impl TermDigits {
    /// Positioned at term `first` (1-based).
    pub fn new(base: Base, first: u64) -> Result<Self> {
        let pair = fib_pair(first)?;
        let mut conv = RadixConverter::new(base);
        Ok(TermDigits {
            cur: conv.to_limbs(&pair.f_n),
            next: conv.to_limbs(&pair.f_n1),
            layout: conv.layout,
            n: first,
            digits: Vec::new(),
            rendered: false,
        })
    }

    /// Index of the current term.
    pub fn index(&self) -> u64 {
        self.n
    }

    /// Digits of the current term, most significant first.
    pub fn digits(&mut self) -> &[u8] {
        if !self.rendered {
            self.digits.clear();
            render(&self.layout, &self.cur, &mut self.digits);
            self.rendered = true;
        }
        &self.digits
    }

    /// Leading digit of the current term, without rendering the rest.
    pub fn leading_digit(&self) -> u8 {
        let mut top = *self.cur.last().unwrap_or(&0);
        let b = self.layout.base.get() as u64;
        while top >= b {
            top /= b;
        }
        top as u8
    }

    pub fn advance(&mut self) {
        add_assign(&mut self.cur, &self.next, self.layout.radix);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.n += 1;
        self.rendered = false;
    }
}

/// Most-significant-first digits of `limbs` appended to `out`.
fn render(layout: &LimbRadix, limbs: &[u64], out: &mut Vec<u8>) {
    match limbs.split_last() {
        None => out.push(0),
        Some((top, rest)) => {
            layout.push_limb_digits(*top, false, out);
            for &limb in rest.iter().rev() {
                layout.push_limb_digits(limb, true, out);
            }
        }
    }
}

/// `acc += add` in radix `radix`; limbs below `2^63` cannot overflow a sum.
fn add_assign(acc: &mut Vec<u64>, add: &[u64], radix: u64) {
    if acc.len() < add.len() {
        acc.resize(add.len(), 0);
    }
    let mut carry = 0u64;
    for (i, a) in acc.iter_mut().enumerate() {
        let s = *a + add.get(i).copied().unwrap_or(0) + carry;
        if s >= radix {
            *a = s - radix;
            carry = 1;
        } else {
            *a = s;
            carry = 0;
            if i >= add.len() {
                break;
            }
        }
    }
    if carry == 1 {
        acc.push(1);
    }
}
