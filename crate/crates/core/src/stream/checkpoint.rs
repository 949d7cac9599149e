//! Versioned binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "FIBNCKPT" | version u32
//! base u32 | k_max u32 | positional u8
//! first_term u64 | terms_consumed u64 | total_digits u64
//! cursor.n u64 | cursor.pos_in_term u64
//! F_n:     len u64 | magnitude bytes
//! F_{n+1}: len u64 | magnitude bytes
//! suffix_carry, head, tail: len u32 | digit bytes
//! blocks[k] for k = 1..=k_max: b^k x u64
//! positional (if set): for each k, for each category: b^k x u64
//! crc32 of everything above: u32
//! ```

use std::fs;
use std::path::Path;

use num_bigint::BigUint;

use super::bank::{CounterBank, PositionalCounts};
use super::{FibCursor, StreamConfig};
use crate::error::{Error, Result};
use crate::sequence::FibPair;

const MAGIC: &[u8; 8] = b"FIBNCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Writes `cursor` and `bank` atomically (temp file + rename).
pub fn checkpoint_save(cursor: &FibCursor, bank: &CounterBank, path: &Path) -> Result<()> {
    if cursor.suffix_carry != bank.tail || cursor.pos_in_term != 0 {
        return Err(Error::InvalidInput(
            "cursor and bank are not at the same term boundary".into(),
        ));
    }
    if cursor.n != bank.first_term + bank.terms_consumed {
        return Err(Error::InvalidInput(format!(
            "cursor is at term {} but bank ends at term {}",
            cursor.n,
            bank.last_term()
        )));
    }
    let bytes = encode(cursor, bank);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn checkpoint_load(path: &Path) -> Result<(FibCursor, CounterBank)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|fail| match fail {
        Fail::Version(found) => Error::Version {
            path: path.to_path_buf(),
            found,
            expected: CHECKPOINT_VERSION,
        },
        Fail::Integrity { offset, reason } => Error::Integrity {
            path: path.to_path_buf(),
            offset,
            reason,
        },
    })
}

fn encode(cursor: &FibCursor, bank: &CounterBank) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    let cfg = bank.config;
    out.extend_from_slice(&cfg.base.get().to_le_bytes());
    out.extend_from_slice(&(cfg.k_max as u32).to_le_bytes());
    out.push(cfg.positional as u8);
    for v in [
        bank.first_term,
        bank.terms_consumed,
        bank.total_digits,
        cursor.n,
        cursor.pos_in_term,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for big in [&cursor.pair.f_n, &cursor.pair.f_n1] {
        let mag = big.to_bytes_le();
        out.extend_from_slice(&(mag.len() as u64).to_le_bytes());
        out.extend_from_slice(&mag);
    }
    for digits in [&cursor.suffix_carry, &bank.head, &bank.tail] {
        out.extend_from_slice(&(digits.len() as u32).to_le_bytes());
        out.extend_from_slice(digits);
    }
    let mut put = |counts: &[u64]| {
        for c in counts {
            out.extend_from_slice(&c.to_le_bytes());
        }
    };
    for counts in &bank.blocks {
        put(counts);
    }
    if let Some(pos) = &bank.positional {
        for p in pos {
            for counts in &p.by_category {
                put(counts);
            }
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

enum Fail {
    Version(u32),
    Integrity { offset: u64, reason: String },
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn fail<T>(&self, reason: impl Into<String>) -> std::result::Result<T, Fail> {
        Err(Fail::Integrity {
            offset: self.pos as u64,
            reason: reason.into(),
        })
    }

    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], Fail> {
        if self.bytes.len() - self.pos < n {
            return self.fail(format!("truncated: needed {n} more bytes"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> std::result::Result<u8, Fail> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> std::result::Result<u32, Fail> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> std::result::Result<u64, Fail> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn counts(&mut self, n: usize) -> std::result::Result<Vec<u64>, Fail> {
        let raw = self.take(n.checked_mul(8).unwrap_or(usize::MAX))?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn digits(&mut self, base: u32) -> std::result::Result<Vec<u8>, Fail> {
        let len = self.u32()? as usize;
        let start = self.pos;
        let d = self.take(len)?.to_vec();
        if let Some(i) = d.iter().position(|&x| x as u32 >= base) {
            self.pos = start + i;
            return self.fail("digit out of range");
        }
        Ok(d)
    }
}

fn decode(bytes: &[u8]) -> std::result::Result<(FibCursor, CounterBank), Fail> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        r.pos = 0;
        return r.fail("bad magic bytes");
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Fail::Version(version));
    }
    if bytes.len() < r.pos + 4 {
        return r.fail("truncated before checksum");
    }
    let body_end = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
    if crc32fast::hash(&bytes[..body_end]) != stored {
        return Err(Fail::Integrity {
            offset: body_end as u64,
            reason: "checksum mismatch".into(),
        });
    }
    let mut r = Reader {
        bytes: &bytes[..body_end],
        pos: r.pos,
    };

    let base_at = r.pos;
    let base = r.u32()?;
    let k_max = r.u32()? as usize;
    let positional = r.u8()? != 0;
    let config = match StreamConfig::new(base, k_max, positional) {
        Ok(c) => c,
        Err(e) => {
            r.pos = base_at;
            return r.fail(format!("invalid configuration: {e}"));
        }
    };
    let first_term = r.u64()?;
    let terms_consumed = r.u64()?;
    let total_digits = r.u64()?;
    let n = r.u64()?;
    let pos_in_term = r.u64()?;
    let mut pair = [BigUint::default(), BigUint::default()];
    for slot in &mut pair {
        let len = r.u64()? as usize;
        *slot = BigUint::from_bytes_le(r.take(len)?);
    }
    let [f_n, f_n1] = pair;
    let suffix_carry = r.digits(base)?;
    let head = r.digits(base)?;
    let tail = r.digits(base)?;

    let b = base as usize;
    let mut blocks = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        blocks.push(r.counts(b.pow(k as u32))?);
    }
    let positional_counts = if positional {
        let mut all = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let cells = b.pow(k as u32);
            let mut cats: [Vec<u64>; 4] = Default::default();
            for slot in &mut cats {
                *slot = r.counts(cells)?;
            }
            all.push(PositionalCounts { by_category: cats });
        }
        Some(all)
    } else {
        None
    };
    if r.pos != r.bytes.len() {
        return r.fail("trailing bytes after counters");
    }

    let cursor = FibCursor {
        base: config.base,
        n,
        pair: FibPair { n, f_n, f_n1 },
        pos_in_term,
        suffix_carry,
    };
    let bank = CounterBank {
        config,
        first_term,
        terms_consumed,
        total_digits,
        blocks,
        positional: positional_counts,
        head,
        tail,
    };
    if cursor.suffix_carry != bank.tail || n != first_term + terms_consumed {
        return Err(Fail::Integrity {
            offset: 0,
            reason: "cursor and bank disagree".into(),
        });
    }
    Ok((cursor, bank))
}
