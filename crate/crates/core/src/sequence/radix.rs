//! Conversion between binary big integers and radix-`b^m` limb vectors.
//!
//! Both directions split at balanced powers `R^(2^i)` of the limb radix `R`.
//! Division by those powers goes through a Barrett reciprocal obtained by
//! Newton iteration, so the whole conversion runs in `O(M(n) log n)`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const MIN_BASE: u32 = 2;
pub const MAX_BASE: u32 = 256;

/// A validated digit base in `2..=256`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Base(u32);

impl Base {
    pub fn new(base: u32) -> Result<Self> {
        if (MIN_BASE..=MAX_BASE).contains(&base) {
            Ok(Base(base))
        } else {
            Err(Error::InvalidBase(base))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for Base {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Limb layout for a base: `digits_per_limb` base-`b` digits per `u64` limb.
///
/// The radix is the largest power of the base not exceeding `2^63`, so the
/// sum of two limbs never overflows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimbRadix {
    pub base: Base,
    pub digits_per_limb: usize,
    pub radix: u64,
}

impl LimbRadix {
    pub fn new(base: Base) -> Self {
        let b = base.get() as u64;
        let mut radix = b;
        let mut digits = 1;
        while let Some(next) = radix.checked_mul(b) {
            if next > 1 << 63 {
                break;
            }
            radix = next;
            digits += 1;
        }
        LimbRadix {
            base,
            digits_per_limb: digits,
            radix,
        }
    }

    /// Appends the digits of one limb, most significant first. `pad` forces
    /// exactly `digits_per_limb` digits; otherwise leading zeros are dropped.
    #[inline]
    pub fn push_limb_digits(&self, mut limb: u64, pad: bool, out: &mut Vec<u8>) {
        let b = self.base.get() as u64;
        let start = out.len();
        if pad {
            out.resize(start + self.digits_per_limb, 0);
            for slot in out[start..].iter_mut().rev() {
                *slot = (limb % b) as u8;
                limb /= b;
            }
        } else {
            loop {
                out.push((limb % b) as u8);
                limb /= b;
                if limb == 0 {
                    break;
                }
            }
            out[start..].reverse();
        }
    }

    /// Renders little-endian limbs as most-significant-first digits.
    pub fn limbs_to_digits(&self, limbs: &[u64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(limbs.len() * self.digits_per_limb);
        match limbs.split_last() {
            None => out.push(0),
            Some((top, rest)) => {
                self.push_limb_digits(*top, false, &mut out);
                for &limb in rest.iter().rev() {
                    self.push_limb_digits(limb, true, &mut out);
                }
            }
        }
        out
    }
}

/// A power `R^(2^i)` together with its Barrett reciprocal.
struct Divisor {
    value: BigUint,
    bits: u64,
    mu: BigUint,
}

impl Divisor {
    fn new(value: BigUint) -> Self {
        let bits = value.bits();
        let mu = reciprocal(&value, bits);
        Divisor { value, bits, mu }
    }

    /// `(x / value, x % value)` for `x < 4^bits`.
    fn div_rem(&self, x: &BigUint) -> (BigUint, BigUint) {
        debug_assert!(x.bits() <= 2 * self.bits);
        let k = self.bits;
        let mut q = ((x >> (k - 1)) * &self.mu) >> (k + 1);
        let prod = &q * &self.value;
        let mut r = x - prod;
        while r >= self.value {
            r -= &self.value;
            q += 1u32;
        }
        (q, r)
    }
}

const DIRECT_RECIPROCAL_BITS: u64 = 4096;

/// `floor(4^k / p)` for `p` with exactly `k` bits, by Newton iteration.
fn reciprocal(p: &BigUint, k: u64) -> BigUint {
    debug_assert_eq!(p.bits(), k);
    let target = BigUint::one() << (2 * k);
    if k <= DIRECT_RECIPROCAL_BITS {
        return target / p;
    }
    let h = k / 2 + 32;
    let top = p >> (k - h);
    let seed = reciprocal(&top, h) << (k - h);

    // one Newton step: x + x * (4^k - p x) / 4^k
    let seed_i = BigInt::from_biguint(Sign::Plus, seed);
    let p_i = BigInt::from_biguint(Sign::Plus, p.clone());
    let target_i = BigInt::from_biguint(Sign::Plus, target);
    let err = &target_i - &p_i * &seed_i;
    let mut x = &seed_i + ((&seed_i * &err) >> (2 * k));

    let mut r = &target_i - &p_i * &x;
    while r.sign() == Sign::Minus {
        x -= 1;
        r += &p_i;
    }
    while r >= p_i {
        x += 1;
        r -= &p_i;
    }
    x.to_biguint().expect("reciprocal is positive")
}

const LEAF_LIMBS: usize = 32;

/// Cache of balanced powers of the limb radix.
pub struct RadixConverter {
    pub layout: LimbRadix,
    // powers[i] = R^(2^i)
    powers: Vec<Divisor>,
}

impl RadixConverter {
    pub fn new(base: Base) -> Self {
        let layout = LimbRadix::new(base);
        RadixConverter {
            layout,
            powers: Vec::new(),
        }
    }

    fn power(&mut self, i: usize) -> &Divisor {
        while self.powers.len() <= i {
            let next = match self.powers.last() {
                None => BigUint::from(self.layout.radix),
                Some(d) => &d.value * &d.value,
            };
            self.powers.push(Divisor::new(next));
        }
        &self.powers[i]
    }

    /// Little-endian radix limbs of `x`; zero gives an empty vector.
    pub fn to_limbs(&mut self, x: &BigUint) -> Vec<u64> {
        let mut out = Vec::new();
        if x.is_zero() {
            return out;
        }
        // smallest level whose square exceeds x
        let mut level = 0;
        while self.power(level).bits * 2 <= x.bits() + 1 {
            level += 1;
        }
        self.split(x.clone(), level, 0, &mut out);
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    /// Emits `x < R^(2^(level+1))` as little-endian limbs, zero-padded to `pad`.
    fn split(&mut self, x: BigUint, level: usize, pad: usize, out: &mut Vec<u64>) {
        let start = out.len();
        if (1usize << level) <= LEAF_LIMBS / 2 || x.bits() <= 64 * LEAF_LIMBS as u64 {
            leaf_limbs(x, self.layout.radix, out);
        } else {
            let (q, r) = self.power(level).div_rem(&x);
            let half = 1usize << level;
            self.split(r, level - 1, half, out);
            if !q.is_zero() {
                self.split(q, level - 1, 0, out);
            }
        }
        let written = out.len() - start;
        if written < pad {
            out.resize(start + pad, 0);
        }
    }

    /// Rebuilds a big integer from little-endian radix limbs.
    pub fn from_limbs(&mut self, limbs: &[u64]) -> BigUint {
        if limbs.len() <= LEAF_LIMBS {
            let radix = BigUint::from(self.layout.radix);
            return limbs
                .iter()
                .rev()
                .fold(BigUint::zero(), |acc, &l| acc * &radix + l);
        }
        let mut level = 0;
        while (2usize << level) < limbs.len() {
            level += 1;
        }
        // 2^level < len <= 2^(level+1)
        let half = 1usize << level;
        let lo = self.from_limbs(&limbs[..half]);
        let hi = self.from_limbs(&limbs[half..]);
        hi * &self.power(level).value + lo
    }

    pub fn to_digits(&mut self, x: &BigUint) -> Vec<u8> {
        let limbs = self.to_limbs(x);
        self.layout.limbs_to_digits(&limbs)
    }

    pub fn from_digits(&mut self, digits: &[u8]) -> BigUint {
        let m = self.layout.digits_per_limb;
        let b = self.layout.base.get() as u64;
        let mut limbs = Vec::with_capacity(digits.len() / m + 1);
        let mut end = digits.len();
        while end > 0 {
            let start = end.saturating_sub(m);
            let limb = digits[start..end]
                .iter()
                .fold(0u64, |acc, &d| acc * b + d as u64);
            limbs.push(limb);
            end = start;
        }
        self.from_limbs(&limbs)
    }
}

/// Schoolbook conversion of a small value by repeated single-limb division.
fn leaf_limbs(x: BigUint, radix: u64, out: &mut Vec<u64>) {
    let mut words = x.to_u64_digits();
    while !words.is_empty() {
        let mut rem: u128 = 0;
        for w in words.iter_mut().rev() {
            let cur = (rem << 64) | *w as u128;
            *w = (cur / radix as u128) as u64;
            rem = cur % radix as u128;
        }
        out.push(rem as u64);
        while words.last() == Some(&0) {
            words.pop();
        }
    }
}
