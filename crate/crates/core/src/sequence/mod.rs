//! Exact Fibonacci numbers, base-`b` digit strings, and the closed forms
//! that predict digit lengths and count Fibonacci numbers below a bound.

pub mod arith;
mod fixed;
pub mod pisano;
pub mod radix;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use arith::{carmichael_lambda, divisors, euler_phi, factorize, is_prime, sigma, FACTOR_LIMIT};
pub use pisano::pisano_period;
pub use radix::{Base, LimbRadix, RadixConverter};

/// Arbitrary-precision non-negative integer.
pub type BigNat = BigUint;

/// A consecutive Fibonacci pair `(F_n, F_{n+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibPair {
    pub n: u64,
    pub f_n: BigNat,
    pub f_n1: BigNat,
}

impl FibPair {
    /// `(F_1, F_2) = (1, 1)`.
    pub fn first() -> Self {
        FibPair {
            n: 1,
            f_n: BigNat::one(),
            f_n1: BigNat::one(),
        }
    }

    /// Moves to `(F_{n+1}, F_{n+2})`.
    pub fn advance(&mut self) {
        let next = &self.f_n + &self.f_n1;
        self.f_n = std::mem::replace(&mut self.f_n1, next);
        self.n += 1;
    }
}

/// `(F_n, F_{n+1})` by fast doubling.
pub fn fib_pair(n: u64) -> Result<FibPair> {
    if n == 0 {
        return Err(Error::domain("fib_pair", "index must be at least 1"));
    }
    // (a, b) = (F_k, F_{k+1}), walking the bits of n from the top
    let mut a = BigNat::zero();
    let mut b = BigNat::one();
    for bit in (0..64 - n.leading_zeros()).rev() {
        // F_2k = F_k (2 F_{k+1} - F_k), F_2k+1 = F_k^2 + F_{k+1}^2
        let two_b = &b << 1;
        let c = &a * (two_b - &a);
        let d = &a * &a + &b * &b;
        if (n >> bit) & 1 == 1 {
            b = &c + &d;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    Ok(FibPair {
        n,
        f_n: a,
        f_n1: b,
    })
}

/// Lazy `F_n, F_{n+1}, ...` starting from a pair, one addition per value.
#[derive(Debug, Clone)]
pub struct FibStream {
    pair: FibPair,
    remaining: u64,
}

pub fn fib_stream(start: FibPair, count: u64) -> FibStream {
    FibStream {
        pair: start,
        remaining: count,
    }
}

impl Iterator for FibStream {
    type Item = BigNat;

    fn next(&mut self) -> Option<BigNat> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.pair.f_n.clone();
        if self.remaining > 0 {
            self.pair.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for FibStream {}

/// Digits of a value in some base, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitString {
    base: Base,
    digits: Vec<u8>,
}

impl DigitString {
    /// Validates digit range and the no-leading-zero rule.
    pub fn new(base: Base, digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidInput("empty digit string".into()));
        }
        if let Some(&bad) = digits.iter().find(|&&d| d as u32 >= base.get()) {
            return Err(Error::InvalidInput(format!(
                "digit {bad} out of range for base {base}"
            )));
        }
        if digits.len() > 1 && digits[0] == 0 {
            return Err(Error::InvalidInput("leading zero".into()));
        }
        Ok(DigitString { base, digits })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_value(&self) -> BigNat {
        RadixConverter::new(self.base).from_digits(&self.digits)
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.digits
    }
}

impl std::fmt::Display for DigitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use std::fmt::Write;
        let sep = self.base.get() > 36;
        for (i, &d) in self.digits.iter().enumerate() {
            if sep {
                if i > 0 {
                    f.write_char('.')?;
                }
                write!(f, "{d}")?;
            } else {
                f.write_char(char::from_digit(d as u32, 36).unwrap_or('?'))?;
            }
        }
        Ok(())
    }
}

/// Base-`b` digits of `v`.
pub fn digit_string(v: &BigNat, base: u32) -> Result<DigitString> {
    let base = Base::new(base)?;
    let digits = RadixConverter::new(base).to_digits(v);
    Ok(DigitString { base, digits })
}

/// Inverse of [`digit_string`].
pub fn from_digits(digits: &[u8], base: u32) -> Result<BigNat> {
    let ds = DigitString::new(Base::new(base)?, digits.to_vec())?;
    Ok(ds.to_value())
}

/// Fractional parts closer than this to an integer trigger the exact fallback.
const FLOOR_GUARD: f64 = 1e-9;

fn near_integer(frac: f64) -> bool {
    frac < FLOOR_GUARD || frac > 1.0 - FLOOR_GUARD
}

/// Number of base-`b` digits of `F_n` from `floor(n log_b phi - log_b sqrt5) + 1`.
///
/// Defined for `n >= 2`; at `n = 1` the closed form gives 0. For small `n` the
/// exact term `log_b(1 - (-1)^n phi^(-2n))` is added, without which the form
/// is off by one at `F_3 = 2` in base 2. Values whose logarithm lands within
/// `1e-9` of an integer are measured directly.
pub fn digit_length_predicted(n: u64, base: u32) -> Result<u64> {
    let base = Base::new(base)?;
    if n < 2 {
        return Err(Error::domain(
            "digit_length_predicted",
            format!("n = {n}; the closed form holds for n >= 2"),
        ));
    }
    let ln_b = fixed::ln_u64(base.get() as u64);
    let numer =
        fixed::ln_phi() * BigInt::from(n) - fixed::ln_sqrt5() + fixed::ln_binet_correction(n);
    let value = fixed::div(&numer, &ln_b);
    match fixed::floor_and_frac(&value) {
        Some((floor, frac)) if !near_integer(frac) => {
            Ok(floor.to_u64().expect("digit length fits u64") + 1)
        }
        _ => {
            let f = fib_pair(n)?.f_n;
            Ok(RadixConverter::new(base).to_digits(&f).len() as u64)
        }
    }
}

/// Number of indices `n >= 1` with `F_n <= bound`, from
/// `floor(ln(sqrt5 (N + 1/2)) / ln phi)`; `F_1` and `F_2` both count.
pub fn counting_function(bound: &BigNat) -> u64 {
    if bound.is_zero() {
        return 0;
    }
    // ln(N + 1/2) = ln((2N + 1) / 2)
    let twice = (bound << 1u32) + 1u32;
    let ln_val = fixed::ln_scaled(&twice, 1) + fixed::ln_sqrt5();
    let value = fixed::div(&ln_val, fixed::ln_phi());
    match fixed::floor_and_frac(&value) {
        Some((floor, frac)) if !near_integer(frac) => floor.to_u64().expect("count fits u64"),
        _ => count_by_enumeration(bound),
    }
}

/// Direct enumeration of `#{n >= 1 : F_n <= bound}`.
pub fn count_by_enumeration(bound: &BigNat) -> u64 {
    let mut pair = FibPair::first();
    let mut count = 0;
    while &pair.f_n <= bound {
        count += 1;
        pair.advance();
    }
    count
}
