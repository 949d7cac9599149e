//! Binary fixed-point logarithms on big integers.
//!
//! Values are `BigInt`s scaled by `2^FRAC_BITS`. Only what the closed-form
//! length and counting formulas need is implemented here.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

pub(crate) const FRAC_BITS: u64 = 256;

fn one() -> BigInt {
    BigInt::one() << FRAC_BITS
}

/// `2 * atanh(t)` for a fixed-point `t` with |t| <= 1/3.
fn two_atanh(t: &BigInt) -> BigInt {
    if t.sign() == Sign::Minus {
        return -two_atanh(&-t);
    }
    let t2 = (t * t) >> FRAC_BITS;
    let mut power = t.clone();
    let mut sum = BigInt::zero();
    let mut denom = 1u32;
    while !power.is_zero() {
        sum += &power / BigInt::from(denom);
        power = (&power * &t2) >> FRAC_BITS;
        denom += 2;
    }
    sum << 1
}

/// ln(m) for fixed-point `m` in [1/2, 2].
fn ln_mantissa(m: &BigInt) -> BigInt {
    let t = ((m - one()) << FRAC_BITS) / (m + one());
    two_atanh(&t)
}

pub(crate) fn ln2() -> &'static BigInt {
    static LN2: OnceLock<BigInt> = OnceLock::new();
    LN2.get_or_init(|| ln_mantissa(&(one() << 1)))
}

/// ln of a positive big integer scaled by `2^-shift`, i.e. ln(x / 2^shift).
pub(crate) fn ln_scaled(x: &BigUint, shift: u64) -> BigInt {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    // x = m * 2^(bits-1), m in [1, 2)
    let exp = bits as i64 - 1 - shift as i64;
    let mantissa = if bits > FRAC_BITS {
        BigInt::from_biguint(Sign::Plus, x >> (bits - 1 - FRAC_BITS))
    } else {
        BigInt::from_biguint(Sign::Plus, x << (FRAC_BITS - (bits - 1)))
    };
    ln_mantissa(&mantissa) + ln2() * BigInt::from(exp)
}

pub(crate) fn ln_u64(x: u64) -> BigInt {
    ln_scaled(&BigUint::from(x), 0)
}

/// sqrt(5) in fixed point.
fn sqrt5() -> BigInt {
    let scaled = BigUint::from(5u32) << (2 * FRAC_BITS);
    BigInt::from_biguint(Sign::Plus, scaled.sqrt())
}

/// ln(phi), phi = (1 + sqrt 5) / 2.
pub(crate) fn ln_phi() -> &'static BigInt {
    static LN_PHI: OnceLock<BigInt> = OnceLock::new();
    LN_PHI.get_or_init(|| {
        let phi = (one() + sqrt5()) >> 1;
        ln_mantissa(&phi)
    })
}

/// ln(F_n) - (n ln(phi) - ln(sqrt 5)) = ln(1 - (-1)^n phi^(-2n)).
///
/// Returns zero once the term drops below the fixed-point resolution.
pub(crate) fn ln_binet_correction(n: u64) -> BigInt {
    // phi^-2 = (3 - sqrt 5) / 2 ~ 2^-1.39
    if n.saturating_mul(139) > (FRAC_BITS + 8) * 100 {
        return BigInt::zero();
    }
    let inv_phi2 = ((one() * 3u32) - sqrt5()) >> 1;
    let mut pow = one();
    for _ in 0..n {
        pow = (pow * &inv_phi2) >> FRAC_BITS;
    }
    let arg = if n % 2 == 0 { one() - pow } else { one() + pow };
    ln_mantissa(&arg)
}

/// ln(sqrt 5).
pub(crate) fn ln_sqrt5() -> &'static BigInt {
    static LN_SQRT5: OnceLock<BigInt> = OnceLock::new();
    LN_SQRT5.get_or_init(|| ln_u64(5) >> 1)
}

/// Splits a non-negative fixed-point value into (floor, fractional part as f64).
/// Negative inputs return `None`.
pub(crate) fn floor_and_frac(v: &BigInt) -> Option<(BigUint, f64)> {
    if v.sign() == Sign::Minus {
        return None;
    }
    let mag = v.magnitude();
    let int = mag >> FRAC_BITS;
    let frac_bits: BigUint = mag - (&int << FRAC_BITS);
    // top 53 bits of the fraction are plenty for a proximity test
    let top = (frac_bits >> (FRAC_BITS - 53)).iter_u64_digits().next().unwrap_or(0);
    Some((int, top as f64 / (1u64 << 53) as f64))
}

/// Fixed-point quotient a / b.
pub(crate) fn div(a: &BigInt, b: &BigInt) -> BigInt {
    (a << FRAC_BITS) / b
}
