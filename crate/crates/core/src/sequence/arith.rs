//! Multiplicative functions by trial-division factorization.

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest argument accepted by the trial-division routines.
pub const FACTOR_LIMIT: u64 = 1_000_000_000_000;

fn check(n: u64, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(what, "argument must be at least 1"));
    }
    if n > FACTOR_LIMIT {
        return Err(Error::Capacity(format!(
            "{what}({n}) exceeds the trial-division bound {FACTOR_LIMIT}"
        )));
    }
    Ok(())
}

/// Prime factorization as `(p, e)` pairs in increasing `p`.
pub fn factorize(mut n: u64) -> Result<Vec<(u64, u32)>> {
    check(n, "factorize")?;
    let mut out = Vec::new();
    let mut push = |n: &mut u64, p: u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(&mut n, 2);
    push(&mut n, 3);
    let mut p = 5;
    while p * p <= n {
        push(&mut n, p);
        push(&mut n, p + 2);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// Deterministic Miller-Rabin, valid for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    WITNESSES.iter().all(|&a| {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                return true;
            }
        }
        false
    })
}

/// All divisors in increasing order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n)? {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Sum of divisors.
pub fn sigma(n: u64) -> Result<u64> {
    check(n, "sigma")?;
    Ok(factorize(n)?
        .into_iter()
        .map(|(p, e)| {
            let p = p as u128;
            (p.pow(e + 1) - 1) / (p - 1)
        })
        .product::<u128>() as u64)
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    check(n, "euler_phi")?;
    Ok(factorize(n)?
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product())
}

/// Carmichael's function: the exponent of the unit group mod `n`.
pub fn carmichael_lambda(n: u64) -> Result<u64> {
    check(n, "carmichael_lambda")?;
    Ok(factorize(n)?
        .into_iter()
        .map(|(p, e)| {
            if p == 2 && e >= 3 {
                1 << (e - 2)
            } else {
                (p - 1) * p.pow(e - 1)
            }
        })
        .fold(1, |acc, x| acc.lcm(&x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::gcd;

    fn sigma_naive(n: u64) -> u64 {
        (1..=n).filter(|d| n % d == 0).sum()
    }

    fn phi_naive(n: u64) -> u64 {
        (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
    }

    fn lambda_naive(n: u64) -> u64 {
        // smallest e with a^e = 1 for every unit a
        let units: Vec<u64> = (1..=n).filter(|&k| gcd(k, n) == 1).collect();
        (1..=n)
            .find(|&e| {
                units.iter().all(|&a| {
                    let mut x = 1u64 % n;
                    for _ in 0..e {
                        x = x * a % n;
                    }
                    x == 1 % n
                })
            })
            .unwrap()
    }

    #[test]
    fn reference_values() {
        assert_eq!(sigma(7).unwrap(), 8);
        assert_eq!(sigma(4).unwrap(), 7);
        assert_eq!(sigma(1).unwrap(), 1);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(2).unwrap(), 1);
        assert_eq!(carmichael_lambda(1).unwrap(), 1);
        assert_eq!(carmichael_lambda(2).unwrap(), 1);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(sigma(0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(euler_phi(0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(carmichael_lambda(FACTOR_LIMIT + 1), Err(Error::Capacity(_))));
    }

    #[test]
    fn agree_with_naive_definitions() {
        for n in 1..=300 {
            assert_eq!(sigma(n).unwrap(), sigma_naive(n), "sigma({n})");
            assert_eq!(euler_phi(n).unwrap(), phi_naive(n), "phi({n})");
            assert_eq!(carmichael_lambda(n).unwrap(), lambda_naive(n), "lambda({n})");
        }
    }

    #[test]
    fn phi_and_lambda_even_above_two() {
        for m in 3..=10_000 {
            assert_eq!(euler_phi(m).unwrap() % 2, 0, "phi({m})");
            assert_eq!(carmichael_lambda(m).unwrap() % 2, 0, "lambda({m})");
        }
    }

    #[test]
    fn factorize_large_prime_and_composite() {
        assert_eq!(factorize(999_999_999_989).unwrap(), vec![(999_999_999_989, 1)]);
        assert_eq!(
            factorize(1_000_000_000_000).unwrap(),
            vec![(2, 12), (5, 12)]
        );
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1));
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000u64 {
            let naive = n >= 2 && (2..n).take_while(|p| p * p <= n).all(|p| n % p != 0);
            assert_eq!(is_prime(n), naive, "{n}");
        }
        // strong pseudoprimes to several small bases
        for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321] {
            assert!(!is_prime(n), "{n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1).unwrap(), vec![1]);
        for n in 1..=500 {
            let naive: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(divisors(n).unwrap(), naive);
        }
    }
}
