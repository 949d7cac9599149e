use crate::error::{Error, Result};

/// Period of the Fibonacci sequence modulo `m`.
///
/// Walks `(F_n, F_{n+1}) mod m` from `(0, 1)` until the state recurs. The
/// sequence is purely periodic, so the first return is the period.
pub fn pisano_period(m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidModulus(m));
    }
    let m = m as u128;
    let (mut a, mut b) = (0u128, 1u128);
    let mut steps = 0u64;
    loop {
        let c = (a + b) % m;
        a = b;
        b = c;
        steps += 1;
        if a == 0 && b == 1 {
            return Ok(steps);
        }
    }
}

/// `F_n mod m` for `n = 1..=count`.
pub fn residues(m: u64, count: u64) -> Vec<u64> {
    let m = m as u128;
    let (mut a, mut b) = (1u128 % m, 1u128 % m);
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        out.push(a as u64);
        let c = (a + b) % m;
        a = b;
        b = c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_periods() {
        assert_eq!(pisano_period(10).unwrap(), 60);
        assert_eq!(pisano_period(2).unwrap(), 3);
        assert_eq!(pisano_period(100).unwrap(), 300);
        assert_eq!(pisano_period(5).unwrap(), 20);
        assert!(matches!(pisano_period(1), Err(Error::InvalidModulus(1))));
        assert!(matches!(pisano_period(0), Err(Error::InvalidModulus(0))));
    }

    #[test]
    fn periods_verified_over_two_cycles() {
        for m in 2..=1000u64 {
            let p = pisano_period(m).unwrap();
            let seq = residues(m, 2 * p + 2);
            for i in 0..(p as usize + 2) {
                assert_eq!(seq[i], seq[i + p as usize], "m={m}");
            }
            // no shorter period
            for q in 1..p {
                if p % q == 0 {
                    let r = residues(m, q + 2);
                    assert!(!(r[q as usize] == 1 && r[q as usize + 1] == 1), "m={m} q={q}");
                }
            }
        }
    }
}
