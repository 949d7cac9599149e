//! Two constructions that sit beside the main experiment: the ragged array
//! whose rows are all uniform but whose column concatenation is not normal,
//! and the searches deciding which values `sigma`, `phi` and `lambda` take.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{divisors, factorize, fib_stream, is_prime, sigma, BigNat, FibPair, FACTOR_LIMIT};

/// Digit repeated down column `n`.
pub fn type_digit(n: u64) -> u8 {
    (n % 10) as u8
}

/// Tallies of `C = col_1 col_2 ... col_N`, column `n` being `t_n` repeated `n` times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleStats {
    pub columns: u64,
    /// `L_N = N (N + 1) / 2`.
    pub length: u64,
    pub single: [u64; 10],
    /// `pairs[a][c]` = occurrences of the 2-block `ac`.
    pub pairs: [[u64; 10]; 10],
}

impl CounterexampleStats {
    pub fn single_freq(&self, d: usize) -> f64 {
        self.single[d] as f64 / self.length as f64
    }

    /// Share of the `L_N - 1` sliding 2-blocks equal to `dd`.
    pub fn diagonal_mass(&self, d: usize) -> f64 {
        match self.length {
            0 | 1 => 0.0,
            len => self.pairs[d][d] as f64 / (len - 1) as f64,
        }
    }

    pub fn off_diagonal_total(&self) -> u64 {
        (0..10)
            .flat_map(|a| (0..10).filter(move |&c| c != a).map(move |c| (a, c)))
            .map(|(a, c)| self.pairs[a][c])
            .sum()
    }

    pub fn max_single_deviation(&self) -> f64 {
        (0..10)
            .map(|d| (self.single_freq(d) - 0.1).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_diagonal_deviation(&self) -> f64 {
        (0..10)
            .map(|d| (self.diagonal_mass(d) - 0.1).abs())
            .fold(0.0, f64::max)
    }
}

/// Streams the first `N` columns; nothing is materialized.
pub fn counterexample_stats(columns: u64) -> Result<CounterexampleStats> {
    if columns == 0 {
        return Err(Error::InvalidInput("column count must be at least 1".into()));
    }
    let length = columns
        .checked_mul(columns + 1)
        .map(|x| x / 2)
        .ok_or_else(|| Error::Capacity(format!("{columns} columns overflow the digit count")))?;
    let mut single = [0u64; 10];
    let mut pairs = [[0u64; 10]; 10];
    for n in 1..=columns {
        let t = type_digit(n) as usize;
        single[t] += n;
        pairs[t][t] += n - 1;
        if n > 1 {
            pairs[type_digit(n - 1) as usize][t] += 1;
        }
    }
    Ok(CounterexampleStats {
        columns,
        length,
        single,
        pairs,
    })
}

/// The digits of `C` in order.
pub fn counterexample_digits(columns: u64) -> impl Iterator<Item = u8> {
    (1..=columns).flat_map(|n| std::iter::repeat(type_digit(n)).take(n as usize))
}

/// Row `k` of the array: `t_{k+1}, t_{k+2}, ...`, first `count` entries.
pub fn row_sequence(k: u64, count: usize) -> Vec<u8> {
    (k + 1..).take(count).map(type_digit).collect()
}

/// Whether `value` is `sigma(m)` for some `m`, with the least such `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SigmaWitness {
    pub value: u64,
    pub in_range: bool,
    pub witness: Option<u64>,
}

fn small_value(v: &BigNat, what: &str) -> Result<u64> {
    match v.to_u64() {
        Some(0) => Err(Error::domain("value", format!("{what} needs v >= 1"))),
        Some(x) if x <= FACTOR_LIMIT => Ok(x),
        _ => Err(Error::Capacity(format!(
            "{what}: {v} exceeds the search bound {FACTOR_LIMIT}"
        ))),
    }
}

/// A prime power `p^a` that can appear in a preimage, with its image.
#[derive(Debug, Clone, Copy)]
struct Piece {
    p: u64,
    power: u64,
    image: u64,
}

/// Least product of pieces on distinct primes whose images multiply to `v`.
fn least_preimage(mut pieces: Vec<Piece>, v: u64) -> Option<u64> {
    pieces.sort_by_key(|c| (c.p, c.power));
    let mut best: Option<u128> = None;
    extend(&pieces, 0, v, 1, &mut best);
    best.map(|m| m as u64)
}

fn extend(pieces: &[Piece], from: usize, rest: u64, m: u128, best: &mut Option<u128>) {
    if rest == 1 {
        if best.map_or(true, |b| m < b) {
            *best = Some(m);
        }
        return;
    }
    for (i, c) in pieces.iter().enumerate().skip(from) {
        if rest % c.image != 0 {
            continue;
        }
        let next = m * c.power as u128;
        if best.is_some_and(|b| next >= b) {
            continue;
        }
        // later pieces must use a larger prime
        let skip = pieces[i..].iter().take_while(|o| o.p == c.p).count();
        extend(pieces, i + skip, rest / c.image, next, best);
    }
}

fn sigma_prime_power(p: u64, a: u32) -> u128 {
    let p = p as u128;
    (p.pow(a + 1) - 1) / (p - 1)
}

/// Decides `v in sigma(N)` by building preimages from prime powers `p^a`
/// with `sigma(p^a) | v`; the least witness is returned.
pub fn sigma_range_contains(v: &BigNat) -> Result<SigmaWitness> {
    let v = small_value(v, "sigma range")?;
    let mut pieces = Vec::new();
    for d in divisors(v)? {
        if d < 3 {
            continue;
        }
        if is_prime(d - 1) {
            pieces.push(Piece {
                p: d - 1,
                power: d - 1,
                image: d,
            });
        }
        // sigma(p^a) lies strictly between p^a and (2p)^a
        for a in 2u32.. {
            if (1u128 << (a + 1)) - 1 > d as u128 {
                break;
            }
            let root = (d as f64).powf(1.0 / a as f64) as u64;
            for p in root.saturating_sub(1).max(2)..=root + 1 {
                if is_prime(p) && sigma_prime_power(p, a) == d as u128 {
                    pieces.push(Piece {
                        p,
                        power: p.pow(a),
                        image: d,
                    });
                }
            }
        }
    }
    let witness = least_preimage(pieces, v);
    Ok(SigmaWitness {
        value: v,
        in_range: witness.is_some(),
        witness,
    })
}

/// One row of the Fibonacci sigma census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SigmaCensusRow {
    pub n: u64,
    pub sigma: SigmaWitness,
    pub multiple_of_6: bool,
    /// A hit beyond `n = 6` whose value is not a multiple of 6.
    pub exception: bool,
}

/// Tests `F_1 ..= F_max_index` for membership in the range of `sigma`.
pub fn fib_sigma_census(max_index: u64, value_cap: &BigNat) -> Result<Vec<SigmaCensusRow>> {
    if max_index == 0 {
        return Err(Error::InvalidInput("max index must be at least 1".into()));
    }
    if *value_cap > BigUint::from(FACTOR_LIMIT) {
        return Err(Error::Capacity(format!(
            "value cap {value_cap} exceeds the search bound {FACTOR_LIMIT}"
        )));
    }
    let mut rows = Vec::with_capacity(max_index as usize);
    for (i, f_n) in fib_stream(FibPair::first(), max_index).enumerate() {
        let n = i as u64 + 1;
        if f_n > *value_cap {
            return Err(Error::Capacity(format!(
                "F_{} = {} exceeds the value cap {value_cap}",
                n, f_n
            )));
        }
        let sigma = sigma_range_contains(&f_n)?;
        let multiple_of_6 = sigma.value % 6 == 0;
        rows.push(SigmaCensusRow {
            n,
            sigma,
            multiple_of_6,
            exception: sigma.in_range && n > 6 && !multiple_of_6,
        });
    }
    Ok(rows)
}

/// Whether `v` is a value of Euler's `phi` and of Carmichael's `lambda`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reachability {
    pub value: u64,
    /// Least `m` with `phi(m) = v`.
    pub phi: Option<u64>,
    /// Some `m` with `lambda(m) = v`, not necessarily the least.
    #[serde(serialize_with = "decimal")]
    pub lambda: Option<BigUint>,
}

pub fn reachability_phi_lambda(v: &BigNat) -> Result<Reachability> {
    let v = small_value(v, "phi/lambda range")?;
    if v == 1 {
        return Ok(Reachability {
            value: 1,
            phi: Some(1),
            lambda: Some(BigUint::one()),
        });
    }
    if v % 2 == 1 {
        // phi(m) and lambda(m) are 1 for m <= 2 and even beyond
        return Ok(Reachability {
            value: v,
            phi: None,
            lambda: None,
        });
    }
    let divs = divisors(v)?;
    Ok(Reachability {
        value: v,
        phi: least_preimage(phi_pieces(v, &divs), v),
        lambda: lambda_preimage(v, &divs),
    })
}

/// Prime powers with `phi(p^a) | v`; `2^1` is left out since `phi(2) = 1`
/// never helps a least preimage.
fn phi_pieces(v: u64, divs: &[u64]) -> Vec<Piece> {
    let mut pieces = Vec::new();
    for &d in divs {
        let p = d + 1;
        if !is_prime(p) {
            continue;
        }
        let (mut power, mut image) = (p as u128, d as u128);
        loop {
            if p != 2 || power > 2 {
                pieces.push(Piece {
                    p,
                    power: power as u64,
                    image: image as u64,
                });
            }
            image *= p as u128;
            power *= p as u128;
            if v as u128 % image != 0 {
                break;
            }
        }
    }
    pieces
}

fn lambda_prime_power(p: u64, a: u32) -> u128 {
    match (p, a) {
        (2, 1) => 1,
        (2, 2) => 2,
        (2, _) => 1 << (a - 2),
        _ => (p as u128 - 1) * (p as u128).pow(a - 1),
    }
}

/// `v` is a value of `lambda` iff the lcm of `lambda(p^a)` over all prime
/// powers with `lambda(p^a) | v` is `v` itself. The witness takes, for each
/// prime power of `v`, the smallest `p^a` that attains it.
fn lambda_preimage(v: u64, divs: &[u64]) -> Option<BigUint> {
    let mut pieces: Vec<(u64, u32, u64)> = Vec::new();
    for &d in divs {
        let p = d + 1;
        if !is_prime(p) {
            continue;
        }
        for a in 1u32.. {
            let lam = lambda_prime_power(p, a);
            if v as u128 % lam != 0 {
                break;
            }
            pieces.push((p, a, lam as u64));
        }
    }
    let total = pieces.iter().fold(1u64, |acc, &(_, _, lam)| acc.lcm(&lam));
    if total != v {
        return None;
    }
    let mut chosen: Vec<(u64, u32)> = Vec::new();
    for (q, e) in factorize(v).expect("v is within the factoring bound") {
        let qe = q.pow(e);
        let best = pieces
            .iter()
            .filter(|&&(_, _, lam)| lam % qe == 0)
            .min_by_key(|&&(p, a, _)| (p as u128).pow(a))
            .expect("lcm covers every prime power");
        chosen.push((best.0, best.1));
    }
    chosen.sort_unstable();
    chosen.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 = b.1.max(a.1);
            true
        } else {
            false
        }
    });
    Some(
        chosen
            .into_iter()
            .fold(BigUint::one(), |acc, (p, a)| acc * BigUint::from(p).pow(a)),
    )
}

fn decimal<S: serde::Serializer>(m: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match m {
        Some(m) => s.serialize_str(&m.to_string()),
        None => s.serialize_none(),
    }
}

/// `sigma(m)` recomputed, for re-verifying witnesses.
pub fn verify_sigma_witness(w: &SigmaWitness) -> Result<bool> {
    Ok(match w.witness {
        Some(m) => sigma(m)? == w.value,
        None => !w.in_range,
    })
}

#[cfg(test)]
mod tests;
