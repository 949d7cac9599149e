use proptest::prelude::*;

use super::*;
use crate::sequence::{carmichael_lambda, euler_phi};

fn big(v: u64) -> BigNat {
    BigNat::from(v)
}

/// Least `m <= limit` with `f(m) = v`, from a table of `f` over `1..=limit`.
fn least_in_table(table: &[u64], v: u64) -> Option<u64> {
    table.iter().position(|&x| x == v).map(|i| i as u64 + 1)
}

fn sigma_table(limit: usize) -> Vec<u64> {
    let mut t = vec![0u64; limit + 1];
    for d in 1..=limit {
        for m in (d..=limit).step_by(d) {
            t[m] += d as u64;
        }
    }
    t.remove(0);
    t
}

#[test]
fn counterexample_small_cases() {
    let c: Vec<u8> = counterexample_digits(4).collect();
    assert_eq!(c, vec![1, 2, 2, 3, 3, 3, 4, 4, 4, 4]);
    let s = counterexample_stats(4).unwrap();
    assert_eq!(s.length, 10);
    let one = counterexample_stats(1).unwrap();
    assert_eq!(one.single_freq(1), 1.0);
    assert_eq!(one.off_diagonal_total(), 0);
    assert!(counterexample_stats(0).is_err());
}

#[test]
fn counterexample_tallies_match_materialized_string() {
    for n in [1u64, 2, 7, 10, 11, 35, 123] {
        let s = counterexample_stats(n).unwrap();
        let digits: Vec<u8> = counterexample_digits(n).collect();
        assert_eq!(s.length, digits.len() as u64);
        let mut single = [0u64; 10];
        let mut pairs = [[0u64; 10]; 10];
        for &d in &digits {
            single[d as usize] += 1;
        }
        for w in digits.windows(2) {
            pairs[w[0] as usize][w[1] as usize] += 1;
        }
        assert_eq!(s.single, single, "N = {n}");
        assert_eq!(s.pairs, pairs, "N = {n}");
    }
}

#[test]
fn counterexample_converges_at_rate_one_over_n() {
    for n in [100u64, 1_000, 10_000] {
        let s = counterexample_stats(n).unwrap();
        let bound = 2.0 / (n as f64 + 1.0);
        assert!(s.max_single_deviation() <= bound, "N = {n}");
        assert!(s.max_diagonal_deviation() <= bound, "N = {n}");
        assert_eq!(s.off_diagonal_total(), n - 1);
    }
}

#[test]
fn rows_are_shifted_periods() {
    assert_eq!(row_sequence(0, 10), vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 0]);
    assert_eq!(row_sequence(3, 3), vec![4, 5, 6]);
    for k in 0..25 {
        let mut row = row_sequence(k, 10);
        row.sort_unstable();
        assert_eq!(row, (0..10).collect::<Vec<u8>>());
        let long = row_sequence(k, 70);
        for d in 0..10 {
            assert_eq!(long.iter().filter(|&&x| x == d).count(), 7);
        }
    }
}

#[test]
fn sigma_examples() {
    let w = sigma_range_contains(&big(8)).unwrap();
    assert_eq!((w.in_range, w.witness), (true, Some(7)));
    let w = sigma_range_contains(&big(5)).unwrap();
    assert_eq!((w.in_range, w.witness), (false, None));
    let w = sigma_range_contains(&big(1)).unwrap();
    assert_eq!(w.witness, Some(1));
    assert!(sigma_range_contains(&big(0)).is_err());
    assert!(matches!(
        sigma_range_contains(&big(FACTOR_LIMIT + 1)),
        Err(Error::Capacity(_))
    ));
}

#[test]
fn sigma_search_matches_exhaustive_table() {
    let limit = 20_000;
    let table = sigma_table(limit);
    for v in 1..=limit as u64 {
        let w = sigma_range_contains(&big(v)).unwrap();
        // sigma(m) > m for m >= 2, so every preimage of v lies in the table
        assert_eq!(w.witness, least_in_table(&table, v), "v = {v}");
        assert!(verify_sigma_witness(&w).unwrap());
    }
}

#[test]
fn sigma_large_values() {
    for v in [999_999_999_990u64, 604_800_000_000, 137_438_691_328, 999_999_999_989] {
        let w = sigma_range_contains(&big(v)).unwrap();
        assert!(verify_sigma_witness(&w).unwrap(), "v = {v}");
    }
    // 2^39 - 1 = sigma(2^38), a large prime-power witness
    let w = sigma_range_contains(&big((1 << 39) - 1)).unwrap();
    assert!(w.in_range);
    assert_eq!(sigma(w.witness.unwrap()).unwrap(), (1 << 39) - 1);
}

#[test]
fn fibonacci_sigma_census() {
    let rows = fib_sigma_census(40, &big(1_000_000_000)).unwrap();
    assert_eq!(rows.len(), 40);
    let row = |n: u64| rows[n as usize - 1];
    assert_eq!(row(6).sigma.witness, Some(7));
    for n in [5, 11, 13, 25] {
        assert!(!row(n).sigma.in_range, "F_{n}");
    }
    let table = sigma_table(120_000);
    for r in &rows {
        assert!(verify_sigma_witness(&r.sigma).unwrap());
        if r.n > 6 && r.sigma.in_range {
            assert!(r.multiple_of_6 || r.exception, "F_{}", r.n);
        }
        if r.sigma.value <= 120_000 {
            assert_eq!(r.sigma.witness, least_in_table(&table, r.sigma.value));
        }
    }
    assert!(matches!(
        fib_sigma_census(41, &big(100_000_000)),
        Err(Error::Capacity(_))
    ));
    assert!(fib_sigma_census(10, &big(FACTOR_LIMIT * 2)).is_err());
}

#[test]
fn phi_lambda_examples() {
    let r = reachability_phi_lambda(&big(5)).unwrap();
    assert_eq!((r.phi, r.lambda), (None, None));
    let r = reachability_phi_lambda(&big(1)).unwrap();
    assert_eq!(r.phi, Some(1));
    assert_eq!(r.lambda, Some(BigUint::one()));
    let r = reachability_phi_lambda(&big(4)).unwrap();
    assert_eq!(r.phi, Some(5));
    assert!(reachability_phi_lambda(&big(FACTOR_LIMIT + 1)).is_err());
}

#[test]
fn phi_search_matches_exhaustive_table() {
    // phi(m) >= sqrt(m / 2), so preimages of v <= 100 lie below 20,000
    let limit = 20_000u64;
    let table: Vec<u64> = (1..=limit).map(|m| euler_phi(m).unwrap()).collect();
    for v in 1..=100u64 {
        let r = reachability_phi_lambda(&big(v)).unwrap();
        assert_eq!(r.phi, least_in_table(&table, v), "v = {v}");
    }
}

#[test]
fn lambda_membership_matches_exhaustive_table() {
    // for v <= 24 every m with lambda(m) | v divides 2^5 3^2 5 7 13
    let limit = 131_040u64;
    let values: std::collections::HashSet<u64> =
        (1..=limit).map(|m| carmichael_lambda(m).unwrap()).collect();
    for v in 1..=24u64 {
        let r = reachability_phi_lambda(&big(v)).unwrap();
        assert_eq!(r.lambda.is_some(), values.contains(&v), "v = {v}");
        if let Some(m) = r.lambda {
            assert_eq!(carmichael_lambda(m.to_u64().unwrap()).unwrap(), v);
        }
    }
}

#[test]
fn lambda_witnesses_verify() {
    for v in (2..=2_000u64).step_by(2) {
        let r = reachability_phi_lambda(&big(v)).unwrap();
        if let Some(m) = r.lambda {
            let m = m.to_u64().expect("witness fits");
            if m <= FACTOR_LIMIT {
                assert_eq!(carmichael_lambda(m).unwrap(), v, "v = {v}");
            }
        }
        if let Some(m) = r.phi {
            assert_eq!(euler_phi(m).unwrap(), v);
        }
    }
}

proptest! {
    #[test]
    fn sigma_witnesses_are_exact(v in 1u64..1_000_000_000_000) {
        let w = sigma_range_contains(&big(v)).unwrap();
        prop_assert!(verify_sigma_witness(&w).unwrap());
    }

    #[test]
    fn odd_values_above_one_are_unreachable(k in 1u64..500_000_000_000) {
        let r = reachability_phi_lambda(&big(2 * k + 1)).unwrap();
        prop_assert!(r.phi.is_none() && r.lambda.is_none());
    }
}
