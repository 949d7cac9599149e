use num_bigint::BigUint;
use proptest::prelude::*;

use super::*;
use crate::sequence::{digit_string, fib_pair, FibPair};

fn b(base: u32) -> Base {
    Base::new(base).unwrap()
}

/// Enumerates every block and counts its occurrences by direct comparison.
fn delta_oracle(digits: &[u8], base: u32, k: usize) -> f64 {
    let cells = (base as usize).pow(k as u32);
    let expected = 1.0 / cells as f64;
    let mut worst: f64 = 0.0;
    for code in 0..cells {
        let mut block = vec![0u8; k];
        let mut c = code;
        for slot in block.iter_mut().rev() {
            *slot = (c % base as usize) as u8;
            c /= base as usize;
        }
        let hits = digits.windows(k).filter(|w| *w == &block[..]).count();
        worst = worst.max((hits as f64 / digits.len() as f64 - expected).abs());
    }
    worst
}

fn radix_digits(v: &BigUint, base: u32) -> Vec<u8> {
    v.to_radix_be(base)
}

#[test]
fn small_examples() {
    let f7 = DigitString::new(b(10), vec![1, 3]).unwrap();
    let d = term_delta(&f7, 1).unwrap();
    assert!((d.delta - 0.4).abs() < 1e-15);
    assert_eq!(d.digit_length, 2);

    // raw strings may have leading zeros, which a DigitString rejects
    assert!((block_delta(&[0; 100], b(10), 1).unwrap() - 0.9).abs() < 1e-15);

    let short = DigitString::new(b(10), vec![1]).unwrap();
    assert!(matches!(
        term_delta(&short, 2),
        Err(Error::InsufficientLength { len: 1, k: 2 })
    ));
}

#[test]
fn f100_matches_direct_tally() {
    let f = fib_pair(100).unwrap().f_n;
    let text = f.to_string();
    let mut tally = [0usize; 10];
    for ch in text.bytes() {
        tally[(ch - b'0') as usize] += 1;
    }
    let len = text.len() as f64;
    let expect = tally
        .iter()
        .map(|&c| (c as f64 / len - 0.1).abs())
        .fold(0.0, f64::max);
    let ds = digit_string(&f, 10).unwrap();
    assert!((term_delta(&ds, 1).unwrap().delta - expect).abs() < 1e-15);
}

#[test]
fn block_delta_on_overflowing_alphabet() {
    // 256^8 blocks cannot be indexed by u64
    let digits: Vec<u8> = (0..40).map(|i| (i * 37 % 256) as u8).collect();
    let d = block_delta(&digits, b(256), 8).unwrap();
    let expect = 1.0 / 40.0 - 256f64.powi(-8);
    assert!((d - expect).abs() < 1e-15);
}

#[test]
fn per_term_scan_matches_independent_conversion() {
    for &(base, k) in &[(10, 1), (2, 1), (10, 2), (7, 3)] {
        let deltas = per_term_deltas(base, 1, 400, k).unwrap();
        let mut pair = FibPair::first();
        let mut expected = Vec::new();
        for n in 1..=400u64 {
            let digits = radix_digits(&pair.f_n, base);
            if digits.len() >= k {
                expected.push((n, digits.len() as u64, delta_oracle(&digits, base, k)));
            }
            pair.advance();
        }
        assert_eq!(deltas.len(), expected.len());
        for (got, (n, len, delta)) in deltas.iter().zip(expected) {
            assert_eq!((got.n, got.digit_length, got.k), (n, len, k));
            assert!((got.delta - delta).abs() < 1e-12, "base {base} n {n}");
        }
    }
}

#[test]
fn parallel_scan_equals_sequential() {
    let seq = per_term_deltas(10, 1, 3000, 1).unwrap();
    for parts in [1, 2, 3, 4] {
        assert_eq!(per_term_deltas_parallel(10, 3000, 1, parts).unwrap(), seq);
    }
}

#[test]
fn census_filters_and_counts() {
    let mk = |n, len, delta| TermDelta {
        n,
        digit_length: len,
        k: 1,
        delta,
    };
    let deltas = [mk(1, 1, 0.9), mk(50, 11, 0.06), mk(60, 13, 0.03), mk(70, 15, 0.001)];
    let rows = census(&deltas, &DEFAULT_EPSILONS, CENSUS_MIN_LENGTH).unwrap();
    let counts: Vec<u64> = rows.iter().map(|r| r.count).collect();
    assert_eq!(counts, vec![1, 2, 2, 2, 2]);
    assert!((rows[0].fraction - 1.0 / 3.0).abs() < 1e-15);

    let empty = census(&[], &DEFAULT_EPSILONS, 10).unwrap();
    assert!(empty.iter().all(|r| r.count == 0 && r.fraction == 0.0));
    assert!(census(&deltas, &[0.0], 10).is_err());
}

#[test]
fn census_at_desk_scale_is_monotone() {
    for base in [10, 2] {
        let deltas = per_term_deltas(base, 1, 2000, 1).unwrap();
        let rows = census(&deltas, &DEFAULT_EPSILONS, CENSUS_MIN_LENGTH).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].count >= pair[0].count);
        }
        let rows = census(&deltas, &[1.0], CENSUS_MIN_LENGTH).unwrap();
        assert_eq!(rows[0].count, 0);
    }
}

#[test]
fn baseline_constants() {
    let b10 = iid_max_dev_baseline(10_000, 10).unwrap();
    assert!((b10 - 5.58e-3).abs() < 1e-12);
    let b2 = iid_max_dev_baseline(10_000, 2).unwrap();
    assert!((b2 - (2.0 / std::f64::consts::PI).sqrt() / 200.0).abs() < 1e-15);
    assert!((b2 - 3.99e-3).abs() < 5e-6);
    assert!(iid_max_dev_baseline(0, 10).is_err());
}

#[test]
fn monte_carlo_agrees_with_closed_form_in_base_two() {
    let c = gaussian_max_constant(2, 200_000, 7);
    let exact = (2.0 / std::f64::consts::PI).sqrt() / 2.0;
    assert!((c - exact).abs() < 3e-3, "{c} vs {exact}");
}

#[test]
fn monte_carlo_baseline_is_deterministic() {
    let a = iid_max_dev_baseline(1000, 3).unwrap();
    let b = iid_max_dev_baseline(4000, 3).unwrap();
    assert!((a / b - 2.0).abs() < 1e-12);
    assert_eq!(a, gaussian_max_constant(3, MONTE_CARLO_TRIALS, MONTE_CARLO_SEED) / 1000f64.sqrt());
}

#[test]
fn ratio_summary_requires_long_terms() {
    let deltas = per_term_deltas(10, 1, 2000, 1).unwrap();
    let s = baseline_ratios(&deltas, 10, RATIO_MIN_LENGTH).unwrap();
    let long = deltas.iter().filter(|d| d.digit_length >= 200).count() as u64;
    assert_eq!(s.count, long);
    assert!(s.mean > 0.5 && s.mean < 1.5, "{s:?}");
    assert!(baseline_ratios(&deltas[..10], 10, RATIO_MIN_LENGTH).is_err());
}

#[test]
fn benford_values() {
    assert!((benford_freq(1, 10).unwrap() - 0.301_029_995_663_981_2).abs() < 1e-15);
    assert!((benford_freq(9, 10).unwrap() - 0.045_757_490_560_675_1).abs() < 1e-15);
    assert_eq!(benford_freq(1, 2).unwrap(), 1.0);
    assert!(benford_freq(0, 10).is_err());
    assert!(benford_freq(10, 10).is_err());
    for base in [2, 3, 10, 16, 256] {
        let total: f64 = (1..base).map(|d| benford_freq(d, base).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn trailing_distributions() {
    let t = trailing_digit_distribution(10).unwrap();
    assert_eq!(t.period, 60);
    for d in 0..10 {
        let want = if d % 2 == 0 { (1, 15) } else { (2, 15) };
        assert_eq!(t.fraction(d), want, "digit {d}");
    }
    let t = trailing_digit_distribution(2).unwrap();
    assert_eq!((t.fraction(0), t.fraction(1)), ((1, 3), (2, 3)));
    let t = trailing_digit_distribution(5).unwrap();
    assert!(t.counts.iter().all(|&c| c * 5 == t.period));
    for base in 2..=64 {
        let t = trailing_digit_distribution(base).unwrap();
        assert_eq!(t.counts.iter().sum::<u64>(), t.period);
        for d in 0..base as usize {
            assert_eq!(t.period % t.fraction(d).1, 0);
        }
    }
}

#[test]
fn leading_digits() {
    let one = leading_digit_empirical(1, 10).unwrap();
    assert_eq!(one[1], 1.0);
    let bin = leading_digit_empirical(10_000, 2).unwrap();
    assert_eq!(bin, vec![0.0, 1.0]);
    let dec = leading_digit_empirical(10_000, 10).unwrap();
    assert!((dec[1] - benford_freq(1, 10).unwrap()).abs() < 2e-3);
    assert_eq!(dec[0], 0.0);
}

#[test]
fn binary_terms_lead_with_one_and_trail_periodically() {
    let mut walk = TermDigits::new(b(2), 1).unwrap();
    while walk.index() <= 10_000 {
        let n = walk.index();
        let digits = walk.digits();
        assert_eq!(digits[0], 1);
        let want = if n % 3 == 0 { 0 } else { 1 };
        assert_eq!(*digits.last().unwrap(), want, "n = {n}");
        walk.advance();
    }
}

proptest! {
    #[test]
    fn delta_matches_oracle(
        base in 2u32..12,
        k in 1usize..4,
        raw in proptest::collection::vec(any::<u8>(), 1..200),
    ) {
        let digits: Vec<u8> = raw.iter().map(|d| d % base as u8).collect();
        prop_assume!(digits.len() >= k);
        let got = block_delta(&digits, b(base), k).unwrap();
        prop_assert!((got - delta_oracle(&digits, base, k)).abs() < 1e-12);
        prop_assert!(got >= 0.0 && got <= 1.0 - (base as f64).powi(-(k as i32)) + 1e-15);
    }

    #[test]
    fn census_is_monotone(deltas in proptest::collection::vec((1u64..50, 0.0f64..1.0), 0..100)) {
        let deltas: Vec<TermDelta> = deltas
            .into_iter()
            .enumerate()
            .map(|(i, (len, delta))| TermDelta { n: i as u64 + 1, digit_length: len, k: 1, delta })
            .collect();
        let mut eps = DEFAULT_EPSILONS.to_vec();
        eps.extend([0.5, 0.2, 0.1]);
        eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let rows = census(&deltas, &eps, 10).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[1].count >= w[0].count);
        }
    }
}
