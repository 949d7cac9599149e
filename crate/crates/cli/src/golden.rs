//! Desk-scale golden checks: convergence-table rows for N <= 10,000 in
//! bases 10 and 2, plus fixed statistics, compared at printed precision.

use fibnormal_core::stats::{bonferroni_z, chi_squared_pvalue, good_serial, StatReport};
use fibnormal_core::{stream_analyze, CheckpointPolicy, StreamConfig};

use crate::report::{pval, sci, stat};

/// `(N, D, max|dev|, chi2, p)` as printed.
const BASE10_ROWS: [(u64, u64, &str, &str, &str); 4] = [
    (10, 14, "1.86e-1", "14.57", "0.103"),
    (100, 1_071, "2.98e-2", "15.38", "0.081"),
    (1_000, 104_750, "2.11e-3", "10.50", "0.311"),
    (10_000, 10_451_934, "2.87e-4", "20.97", "0.013"),
];
const BASE2_ROWS: [(u64, u64, &str, &str, &str); 4] = [
    (10, 34, "1.18e-1", "1.88", "0.170"),
    (100, 3_442, "4.07e-3", "0.23", "0.633"),
    (1_000, 346_809, "1.35e-3", "2.53", "0.112"),
    (10_000, 34_708_959, "4.42e-5", "0.27", "0.602"),
];

fn check(name: String, ok: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn table_row(base: u32, row: (u64, u64, &str, &str, &str)) -> bool {
    let (n, d, dev, chi2, p) = row;
    let got = StreamConfig::new(base, 1, false)
        .and_then(|cfg| stream_analyze(cfg, n, &CheckpointPolicy::none()))
        .and_then(|bank| StatReport::for_bank(&bank));
    let name = format!("base {base} N = {n}");
    match got {
        Ok(reports) => {
            let r = &reports[0];
            let seen = (r.digits, sci(r.max_abs_deviation), stat(r.naive_chi2), pval(r.p_naive));
            let ok = seen == (d, dev.to_string(), chi2.to_string(), p.to_string());
            check(
                name,
                ok,
                format!(
                    "D = {} max|dev| = {} chi2 = {} p = {} (expected {d} {dev} {chi2} {p})",
                    seen.0, seen.1, seen.2, seen.3
                ),
            )
        }
        Err(e) => check(name, false, e.to_string()),
    }
}

/// Prints one line per check; true when all pass.
pub fn run() -> bool {
    let mut all = true;
    for row in BASE10_ROWS {
        all &= table_row(10, row);
    }
    for row in BASE2_ROWS {
        all &= table_row(2, row);
    }
    for (x, df, want) in [(7.48, 9, "0.587"), (14.57, 9, "0.103")] {
        let p = pval(chi_squared_pvalue(x, df));
        all &= check(format!("p(chi2 = {x}, df = {df})"), p == want, format!("{p} (expected {want})"));
    }
    let z = bonferroni_z(10_000, 0.05).map(|z| format!("{z:.3}")).unwrap_or_default();
    all &= check("Bonferroni |z| for 10,000 tests".into(), z == "4.565", format!("{z} (expected 4.565)"));
    let dfs: Vec<u64> = [(10, 2), (10, 3), (10, 4), (2, 2), (2, 3), (2, 4)]
        .iter()
        .map(|&(b, k)| good_serial(0.0, 0.0, b, k).map(|(_, df)| df).unwrap_or(0))
        .collect();
    all &= check(
        "Good serial degrees of freedom".into(),
        dfs == [90, 900, 9000, 2, 4, 8],
        format!("{dfs:?}"),
    );
    all
}
