//! One report builder per subcommand.

use std::fs;
use std::time::Instant;

use fibnormal_core::constructions::{
    counterexample_stats, fib_sigma_census, reachability_phi_lambda, sigma_range_contains,
};
use fibnormal_core::diagnostics::{
    baseline_ratios, benford_freq, census, iid_max_dev_baseline, leading_digit_empirical,
    per_term_deltas, per_term_deltas_parallel, trailing_digit_distribution,
};
use fibnormal_core::stats::{category_reports, loglog_regression, z_scores, StatReport};
use fibnormal_core::stream::{block_label, Category};
use fibnormal_core::{
    stream_partitioned, stream_with_progress, BigNat, CheckpointPolicy, CounterBank, Error,
    StreamConfig,
};
use serde_json::json;

use crate::report::{freq, opt, pval, sci, signed_sci, stat, Report, Table};
use crate::{
    AnalyzeArgs, BaselinesArgs, CounterexampleArgs, Failure, PerTermArgs, ReachArgs, RegressArgs,
    SigmaCensusArgs,
};

/// Streams the configured run, reporting throughput on standard error.
pub fn run_stream(a: &AnalyzeArgs) -> Result<CounterBank, Failure> {
    let config = StreamConfig::new(a.base, a.k_max, a.positional)?;
    config.check_terms(a.terms)?;
    if a.partitions == 0 {
        return Err(Failure::usage("--partitions must be at least 1"));
    }
    let start = Instant::now();
    let bank = if a.partitions > 1 {
        if a.checkpoint.is_some() {
            return Err(Failure::usage(
                "--checkpoint applies to sequential runs; drop --partitions",
            ));
        }
        stream_partitioned(config, a.terms, a.partitions)?
    } else {
        let policy = CheckpointPolicy {
            path: a.checkpoint.clone(),
            every_terms: a.checkpoint_every,
            resume: !a.fresh,
        };
        let quiet = a.quiet;
        let mut first: Option<u64> = None;
        stream_with_progress(config, a.terms, &policy, |bank| {
            if quiet {
                return;
            }
            // digits counted in this process, excluding a resumed prefix
            let base_digits = *first.get_or_insert(0);
            let secs = start.elapsed().as_secs_f64().max(1e-9);
            eprint!(
                "\rterm {}/{}  {} digits  {:.1} M digits/s   ",
                bank.last_term(),
                a.terms,
                bank.total_digits(),
                (bank.total_digits() - base_digits) as f64 / secs / 1e6
            );
        })?
    };
    if !a.quiet {
        let secs = start.elapsed().as_secs_f64();
        eprintln!(
            "\rstreamed {} digits in {:.2} s ({:.1} M digits/s)        ",
            bank.total_digits(),
            secs,
            bank.total_digits() as f64 / secs.max(1e-9) / 1e6
        );
    }
    Ok(bank)
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Report, Failure> {
    let bank = run_stream(a)?;
    analyze_report(&bank, a.terms)
}

pub fn analyze_report(bank: &CounterBank, terms: u64) -> Result<Report, Failure> {
    let base = bank.base();
    let b = base.get();
    let total = bank.total_digits();
    let single = bank.single();
    let z = z_scores(single, total, b);

    let mut digits_json = Vec::new();
    let mut digit_table = Table::new(
        "Single-digit frequencies",
        vec!["digit", "count", "frequency", "deviation", "z-score"],
    );
    for (d, &count) in single.iter().enumerate() {
        let f = count as f64 / total as f64;
        let dev = f - 1.0 / b as f64;
        let label = block_label(d, 1, base);
        digit_table.push(vec![
            label.clone(),
            count.to_string(),
            freq(f),
            signed_sci(dev),
            format!("{:+.3}", z[d]),
        ]);
        digits_json.push(json!({
            "digit": label,
            "count": count,
            "frequency": f,
            "deviation": dev,
            "z_score": z[d],
        }));
    }

    let stats = StatReport::for_bank(bank)?;
    let mut block_table = Table::new(
        "Block frequency tests",
        vec![
            "k", "blocks", "max |dev|", "block", "chi2", "df", "p", "Good dchi2", "df", "p",
        ],
    );
    for s in &stats {
        block_table.push(vec![
            s.k.to_string(),
            s.total.to_string(),
            sci(s.max_abs_deviation),
            s.argmax_block.clone(),
            stat(s.naive_chi2),
            s.naive_df.to_string(),
            pval(s.p_naive),
            opt(s.good_delta_chi2, stat),
            s.good_df.map_or("-".into(), |d| d.to_string()),
            opt(s.p_good, pval),
        ]);
    }

    let mut report_body = json!({
        "base": b,
        "terms": terms,
        "k_max": bank.k_max(),
        "digits": total,
        "positional": bank.positional(1).is_some(),
        "single_digits": digits_json,
        "blocks": stats,
    });
    let mut tables = vec![digit_table, block_table];

    let categories = category_reports(bank);
    if !categories.is_empty() {
        let mut totals = Table::new(
            "Blocks by position",
            vec!["k", "leading", "trailing", "middle", "boundary"],
        );
        let mut decomposition = Table::new(
            "Positional decomposition (Good serial statistic)",
            vec!["k", "middle dchi2", "df", "middle p", "boundary dchi2", "df", "boundary p"],
        );
        for k in 1..=bank.k_max() {
            let of = |cat| categories.iter().find(|r| r.k == k && r.category == cat).unwrap();
            totals.push(
                std::iter::once(k.to_string())
                    .chain(Category::ALL.iter().map(|&c| of(c).total.to_string()))
                    .collect(),
            );
            if k >= 2 {
                let (m, bd) = (of(Category::Middle), of(Category::Boundary));
                decomposition.push(vec![
                    k.to_string(),
                    opt(m.good_delta_chi2, stat),
                    m.good_df.map_or("-".into(), |d| d.to_string()),
                    opt(m.p_good, pval),
                    opt(bd.good_delta_chi2, stat),
                    bd.good_df.map_or("-".into(), |d| d.to_string()),
                    opt(bd.p_good, pval),
                ]);
            }
        }
        tables.push(totals);
        if bank.k_max() >= 2 {
            tables.push(decomposition);
        }
        report_body["positional_tests"] = json!(categories);
    }

    let mut report = Report::new("analyze", report_body);
    report.notes.push(format!("base {b}, N = {terms}, D(N) = {total}"));
    report.tables = tables;
    Ok(report)
}

pub fn per_term(a: &PerTermArgs) -> Result<Report, Failure> {
    if a.terms == 0 {
        return Err(Failure::usage("--terms must be at least 1"));
    }
    let deltas = if a.partitions > 1 {
        per_term_deltas_parallel(a.base, a.terms, a.k, a.partitions)?
    } else {
        per_term_deltas(a.base, 1, a.terms, a.k)?
    };
    let rows = census(&deltas, &a.epsilons, a.min_length)?;
    let qualifying = deltas.iter().filter(|d| d.digit_length >= a.min_length).count();
    let ratio = if a.k == 1 {
        match baseline_ratios(&deltas, a.base, a.ratio_min_length) {
            Ok(r) => Some(r),
            Err(Error::InvalidInput(_)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    let mut table = Table::new("Per-term census", vec!["epsilon", "count", "fraction"]);
    for r in &rows {
        table.push(vec![format!("{}", r.epsilon), r.count.to_string(), format!("{:.6}", r.fraction)]);
    }
    let mut report = Report::new(
        "per-term",
        json!({
            "base": a.base,
            "terms": a.terms,
            "k": a.k,
            "min_length": a.min_length,
            "qualifying_terms": qualifying,
            "rows": rows,
            "ratio_min_length": a.ratio_min_length,
            "baseline_ratio": ratio,
        }),
    );
    report.notes.push(format!(
        "base {}, N = {}, k = {}: {qualifying} terms with at least {} digits",
        a.base, a.terms, a.k, a.min_length
    ));
    for r in &rows {
        report.notes.push(format!(
            "  delta > {}: {} ({:.2}%)",
            r.epsilon,
            r.count,
            100.0 * r.fraction
        ));
    }
    if let Some(r) = ratio {
        report.notes.push(format!(
            "observed / iid baseline over {} terms with >= {} digits: {:.2} +- {:.2}",
            r.count, a.ratio_min_length, r.mean, r.std_dev
        ));
    }
    report.tables.push(table);
    Ok(report)
}

fn parse_point(text: &str, sep: char) -> Option<(f64, f64)> {
    let (d, dev) = text.split_once(sep)?;
    Some((d.trim().parse().ok()?, dev.trim().parse().ok()?))
}

pub fn regress(a: &RegressArgs) -> Result<Report, Failure> {
    let mut points = Vec::new();
    if let Some(path) = &a.points {
        let text = fs::read_to_string(path).map_err(|e| Failure::from(Error::io(path, e)))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match parse_point(line, ',') {
                Some(p) => points.push(p),
                None if i == 0 => {} // header
                None => {
                    return Err(Failure::usage(format!(
                        "{}:{}: expected `D,dev`, got {line:?}",
                        path.display(),
                        i + 1
                    )))
                }
            }
        }
    }
    for p in &a.point {
        points.push(
            parse_point(p, ':')
                .ok_or_else(|| Failure::usage(format!("expected `D:dev`, got {p:?}")))?,
        );
    }
    let fit = loglog_regression(&points)?;
    let mut table = Table::new("Log-log regression", vec!["coefficient", "exponent", "R^2"]);
    table.push(vec![
        format!("{:.4}", fit.coefficient),
        format!("{:.4}", fit.exponent),
        format!("{:.4}", fit.r_squared),
    ]);
    let mut report = Report::new("regress", json!({ "points": points, "fit": fit }));
    report.notes.push(format!(
        "max|dev| ~ {:.3} * D^{:.4}  (R^2 = {:.4}, {} points)",
        fit.coefficient,
        fit.exponent,
        fit.r_squared,
        points.len()
    ));
    report.tables.push(table);
    Ok(report)
}

pub fn counterexample(a: &CounterexampleArgs) -> Result<Report, Failure> {
    let s = counterexample_stats(a.columns)?;
    let bound = 2.0 / (a.columns as f64 + 1.0);
    let mut table = Table::new(
        "Counterexample digit and diagonal 2-block frequencies",
        vec!["digit", "frequency", "diagonal mass"],
    );
    for d in 0..10 {
        table.push(vec![d.to_string(), freq(s.single_freq(d)), freq(s.diagonal_mass(d))]);
    }
    let mut report = Report::new(
        "counterexample",
        json!({
            "columns": s.columns,
            "length": s.length,
            "single_frequencies": (0..10).map(|d| s.single_freq(d)).collect::<Vec<_>>(),
            "diagonal_masses": (0..10).map(|d| s.diagonal_mass(d)).collect::<Vec<_>>(),
            "off_diagonal_total": s.off_diagonal_total(),
            "max_single_deviation": s.max_single_deviation(),
            "max_diagonal_deviation": s.max_diagonal_deviation(),
            "bound": bound,
        }),
    );
    report.notes.push(format!("N = {}, L_N = {}", s.columns, s.length));
    report.notes.push(format!(
        "max single deviation {}, max diagonal deviation {}, bound 2/(N+1) = {}",
        sci(s.max_single_deviation()),
        sci(s.max_diagonal_deviation()),
        sci(bound)
    ));
    report.notes.push(format!(
        "off-diagonal 2-blocks: {} (at most N - 1 = {})",
        s.off_diagonal_total(),
        s.columns - 1
    ));
    report.tables.push(table);
    Ok(report)
}

pub fn sigma_census(a: &SigmaCensusArgs) -> Result<Report, Failure> {
    let rows = fib_sigma_census(a.max_index, &BigNat::from(a.cap))?;
    let mut table = Table::new(
        "Fibonacci numbers in the range of sigma",
        vec!["n", "F_n", "in_range", "witness", "multiple_of_6", "exception"],
    );
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            r.sigma.value.to_string(),
            r.sigma.in_range.to_string(),
            r.sigma.witness.map_or(String::new(), |m| m.to_string()),
            r.multiple_of_6.to_string(),
            r.exception.to_string(),
        ]);
    }
    let hits = rows.iter().filter(|r| r.sigma.in_range).count();
    let exceptions: Vec<u64> = rows.iter().filter(|r| r.exception).map(|r| r.n).collect();
    let mut report = Report::new(
        "sigma-census",
        json!({ "max_index": a.max_index, "cap": a.cap, "rows": rows }),
    );
    report.notes.push(format!(
        "{hits} of {} terms are values of sigma; exceptions to 6 | F_n beyond n = 6: {exceptions:?}",
        rows.len()
    ));
    report.tables.push(table);
    Ok(report)
}

pub fn reach(a: &ReachArgs) -> Result<Report, Failure> {
    let v = BigNat::from(a.value);
    let s = sigma_range_contains(&v)?;
    let r = reachability_phi_lambda(&v)?;
    let show = |w: Option<String>| w.unwrap_or_else(|| "-".into());
    let mut table = Table::new(
        format!("Preimages of {}", a.value),
        vec!["function", "in_range", "witness"],
    );
    table.push(vec!["sigma".into(), s.in_range.to_string(), show(s.witness.map(|m| m.to_string()))]);
    table.push(vec!["phi".into(), r.phi.is_some().to_string(), show(r.phi.map(|m| m.to_string()))]);
    table.push(vec![
        "lambda".into(),
        r.lambda.is_some().to_string(),
        show(r.lambda.as_ref().map(|m| m.to_string())),
    ]);
    let mut report = Report::new("reach", json!({ "value": a.value, "sigma": s, "phi_lambda": r }));
    report.tables.push(table);
    Ok(report)
}

pub fn baselines(a: &BaselinesArgs) -> Result<Report, Failure> {
    let b = a.base;
    let empirical = a.terms.map(|n| leading_digit_empirical(n, b)).transpose()?;
    let trailing = trailing_digit_distribution(b)?;
    let base = fibnormal_core::Base::new(b)?;

    let mut header = vec!["digit", "benford"];
    if empirical.is_some() {
        header.push("empirical");
    }
    let mut lead = Table::new("Leading digits", header);
    let mut benford = Vec::new();
    for d in 1..b {
        let p = benford_freq(d, b)?;
        benford.push(p);
        let mut row = vec![block_label(d as usize, 1, base), freq(p)];
        if let Some(e) = &empirical {
            row.push(freq(e[d as usize]));
        }
        lead.push(row);
    }
    let mut trail = Table::new(
        format!("Trailing digits over one Pisano period ({})", trailing.period),
        vec!["digit", "count", "fraction", "frequency"],
    );
    let mut fractions = Vec::new();
    for d in 0..b as usize {
        let (num, den) = trailing.fraction(d);
        fractions.push(format!("{num}/{den}"));
        trail.push(vec![
            block_label(d, 1, base),
            trailing.counts[d].to_string(),
            format!("{num}/{den}"),
            freq(trailing.frequency(d)),
        ]);
    }
    let k_ref = 10_000;
    let iid = iid_max_dev_baseline(k_ref, b)?;
    let mut report = Report::new(
        "baselines",
        json!({
            "base": b,
            "benford": benford,
            "leading_empirical": empirical,
            "leading_terms": a.terms,
            "pisano_period": trailing.period,
            "trailing_counts": trailing.counts,
            "trailing_fractions": fractions,
            "iid_max_dev_at_10000_digits": iid,
        }),
    );
    report.notes.push(format!(
        "base {b}: Pisano period {}, iid max deviation for K = {k_ref} digits: {}",
        trailing.period,
        sci(iid)
    ));
    report.tables.push(lead);
    report.tables.push(trail);
    Ok(report)
}
