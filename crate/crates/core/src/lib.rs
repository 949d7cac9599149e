//! Streaming digit statistics for the concatenation `0.F_1 F_2 F_3 ...` of
//! Fibonacci numbers in an arbitrary base, together with the per-term
//! diagnostics, structural baselines and arithmetic censuses that go with it.

pub mod constructions;
pub mod diagnostics;
pub mod error;
pub mod sequence;
pub mod stats;
pub mod stream;

pub use constructions::{
    counterexample_stats, fib_sigma_census, reachability_phi_lambda, row_sequence,
    sigma_range_contains, CounterexampleStats, SigmaWitness,
};
pub use diagnostics::{
    benford_freq, census, iid_max_dev_baseline, leading_digit_empirical, term_delta,
    trailing_digit_distribution, CensusRow, TermDelta,
};
pub use error::{Error, Result};
pub use sequence::{
    counting_function, digit_length_predicted, digit_string, fib_pair, fib_stream, Base, BigNat,
    pisano_period, DigitString, FibPair,
};
pub use stats::{
    bonferroni_z, category_reports, chi_squared, chi_squared_pvalue, good_serial, loglog_regression, z_scores,
    CategoryReport, RegressionFit, StatReport,
};
pub use stream::{
    stream_analyze, stream_partitioned, stream_with_progress, CheckpointPolicy, CounterBank, FibCursor, StreamConfig,
};
