//! Closed forms, the gap sweep, identity suites and Monte Carlo checks.

mod closed_form;
mod lemmas;
mod monte_carlo;
mod sweep;

pub use closed_form::{
    harmonic_bounds, harmonic_sum, prob_not_top, prob_not_top_exact, ratio_bound, ratio_exact,
};
pub use lemmas::{
    lemma_checks_exact, lemma_checks_float, lemma_suite, rational_test_values, LemmaCheck,
    LemmaSummary, LEMMA_ITEMS,
};
pub use monte_carlo::{monte_carlo_revenue, sample_h_histogram, McEstimate, RngSeed};
pub use sweep::{
    csv_row, fmt_sig, gap_report, gap_sweep, gap_sweep_with, write_csv, GapReport, LpCrossCheck,
    LpCrossCheckConfig, CSV_HEADER,
};
