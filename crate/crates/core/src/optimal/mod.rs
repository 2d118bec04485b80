//! Exact revenue optimisation over finite joint distributions.

mod brute;
mod build;
mod lp;
mod simplex;

pub use brute::{brute_force_oracle, BRUTE_MAX_PROFILES, BRUTE_MAX_VALUES};
pub use build::{
    build_allocation_lp, build_lp, build_lp_with, k_lookahead_revenue, mechanism_from_solution, optimal_mechanism,
    optimal_revenue, IcScope, LpLayout, OptimalMechanism, WinnerMode, WinnerRestriction,
    DEFAULT_LP_CAP,
};
pub use lp::{LinearProgram, LpConstraint, Relation};
pub use simplex::{simplex_solve, LpSolution, LpStatus};
