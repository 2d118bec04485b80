//! Exact optimal and (n-1)-lookahead revenues on a truncated hard instance.
//!
//! cargo run --release --example lp_optimum -- [n] [d] [epsilon] [K]

use std::time::Instant;

use shrinkage_lab::distributions::{build_hard_instance, BalancedSpec};
use shrinkage_lab::optimal::{k_lookahead_revenue, optimal_mechanism, WinnerRestriction, DEFAULT_LP_CAP};
use shrinkage_lab::DEFAULT_Z;

fn main() -> shrinkage_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = arg(0, "3").parse().expect("n");
    let d: usize = arg(1, "8").parse().expect("d");
    let eps: f64 = arg(2, "0.01").parse().expect("epsilon");
    let k: usize = arg(3, "3").parse().expect("K");

    let inst = build_hard_instance(n, BalancedSpec::new(eps, d, k)?, DEFAULT_Z)?;
    println!("n={n} d={d} epsilon={eps} K={k} trunc_error={:.6}", inst.trunc_error);

    let t = Instant::now();
    let shrunk = optimal_mechanism(&inst.joint_shrunk, WinnerRestriction::all(), DEFAULT_LP_CAP)?;
    println!(
        "OPT(H_(n-1)) = {:.9}  ({} pivots, {:.2?})",
        shrunk.revenue,
        shrunk.solution.iterations,
        t.elapsed()
    );
    let t = Instant::now();
    let full = optimal_mechanism(&inst.joint_n, WinnerRestriction::all(), DEFAULT_LP_CAP)?;
    println!(
        "OPT(H_n)     = {:.9}  ({} pivots, {:.2?})",
        full.revenue,
        full.solution.iterations,
        t.elapsed()
    );
    let t = Instant::now();
    let la = k_lookahead_revenue(&inst.joint_n, n - 1)?;
    println!("LA_(n-1)(H_n) = {la:.9}  ({:.2?})", t.elapsed());
    println!("z = {DEFAULT_Z:.9}");
    Ok(())
}
