//! Monte Carlo revenue of the full-market explicit mechanism, sampling the
//! middle bidders without truncation.
//!
//! cargo run --release --example monte_carlo -- [samples] [seed]

use shrinkage_lab::analysis::{gap_report, monte_carlo_revenue, RngSeed};
use shrinkage_lab::distributions::{build_hard_instance, BalancedSpec};
use shrinkage_lab::mechanisms::{expected_revenue, explicit_full_mechanism};
use shrinkage_lab::DEFAULT_Z;

fn main() -> shrinkage_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let samples: u64 = args.first().map_or(1_000_000, |s| s.parse().expect("samples"));
    let seed: u64 = args.get(1).map_or(42, |s| s.parse().expect("seed"));
    let inst = build_hard_instance(3, BalancedSpec::new(0.01, 8, 3)?, DEFAULT_Z)?;
    let mech = explicit_full_mechanism(&inst);

    let est = monte_carlo_revenue(&mech, &inst, samples, RngSeed::new(seed))?;
    let exact = gap_report(8, 0.01, DEFAULT_Z)?.rev_full_explicit;
    println!("estimate  {:.6} +- {:.6} ({samples} samples)", est.estimate, est.std_error);
    println!("analytic  {exact:.6}");
    println!("truncated {:.6}", expected_revenue(&mech, &inst.joint_n)?);
    Ok(())
}
