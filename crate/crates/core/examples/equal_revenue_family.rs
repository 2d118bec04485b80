//! The equal-revenue family offered to bidder 1: every support price
//! earns exactly `z`.
//!
//! cargo run --example equal_revenue_family -- [d]

use shrinkage_lab::analysis::lemma_suite;
use shrinkage_lab::distributions::{equal_revenue_family, h_marginal};
use shrinkage_lab::DEFAULT_Z;

fn main() -> shrinkage_lab::Result<()> {
    let d: usize = std::env::args().nth(1).map_or(8, |s| s.parse().expect("d"));
    let fam = equal_revenue_family(d, DEFAULT_Z)?;
    let h = h_marginal(d, fam.m, 1)?;
    println!("d={d} m={}", fam.m);
    println!("{:>3} {:>12} {:>12} {:>10}", "y", "t_y", "Pr[h=y]", "revenue");
    for y in 0..fam.m {
        let revenues: Vec<f64> = (0..=y).map(|j| fam.t[j] * fam.tail_prob(y, j)).collect();
        let spread = revenues.iter().fold(0.0f64, |a, r| a.max((r - DEFAULT_Z).abs()));
        println!("{y:>3} {:>12.9} {:>12.9} {:>10.3e}", fam.t[y], h[y], spread);
    }
    let rows = lemma_suite([d], DEFAULT_Z, 1e-12)?;
    for r in rows {
        println!("identity {}: {}", r.item, if r.passed { "holds" } else { "FAILS" });
    }
    Ok(())
}
