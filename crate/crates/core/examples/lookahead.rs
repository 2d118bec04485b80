//! Lookahead auctions against the optimum on small random correlated
//! distributions.
//!
//! cargo run --release --example lookahead -- [count] [seed]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shrinkage_lab::distributions::JointDistribution;
use shrinkage_lab::mechanisms::{expected_revenue, lookahead_mechanism};
use shrinkage_lab::optimal::{brute_force_oracle, k_lookahead_revenue, optimal_revenue};

fn main() -> shrinkage_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let count: usize = args.first().map_or(10, |s| s.parse().expect("count"));
    let seed: u64 = args.get(1).map_or(0, |s| s.parse().expect("seed"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    println!("{:>3} {:>9} {:>9} {:>9} {:>9} {:>9}", "n", "OPT", "det", "LA", "LA_1", "LA_2");
    for _ in 0..count {
        let n = rng.random_range(2..=3);
        let grids: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut v: Vec<f64> = (0..3).map(|_| rng.random_range(1..20) as f64 / 2.0).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            })
            .collect();
        let size: usize = grids.iter().map(Vec::len).product();
        let raw: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let masses: Vec<f64> = raw.iter().map(|m| m / total).collect();
        let dist = JointDistribution::from_dense(grids, &masses)?;

        let opt = optimal_revenue(&dist)?;
        let det = brute_force_oracle(&dist)?;
        let la = expected_revenue(&lookahead_mechanism(&dist), &dist)?;
        let la1 = k_lookahead_revenue(&dist, 1)?;
        let la2 = k_lookahead_revenue(&dist, 2)?;
        println!("{n:>3} {opt:>9.5} {det:>9.5} {la:>9.5} {la1:>9.5} {la2:>9.5}");
    }
    Ok(())
}
