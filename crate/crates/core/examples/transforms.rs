//! Runs both mechanism transformations on random monotone mechanisms and
//! on the LP optimum of the shrunk market.
//!
//! cargo run --release --example transforms -- [count] [seed]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shrinkage_lab::distributions::{build_hard_instance, BalancedSpec};
use shrinkage_lab::mechanisms::{
    expected_revenue, high_priced_transform, random_monotone_mechanism, shift_transform_with_report, Mechanism,
};
use shrinkage_lab::optimal::{optimal_mechanism, WinnerRestriction, DEFAULT_LP_CAP};
use shrinkage_lab::DEFAULT_Z;

fn main() -> shrinkage_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let count: usize = args.first().map_or(5, |s| s.parse().expect("count"));
    let seed: u64 = args.get(1).map_or(1, |s| s.parse().expect("seed"));
    let inst = build_hard_instance(3, BalancedSpec::new(0.01, 8, 3)?, DEFAULT_Z)?;
    let dist = &inst.joint_shrunk;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let run = |label: String, mech: &Mechanism| -> shrinkage_lab::Result<()> {
        let r0 = expected_revenue(mech, dist)?;
        let hp = high_priced_transform(mech, &inst)?;
        let r1 = expected_revenue(&hp, dist)?;
        let (out, rep) = shift_transform_with_report(&hp, &inst)?;
        let r2 = expected_revenue(&out, dist)?;
        println!(
            "{label:>8}: {r0:.6} -> high-priced {r1:.6} -> shift {r2:.6}  fixes={} boundary loss {:.6}, recovered {:.6}",
            rep.fixes.len(),
            rep.boundary_revenue_loss,
            rep.boundary_recovered
        );
        Ok(())
    };

    for i in 0..count {
        let mech = random_monotone_mechanism(dist.grids(), &mut rng)?;
        run(format!("random {i}"), &mech)?;
    }
    let opt = optimal_mechanism(dist, WinnerRestriction::all(), DEFAULT_LP_CAP)?;
    run("LP opt".into(), &opt.mechanism)?;
    println!("z = {DEFAULT_Z:.6}");
    Ok(())
}
