//! Builds a truncated hard instance and prints its shape, then writes it
//! together with both explicit mechanisms to a directory.
//!
//! cargo run --release --example build_instance -- [out_dir]

use shrinkage_lab::distributions::{build_hard_instance, BalancedSpec};
use shrinkage_lab::mechanisms::{
    expected_revenue, explicit_full_mechanism, explicit_shrunken_mechanism, validate_mechanism,
};
use shrinkage_lab::DEFAULT_Z;

fn main() -> shrinkage_lab::Result<()> {
    let out = std::env::args().nth(1);
    let inst = build_hard_instance(3, BalancedSpec::new(0.01, 8, 3)?, DEFAULT_Z)?;
    println!(
        "n={} m={} support profiles={} trunc_error={:.6}",
        inst.n,
        inst.family.m,
        inst.joint_n.pmf().len(),
        inst.trunc_error
    );
    println!("offers t = {:?}", inst.family.t);

    let shrunk = explicit_shrunken_mechanism(&inst);
    let full = explicit_full_mechanism(&inst);
    for (name, mech, dist) in [("shrunk", &shrunk, &inst.joint_shrunk), ("full", &full, &inst.joint_n)] {
        let valid = validate_mechanism(mech, dist)?.is_valid();
        println!("{name:>6}: revenue {:.9}, valid {valid}", expected_revenue(mech, dist)?);
    }

    if let Some(dir) = out {
        let dir = std::path::Path::new(&dir);
        std::fs::create_dir_all(dir)?;
        inst.save(dir.join("instance.json"))?;
        shrunk.save(dir.join("explicit_shrunk.json"))?;
        full.save(dir.join("explicit_full.json"))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
