//! The shrunk-to-full revenue ratio as `d` grows, written as CSV, with an
//! optional LP cross-check on the smallest `d`.
//!
//! cargo run --release --example gap_sweep -- [--lp]

use shrinkage_lab::analysis::{gap_sweep, write_csv};
use shrinkage_lab::{DEFAULT_Z, LIMIT_RATIO};

fn main() -> shrinkage_lab::Result<()> {
    let lp = std::env::args().any(|a| a == "--lp");
    let ds: Vec<u64> = (3..=20).map(|p| 1u64 << p).collect();
    let rows = gap_sweep(&ds, &[1e-6, 0.01], DEFAULT_Z, false)?;
    write_csv(&rows, std::io::stdout().lock())?;
    println!("# limit e/(e+1) = {LIMIT_RATIO:.9}");
    if lp {
        for r in gap_sweep(&[8], &[0.01], DEFAULT_Z, true)? {
            let c = r.lp.expect("cross-check requested");
            println!(
                "# d=8 eps=0.01 K={}: LP ratio {:.6}, closed form {:.6}, exact h law {:.6}, trunc_error {:.4}",
                r.k.unwrap_or(0),
                c.lp_ratio,
                r.ratio,
                r.rev_shrunk / r.rev_full_explicit,
                c.trunc_error
            );
        }
    }
    Ok(())
}
