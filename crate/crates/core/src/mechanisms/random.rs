use rand::Rng;

use super::{myerson_payments, Mechanism};
use crate::distributions::ProductGrid;
use crate::error::Result;

/// A random feasible monotone mechanism with threshold payments.
///
/// Each bidder gets a random share of the item; along every own-value axis
/// the share is scaled by a random nondecreasing step function, either a
/// single threshold or a random staircase.
pub fn random_monotone_mechanism<R: Rng + ?Sized>(grids: &[Vec<f64>], rng: &mut R) -> Result<Mechanism> {
    let dims: Vec<usize> = grids.iter().map(Vec::len).collect();
    let grid = ProductGrid::new(&dims);
    let n = grids.len();
    let mut weights: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
        .collect();
    let total: f64 = weights.iter().sum::<f64>() + rng.random::<f64>() * 0.5;
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
    let mut alloc = vec![vec![0.0; grid.len()]; n];
    for (i, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let len = dims[i];
        for base in grid.axis_bases(i) {
            let steps: Vec<f64> = if rng.random_bool(0.5) {
                let tau = rng.random_range(0..=len);
                (0..len).map(|k| if k >= tau { 1.0 } else { 0.0 }).collect()
            } else {
                let mut v: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            for (f, s) in grid.axis(base, i).zip(steps) {
                alloc[i][f] = w * s;
            }
        }
    }
    let pay = myerson_payments(&alloc, grids)?;
    Mechanism::from_tables(grids, alloc, pay)
}
