use crate::distributions::JointDistribution;
use crate::error::{Error, Result};

pub const BRUTE_MAX_PROFILES: usize = 64;
pub const BRUTE_MAX_VALUES: usize = 3;

/// Best expected revenue over deterministic monotone mechanisms with
/// threshold payments, found by exhaustive branch and bound.
pub fn brute_force_oracle(dist: &JointDistribution) -> Result<f64> {
    let size = dist.product_len().unwrap_or(usize::MAX);
    if size > BRUTE_MAX_PROFILES {
        return Err(Error::SizeCap {
            what: "oracle grid profiles",
            size,
            cap: BRUTE_MAX_PROFILES,
        });
    }
    if let Some(g) = dist.grids().iter().find(|g| g.len() > BRUTE_MAX_VALUES) {
        return Err(Error::SizeCap {
            what: "oracle values per bidder",
            size: g.len(),
            cap: BRUTE_MAX_VALUES,
        });
    }
    let grid = dist.product_grid();
    let masses = dist.dense_masses();
    let grids = dist.grids();
    let n = grid.n_bidders();
    let values: Vec<Vec<f64>> = (0..grid.len()).map(|f| grid.value_profile(grids, f)).collect();
    let mut optimistic = vec![0.0; grid.len() + 1];
    for f in (0..grid.len()).rev() {
        let top = values[f].iter().cloned().fold(0.0, f64::max);
        optimistic[f] = optimistic[f + 1] + masses[f] * top;
    }

    struct Search<'a> {
        grid: &'a crate::distributions::ProductGrid,
        grids: &'a [Vec<f64>],
        masses: &'a [f64],
        values: &'a [Vec<f64>],
        optimistic: &'a [f64],
        winner: Vec<Option<usize>>,
        best: f64,
        n: usize,
    }

    impl Search<'_> {
        fn threshold(&self, f: usize, i: usize) -> f64 {
            let mut k = self.grid.coord(f, i);
            while k > 0 && self.winner[self.grid.with_coord(f, i, k - 1)] == Some(i) {
                k -= 1;
            }
            self.grids[i][k]
        }

        fn go(&mut self, f: usize, revenue: f64) {
            if revenue + self.optimistic[f] <= self.best + 1e-15 {
                return;
            }
            if f == self.grid.len() {
                self.best = revenue;
                return;
            }
            let mut forced = None;
            for i in 0..self.n {
                let k = self.grid.coord(f, i);
                if k > 0 && self.winner[self.grid.with_coord(f, i, k - 1)] == Some(i) {
                    if forced.is_some() {
                        return;
                    }
                    forced = Some(i);
                }
            }
            let choices: Vec<Option<usize>> = match forced {
                Some(i) => vec![Some(i)],
                None => {
                    let mut order: Vec<usize> = (0..self.n).collect();
                    order.sort_by(|&a, &b| self.values[f][b].total_cmp(&self.values[f][a]));
                    order.into_iter().map(Some).chain([None]).collect()
                }
            };
            for c in choices {
                self.winner[f] = c;
                let gain = c.map_or(0.0, |i| self.masses[f] * self.threshold(f, i));
                self.go(f + 1, revenue + gain);
            }
            self.winner[f] = None;
        }
    }

    let mut search = Search {
        grid: &grid,
        grids,
        masses: &masses,
        values: &values,
        optimistic: &optimistic,
        winner: vec![None; grid.len()],
        best: 0.0,
        n,
    };
    search.go(0, 0.0);
    Ok(search.best)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    #[test]
    fn single_bidder_uniform() {
        let pmf = BTreeMap::from([(vec![0], 0.5), (vec![1], 0.5)]);
        let d = JointDistribution::new(vec![vec![1.0, 2.0]], pmf).unwrap();
        assert!((brute_force_oracle(&d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlated_pair() {
        let pmf = BTreeMap::from([(vec![0, 0], 0.5), (vec![1, 1], 0.5)]);
        let d = JointDistribution::new(vec![vec![1.0, 2.0]; 2], pmf).unwrap();
        assert!((brute_force_oracle(&d).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn caps() {
        let pmf = BTreeMap::from([(vec![0], 1.0)]);
        let d = JointDistribution::new(vec![vec![1.0, 2.0, 3.0, 4.0]], pmf).unwrap();
        assert!(matches!(brute_force_oracle(&d), Err(Error::SizeCap { .. })));
    }
}
