use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::PROB_TOL;

/// Row-major indexing over the product of per-bidder value grids.
///
/// Flat order coincides with lexicographic order of index tuples, bidder 0
/// varying slowest. In particular, lowering any single coordinate always
/// yields an earlier flat index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductGrid {
    dims: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl ProductGrid {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let len = dims.iter().product();
        Self {
            dims: dims.to_vec(),
            strides,
            len,
        }
    }

    /// Size of the product grid, or `None` on overflow.
    pub fn checked_len(dims: &[usize]) -> Option<usize> {
        dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_bidders(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn unflat(&self, flat: usize) -> Vec<usize> {
        (0..self.dims.len()).map(|b| self.coord(flat, b)).collect()
    }

    pub fn coord(&self, flat: usize, bidder: usize) -> usize {
        (flat / self.strides[bidder]) % self.dims[bidder]
    }

    /// Flat index of the profile obtained by replacing `bidder`'s coordinate.
    pub fn with_coord(&self, flat: usize, bidder: usize, value: usize) -> usize {
        let old = self.coord(flat, bidder);
        flat - old * self.strides[bidder] + value * self.strides[bidder]
    }

    /// Profiles along `bidder`'s own axis through `flat`, lowest own value first.
    pub fn axis(&self, flat: usize, bidder: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.with_coord(flat, bidder, 0);
        let stride = self.strides[bidder];
        (0..self.dims[bidder]).map(move |k| base + k * stride)
    }

    /// One representative (own coordinate zero) per axis of `bidder`.
    pub fn axis_bases(&self, bidder: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&f| self.coord(f, bidder) == 0)
    }

    pub fn value_profile(&self, grids: &[Vec<f64>], flat: usize) -> Vec<f64> {
        (0..self.dims.len())
            .map(|b| grids[b][self.coord(flat, b)])
            .collect()
    }
}

/// A finitely supported joint law over per-bidder value grids.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    grids: Vec<Vec<f64>>,
    pmf: BTreeMap<Vec<usize>, f64>,
}

impl JointDistribution {
    /// Validates grids and masses. Zero masses are dropped from the map.
    pub fn new(grids: Vec<Vec<f64>>, pmf: BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        if grids.is_empty() {
            return Err(invalid("grids", "at least one bidder is required"));
        }
        for (b, g) in grids.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::Schema {
                    field: format!("grids[{b}]"),
                    reason: "empty grid".into(),
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::Schema {
                    field: format!("grids[{b}]"),
                    reason: "non-finite value".into(),
                });
            }
            if g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Schema {
                    field: format!("grids[{b}]"),
                    reason: "values must be strictly increasing".into(),
                });
            }
        }
        let mut total = 0.0;
        let mut kept = BTreeMap::new();
        for (idx, p) in pmf {
            if idx.len() != grids.len() {
                return Err(Error::Schema {
                    field: "pmf.idx".into(),
                    reason: format!("tuple {idx:?} has wrong length"),
                });
            }
            if idx.iter().zip(&grids).any(|(i, g)| *i >= g.len()) {
                return Err(Error::Schema {
                    field: "pmf.idx".into(),
                    reason: format!("tuple {idx:?} out of grid bounds"),
                });
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::Schema {
                    field: "pmf.p".into(),
                    reason: format!("mass {p} at {idx:?} is not a probability"),
                });
            }
            total += p;
            if p > 0.0 {
                kept.insert(idx, p);
            }
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Schema {
                field: "pmf.p".into(),
                reason: format!("masses sum to {total}, not 1"),
            });
        }
        Ok(Self { grids, pmf: kept })
    }

    /// Builds a distribution from a dense mass vector over the product grid.
    pub fn from_dense(grids: Vec<Vec<f64>>, masses: &[f64]) -> Result<Self> {
        let grid = ProductGrid::new(&grids.iter().map(Vec::len).collect::<Vec<_>>());
        if masses.len() != grid.len() {
            return Err(invalid("masses", "length differs from the product grid"));
        }
        let pmf = masses
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != 0.0)
            .map(|(f, p)| (grid.unflat(f), *p))
            .collect();
        Self::new(grids, pmf)
    }

    pub fn n_bidders(&self) -> usize {
        self.grids.len()
    }

    pub fn grids(&self) -> &[Vec<f64>] {
        &self.grids
    }

    pub fn pmf(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.pmf
    }

    pub fn mass(&self, idx: &[usize]) -> f64 {
        self.pmf.get(idx).copied().unwrap_or(0.0)
    }

    pub fn product_grid(&self) -> ProductGrid {
        ProductGrid::new(&self.grids.iter().map(Vec::len).collect::<Vec<_>>())
    }

    pub fn product_len(&self) -> Option<usize> {
        ProductGrid::checked_len(&self.grids.iter().map(Vec::len).collect::<Vec<_>>())
    }

    /// Masses indexed by flat profile.
    pub fn dense_masses(&self) -> Vec<f64> {
        let grid = self.product_grid();
        let mut out = vec![0.0; grid.len()];
        for (idx, p) in &self.pmf {
            out[grid.flat(idx)] = *p;
        }
        out
    }

    /// The law of the remaining bidders after dropping `bidder`.
    pub fn marginalize_out(&self, bidder: usize) -> Result<Self> {
        if bidder >= self.n_bidders() || self.n_bidders() < 2 {
            return Err(invalid("bidder", "cannot remove this bidder"));
        }
        let mut grids = self.grids.clone();
        grids.remove(bidder);
        let mut pmf: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (idx, p) in &self.pmf {
            let mut rest = idx.clone();
            rest.remove(bidder);
            *pmf.entry(rest).or_default() += p;
        }
        Self::new(grids, pmf)
    }

    pub fn same_grids(&self, grids: &[Vec<f64>]) -> bool {
        self.grids.as_slice() == grids
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_order_is_lexicographic() {
        let g = ProductGrid::new(&[2, 3, 4]);
        assert_eq!(g.len(), 24);
        let mut prev: Option<Vec<usize>> = None;
        for f in 0..g.len() {
            let idx = g.unflat(f);
            assert_eq!(g.flat(&idx), f);
            if let Some(p) = prev {
                assert!(p < idx);
            }
            prev = Some(idx);
        }
        let f = g.flat(&[1, 2, 3]);
        let axis: Vec<_> = g.axis(f, 1).map(|x| g.unflat(x)).collect();
        assert_eq!(axis, vec![vec![1, 0, 3], vec![1, 1, 3], vec![1, 2, 3]]);
        assert_eq!(g.axis_bases(2).count(), 6);
    }

    #[test]
    fn rejects_bad_distributions() {
        let grids = vec![vec![1.0, 2.0]];
        let mut pmf = BTreeMap::new();
        pmf.insert(vec![0], 0.5);
        assert!(JointDistribution::new(grids.clone(), pmf.clone()).is_err());
        pmf.insert(vec![2], 0.5);
        assert!(JointDistribution::new(grids.clone(), pmf.clone()).is_err());
        pmf.remove(&vec![2]);
        pmf.insert(vec![1], 0.5);
        assert!(JointDistribution::new(grids, pmf.clone()).is_ok());
        assert!(JointDistribution::new(vec![vec![2.0, 1.0]], pmf).is_err());
    }

    #[test]
    fn marginalization() {
        let grids = vec![vec![1.0, 2.0], vec![0.5]];
        let masses = [0.25, 0.75];
        let dist = JointDistribution::from_dense(grids, &masses).unwrap();
        let m = dist.marginalize_out(1).unwrap();
        assert_eq!(m.grids(), &[vec![1.0, 2.0]]);
        assert_eq!(m.mass(&[1]), 0.75);
    }
}
