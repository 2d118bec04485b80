use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::ProductGrid;
use crate::error::{Error, Result};

/// Allocation probabilities `x_i(v)` and expected payments `p_i(v)` for
/// every bidder at every profile of the full product grid, including
/// profiles outside the support of any distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    grids: Vec<Vec<f64>>,
    grid: ProductGrid,
    /// `alloc[i][flat]`
    pub alloc: Vec<Vec<f64>>,
    /// `pay[i][flat]`
    pub pay: Vec<Vec<f64>>,
}

impl Mechanism {
    /// The mechanism that never allocates and never charges.
    pub fn zero(grids: &[Vec<f64>]) -> Self {
        let grid = ProductGrid::new(&grids.iter().map(Vec::len).collect::<Vec<_>>());
        let n = grids.len();
        Self {
            grids: grids.to_vec(),
            alloc: vec![vec![0.0; grid.len()]; n],
            pay: vec![vec![0.0; grid.len()]; n],
            grid,
        }
    }

    pub fn from_tables(grids: &[Vec<f64>], alloc: Vec<Vec<f64>>, pay: Vec<Vec<f64>>) -> Result<Self> {
        let mut mech = Self::zero(grids);
        let n = grids.len();
        let len = mech.grid.len();
        if alloc.len() != n || pay.len() != n || alloc.iter().chain(&pay).any(|t| t.len() != len) {
            return Err(Error::GridMismatch(format!(
                "tables must be {n} x {len} to match the grids"
            )));
        }
        mech.alloc = alloc;
        mech.pay = pay;
        Ok(mech)
    }

    /// Take-it-or-leave-it offer to `bidder` at `price`, with threshold payments.
    pub fn posted_price(grids: &[Vec<f64>], bidder: usize, price: f64) -> Self {
        let mut mech = Self::zero(grids);
        for f in 0..mech.grid.len() {
            if grids[bidder][mech.grid.coord(f, bidder)] >= price {
                mech.alloc[bidder][f] = 1.0;
                mech.pay[bidder][f] = price;
            }
        }
        mech
    }

    pub fn n_bidders(&self) -> usize {
        self.grids.len()
    }

    pub fn grids(&self) -> &[Vec<f64>] {
        &self.grids
    }

    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    pub fn total_alloc(&self, flat: usize) -> f64 {
        self.alloc.iter().map(|x| x[flat]).sum()
    }

    pub fn total_pay(&self, flat: usize) -> f64 {
        self.pay.iter().map(|p| p[flat]).sum()
    }

    pub fn to_file(&self) -> MechanismFile {
        let n = self.n_bidders();
        MechanismFile {
            grids: self.grids.clone(),
            alloc: (0..self.grid.len())
                .map(|f| AllocEntry {
                    idx: self.grid.unflat(f),
                    x: (0..n).map(|i| self.alloc[i][f]).collect(),
                })
                .collect(),
            pay: (0..self.grid.len())
                .map(|f| PayEntry {
                    idx: self.grid.unflat(f),
                    p: (0..n).map(|i| self.pay[i][f]).collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds a mechanism; every profile of the product grid must appear exactly once.
    pub fn from_file(file: MechanismFile) -> Result<Self> {
        let mut mech = Self::zero(&file.grids);
        let n = mech.n_bidders();
        let len = mech.grid.len();
        let schema = |field: &str, reason: String| Error::Schema {
            field: field.into(),
            reason,
        };
        let check_idx = |field: &str, idx: &[usize]| -> Result<usize> {
            if idx.len() != n || idx.iter().zip(&file.grids).any(|(i, g)| *i >= g.len()) {
                return Err(schema(field, format!("profile {idx:?} outside the grids")));
            }
            Ok(mech.grid.flat(idx))
        };
        let mut seen = vec![false; len];
        for e in &file.alloc {
            let f = check_idx("alloc.idx", &e.idx)?;
            if e.x.len() != n {
                return Err(schema("alloc.x", format!("expected {n} entries at {:?}", e.idx)));
            }
            if std::mem::replace(&mut seen[f], true) {
                return Err(schema("alloc.idx", format!("duplicate profile {:?}", e.idx)));
            }
            for i in 0..n {
                mech.alloc[i][f] = e.x[i];
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(schema("alloc", "not every profile of the product grid is present".into()));
        }
        let mut seen = vec![false; len];
        for e in &file.pay {
            let f = check_idx("pay.idx", &e.idx)?;
            if e.p.len() != n {
                return Err(schema("pay.p", format!("expected {n} entries at {:?}", e.idx)));
            }
            if std::mem::replace(&mut seen[f], true) {
                return Err(schema("pay.idx", format!("duplicate profile {:?}", e.idx)));
            }
            for i in 0..n {
                mech.pay[i][f] = e.p[i];
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(schema("pay", "not every profile of the product grid is present".into()));
        }
        Ok(mech)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_file())?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file(serde_json::from_str(&text)?)
    }
}

/// On-disk form of a [`Mechanism`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismFile {
    pub grids: Vec<Vec<f64>>,
    pub alloc: Vec<AllocEntry>,
    pub pay: Vec<PayEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocEntry {
    pub idx: Vec<usize>,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayEntry {
    pub idx: Vec<usize>,
    pub p: Vec<f64>,
}
