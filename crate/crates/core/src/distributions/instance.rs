use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    equal_revenue_family, truncated_balanced, value_of_index, BalancedSpec, EqualRevenueFamily,
    JointDistribution, ProductGrid,
};
use crate::error::{invalid, Error, Result};

/// Default cap on the number of cells `m * (K d)^(n-2)` of a built instance.
pub const DEFAULT_SIZE_CAP: usize = 20_000;

/// A truncated hard instance: the `n`-bidder law with a weak bidder and
/// the `(n-1)`-bidder law obtained by removing it.
///
/// Bidder indices are zero-based: bidder `0` is the equal-revenue bidder,
/// bidders `1..n-1` are the middle bidders and bidder `n-1` is the weak
/// bidder whose value is always `1 - 2 eps`.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub n: usize,
    pub params: BalancedSpec,
    pub family: EqualRevenueFamily,
    pub joint_n: JointDistribution,
    pub joint_shrunk: JointDistribution,
    /// `h` for every middle index tuple, in [`ProductGrid`] flat order.
    pub h_table: Vec<usize>,
    /// Total variation mass dropped by the truncation.
    pub trunc_error: f64,
}

pub fn build_hard_instance(n: usize, spec: BalancedSpec, z: f64) -> Result<HardInstance> {
    build_hard_instance_capped(n, spec, z, DEFAULT_SIZE_CAP)
}

pub fn build_hard_instance_capped(
    n: usize,
    spec: BalancedSpec,
    z: f64,
    cap: usize,
) -> Result<HardInstance> {
    if n < 3 {
        return Err(invalid("n", format!("at least 3 bidders are required, got {n}")));
    }
    spec.validate()?;
    let family = equal_revenue_family(spec.d, z)?;
    if family.is_degenerate() {
        return Err(invalid(
            "d",
            format!("m = {} < 2: bidder 1's value would be deterministic", family.m),
        ));
    }
    let n_middle = n - 2;
    let side = spec.support_len();
    let size = (0..n_middle)
        .try_fold(family.m, |acc, _| acc.checked_mul(side))
        .unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::SizeCap {
            what: "hard instance",
            size,
            cap,
        });
    }

    let middle_values = (1..=side)
        .map(|k| value_of_index(spec.epsilon, k))
        .collect::<Result<Vec<_>>>()?;
    if let Some(k) = middle_values.windows(2).position(|w| w[0] >= w[1]) {
        return Err(invalid(
            "K",
            format!(
                "middle values for indices {} and {} coincide in double precision; lower K*d or raise epsilon",
                k + 1,
                k + 2
            ),
        ));
    }
    let weak = 1.0 - 2.0 * spec.epsilon;
    let trunc = truncated_balanced(&spec)?;

    let middle = ProductGrid::new(&vec![side; n_middle]);
    let mut h_table = Vec::with_capacity(middle.len());
    let mut pmf = BTreeMap::new();
    for f in 0..middle.len() {
        let tuple = middle.unflat(f);
        let h = h_value(&tuple, spec.d, family.m);
        h_table.push(h);
        let mass: f64 = tuple.iter().map(|&k| trunc.pmf[k]).product();
        for y in 0..=h {
            let mut idx = Vec::with_capacity(n);
            idx.push(y);
            idx.extend_from_slice(&tuple);
            idx.push(0);
            pmf.insert(idx, mass * family.prob(h, y));
        }
    }

    let mut grids = Vec::with_capacity(n);
    grids.push(family.t.clone());
    grids.extend(std::iter::repeat_n(middle_values, n_middle));
    grids.push(vec![weak]);
    let joint_n = JointDistribution::new(grids, pmf)?;
    let joint_shrunk = joint_n.marginalize_out(n - 1)?;
    let trunc_error = 1.0 - (1.0 - spec.dropped_mass()).powi(n_middle as i32);

    Ok(HardInstance {
        n,
        params: spec,
        family,
        joint_n,
        joint_shrunk,
        h_table,
        trunc_error,
    })
}

/// `min((sum of balanced indices) mod d, m - 1)` for zero-based grid indices.
fn h_value(tuple: &[usize], d: usize, m: usize) -> usize {
    let s: usize = tuple.iter().map(|k| (k + 1) % d).sum();
    (s % d).min(m - 1)
}

impl HardInstance {
    pub fn n_middle(&self) -> usize {
        self.n - 2
    }

    pub fn middle_grid(&self) -> ProductGrid {
        ProductGrid::new(&vec![self.params.support_len(); self.n_middle()])
    }

    pub fn weak_value(&self) -> f64 {
        1.0 - 2.0 * self.params.epsilon
    }

    pub fn z(&self) -> f64 {
        self.family.z
    }

    /// `h` of a middle index tuple.
    pub fn h_of_middle(&self, middle: &[usize]) -> usize {
        self.h_table[self.middle_grid().flat(middle)]
    }

    /// `h` of a full or shrunk profile (index tuple over the instance grids).
    pub fn h_of_profile(&self, idx: &[usize]) -> usize {
        self.h_of_middle(&idx[1..=self.n_middle()])
    }

    /// Whether a shrunk-market profile carries positive mass.
    pub fn on_support(&self, idx: &[usize]) -> bool {
        idx[0] <= self.h_of_profile(idx)
    }

    /// `Pr[v_1 != t_{h(v_-1)}]` enumerated over the instance.
    pub fn prob_below_offer(&self) -> f64 {
        self.joint_n
            .pmf()
            .iter()
            .filter(|(idx, _)| idx[0] != self.h_of_profile(idx))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            d: self.params.d,
            epsilon: self.params.epsilon,
            z: self.family.z,
            k: self.params.trunc_blocks,
            grids: self.joint_n.grids().to_vec(),
            pmf: self
                .joint_n
                .pmf()
                .iter()
                .map(|(idx, p)| PmfEntry {
                    idx: idx.clone(),
                    p: *p,
                })
                .collect(),
            h_table: {
                let middle = self.middle_grid();
                self.h_table
                    .iter()
                    .enumerate()
                    .map(|(f, h)| HEntry {
                        idx: middle.unflat(f),
                        h: *h,
                    })
                    .collect()
            },
            trunc_error: self.trunc_error,
        }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        let schema = |field: &str, reason: String| Error::Schema {
            field: field.into(),
            reason,
        };
        if file.n < 3 {
            return Err(schema("n", format!("at least 3 bidders required, got {}", file.n)));
        }
        let params = BalancedSpec::new(file.epsilon, file.d, file.k)?;
        let family = equal_revenue_family(file.d, file.z)?;
        if file.grids.len() != file.n {
            return Err(schema("grids", format!("expected {} grids, got {}", file.n, file.grids.len())));
        }
        if file.grids[0].len() != family.m
            || file.grids[0].iter().zip(&family.t).any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return Err(schema("grids", "bidder 1's grid differs from t_0..t_{m-1}".into()));
        }
        let side = params.support_len();
        for b in 1..file.n - 1 {
            if file.grids[b].len() != side {
                return Err(schema("grids", format!("middle grid {b} must have K*d = {side} values")));
            }
        }
        if file.grids[file.n - 1].len() != 1 {
            return Err(schema("grids", "weak bidder grid must hold a single value".into()));
        }
        let middle = ProductGrid::new(&vec![side; file.n - 2]);
        let mut h_table = vec![usize::MAX; middle.len()];
        for entry in &file.h_table {
            if entry.idx.len() != file.n - 2 || entry.idx.iter().any(|k| *k >= side) {
                return Err(schema("h_table.idx", format!("bad middle tuple {:?}", entry.idx)));
            }
            let expect = h_value(&entry.idx, file.d, family.m);
            if entry.h != expect {
                return Err(schema(
                    "h_table.h",
                    format!("h{:?} = {} but construction gives {}", entry.idx, entry.h, expect),
                ));
            }
            h_table[middle.flat(&entry.idx)] = entry.h;
        }
        if h_table.contains(&usize::MAX) {
            return Err(schema("h_table", "missing middle tuples".into()));
        }
        let pmf = file.pmf.into_iter().map(|e| (e.idx, e.p)).collect();
        let joint_n = JointDistribution::new(file.grids, pmf)?;
        let joint_shrunk = joint_n.marginalize_out(file.n - 1)?;
        Ok(Self {
            n: file.n,
            params,
            family,
            joint_n,
            joint_shrunk,
            h_table,
            trunc_error: file.trunc_error,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_file())?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file(serde_json::from_str(&text)?)
    }
}

/// On-disk form of a [`HardInstance`]. Index arrays are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub z: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub grids: Vec<Vec<f64>>,
    pub pmf: Vec<PmfEntry>,
    pub h_table: Vec<HEntry>,
    pub trunc_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfEntry {
    pub idx: Vec<usize>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HEntry {
    pub idx: Vec<usize>,
    pub h: usize,
}
