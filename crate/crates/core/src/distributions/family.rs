use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The equal-revenue distributions `D_0, ..., D_{m-1}` offered to bidder 1.
///
/// `D_y` puts mass `q_j` on `t_j` for `j < y` and the remaining mass
/// `qbar_y` on `t_y`, so every support price earns exactly `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualRevenueFamily {
    pub d: usize,
    pub z: f64,
    pub m: usize,
    /// `q[y]` for `0 <= y <= m - 2`.
    pub q: Vec<f64>,
    /// `qbar[y]` for `0 <= y <= m - 1`.
    pub qbar: Vec<f64>,
    /// Support values `t[y] = z / qbar[y]`.
    pub t: Vec<f64>,
}

impl EqualRevenueFamily {
    /// `Pr_{D_y}[v = t_j]`.
    pub fn prob(&self, y: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match j.cmp(&y) {
            Less => self.q[j],
            Equal => self.qbar[y],
            Greater => 0.0,
        }
    }

    /// `Pr_{D_y}[v >= t_j]`.
    pub fn tail_prob(&self, y: usize, j: usize) -> f64 {
        if j > y {
            0.0
        } else {
            self.qbar[j]
        }
    }

    /// `true` when only `D_0` exists and bidder 1's value is deterministic.
    pub fn is_degenerate(&self) -> bool {
        self.m < 2
    }
}

/// Number of distributions, `floor(d / z) - 1`.
pub fn family_size(d: usize, z: f64) -> i64 {
    (d as f64 / z).floor() as i64 - 1
}

pub fn equal_revenue_family(d: usize, z: f64) -> Result<EqualRevenueFamily> {
    if d < 4 {
        return Err(invalid("d", format!("must be at least 4, got {d}")));
    }
    if !(z > 1.0 && z < d as f64) {
        return Err(invalid("z", format!("must lie in (1, d), got {z}")));
    }
    let m = family_size(d, z);
    if m < 1 {
        return Err(invalid("d", format!("floor(d/z) - 1 = {m} < 1 for d={d}, z={z}")));
    }
    let m = m as usize;
    let df = d as f64;
    let q: Vec<f64> = (0..m.saturating_sub(1))
        .map(|y| {
            let y = y as f64;
            (z - 1.0) * df / ((df - y) * (df - y - 1.0))
        })
        .collect();
    let mut qbar = Vec::with_capacity(m);
    let mut acc = 0.0;
    for y in 0..m {
        qbar.push(1.0 - acc);
        if y < q.len() {
            acc += q[y];
        }
    }
    let t = qbar.iter().map(|qb| z / qb).collect();
    Ok(EqualRevenueFamily { d, z, m, q, qbar, t })
}

/// Marginal law of `h = min(S mod d, m - 1)` where `S` is a sum of
/// `n_middle` independent balanced indices.
///
/// Each balanced index is uniform modulo `d` (full blocks), so the law
/// is exact regardless of epsilon or truncation to whole blocks.
pub fn h_marginal(d: usize, m: usize, n_middle: usize) -> Result<Vec<f64>> {
    if n_middle < 1 {
        return Err(invalid("n_middle", "at least one middle bidder is required"));
    }
    if m < 1 || m > d {
        return Err(invalid("m", format!("must satisfy 1 <= m <= d, got m={m}, d={d}")));
    }
    let df = d as f64;
    let mut out = vec![1.0 / df; m];
    out[m - 1] = (d - m + 1) as f64 / df;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{truncated_balanced, BalancedSpec};
    use crate::DEFAULT_Z;

    #[test]
    fn d8_example() {
        let fam = equal_revenue_family(8, DEFAULT_Z).unwrap();
        assert_eq!(fam.m, 4);
        assert!((fam.q[0] - 0.083140).abs() < 5e-7);
        assert!((fam.q[0] - (DEFAULT_Z - 1.0) / 7.0).abs() < 1e-15);
        assert!((fam.t[0] - 1.581977).abs() < 5e-7);
        assert!((fam.t[1] - 1.725428).abs() < 5e-7);
        for y in 0..fam.m {
            let closed = (8.0 - DEFAULT_Z * y as f64) / (8.0 - y as f64);
            assert!((fam.qbar[y] - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn qbar_zero_is_one_and_support_increases() {
        for (d, z) in [(4, 1.5), (10, 2.5), (37, DEFAULT_Z), (128, 3.0)] {
            let fam = equal_revenue_family(d, z).unwrap();
            assert_eq!(fam.qbar[0], 1.0);
            assert_eq!(fam.t[0], z);
            assert!(fam.t.windows(2).all(|w| w[0] < w[1]));
            for y in 0..fam.m {
                let total: f64 = (0..=y).map(|j| fam.prob(y, j)).sum();
                assert!((total - 1.0).abs() < 1e-12);
                for j in 0..=y {
                    assert!((fam.t[j] * fam.tail_prob(y, j) - z).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(equal_revenue_family(3, 1.5).is_err());
        assert!(equal_revenue_family(8, 1.0).is_err());
        assert!(equal_revenue_family(8, 8.0).is_err());
        // floor(5 / 2.4) - 1 = 1 is fine, floor(5 / 2.6) - 1 = 0 is not.
        assert!(equal_revenue_family(5, 2.4).is_ok());
        assert!(equal_revenue_family(5, 2.6).is_err());
    }

    #[test]
    fn degenerate_d4() {
        let fam = equal_revenue_family(4, DEFAULT_Z).unwrap();
        assert_eq!(fam.m, 1);
        assert!(fam.is_degenerate());
        assert_eq!(h_marginal(4, 1, 3).unwrap(), vec![1.0]);
    }

    #[test]
    fn h_marginal_matches_residue_convolution() {
        // Brute-force oracle: convolve truncated residues of one middle bidder.
        let spec = BalancedSpec::new(0.05, 8, 40).unwrap();
        let t = truncated_balanced(&spec).unwrap();
        let mut law = [0.0; 4];
        for (i, p) in t.pmf.iter().enumerate() {
            let h = ((i + 1) % 8).min(3);
            law[h] += p;
        }
        let closed = h_marginal(8, 4, 1).unwrap();
        for (a, b) in law.iter().zip(closed.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(closed, vec![0.125, 0.125, 0.125, 0.625]);

        // Two middle bidders: convolution of residues.
        let spec = BalancedSpec::new(0.2, 8, 3).unwrap();
        let t = truncated_balanced(&spec).unwrap();
        let mut law = [0.0; 4];
        for (i, p) in t.pmf.iter().enumerate() {
            for (j, r) in t.pmf.iter().enumerate() {
                law[((i + 1 + j + 1) % 8).min(3)] += p * r;
            }
        }
        for (a, b) in law.iter().zip(closed.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
