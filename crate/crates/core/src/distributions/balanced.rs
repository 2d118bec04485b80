use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Parameters of an `(epsilon, d)`-balanced law on the positive integers,
/// together with the number of `d`-blocks kept when truncating it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancedSpec {
    pub epsilon: f64,
    pub d: usize,
    pub trunc_blocks: usize,
}

impl BalancedSpec {
    pub fn new(epsilon: f64, d: usize, trunc_blocks: usize) -> Result<Self> {
        let spec = Self {
            epsilon,
            d,
            trunc_blocks,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid("epsilon", format!("must lie in (0,1), got {}", self.epsilon)));
        }
        if self.d < 1 {
            return Err(invalid("d", "block length must be at least 1"));
        }
        if self.trunc_blocks < 1 {
            return Err(invalid("K", "at least one block must be retained"));
        }
        Ok(())
    }

    /// Number of indices retained by the truncation, `K * d`.
    pub fn support_len(&self) -> usize {
        self.trunc_blocks * self.d
    }

    /// Mass dropped by truncating to `K` blocks, `(1 - epsilon)^K`.
    pub fn dropped_mass(&self) -> f64 {
        (1.0 - self.epsilon).powi(self.trunc_blocks as i32)
    }
}

/// Untruncated pmf `epsilon (1-epsilon)^(ceil(k/d) - 1) / d` at index `k >= 1`.
pub fn balanced_pmf(spec: &BalancedSpec, k: usize) -> Result<f64> {
    if !(spec.epsilon > 0.0 && spec.epsilon < 1.0) {
        return Err(invalid("epsilon", format!("must lie in (0,1), got {}", spec.epsilon)));
    }
    if spec.d < 1 {
        return Err(invalid("d", "block length must be at least 1"));
    }
    if k < 1 {
        return Err(invalid("k", "index must be a positive integer"));
    }
    let block = k.div_ceil(spec.d) - 1;
    Ok(spec.epsilon * (1.0 - spec.epsilon).powi(block as i32) / spec.d as f64)
}

/// A balanced law truncated to its first `K` blocks and renormalised.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBalanced {
    /// `pmf[k - 1]` is the renormalised mass of index `k`.
    pub pmf: Vec<f64>,
    /// Mass of the untruncated law beyond index `K * d`.
    pub dropped: f64,
}

impl TruncatedBalanced {
    pub fn mass(&self, k: usize) -> f64 {
        if k == 0 || k > self.pmf.len() {
            0.0
        } else {
            self.pmf[k - 1]
        }
    }
}

pub fn truncated_balanced(spec: &BalancedSpec) -> Result<TruncatedBalanced> {
    spec.validate()?;
    let dropped = spec.dropped_mass();
    let scale = 1.0 / (1.0 - dropped);
    let pmf = (1..=spec.support_len())
        .map(|k| balanced_pmf(spec, k).map(|p| p * scale))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedBalanced { pmf, dropped })
}

/// Value `1 - 2 eps + eps * sum_{j=1..k} 2^-j` of a middle bidder with index `k`.
pub fn value_of_index(epsilon: f64, k: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("must lie in (0,1), got {epsilon}")));
    }
    if k < 1 {
        return Err(invalid("k", "index must be a positive integer"));
    }
    // Written as (1 - eps) - eps 2^-k so that consecutive indices stay distinct
    // for as long as eps 2^-k exceeds the spacing of doubles near 1 - eps.
    let tail = if k >= 1075 { 0.0 } else { 0.5f64.powi(k as i32) };
    Ok((1.0 - epsilon) - epsilon * tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pmf_examples() {
        let geo = BalancedSpec::new(0.5, 1, 1).unwrap();
        assert!(close(balanced_pmf(&geo, 2).unwrap(), 0.25, 1e-15));
        let two = BalancedSpec::new(0.5, 2, 1).unwrap();
        assert!(close(balanced_pmf(&two, 3).unwrap(), 0.125, 1e-15));
        assert_eq!(balanced_pmf(&two, 1).unwrap(), balanced_pmf(&two, 2).unwrap());
        assert!(close(balanced_pmf(&two, 1).unwrap(), 0.25, 1e-15));
    }

    #[test]
    fn pmf_rejects_bad_input() {
        let spec = BalancedSpec {
            epsilon: 0.5,
            d: 2,
            trunc_blocks: 1,
        };
        assert!(balanced_pmf(&spec, 0).is_err());
        let bad = BalancedSpec { epsilon: 1.0, ..spec };
        assert!(balanced_pmf(&bad, 1).is_err());
        assert!(BalancedSpec::new(0.0, 2, 1).is_err());
        assert!(BalancedSpec::new(0.5, 0, 1).is_err());
        assert!(BalancedSpec::new(0.5, 2, 0).is_err());
    }

    #[test]
    fn truncation_examples() {
        let t = truncated_balanced(&BalancedSpec::new(0.5, 1, 2).unwrap()).unwrap();
        assert!(close(t.pmf[0], 2.0 / 3.0, 1e-15));
        assert!(close(t.pmf[1], 1.0 / 3.0, 1e-15));
        assert!(close(t.dropped, 0.25, 1e-15));

        let t = truncated_balanced(&BalancedSpec::new(0.5, 2, 1).unwrap()).unwrap();
        assert_eq!(t.pmf, vec![0.5, 0.5]);
        assert!(close(t.dropped, 0.5, 1e-15));
    }

    #[test]
    fn truncated_residues_are_uniform() {
        let spec = BalancedSpec::new(0.3, 4, 6).unwrap();
        let t = truncated_balanced(&spec).unwrap();
        let mut residues = [0.0; 4];
        for (i, p) in t.pmf.iter().enumerate() {
            residues[(i + 1) % 4] += p;
        }
        for r in residues {
            assert!(close(r, 0.25, 1e-12), "{r}");
        }
    }

    #[test]
    fn values_of_indices() {
        assert!(close(value_of_index(0.1, 1).unwrap(), 0.85, 1e-15));
        assert!(close(value_of_index(0.2, 2).unwrap(), 0.75, 1e-15));
        let far = value_of_index(0.1, 60).unwrap();
        assert!(close(far, 0.9, 1e-15) && far <= 0.9);
        assert!(value_of_index(0.1, 0).is_err());
        let mut prev = 0.0;
        for k in 1..=50 {
            let v = value_of_index(0.1, k).unwrap();
            assert!(v > prev && v < 0.9);
            prev = v;
        }
    }
}
