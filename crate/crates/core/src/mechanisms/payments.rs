use crate::distributions::ProductGrid;
use crate::error::{Error, Result};
use crate::AXIOM_TOL;

/// Threshold payments along one axis: for own values `w_1 < ... < w_L`,
/// `p(w_j) = w_j x(w_j) - sum_{l<j} x(w_l) (w_{l+1} - w_l)`.
pub fn axis_payments(values: &[f64], xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut area = 0.0;
    for j in 0..xs.len() {
        if j > 0 {
            area += xs[j - 1] * (values[j] - values[j - 1]);
        }
        out.push(values[j] * xs[j] - area);
    }
    out
}

/// Revenue-maximal truthful payments for a monotone allocation table
/// (`alloc[i][flat]`) over the product of `grids`.
pub fn myerson_payments(alloc: &[Vec<f64>], grids: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let grid = ProductGrid::new(&grids.iter().map(Vec::len).collect::<Vec<_>>());
    if alloc.len() != grids.len() || alloc.iter().any(|x| x.len() != grid.len()) {
        return Err(Error::GridMismatch("allocation table does not match grids".into()));
    }
    let mut pay = vec![vec![0.0; grid.len()]; grids.len()];
    let mut xs = Vec::new();
    for (i, x) in alloc.iter().enumerate() {
        for base in grid.axis_bases(i) {
            let flats: Vec<usize> = grid.axis(base, i).collect();
            xs.clear();
            xs.extend(flats.iter().map(|&f| x[f]));
            if let Some(k) = xs.windows(2).position(|w| w[1] < w[0] - AXIOM_TOL) {
                return Err(Error::NonMonotone {
                    bidder: i,
                    profile: grid.unflat(flats[k + 1]),
                });
            }
            for (f, p) in flats.iter().zip(axis_payments(&grids[i], &xs)) {
                pay[i][*f] = p;
            }
        }
    }
    Ok(pay)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_axis_examples() {
        assert_eq!(axis_payments(&[1.0, 2.0], &[0.0, 1.0]), vec![0.0, 2.0]);
        let c = 0.3;
        let p = axis_payments(&[1.0, 2.0], &[c, c]);
        assert!((p[0] - c).abs() < 1e-15 && (p[1] - c).abs() < 1e-15);
        assert_eq!(axis_payments(&[1.0, 2.0], &[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn two_by_two_deviation_table() {
        // x = (0, 1) on {1, 2}: truthful utility beats every misreport.
        let w = [1.0, 2.0];
        let x = [0.0, 1.0];
        let p = axis_payments(&w, &x);
        for a in 0..2 {
            for b in 0..2 {
                assert!(x[a] * w[a] - p[a] >= x[b] * w[a] - p[b] - 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_monotone() {
        let grids = vec![vec![1.0, 2.0]];
        let err = myerson_payments(&[vec![1.0, 0.0]], &grids).unwrap_err();
        assert!(matches!(err, Error::NonMonotone { bidder: 0, .. }));
    }
}
