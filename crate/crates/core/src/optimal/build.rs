use crate::distributions::JointDistribution;
use crate::error::{invalid, Error, Result};
use crate::mechanisms::{myerson_payments, Mechanism};

use super::lp::{LinearProgram, Relation};
use super::simplex::{simplex_solve, LpSolution, LpStatus};

/// Default cap on the number of grid profiles an LP may cover.
pub const DEFAULT_LP_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WinnerMode {
    All,
    TopK(usize),
}

/// Which bidders may receive the item at a reported profile. Ties in value
/// rank the lower bidder index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WinnerRestriction {
    pub mode: WinnerMode,
}

impl WinnerRestriction {
    pub fn all() -> Self {
        Self {
            mode: WinnerMode::All,
        }
    }

    pub fn top_k(k: usize) -> Self {
        Self {
            mode: WinnerMode::TopK(k),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.mode {
            WinnerMode::TopK(k) if k < 1 || k > n => {
                Err(invalid("k", format!("must lie in 1..={n}, got {k}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether `bidder` is among the allowed winners at `values`.
    pub fn allows(&self, values: &[f64], bidder: usize) -> bool {
        match self.mode {
            WinnerMode::All => true,
            WinnerMode::TopK(k) => {
                let v = values[bidder];
                let ahead = values
                    .iter()
                    .enumerate()
                    .filter(|&(j, &w)| w > v || (w == v && j < bidder))
                    .count();
                ahead < k
            }
        }
    }
}

/// Which own-value pairs carry an incentive constraint.
///
/// For a single-parameter bidder with linear utility the adjacent
/// constraints imply every pair, so both scopes have the same feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcScope {
    AllPairs,
    Adjacent,
}

/// Variable numbering of the revenue LP: `x_i(v)` sits at `i * P + flat(v)`
/// and `p_i(v)` at `n * P + i * P + flat(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpLayout {
    pub n_bidders: usize,
    pub n_profiles: usize,
}

impl LpLayout {
    pub fn x(&self, bidder: usize, flat: usize) -> usize {
        bidder * self.n_profiles + flat
    }

    pub fn p(&self, bidder: usize, flat: usize) -> usize {
        (self.n_bidders + bidder) * self.n_profiles + flat
    }

    pub fn num_vars(&self) -> usize {
        2 * self.n_bidders * self.n_profiles
    }
}

/// The revenue LP over the full product grid with incentive constraints on every ordered pair.
pub fn build_lp(dist: &JointDistribution, restrict: WinnerRestriction) -> Result<LinearProgram> {
    build_lp_with(dist, restrict, IcScope::AllPairs, DEFAULT_LP_CAP)
}

pub fn build_lp_with(
    dist: &JointDistribution,
    restrict: WinnerRestriction,
    scope: IcScope,
    cap: usize,
) -> Result<LinearProgram> {
    let n = dist.n_bidders();
    restrict.validate(n)?;
    let size = dist.product_len().unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::SizeCap {
            what: "LP grid profiles",
            size,
            cap,
        });
    }
    let grid = dist.product_grid();
    let grids = dist.grids();
    let layout = LpLayout {
        n_bidders: n,
        n_profiles: grid.len(),
    };
    let mut lp = LinearProgram::new(layout.num_vars());

    for f in 0..grid.len() {
        let values = grid.value_profile(grids, f);
        for i in 0..n {
            let allowed = restrict.allows(&values, i);
            lp.var_bounds[layout.x(i, f)] = (0.0, Some(if allowed { 1.0 } else { 0.0 }));
        }
    }
    for (idx, &pr) in dist.pmf() {
        let f = grid.flat(idx);
        for i in 0..n {
            lp.objective[layout.p(i, f)] = pr;
        }
    }

    for f in 0..grid.len() {
        let terms: Vec<_> = (0..n).map(|i| (layout.x(i, f), 1.0)).collect();
        lp.add_sparse(&terms, Relation::Le, 1.0);
    }
    for i in 0..n {
        let g = &grids[i];
        for base in grid.axis_bases(i) {
            let axis: Vec<usize> = grid.axis(base, i).collect();
            for (k, &f) in axis.iter().enumerate() {
                for (k2, &f2) in axis.iter().enumerate() {
                    let include = match scope {
                        IcScope::AllPairs => k != k2,
                        IcScope::Adjacent => k.abs_diff(k2) == 1,
                    };
                    if !include {
                        continue;
                    }
                    // Truthful at value g[k] beats reporting g[k2].
                    lp.add_sparse(
                        &[
                            (layout.x(i, f2), g[k]),
                            (layout.p(i, f2), -1.0),
                            (layout.x(i, f), -g[k]),
                            (layout.p(i, f), 1.0),
                        ],
                        Relation::Le,
                        0.0,
                    );
                }
            }
        }
    }
    for f in 0..grid.len() {
        for i in 0..n {
            let v = grids[i][grid.coord(f, i)];
            lp.add_sparse(&[(layout.p(i, f), 1.0), (layout.x(i, f), -v)], Relation::Le, 0.0);
        }
    }
    Ok(lp)
}

/// The revenue LP with payments eliminated.
///
/// For a monotone allocation the revenue-maximal truthful, individually
/// rational payments are the threshold payments, so the optimum of
/// [`build_lp`] equals the optimum of this program over allocations alone:
/// variables `x_i(v)` at `i * P + flat(v)`, adjacent monotonicity rows,
/// feasibility rows, and the objective `sum_v Pr[v] sum_i p_i(v)` with each
/// `p_i` written as a threshold sum of allocation increments. Its rows have
/// unit coefficients, which keeps the tableau well conditioned even when
/// grid values nearly coincide.
pub fn build_allocation_lp(
    dist: &JointDistribution,
    restrict: WinnerRestriction,
    cap: usize,
) -> Result<LinearProgram> {
    let n = dist.n_bidders();
    restrict.validate(n)?;
    let size = dist.product_len().unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::SizeCap {
            what: "LP grid profiles",
            size,
            cap,
        });
    }
    let grid = dist.product_grid();
    let grids = dist.grids();
    let np = grid.len();
    let masses = dist.dense_masses();
    let mut lp = LinearProgram::new(n * np);

    for f in 0..np {
        let values = grid.value_profile(grids, f);
        for i in 0..n {
            // Feasibility already caps each allowed x at one.
            lp.var_bounds[i * np + f] = (0.0, (!restrict.allows(&values, i)).then_some(0.0));
        }
    }
    for i in 0..n {
        let g = &grids[i];
        for base in grid.axis_bases(i) {
            let axis: Vec<usize> = grid.axis(base, i).collect();
            let mut tail = 0.0;
            for (k, &f) in axis.iter().enumerate().rev() {
                let step = if k + 1 < g.len() { g[k + 1] - g[k] } else { 0.0 };
                lp.objective[i * np + f] = masses[f] * g[k] - step * tail;
                tail += masses[f];
            }
            for w in axis.windows(2) {
                lp.add_sparse(&[(i * np + w[0], 1.0), (i * np + w[1], -1.0)], Relation::Le, 0.0);
            }
        }
    }
    for f in 0..np {
        let terms: Vec<_> = (0..n).map(|i| (i * np + f, 1.0)).collect();
        lp.add_sparse(&terms, Relation::Le, 1.0);
    }
    Ok(lp)
}

/// An LP optimum together with the mechanism it encodes.
#[derive(Debug, Clone)]
pub struct OptimalMechanism {
    pub revenue: f64,
    pub mechanism: Mechanism,
    pub solution: LpSolution,
}

/// Solves the revenue program and returns the optimal mechanism with
/// threshold payments.
pub fn optimal_mechanism(
    dist: &JointDistribution,
    restrict: WinnerRestriction,
    cap: usize,
) -> Result<OptimalMechanism> {
    let lp = build_allocation_lp(dist, restrict, cap)?;
    let solution = simplex_solve(&lp)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Invariant(format!(
            "revenue LP ended with status {:?}",
            solution.status
        )));
    }
    let np = dist.product_grid().len();
    let alloc: Vec<Vec<f64>> = solution
        .assignment
        .chunks(np)
        .map(|xs| xs.iter().map(|&x| snap(x, 1.0)).collect())
        .collect();
    let pay = myerson_payments(&alloc, dist.grids())?;
    let mechanism = Mechanism::from_tables(dist.grids(), alloc, pay)?;
    Ok(OptimalMechanism {
        revenue: solution.objective_value,
        mechanism,
        solution,
    })
}

fn snap(v: f64, hi: f64) -> f64 {
    let v = v.clamp(0.0, hi);
    if v < 1e-12 {
        0.0
    } else {
        v
    }
}

/// Converts an assignment of [`build_lp`] into allocation and payment tables.
pub fn mechanism_from_solution(dist: &JointDistribution, assignment: &[f64]) -> Result<Mechanism> {
    let grid = dist.product_grid();
    let n = dist.n_bidders();
    let layout = LpLayout {
        n_bidders: n,
        n_profiles: grid.len(),
    };
    if assignment.len() != layout.num_vars() {
        return Err(invalid("assignment", "length differs from the LP layout"));
    }
    let alloc = (0..n)
        .map(|i| (0..grid.len()).map(|f| snap(assignment[layout.x(i, f)], 1.0)).collect())
        .collect();
    let pay = (0..n)
        .map(|i| {
            (0..grid.len())
                .map(|f| snap(assignment[layout.p(i, f)], f64::INFINITY))
                .collect()
        })
        .collect();
    Mechanism::from_tables(dist.grids(), alloc, pay)
}

/// The best revenue of any truthful, ex-post individually rational mechanism.
pub fn optimal_revenue(dist: &JointDistribution) -> Result<f64> {
    optimal_mechanism(dist, WinnerRestriction::all(), DEFAULT_LP_CAP).map(|o| o.revenue)
}

/// The best revenue among mechanisms that only sell to one of the `k` highest reports.
pub fn k_lookahead_revenue(dist: &JointDistribution, k: usize) -> Result<f64> {
    optimal_mechanism(dist, WinnerRestriction::top_k(k), DEFAULT_LP_CAP).map(|o| o.revenue)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::mechanisms::{expected_revenue, validate_mechanism};

    fn dist(grids: Vec<Vec<f64>>, pmf: &[(&[usize], f64)]) -> JointDistribution {
        let map: BTreeMap<_, _> = pmf.iter().map(|(i, p)| (i.to_vec(), *p)).collect();
        JointDistribution::new(grids, map).unwrap()
    }

    #[test]
    fn single_bidder_counts() {
        let d = dist(vec![vec![1.0, 2.0]], &[(&[0], 0.5), (&[1], 0.5)]);
        let lp = build_lp(&d, WinnerRestriction::all()).unwrap();
        assert_eq!(lp.num_vars, 4);
        // 2 feasibility, 2 IC, 2 IR.
        assert_eq!(lp.constraints.len(), 6);
    }

    #[test]
    fn equal_revenue_pair_optimum() {
        let d = dist(vec![vec![2.0, 4.0]], &[(&[0], 0.5), (&[1], 0.5)]);
        assert!((optimal_revenue(&d).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn point_mass() {
        let d = dist(vec![vec![3.25]], &[(&[0], 1.0)]);
        assert!((optimal_revenue(&d).unwrap() - 3.25).abs() < 1e-9);
    }

    #[test]
    fn correlated_pair() {
        let d = dist(vec![vec![1.0, 2.0], vec![1.0, 2.0]], &[(&[0, 0], 0.5), (&[1, 1], 0.5)]);
        assert!((optimal_revenue(&d).unwrap() - 1.5).abs() < 1e-9);
        assert!((k_lookahead_revenue(&d, 2).unwrap() - 1.5).abs() < 1e-9);
    }

    #[test]
    fn top_one_zeroes_the_lower_bidder() {
        let d = dist(vec![vec![1.0, 3.0], vec![2.0]], &[(&[0, 0], 0.5), (&[1, 0], 0.5)]);
        let lp = build_lp(&d, WinnerRestriction::top_k(1)).unwrap();
        let grid = d.product_grid();
        let layout = LpLayout {
            n_bidders: 2,
            n_profiles: 2,
        };
        assert_eq!(lp.var_bounds[layout.x(0, grid.flat(&[0, 0]))], (0.0, Some(0.0)));
        assert_eq!(lp.var_bounds[layout.x(1, grid.flat(&[1, 0]))], (0.0, Some(0.0)));
        assert_eq!(lp.var_bounds[layout.x(1, grid.flat(&[0, 0]))], (0.0, Some(1.0)));
        assert!(WinnerRestriction::top_k(3).validate(2).is_err());
    }

    #[test]
    fn scopes_agree_and_solution_validates() {
        let d = dist(
            vec![vec![1.0, 2.0, 4.0], vec![1.5, 3.0]],
            &[(&[0, 0], 0.2), (&[1, 1], 0.3), (&[2, 0], 0.25), (&[2, 1], 0.25)],
        );
        for restrict in [WinnerRestriction::all(), WinnerRestriction::top_k(1)] {
            let all = simplex_solve(&build_lp(&d, restrict).unwrap()).unwrap();
            let adj_lp = build_lp_with(&d, restrict, IcScope::Adjacent, DEFAULT_LP_CAP).unwrap();
            let adj = simplex_solve(&adj_lp).unwrap();
            let reduced = optimal_mechanism(&d, restrict, DEFAULT_LP_CAP).unwrap();
            assert!((all.objective_value - adj.objective_value).abs() < 1e-9);
            assert!((all.objective_value - reduced.revenue).abs() < 1e-9);
            let full = mechanism_from_solution(&d, &all.assignment).unwrap();
            assert!(validate_mechanism(&full, &d).unwrap().is_valid());
            assert!(validate_mechanism(&reduced.mechanism, &d).unwrap().is_valid());
            let rev = expected_revenue(&reduced.mechanism, &d).unwrap();
            assert!((rev - reduced.revenue).abs() < 1e-9);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let d = dist(vec![vec![1.0, 2.0], vec![1.0, 2.0]], &[(&[0, 0], 1.0)]);
        let err = build_lp_with(&d, WinnerRestriction::all(), IcScope::Adjacent, 3).unwrap_err();
        assert!(matches!(err, Error::SizeCap { .. }));
    }
}
