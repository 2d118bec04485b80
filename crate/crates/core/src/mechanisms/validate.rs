use serde::Serialize;

use super::Mechanism;
use crate::distributions::JointDistribution;
use crate::error::{Error, Result};
use crate::AXIOM_TOL;

/// Outcome of checking feasibility, monotonicity, truthfulness and ex-post IR.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub monotone: bool,
    pub ic: bool,
    pub ex_post_ir: bool,
    pub worst_violation: f64,
    pub witness: Option<Witness>,
}

/// Where the worst violation occurred. For IC and monotonicity,
/// `deviation` is the bidder's own grid index of the misreport or the
/// lower comparison point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub kind: &'static str,
    pub bidder: usize,
    pub profile: Vec<usize>,
    pub deviation: Option<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.feasible && self.monotone && self.ic && self.ex_post_ir
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

struct Tracker {
    worst: f64,
    worst_failing: f64,
    witness: Option<Witness>,
}

impl Tracker {
    fn see(&mut self, amount: f64, make: impl FnOnce() -> Witness) -> bool {
        if amount > self.worst {
            self.worst = amount;
        }
        if amount > AXIOM_TOL {
            if amount > self.worst_failing {
                self.worst_failing = amount;
                self.witness = Some(make());
            }
            false
        } else {
            true
        }
    }
}

fn check_grids(mech: &Mechanism, dist: &JointDistribution) -> Result<()> {
    if !dist.same_grids(mech.grids()) {
        return Err(Error::GridMismatch(format!(
            "mechanism has {} bidders with grid sizes {:?}, distribution has {} with {:?}",
            mech.n_bidders(),
            mech.grid().dims(),
            dist.n_bidders(),
            dist.product_grid().dims()
        )));
    }
    Ok(())
}

/// Checks every axiom on the full product grid at tolerance `1e-9`.
pub fn validate_mechanism(mech: &Mechanism, dist: &JointDistribution) -> Result<ValidationReport> {
    check_grids(mech, dist)?;
    let grid = mech.grid();
    let grids = mech.grids();
    let n = mech.n_bidders();
    let mut t = Tracker {
        worst: 0.0,
        worst_failing: 0.0,
        witness: None,
    };
    let (mut feasible, mut monotone, mut ic, mut ir) = (true, true, true, true);

    for f in 0..grid.len() {
        let excess = mech.total_alloc(f) - 1.0;
        feasible &= t.see(excess, || Witness {
            kind: "feasibility",
            bidder: 0,
            profile: grid.unflat(f),
            deviation: None,
        });
        for i in 0..n {
            let x = mech.alloc[i][f];
            let p = mech.pay[i][f];
            let range = (-x).max(x - 1.0);
            feasible &= t.see(range, || Witness {
                kind: "allocation-range",
                bidder: i,
                profile: grid.unflat(f),
                deviation: None,
            });
            let v = grids[i][grid.coord(f, i)];
            let over = (p - x * v).max(-p);
            ir &= t.see(over, || Witness {
                kind: "ex-post-ir",
                bidder: i,
                profile: grid.unflat(f),
                deviation: None,
            });
        }
    }

    for i in 0..n {
        let values = &grids[i];
        for base in grid.axis_bases(i) {
            let flats: Vec<usize> = grid.axis(base, i).collect();
            for (a, &fa) in flats.iter().enumerate() {
                if a > 0 {
                    let drop = mech.alloc[i][flats[a - 1]] - mech.alloc[i][fa];
                    monotone &= t.see(drop, || Witness {
                        kind: "monotonicity",
                        bidder: i,
                        profile: grid.unflat(fa),
                        deviation: Some(a - 1),
                    });
                }
                let truthful = mech.alloc[i][fa] * values[a] - mech.pay[i][fa];
                for (b, &fb) in flats.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    let lie = mech.alloc[i][fb] * values[a] - mech.pay[i][fb];
                    ic &= t.see(lie - truthful, || Witness {
                        kind: "incentive-compatibility",
                        bidder: i,
                        profile: grid.unflat(fa),
                        deviation: Some(b),
                    });
                }
            }
        }
    }

    Ok(ValidationReport {
        feasible,
        monotone,
        ic,
        ex_post_ir: ir,
        worst_violation: t.worst.max(0.0),
        witness: t.witness,
    })
}

/// `sum_v Pr[v] sum_i p_i(v)` over the support of `dist`.
pub fn expected_revenue(mech: &Mechanism, dist: &JointDistribution) -> Result<f64> {
    check_grids(mech, dist)?;
    let grid = mech.grid();
    Ok(dist
        .pmf()
        .iter()
        .map(|(idx, p)| p * mech.total_pay(grid.flat(idx)))
        .sum())
}
