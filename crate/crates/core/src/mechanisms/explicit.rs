use super::{myerson_payments, Mechanism};
use crate::distributions::{HardInstance, JointDistribution};

/// Offers bidder 1 the price `t_{h(v_-1)}` and never allocates to anyone
/// else; a mechanism for the shrunk market.
pub fn explicit_shrunken_mechanism(inst: &HardInstance) -> Mechanism {
    let mut mech = Mechanism::zero(inst.joint_shrunk.grids());
    offer_to_bidder_one(&mut mech, inst);
    mech
}

/// The shrunk-market offer to bidder 1, falling back to selling to the
/// weak bidder at `1 - 2 eps` whenever bidder 1 is below the offer.
pub fn explicit_full_mechanism(inst: &HardInstance) -> Mechanism {
    let mut mech = Mechanism::zero(inst.joint_n.grids());
    offer_to_bidder_one(&mut mech, inst);
    let weak = inst.n - 1;
    let weak_price = inst.weak_value();
    let grid = mech.grid().clone();
    for f in 0..grid.len() {
        if mech.alloc[0][f] == 0.0 && mech.grids()[weak][grid.coord(f, weak)] >= weak_price {
            mech.alloc[weak][f] = 1.0;
            mech.pay[weak][f] = weak_price;
        }
    }
    mech
}

fn offer_to_bidder_one(mech: &mut Mechanism, inst: &HardInstance) {
    let grid = mech.grid().clone();
    let mut idx = vec![0; grid.n_bidders()];
    for f in 0..grid.len() {
        for (b, slot) in idx.iter_mut().enumerate() {
            *slot = grid.coord(f, b);
        }
        let h = inst.h_of_profile(&idx);
        if idx[0] >= h {
            mech.alloc[0][f] = 1.0;
            mech.pay[0][f] = inst.family.t[h];
        }
    }
}

/// Sells only to the highest-value bidder (lowest index on ties) at the
/// price maximising `p * Pr[v_i >= p | v_-i]` among own-grid values at
/// which the bidder would still be highest. Payments are threshold payments.
pub fn lookahead_mechanism(dist: &JointDistribution) -> Mechanism {
    let grids = dist.grids();
    let grid = dist.product_grid();
    let masses = dist.dense_masses();
    let n = grids.len();
    let mut alloc = vec![vec![0.0; grid.len()]; n];

    for (i, own) in grids.iter().enumerate() {
        for base in grid.axis_bases(i) {
            let flats: Vec<usize> = grid.axis(base, i).collect();
            let others = grid.value_profile(grids, base);
            // Own values at which bidder i tops the profile under lowest-index tie-breaking.
            let wins = |w: f64| {
                (0..n).filter(|&j| j != i).all(|j| {
                    if j < i {
                        w > others[j]
                    } else {
                        w >= others[j]
                    }
                })
            };
            let total: f64 = flats.iter().map(|&f| masses[f]).sum();
            if total <= 0.0 {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            let mut tail = 0.0;
            for k in (0..own.len()).rev() {
                tail += masses[flats[k]];
                if !wins(own[k]) {
                    continue;
                }
                let rev = own[k] * tail / total;
                // Iterating downwards, `>=` keeps the lowest optimal price.
                if rev > 0.0 && best.is_none_or(|(_, r)| rev >= r) {
                    best = Some((k, rev));
                }
            }
            if let Some((k, _)) = best {
                for &f in &flats[k..] {
                    alloc[i][f] = 1.0;
                }
            }
        }
    }
    let pay = myerson_payments(&alloc, grids).expect("threshold allocations are monotone");
    Mechanism::from_tables(grids, alloc, pay).expect("tables match grids")
}
