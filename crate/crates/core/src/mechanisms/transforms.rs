//! Revenue-preserving transformations on the shrunk hard instance.
//!
//! Both transforms take a mechanism over the grids of `H_{n-1}` and return
//! a new table with threshold payments recomputed from the allocation.
//! Bidder indices are zero-based: bidder `0` is the equal-revenue bidder and
//! bidders `1..=n-2` are the middle bidders.

use serde::Serialize;

use super::{myerson_payments, validate_mechanism, Mechanism};
use crate::distributions::{HardInstance, ProductGrid};
use crate::error::{Error, Result};

fn check_shrunk_grids(mech: &Mechanism, inst: &HardInstance) -> Result<()> {
    if !inst.joint_shrunk.same_grids(mech.grids()) {
        return Err(Error::GridMismatch(
            "mechanism must be defined over the shrunk-market grids".into(),
        ));
    }
    Ok(())
}

fn first_low_priced(mech: &Mechanism, inst: &HardInstance) -> Option<Vec<usize>> {
    let grid = mech.grid();
    inst.joint_shrunk
        .pmf()
        .keys()
        .find(|idx| mech.alloc[0][grid.flat(idx)] > 0.0 && idx[0] < inst.h_of_profile(idx))
        .cloned()
}

/// Whether bidder 1 is only ever allocated at support profiles with `v_1 >= t_{h(v_-1)}`.
pub fn is_high_priced(mech: &Mechanism, inst: &HardInstance) -> Result<bool> {
    check_shrunk_grids(mech, inst)?;
    Ok(first_low_priced(mech, inst).is_none())
}

/// Replaces bidder 1's allocation by `x_1(t_{h}, v_-1)` above the offer
/// `t_{h(v_-1)}` and by zero below it. Other bidders keep their allocations.
pub fn high_priced_transform(mech: &Mechanism, inst: &HardInstance) -> Result<Mechanism> {
    check_shrunk_grids(mech, inst)?;
    let grids = mech.grids();
    // Rejects non-monotone input before anything is changed.
    myerson_payments(&mech.alloc, grids)?;
    let grid = mech.grid();
    let mut alloc = mech.alloc.clone();
    let mut idx = vec![0; grid.n_bidders()];
    for f in 0..grid.len() {
        fill_idx(grid, f, &mut idx);
        let h = inst.h_of_profile(&idx);
        alloc[0][f] = if idx[0] >= h {
            mech.alloc[0][grid.with_coord(f, 0, h)]
        } else {
            0.0
        };
    }
    let pay = myerson_payments(&alloc, grids)?;
    Mechanism::from_tables(grids, alloc, pay)
}

fn fill_idx(grid: &ProductGrid, f: usize, idx: &mut [usize]) {
    for (b, slot) in idx.iter_mut().enumerate() {
        *slot = grid.coord(f, b);
    }
}

/// The state of one fix: the minimal problematic profile and the profile
/// sets whose allocations it rewrites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftContext {
    pub v_prime: Vec<usize>,
    /// Middle bidders allocated with positive probability at `v_prime`.
    pub bidders: Vec<usize>,
    pub y: usize,
    /// `(i, G_i)`: profiles agreeing with `v_prime` off bidder `i` with `v_i <= v'_i`.
    pub g_sets: Vec<(usize, Vec<Vec<usize>>)>,
    /// Profiles agreeing with `v_prime` off bidder 1 with `v_1 > v'_1`.
    pub g_one: Vec<Vec<usize>>,
    /// `(i, [s^0, s^-1, ..., s^-d])`, truncated where the grid ends.
    pub s_ladder: Vec<(usize, Vec<f64>)>,
}

/// The per-bidder surplus comparison made before each fix:
/// `Pr[v'] (t_y - v'_i)` against `sum_j Pr[(s^-j, v'_-i)] v'_i` over the
/// support profiles at most `d - 1` steps below `v'_i` that are not of the
/// problematic type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurplusCheck {
    pub bidder: usize,
    pub gain: f64,
    pub loss_bound: f64,
}

impl SurplusCheck {
    pub fn holds(&self) -> bool {
        self.gain > self.loss_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixRecord {
    pub context: ShiftContext,
    pub shifted_mass: f64,
    pub surplus: Vec<SurplusCheck>,
}

/// What [`shift_transform`] did.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ShiftReport {
    pub fixes: Vec<FixRecord>,
    /// Allocations zeroed by preprocessing.
    pub preprocessed: usize,
    /// Support profiles where a middle bidder still held the item once its
    /// row had no problematic profile left. These sit in the top partial
    /// block of the truncated grid, above the last profile of problematic type.
    pub boundary_cleared: Vec<Vec<usize>>,
    /// Expected payment removed by clearing those profiles.
    pub boundary_revenue_loss: f64,
    /// Expected payment regained by raising bidder 1 at the top support
    /// row of each cleared column, capped by feasibility.
    pub boundary_recovered: f64,
}

/// Shifts every middle-bidder allocation onto bidder 1.
pub fn shift_transform(mech: &Mechanism, inst: &HardInstance) -> Result<Mechanism> {
    shift_transform_with_report(mech, inst).map(|(m, _)| m)
}

/// Like [`shift_transform`], also returning every fix with its surplus check.
///
/// Rows of bidder 1's grid are processed from the highest offer downwards;
/// within a row the lexicographically smallest problematic profile is fixed
/// first. After a row has no problematic profile left its remaining middle
/// allocations are cleared, which only affects the truncation boundary, and
/// as much of their revenue as feasibility allows is moved onto bidder 1.
pub fn shift_transform_with_report(
    mech: &Mechanism,
    inst: &HardInstance,
) -> Result<(Mechanism, ShiftReport)> {
    check_shrunk_grids(mech, inst)?;
    if let Some(profile) = first_low_priced(mech, inst) {
        return Err(Error::NotHighPriced { profile });
    }
    let grids = mech.grids().to_vec();
    myerson_payments(&mech.alloc, &grids)?;

    let grid = mech.grid().clone();
    let n = grid.n_bidders();
    let middle = inst.middle_grid();
    let masses = inst.joint_shrunk.dense_masses();
    let support = inst.joint_shrunk.pmf().len();
    let d = inst.params.d;
    let mut alloc = mech.alloc.clone();
    let mut report = ShiftReport::default();

    let mut idx = vec![0; n];
    let profile_of = |row: usize, mf: usize| -> usize {
        let mut full = Vec::with_capacity(n);
        full.push(row);
        full.extend(middle.unflat(mf));
        grid.flat(&full)
    };

    for row in (0..inst.family.m).rev() {
        loop {
            report.preprocessed += preprocess(&mut alloc, &grid, inst);

            // Lexicographically smallest problematic profile in this row.
            let found = (0..middle.len())
                .filter(|&mf| inst.h_table[mf] == row)
                .map(|mf| profile_of(row, mf))
                .find(|&f| (1..n).any(|i| alloc[i][f] > 0.0));
            let Some(fv) = found else { break };
            if report.fixes.len() >= support {
                return Err(Error::NoTermination(report.fixes.len()));
            }
            fill_idx(&grid, fv, &mut idx);
            let record = apply_fix(&mut alloc, &grid, &grids, &masses, inst, fv, d)?;
            report.fixes.push(record);
        }

        // Boundary: what is left in this row sits above the last
        // problematic-type profile of its axis. Clear it and buy the lost
        // payments back from bidder 1 at the top support row of the column,
        // where no middle bidder holds anything once that row is processed.
        let pay = myerson_payments(&alloc, &grids)?;
        for mf in 0..middle.len() {
            let f = profile_of(row, mf);
            let mut lost = 0.0;
            let mut hit = false;
            for i in 1..n {
                if alloc[i][f] > 0.0 {
                    if masses[f] > 0.0 {
                        hit = true;
                        lost += masses[f] * pay[i][f];
                    }
                    alloc[i][f] = 0.0;
                }
            }
            if !hit {
                continue;
            }
            report.boundary_cleared.push(grid.unflat(f));
            report.boundary_revenue_loss += lost;
            let top = inst.h_table[mf];
            let ft = profile_of(top, mf);
            let price = masses[ft] * inst.family.t[top];
            if top <= row || price <= 0.0 {
                continue;
            }
            let delta = (1.0 - alloc[0][ft]).max(0.0).min(lost / price);
            alloc[0][ft] += delta;
            for a in top + 1..grids[0].len() {
                let g = profile_of(a, mf);
                alloc[0][g] = alloc[0][g].max(alloc[0][ft]);
            }
            report.boundary_recovered += delta * price;
        }
    }

    let pay = myerson_payments(&alloc, &grids)?;
    let out = Mechanism::from_tables(&grids, alloc, pay)?;
    let rep = validate_mechanism(&out, &inst.joint_shrunk)?;
    if !rep.is_valid() {
        return Err(Error::Invariant(format!(
            "shift transform produced an invalid mechanism: {}",
            rep.to_json()
        )));
    }
    if let Some(profile) = first_low_priced(&out, inst) {
        return Err(Error::NotHighPriced { profile });
    }
    Ok((out, report))
}

/// Zeroes `x_i` at off-support profiles with no positive on-support
/// profile below them on bidder `i`'s axis. Returns the number of cells zeroed.
fn preprocess(alloc: &mut [Vec<f64>], grid: &ProductGrid, inst: &HardInstance) -> usize {
    let n = grid.n_bidders();
    let mut idx = vec![0; n];
    let mut zeroed = 0;
    for (i, x) in alloc.iter_mut().enumerate() {
        for base in grid.axis_bases(i) {
            let mut seen_positive = false;
            for f in grid.axis(base, i) {
                fill_idx(grid, f, &mut idx);
                if inst.on_support(&idx) {
                    seen_positive |= x[f] > 0.0;
                } else if !seen_positive && x[f] > 0.0 {
                    x[f] = 0.0;
                    zeroed += 1;
                }
            }
        }
    }
    zeroed
}

fn apply_fix(
    alloc: &mut [Vec<f64>],
    grid: &ProductGrid,
    grids: &[Vec<f64>],
    masses: &[f64],
    inst: &HardInstance,
    fv: usize,
    d: usize,
) -> Result<FixRecord> {
    let n = grid.n_bidders();
    let v_prime = grid.unflat(fv);
    let y = v_prime[0];
    let t_y = inst.family.t[y];
    let bidders: Vec<usize> = (1..n).filter(|&i| alloc[i][fv] > 0.0).collect();
    let shifted: f64 = bidders.iter().map(|&i| alloc[i][fv]).sum();
    let mut idx = vec![0; n];

    let mut surplus = Vec::new();
    let mut g_sets = Vec::new();
    let mut s_ladder = Vec::new();
    for &i in &bidders {
        let own = v_prime[i];
        let value = grids[i][own];
        let gain = masses[fv] * (t_y - value);
        let mut loss_bound = 0.0;
        for j in 1..=own {
            let f = grid.with_coord(fv, i, own - j);
            fill_idx(grid, f, &mut idx);
            let on = inst.on_support(&idx);
            let problematic_type = on && inst.h_of_profile(&idx) == y;
            if j < d && on && !problematic_type {
                loss_bound += masses[f] * value;
            } else if on && alloc[i][f] > 0.0 {
                return Err(Error::Invariant(format!(
                    "bidder {i} allocated at {idx:?} below the minimal problematic profile {v_prime:?}"
                )));
            }
        }
        let check = SurplusCheck {
            bidder: i,
            gain,
            loss_bound,
        };
        if !check.holds() {
            return Err(Error::Invariant(format!(
                "surplus inequality fails at {v_prime:?} for bidder {i}: gain {gain} <= loss {loss_bound}"
            )));
        }
        surplus.push(check);
        s_ladder.push((
            i,
            (0..=own.min(d)).map(|j| grids[i][own - j]).collect::<Vec<_>>(),
        ));
        g_sets.push((
            i,
            (0..=own).map(|k| grid.unflat(grid.with_coord(fv, i, k))).collect::<Vec<_>>(),
        ));
    }

    // Zero every bidder in I on {v'} and G_i.
    for &i in &bidders {
        for k in 0..=v_prime[i] {
            alloc[i][grid.with_coord(fv, i, k)] = 0.0;
        }
    }
    // Move the mass to bidder 1 at v' and on G_1.
    let x1 = alloc[0][fv] + shifted;
    alloc[0][fv] = x1;
    let mut g_one = Vec::new();
    for a in y + 1..grids[0].len() {
        let f = grid.with_coord(fv, 0, a);
        alloc[0][f] = x1;
        for x in alloc.iter_mut().skip(1) {
            x[f] = 0.0;
        }
        g_one.push(grid.unflat(f));
    }

    Ok(FixRecord {
        context: ShiftContext {
            v_prime,
            bidders,
            y,
            g_sets,
            g_one,
            s_ladder,
        },
        shifted_mass: shifted,
        surplus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{build_hard_instance, BalancedSpec};
    use crate::mechanisms::{expected_revenue, explicit_shrunken_mechanism};
    use crate::DEFAULT_Z;

    fn inst() -> HardInstance {
        build_hard_instance(3, BalancedSpec::new(0.01, 8, 3).unwrap(), DEFAULT_Z).unwrap()
    }

    #[test]
    fn explicit_shrunken_is_high_priced_fixed_point() {
        let inst = inst();
        let mech = explicit_shrunken_mechanism(&inst);
        assert!(is_high_priced(&mech, &inst).unwrap());
        let hp = high_priced_transform(&mech, &inst).unwrap();
        assert_eq!(hp, mech);
        let (shifted, report) = shift_transform_with_report(&mech, &inst).unwrap();
        assert!(report.fixes.is_empty());
        assert_eq!(shifted, mech);
    }

    #[test]
    fn zero_mechanism_is_high_priced() {
        let inst = inst();
        let zero = Mechanism::zero(inst.joint_shrunk.grids());
        assert!(is_high_priced(&zero, &inst).unwrap());
    }

    #[test]
    fn posted_price_t0_is_low_priced_and_transform_keeps_revenue() {
        let inst = inst();
        let dist = &inst.joint_shrunk;
        let mech = Mechanism::posted_price(dist.grids(), 0, inst.family.t[0]);
        assert!(!is_high_priced(&mech, &inst).unwrap());
        let before = expected_revenue(&mech, dist).unwrap();
        let hp = high_priced_transform(&mech, &inst).unwrap();
        assert!(is_high_priced(&hp, &inst).unwrap());
        let after = expected_revenue(&hp, dist).unwrap();
        assert!((before - after).abs() < 1e-9, "{before} vs {after}");
        assert!(matches!(shift_transform(&mech, &inst), Err(Error::NotHighPriced { .. })));
    }

    #[test]
    fn shifting_bidder_two_raises_revenue() {
        let inst = inst();
        let dist = &inst.joint_shrunk;
        let grids = dist.grids().to_vec();
        let grid = ProductGrid::new(&[grids[0].len(), grids[1].len()]);
        // Bidder 2 wins whenever v_1 sits exactly at the offer and is then
        // offered a price of v_2's lowest value; bidder 1 never wins.
        let mut alloc = vec![vec![0.0; grid.len()]; 2];
        for f in 0..grid.len() {
            let idx = grid.unflat(f);
            if idx[0] == inst.h_of_profile(&idx) {
                for k in idx[1]..grids[1].len() {
                    let g = grid.with_coord(f, 1, k);
                    if grid.coord(g, 0) == idx[0] {
                        alloc[1][g] = 1.0;
                    }
                }
            }
        }
        let pay = myerson_payments(&alloc, &grids).unwrap();
        let mech = Mechanism::from_tables(&grids, alloc, pay).unwrap();
        assert!(validate_mechanism(&mech, dist).unwrap().is_valid());
        let before = expected_revenue(&mech, dist).unwrap();
        let (out, report) = shift_transform_with_report(&mech, &inst).unwrap();
        let after = expected_revenue(&out, dist).unwrap();
        assert!(after > before, "{after} <= {before}");
        assert!(!report.fixes.is_empty());
        for fix in &report.fixes {
            assert!(fix.surplus.iter().all(SurplusCheck::holds));
        }
        for idx in dist.pmf().keys() {
            assert_eq!(out.alloc[1][grid.flat(idx)], 0.0);
        }
    }
}
