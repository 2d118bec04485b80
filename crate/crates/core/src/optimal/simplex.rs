//! Dense two-phase primal simplex.
//!
//! Entering columns are priced by the most negative reduced cost. After a
//! run of degenerate pivots the solver switches to Bland's rule until the
//! objective moves again, which rules out cycling.

use crate::error::{Error, Result};

use super::lp::{LinearProgram, Relation};

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-7;
const MAX_ITERATIONS: usize = 5_000_000;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective_value: f64,
    pub assignment: Vec<f64>,
    pub iterations: usize,
}

struct Tableau {
    width: usize,
    /// `rows` constraint rows followed by the objective row; the last column is the rhs.
    cells: Vec<f64>,
    rows: usize,
    basis: Vec<usize>,
    iterations: usize,
}

impl Tableau {
    fn row(&self, r: usize) -> &[f64] {
        &self.cells[r * self.width..(r + 1) * self.width]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.cells[r * self.width + self.width - 1]
    }

    fn obj(&self) -> &[f64] {
        self.row(self.rows)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let piv = self.cells[pr * w + pc];
        let mut nz = Vec::new();
        for j in 0..w {
            let v = &mut self.cells[pr * w + j];
            if *v != 0.0 {
                *v /= piv;
                nz.push((j, *v));
            }
        }
        self.cells[pr * w + pc] = 1.0;
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.cells[r * w + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.cells[r * w..(r + 1) * w];
            for &(j, v) in &nz {
                row[j] -= f * v;
            }
            row[pc] = 0.0;
        }
        for r in 0..self.rows {
            let rhs = &mut self.cells[r * w + w - 1];
            if *rhs < 0.0 && *rhs > -RESIDUAL_TOL {
                *rhs = 0.0;
            }
        }
        self.basis[pr] = pc;
        self.iterations += 1;
    }

    /// Pivots on columns `< allowed` until optimal. Returns `false` when unbounded.
    fn optimise(&mut self, allowed: usize) -> Result<bool> {
        let mut degenerate = 0;
        loop {
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::NoTermination(self.iterations));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let obj = &self.obj()[..allowed];
            let entering = if bland {
                obj.iter().position(|&c| c < -COST_TOL)
            } else {
                obj.iter()
                    .enumerate()
                    .filter(|(_, &c)| c < -COST_TOL)
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(j, _)| j)
            };
            let Some(pc) = entering else { return Ok(true) };
            // Ties go to the smallest basic index under Bland's rule and to
            // the largest pivot element otherwise.
            let mut best: Option<(usize, f64, f64)> = None;
            for r in 0..self.rows {
                let a = self.cells[r * self.width + pc];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                let better = match best {
                    None => true,
                    Some((br, bv, ba)) => {
                        ratio < bv - RATIO_TOL
                            || (ratio <= bv + RATIO_TOL
                                && if bland {
                                    self.basis[r] < self.basis[br]
                                } else {
                                    a > ba
                                })
                    }
                };
                if better {
                    best = Some((r, ratio, a));
                }
            }
            let Some((pr, ratio, _)) = best else { return Ok(false) };
            if ratio > RATIO_TOL {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            self.pivot(pr, pc);
        }
    }
}

/// Solves `lp` to optimality or reports infeasibility or unboundedness.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars;
    let lo: Vec<f64> = lp.var_bounds.iter().map(|b| b.0).collect();

    // Fixed variables are substituted out; the rest are shifted to start at zero.
    let mut col_of = vec![usize::MAX; n];
    let mut active = Vec::new();
    for (j, &(l, hi)) in lp.var_bounds.iter().enumerate() {
        if hi != Some(l) {
            col_of[j] = active.len();
            active.push(j);
        }
    }
    let na = active.len();

    struct Row {
        coeffs: Vec<f64>,
        relation: Relation,
        rhs: f64,
    }
    let mut rows = Vec::with_capacity(lp.constraints.len());
    for c in &lp.constraints {
        let shift: f64 = c.coeffs.iter().zip(&lo).map(|(a, l)| a * l).sum();
        let coeffs: Vec<f64> = active.iter().map(|&j| c.coeffs[j]).collect();
        if coeffs.iter().all(|&a| a == 0.0) {
            let rhs = c.bound - shift;
            let ok = match c.relation {
                Relation::Le => rhs >= -RESIDUAL_TOL,
                Relation::Eq => rhs.abs() <= RESIDUAL_TOL,
            };
            if !ok {
                return Ok(infeasible(n));
            }
            continue;
        }
        rows.push(Row {
            coeffs,
            relation: c.relation,
            rhs: c.bound - shift,
        });
    }
    for (k, &j) in active.iter().enumerate() {
        if let Some(h) = lp.var_bounds[j].1 {
            let mut coeffs = vec![0.0; na];
            coeffs[k] = 1.0;
            rows.push(Row {
                coeffs,
                relation: Relation::Le,
                rhs: h - lo[j],
            });
        }
    }

    // Column layout: structural | slack or surplus | artificial | rhs.
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.relation == Relation::Le).count();
    let needs_art: Vec<bool> = rows
        .iter()
        .map(|r| r.relation == Relation::Eq || r.rhs < 0.0)
        .collect();
    let n_art = needs_art.iter().filter(|&&a| a).count();
    let width = na + n_slack + n_art + 1;
    let mut t = Tableau {
        width,
        cells: vec![0.0; (m + 1) * width],
        rows: m,
        basis: vec![0; m],
        iterations: 0,
    };
    let (mut s, mut a) = (na, na + n_slack);
    for (r, row) in rows.iter().enumerate() {
        let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
        let cells = &mut t.cells[r * width..(r + 1) * width];
        for (k, &c) in row.coeffs.iter().enumerate() {
            cells[k] = sign * c;
        }
        cells[width - 1] = sign * row.rhs;
        if row.relation == Relation::Le {
            cells[s] = sign;
            if !needs_art[r] {
                t.basis[r] = s;
            }
            s += 1;
        }
        if needs_art[r] {
            cells[a] = 1.0;
            t.basis[r] = a;
            a += 1;
        }
    }

    let art_start = na + n_slack;
    if n_art > 0 {
        // Phase one: maximise minus the sum of artificials.
        for r in 0..m {
            if t.basis[r] >= art_start {
                for j in 0..width {
                    let v = t.cells[r * width + j];
                    t.cells[m * width + j] -= v;
                }
            }
        }
        for j in art_start..art_start + n_art {
            t.cells[m * width + j] = 0.0;
        }
        t.optimise(art_start + n_art)?;
        if t.rhs(m) < -RESIDUAL_TOL {
            let mut sol = infeasible(n);
            sol.iterations = t.iterations;
            return Ok(sol);
        }
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(pc) = (0..art_start).find(|&j| t.cells[r * width + j].abs() > PIVOT_TOL) {
                    t.pivot(r, pc);
                }
            }
        }
    }

    // Phase two.
    let obj_row = m * width;
    t.cells[obj_row..obj_row + width].fill(0.0);
    for (k, &j) in active.iter().enumerate() {
        t.cells[obj_row + k] = -lp.objective[j];
    }
    for r in 0..m {
        let b = t.basis[r];
        let f = t.cells[obj_row + b];
        if f != 0.0 {
            for j in 0..width {
                let v = t.cells[r * width + j];
                t.cells[obj_row + j] -= f * v;
            }
        }
    }
    if !t.optimise(art_start)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective_value: f64::INFINITY,
            assignment: vec![0.0; n],
            iterations: t.iterations,
        });
    }

    let mut x = lo.clone();
    for r in 0..m {
        let b = t.basis[r];
        if b < na {
            x[active[b]] += t.rhs(r);
        }
    }
    let violation = lp.max_violation(&x);
    if violation > RESIDUAL_TOL {
        return Err(Error::Invariant(format!(
            "simplex solution violates a constraint by {violation:e}"
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.objective_at(&x),
        assignment: x,
        iterations: t.iterations,
    })
}

fn infeasible(n: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        objective_value: f64::NEG_INFINITY,
        assignment: vec![0.0; n],
        iterations: 0,
    }
}
