use std::fmt::Write as _;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub bound: f64,
}

/// A maximisation problem with dense rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    /// `(lo, hi)`; `hi = None` means unbounded above.
    pub var_bounds: Vec<(f64, Option<f64>)>,
}

impl LinearProgram {
    /// Variables start in `[0, inf)` with a zero objective.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            var_bounds: vec![(0.0, None); num_vars],
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, bound: f64) {
        self.constraints.push(LpConstraint {
            coeffs,
            relation,
            bound,
        });
    }

    /// Adds a row given as sparse `(variable, coefficient)` terms.
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, bound: f64) {
        let mut coeffs = vec![0.0; self.num_vars];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.add_constraint(coeffs, relation, bound);
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(invalid("objective", "length differs from num_vars"));
        }
        if self.var_bounds.len() != self.num_vars {
            return Err(invalid("var_bounds", "length differs from num_vars"));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(invalid("objective", "non-finite coefficient"));
        }
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if !lo.is_finite() || hi.is_some_and(|h| !h.is_finite() || h < lo) {
                return Err(invalid("var_bounds", format!("variable {j} has bounds ({lo}, {hi:?})")));
            }
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(invalid("constraints", format!("row {r} has the wrong length")));
            }
            if !c.bound.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(invalid("constraints", format!("row {r} is not finite")));
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.bound,
                Relation::Eq => (lhs - c.bound).abs(),
            };
            worst = worst.max(v);
        }
        for (&(lo, hi), &v) in self.var_bounds.iter().zip(x) {
            worst = worst.max(lo - v);
            if let Some(h) = hi {
                worst = worst.max(v - h);
            }
        }
        worst
    }

    /// Plain-text dump: objective line, one line per row, then bounds.
    pub fn to_plain_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "max {}", join(&self.objective));
        for c in &self.constraints {
            let _ = writeln!(out, "{} {} {}", join(&c.coeffs), c.relation.symbol(), c.bound);
        }
        for (j, (lo, hi)) in self.var_bounds.iter().enumerate() {
            let hi = hi.map_or("inf".to_string(), |h| format!("{h}"));
            let _ = writeln!(out, "bound {j} {lo} {hi}");
        }
        out
    }
}
