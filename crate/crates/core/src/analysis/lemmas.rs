//! Identity checks for the equal-revenue family, exact and in floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::distributions::equal_revenue_family;
use crate::error::{invalid, Result};

/// The five family identities, numbered as in the usual statement:
/// 1. `qbar_y t_y = z`
/// 2. `qbar_{y+1} + q_y = qbar_y`
/// 3. `sum_{j<y} q_j = (z-1) y / (d-y)`
/// 4. `qbar_y = (d - z y) / (d - y)`
/// 5. `qbar_y + (d-y-1) q_y = z`
pub const LEMMA_ITEMS: [u8; 5] = [1, 2, 3, 4, 5];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub d: usize,
    pub item: u8,
    /// Number of `y` values the identity was evaluated at.
    pub cases: usize,
    /// Largest absolute residual over the float checks; zero for exact runs.
    pub max_error: f64,
    pub passed: bool,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational values of `z` used by the exact suite.
pub fn rational_test_values() -> Vec<BigRational> {
    vec![ratio(3, 2), ratio(8, 5), ratio(19, 12)]
}

struct ExactFamily {
    m: usize,
    q: Vec<BigRational>,
    qbar: Vec<BigRational>,
    t: Vec<BigRational>,
}

fn exact_family(d: usize, z: &BigRational) -> Result<ExactFamily> {
    let dr = BigRational::from_integer(BigInt::from(d));
    if !(z > &BigRational::one() && z < &dr) {
        return Err(invalid("z", format!("must lie in (1, {d})")));
    }
    let m = (&dr / z).floor().to_integer().to_usize().unwrap_or(0).saturating_sub(1);
    if m < 1 {
        return Err(invalid("z", "family is empty (m < 1)"));
    }
    let one = BigRational::one();
    let q: Vec<BigRational> = (0..m.saturating_sub(1))
        .map(|y| {
            let a = BigRational::from_integer(BigInt::from(d - y));
            let b = BigRational::from_integer(BigInt::from(d - y - 1));
            (z - &one) * &dr / (a * b)
        })
        .collect();
    let mut qbar = Vec::with_capacity(m);
    let mut acc = BigRational::zero();
    for y in 0..m {
        qbar.push(&one - &acc);
        if y < q.len() {
            acc += &q[y];
        }
    }
    let t = qbar.iter().map(|qb| z / qb).collect();
    Ok(ExactFamily { m, q, qbar, t })
}

/// Checks items 1 to 5 in exact rational arithmetic for every in-range `y`.
pub fn lemma_checks_exact(d: usize, z: &BigRational) -> Result<Vec<LemmaCheck>> {
    let f = exact_family(d, z)?;
    let one = BigRational::one();
    let dr = BigRational::from_integer(BigInt::from(d));
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    let mut out = Vec::new();
    let mut push = |item: u8, results: Vec<bool>| {
        out.push(LemmaCheck {
            d,
            item,
            cases: results.len(),
            max_error: 0.0,
            passed: results.iter().all(|&b| b),
        });
    };
    push(1, (0..f.m).map(|y| &f.qbar[y] * &f.t[y] == *z).collect());
    push(
        2,
        (0..f.m.saturating_sub(1))
            .map(|y| &f.qbar[y + 1] + &f.q[y] == f.qbar[y])
            .collect(),
    );
    push(
        3,
        (1..f.m)
            .map(|y| {
                let s: BigRational = f.q[..y].iter().sum();
                s == (z - &one) * int(y) / (&dr - int(y))
            })
            .collect(),
    );
    push(
        4,
        (0..f.m)
            .map(|y| f.qbar[y] == (&dr - z * int(y)) / (&dr - int(y)))
            .collect(),
    );
    push(
        5,
        (0..f.m.saturating_sub(1))
            .map(|y| {
                let lhs = &f.qbar[y] + int(d - y - 1) * &f.q[y];
                lhs == *z && (&f.qbar[y] * &f.t[y] - z).abs().is_zero()
            })
            .collect(),
    );
    Ok(out)
}

/// Checks items 1 to 5 on the floating-point family with tolerance `tol`.
pub fn lemma_checks_float(d: usize, z: f64, tol: f64) -> Result<Vec<LemmaCheck>> {
    let f = equal_revenue_family(d, z)?;
    let df = d as f64;
    let mut out = Vec::new();
    let mut push = |item: u8, errs: Vec<f64>| {
        let max_error = errs.iter().cloned().fold(0.0, f64::max);
        out.push(LemmaCheck {
            d,
            item,
            cases: errs.len(),
            max_error,
            passed: max_error <= tol,
        });
    };
    push(1, (0..f.m).map(|y| (f.qbar[y] * f.t[y] - z).abs()).collect());
    push(
        2,
        (0..f.m.saturating_sub(1))
            .map(|y| (f.qbar[y + 1] + f.q[y] - f.qbar[y]).abs())
            .collect(),
    );
    push(
        3,
        (1..f.m)
            .map(|y| {
                let s: f64 = f.q[..y].iter().sum();
                let yf = y as f64;
                (s - (z - 1.0) * yf / (df - yf)).abs()
            })
            .collect(),
    );
    push(
        4,
        (0..f.m)
            .map(|y| {
                let yf = y as f64;
                (f.qbar[y] - (df - z * yf) / (df - yf)).abs()
            })
            .collect(),
    );
    push(
        5,
        (0..f.m.saturating_sub(1))
            .map(|y| (f.qbar[y] + (df - y as f64 - 1.0) * f.q[y] - z).abs())
            .collect(),
    );
    Ok(out)
}

/// One line of the combined suite: an item at one `d`, across the float
/// run and every exact rational `z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSummary {
    pub d: usize,
    pub item: u8,
    pub float_cases: usize,
    pub float_max_error: f64,
    pub exact_cases: usize,
    pub passed: bool,
}

pub fn lemma_suite(d_values: impl IntoIterator<Item = usize>, z: f64, tol: f64) -> Result<Vec<LemmaSummary>> {
    let zs = rational_test_values();
    let mut out = Vec::new();
    for d in d_values {
        let float = lemma_checks_float(d, z, tol)?;
        let exact: Vec<Vec<LemmaCheck>> = zs
            .iter()
            .map(|zr| lemma_checks_exact(d, zr))
            .collect::<Result<_>>()?;
        for (k, fc) in float.iter().enumerate() {
            let exact_cases = exact.iter().map(|e| e[k].cases).sum();
            let exact_ok = exact.iter().all(|e| e[k].passed);
            out.push(LemmaSummary {
                d,
                item: fc.item,
                float_cases: fc.cases,
                float_max_error: fc.max_error,
                exact_cases,
                passed: fc.passed && exact_ok,
            });
        }
    }
    Ok(out)
}
