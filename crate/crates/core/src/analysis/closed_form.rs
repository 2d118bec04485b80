use crate::error::{invalid, Error, Result};

/// Neumaier-compensated sum of `1/j` for `j` in `b..=a`, added from the small end.
pub fn harmonic_sum(b: u64, a: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in (b..=a).rev() {
        let term = 1.0 / j as f64;
        let t = sum + term;
        if sum.abs() >= term {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_dz(d: u64, z: f64) -> Result<()> {
    if d < 4 {
        return Err(invalid("d", format!("must be at least 4, got {d}")));
    }
    if !(z > 1.0 && z < d as f64) {
        return Err(invalid("z", format!("must lie in (1, d), got {z}")));
    }
    Ok(())
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(invalid("epsilon", format!("must lie in [0, 1/2], got {epsilon}")));
    }
    Ok(())
}

/// `(z-1) * sum_{j = d - floor(d/z) + 1}^{d} 1/j`, the closed form used by the ratio bound.
pub fn prob_not_top(d: u64, z: f64) -> Result<f64> {
    check_dz(d, z)?;
    let lo = d - (d as f64 / z).floor() as u64 + 1;
    Ok((z - 1.0) * harmonic_sum(lo, d))
}

/// `Pr[v_1 != t_h]` summed exactly over the law of `h`:
/// `(z-1) * sum_{j = d - m + 2}^{d} 1/j` with `m = floor(d/z) - 1`.
///
/// This drops the two smallest terms of [`prob_not_top`].
pub fn prob_not_top_exact(d: u64, z: f64) -> Result<f64> {
    check_dz(d, z)?;
    let m = (d as f64 / z).floor() as u64 - 1;
    if m < 2 {
        return Ok(0.0);
    }
    Ok((z - 1.0) * harmonic_sum(d - m + 2, d))
}

/// `z / (z + prob_not_top(d, z) * (1 - 2 epsilon))`.
pub fn ratio_bound(d: u64, epsilon: f64, z: f64) -> Result<f64> {
    check_eps(epsilon)?;
    let p = prob_not_top(d, z)?;
    Ok(z / (z + p * (1.0 - 2.0 * epsilon)))
}

/// The same ratio with [`prob_not_top_exact`] in place of the closed form.
pub fn ratio_exact(d: u64, epsilon: f64, z: f64) -> Result<f64> {
    check_eps(epsilon)?;
    let p = prob_not_top_exact(d, z)?;
    Ok(z / (z + p * (1.0 - 2.0 * epsilon)))
}

/// `(ln((a+1)/b), ln(a/(b-1)))`, bracketing `sum_{j=b}^{a} 1/j`. The upper
/// end is infinite for `b = 1`.
pub fn harmonic_bounds(b: u64, a: u64) -> Result<(f64, f64)> {
    if b < 1 {
        return Err(invalid("b", "must be at least 1"));
    }
    if a < b {
        return Err(invalid("a", format!("must be at least b = {b}, got {a}")));
    }
    let span = (a - b + 1) as f64;
    let lower = (span / b as f64).ln_1p();
    let upper = if b == 1 {
        f64::INFINITY
    } else {
        (span / (b - 1) as f64).ln_1p()
    };
    let sum = harmonic_sum(b, a);
    if !(lower <= sum && sum <= upper) {
        return Err(Error::Invariant(format!(
            "harmonic sandwich fails for b={b}, a={a}: {lower} <= {sum} <= {upper}"
        )));
    }
    Ok((lower, upper))
}
