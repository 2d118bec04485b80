use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::closed_form::{prob_not_top, prob_not_top_exact, ratio_bound};
use crate::distributions::{build_hard_instance_capped, BalancedSpec, DEFAULT_SIZE_CAP};
use crate::error::{invalid, Result};
use crate::optimal::{optimal_mechanism, WinnerRestriction, DEFAULT_LP_CAP};
use crate::LIMIT_RATIO;

/// Solves both LPs on a truncated instance next to the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpCrossCheckConfig {
    pub n: usize,
    pub trunc_blocks: usize,
    pub cap: usize,
}

impl Default for LpCrossCheckConfig {
    fn default() -> Self {
        Self {
            n: 3,
            trunc_blocks: 3,
            cap: DEFAULT_LP_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpCrossCheck {
    pub n: usize,
    pub trunc_error: f64,
    pub lp_shrunk: f64,
    pub lp_full: f64,
    pub lp_ratio: f64,
    /// `|lp_ratio - ratio| <= 20 * trunc_error`.
    pub agrees: bool,
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub d: u64,
    pub epsilon: f64,
    /// Truncation blocks of the LP cross-check; `None` for purely analytic rows.
    pub k: Option<usize>,
    pub rev_shrunk: f64,
    pub rev_full: f64,
    pub ratio: f64,
    pub bound_formula: f64,
    pub limit_gap: f64,
    /// `z + Pr[v_1 != t_h] (1 - 2 epsilon)` with the probability summed
    /// exactly over the law of `h`; the revenue the full-market mechanism earns.
    pub rev_full_explicit: f64,
    pub lp: Option<LpCrossCheck>,
}

pub fn gap_report(d: u64, epsilon: f64, z: f64) -> Result<GapReport> {
    let rev_shrunk = z;
    let rev_full = z + prob_not_top(d, z)? * (1.0 - 2.0 * epsilon);
    let ratio = rev_shrunk / rev_full;
    Ok(GapReport {
        d,
        epsilon,
        k: None,
        rev_shrunk,
        rev_full,
        ratio,
        bound_formula: ratio_bound(d, epsilon, z)?,
        limit_gap: (ratio - LIMIT_RATIO).abs(),
        rev_full_explicit: z + prob_not_top_exact(d, z)? * (1.0 - 2.0 * epsilon),
        lp: None,
    })
}

fn cross_check(report: &mut GapReport, z: f64, cfg: &LpCrossCheckConfig) -> Result<()> {
    let d = usize::try_from(report.d).map_err(|_| invalid("d", "too large"))?;
    let spec = BalancedSpec::new(report.epsilon, d, cfg.trunc_blocks)?;
    let inst = build_hard_instance_capped(cfg.n, spec, z, DEFAULT_SIZE_CAP)?;
    let shrunk = optimal_mechanism(&inst.joint_shrunk, WinnerRestriction::all(), cfg.cap)?.revenue;
    let full = optimal_mechanism(&inst.joint_n, WinnerRestriction::all(), cfg.cap)?.revenue;
    let lp_ratio = shrunk / full;
    report.k = Some(cfg.trunc_blocks);
    report.lp = Some(LpCrossCheck {
        n: cfg.n,
        trunc_error: inst.trunc_error,
        lp_shrunk: shrunk,
        lp_full: full,
        lp_ratio,
        agrees: (lp_ratio - report.ratio).abs() <= 20.0 * inst.trunc_error,
    });
    Ok(())
}

/// Closed-form ratios over the grid `d_list x eps_list`, in that order.
pub fn gap_sweep(d_list: &[u64], eps_list: &[f64], z: f64, lp_cross_check: bool) -> Result<Vec<GapReport>> {
    let cfg = lp_cross_check.then(LpCrossCheckConfig::default);
    gap_sweep_with(d_list, eps_list, z, cfg.as_ref())
}

pub fn gap_sweep_with(
    d_list: &[u64],
    eps_list: &[f64],
    z: f64,
    lp: Option<&LpCrossCheckConfig>,
) -> Result<Vec<GapReport>> {
    if d_list.is_empty() {
        return Err(invalid("d", "empty list"));
    }
    if eps_list.is_empty() {
        return Err(invalid("epsilon", "empty list"));
    }
    let points: Vec<(u64, f64)> = d_list
        .iter()
        .flat_map(|&d| eps_list.iter().map(move |&e| (d, e)))
        .collect();
    points
        .par_iter()
        .map(|&(d, e)| {
            let mut r = gap_report(d, e, z)?;
            if let Some(cfg) = lp {
                cross_check(&mut r, z, cfg)?;
            }
            Ok(r)
        })
        .collect()
}

pub const CSV_HEADER: &str = "d,epsilon,K,rev_shrunk,rev_full,ratio,bound_formula,limit_gap";

/// `%.12g`-style formatting.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

pub fn csv_row(r: &GapReport) -> String {
    let k = r.k.map_or("analytic".to_string(), |k| k.to_string());
    let f = |x: f64| fmt_sig(x, 12);
    format!(
        "{},{},{},{},{},{},{},{}",
        r.d,
        f(r.epsilon),
        k,
        f(r.rev_shrunk),
        f(r.rev_full),
        f(r.ratio),
        f(r.bound_formula),
        f(r.limit_gap)
    )
}

pub fn write_csv(reports: &[GapReport], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", csv_row(r))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_Z;

    #[test]
    fn sweep_values() {
        let rows = gap_sweep(&[8, 64, 1024, 1_000_000], &[1e-6], DEFAULT_Z, false).unwrap();
        // 30-digit mpmath evaluations of the closed form.
        let expected = [0.754490648768621, 0.737418621699407, 0.731375821888138];
        for (r, e) in rows.iter().zip(expected) {
            assert!((r.ratio - e).abs() < 1e-12, "{} vs {e}", r.ratio);
        }
        for r in &rows {
            assert!(r.ratio <= r.bound_formula + 1e-9);
            assert!(r.rev_full >= r.rev_shrunk);
        }
        assert!(rows.windows(2).all(|w| w[0].ratio > w[1].ratio));
        assert!(rows[3].limit_gap < 1e-3);
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_sig(1e-6, 12), "1e-6");
        assert_eq!(fmt_sig(0.01, 12), "0.01");
        assert_eq!(fmt_sig(DEFAULT_Z, 12), "1.58197670687");
        assert_eq!(fmt_sig(1234567.0, 12), "1234567");
        assert_eq!(fmt_sig(9.99999999999996, 12), "10");
        assert_eq!(fmt_sig(0.0, 12), "0");
    }

    #[test]
    fn csv_layout() {
        let rows = gap_sweep(&[8], &[0.0], DEFAULT_Z, false).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "8");
        assert_eq!(row[2], "analytic");
        assert!((row[5].parse::<f64>().unwrap() - 0.754490278299).abs() < 1e-12);
    }

    #[test]
    fn lp_cross_check_row() {
        let rows = gap_sweep(&[8], &[0.01], DEFAULT_Z, true).unwrap();
        let lp = rows[0].lp.as_ref().unwrap();
        assert_eq!(rows[0].k, Some(3));
        assert!(lp.agrees);
        assert!((lp.lp_full - rows[0].rev_full_explicit).abs() < 1e-3);
    }
}
