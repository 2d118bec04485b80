//! The `shrinkage` command line.
//!
//! Exit status is 0 on success, 1 when a validation check fails and 2 on
//! usage errors, missing files, schema violations or cap violations.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, ErrorKind, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{gap_sweep, lemma_suite, monte_carlo_revenue, write_csv, RngSeed};
use crate::distributions::{build_hard_instance_capped, BalancedSpec, HardInstance, JointDistribution};
use crate::error::{invalid, Error, Result};
use crate::mechanisms::{
    expected_revenue, explicit_full_mechanism, explicit_shrunken_mechanism, high_priced_transform,
    shift_transform_with_report, validate_mechanism, Mechanism,
};
use crate::optimal::{
    build_lp_with, optimal_mechanism, IcScope, WinnerRestriction, DEFAULT_LP_CAP,
};
use crate::{AXIOM_TOL, DEFAULT_Z};

macro_rules! say {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Debug, Parser)]
#[command(name = "shrinkage", version, about = "Hard instances, exact revenue LPs and mechanism transforms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a truncated hard instance and write it as JSON.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long = "K", default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_Z)]
        z: f64,
        #[arg(long, default_value_t = crate::distributions::DEFAULT_SIZE_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the full-market explicit mechanism.
        #[arg(long)]
        explicit_full: Option<PathBuf>,
        /// Also write the shrunk-market explicit mechanism.
        #[arg(long)]
        explicit_shrunk: Option<PathBuf>,
    },
    /// Check an instance file and, optionally, a mechanism against it.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        mech: Option<PathBuf>,
    },
    /// Expected revenue of a mechanism on an instance.
    Revenue {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Solve the revenue LP.
    Lp {
        #[arg(long)]
        instance: PathBuf,
        /// `all` or `top:K`.
        #[arg(long, default_value = "all")]
        winners: String,
        #[arg(long, value_enum, default_value_t = Market::Full)]
        market: Market,
        #[arg(long, default_value_t = DEFAULT_LP_CAP)]
        cap: usize,
        /// Write the optimal mechanism as JSON.
        #[arg(long)]
        mech_out: Option<PathBuf>,
        /// Write the full LP in plain text.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Apply a mechanism transformation.
    Transform {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        kind: TransformKind,
        #[arg(long)]
        out: PathBuf,
        /// Write the shift report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Closed-form revenue ratios over a grid of `d` and `epsilon`.
    Sweep {
        /// Comma-separated list, e.g. `8,64,1024` or `1e6`.
        #[arg(long)]
        d: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = DEFAULT_Z)]
        z: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also solve both LPs on a truncated instance (n = 3, K = 3).
        #[arg(long)]
        lp_check: bool,
    },
    /// Check the equal-revenue family identities.
    Lemmas {
        /// A range `a..b` (inclusive) or a comma-separated list.
        #[arg(long, default_value = "4..128")]
        d: String,
        #[arg(long, default_value_t = DEFAULT_Z)]
        z: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Monte Carlo revenue estimate with untruncated sampling.
    Montecarlo {
        #[arg(long)]
        instance: PathBuf,
        /// Defaults to the full-market explicit mechanism.
        #[arg(long)]
        mech: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Market {
    Full,
    Shrunk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    HighPriced,
    Shift,
}

enum Outcome {
    Ok,
    Failed,
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Failed) => 1,
        Err(Error::Io(e)) if e.kind() == ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn parse_d_list(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a = parse_count(a)?;
        let b = parse_count(b)?;
        if a > b {
            return Err(invalid("d", format!("empty range {s}")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(parse_count).collect()
}

fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) => Ok(v as u64),
        _ => Err(invalid("d", format!("not a non-negative integer: {s:?}"))),
    }
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| invalid("eps", format!("not a number: {t:?}")))
        })
        .collect()
}

fn parse_winners(s: &str) -> Result<WinnerRestriction> {
    if s == "all" {
        return Ok(WinnerRestriction::all());
    }
    let k = s
        .strip_prefix("top:")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| invalid("winners", format!("expected `all` or `top:K`, got {s:?}")))?;
    Ok(WinnerRestriction::top_k(k))
}

fn market_of<'a>(inst: &'a HardInstance, mech: &Mechanism) -> Result<&'a JointDistribution> {
    if inst.joint_n.same_grids(mech.grids()) {
        Ok(&inst.joint_n)
    } else if inst.joint_shrunk.same_grids(mech.grids()) {
        Ok(&inst.joint_shrunk)
    } else {
        Err(Error::GridMismatch(
            "mechanism grids match neither market of the instance".into(),
        ))
    }
}

fn with_path<'a>(field: &'static str, path: &'a Path) -> impl FnOnce(Error) -> Error + 'a {
    move |e| match e {
        Error::Io(e) => invalid(field, format!("{}: {e}", path.display())),
        e => e,
    }
}

fn load_instance(path: &Path) -> Result<HardInstance> {
    HardInstance::load(path).map_err(with_path("instance", path))
}

fn load_mechanism(path: &Path) -> Result<Mechanism> {
    Mechanism::load(path).map_err(with_path("mech", path))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| with_path("out", path)(e.into()))
}

fn execute(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Build {
            n,
            d,
            eps,
            k,
            z,
            cap,
            out,
            explicit_full,
            explicit_shrunk,
        } => {
            let inst = build_hard_instance_capped(n, BalancedSpec::new(eps, d, k)?, z, cap)?;
            inst.save(&out)?;
            say!(
                "wrote {} (m={}, {} support profiles, trunc_error={})",
                out.display(),
                inst.family.m,
                inst.joint_n.pmf().len(),
                inst.trunc_error
            );
            if let Some(p) = explicit_full {
                explicit_full_mechanism(&inst).save(&p)?;
                say!("wrote {}", p.display());
            }
            if let Some(p) = explicit_shrunk {
                explicit_shrunken_mechanism(&inst).save(&p)?;
                say!("wrote {}", p.display());
            }
            Ok(Outcome::Ok)
        }
        Command::Validate { instance, mech } => {
            let inst = load_instance(&instance)?;
            say!(
                "instance ok: n={} d={} epsilon={} K={} m={}",
                inst.n, inst.params.d, inst.params.epsilon, inst.params.trunc_blocks, inst.family.m
            );
            let Some(mech) = mech else { return Ok(Outcome::Ok) };
            let mech = load_mechanism(&mech)?;
            let report = validate_mechanism(&mech, market_of(&inst, &mech)?)?;
            say!("{}", report.to_json());
            Ok(if report.is_valid() {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::Revenue { mech, instance } => {
            let inst = load_instance(&instance)?;
            let mech = load_mechanism(&mech)?;
            let dist = market_of(&inst, &mech)?;
            let report = validate_mechanism(&mech, dist)?;
            say!("{:.12}", expected_revenue(&mech, dist)?);
            if !report.is_valid() {
                eprintln!("mechanism fails validation: {}", report.to_json());
                return Ok(Outcome::Failed);
            }
            Ok(Outcome::Ok)
        }
        Command::Lp {
            instance,
            winners,
            market,
            cap,
            mech_out,
            export,
        } => {
            let inst = load_instance(&instance)?;
            let restrict = parse_winners(&winners)?;
            let dist = match market {
                Market::Full => &inst.joint_n,
                Market::Shrunk => &inst.joint_shrunk,
            };
            if let Some(p) = export {
                let lp = build_lp_with(dist, restrict, IcScope::AllPairs, cap)?;
                create(&p)?.write_all(lp.to_plain_text().as_bytes())?;
            } else {
                restrict.validate(dist.n_bidders())?;
            }
            let opt = optimal_mechanism(dist, restrict, cap)?;
            say!("{:.12}", opt.revenue);
            if let Some(p) = mech_out {
                opt.mechanism.save(&p)?;
            }
            Ok(Outcome::Ok)
        }
        Command::Transform {
            mech,
            instance,
            kind,
            out,
            report,
        } => {
            let inst = load_instance(&instance)?;
            let mech = load_mechanism(&mech)?;
            let before = expected_revenue(&mech, &inst.joint_shrunk)?;
            let result = match kind {
                TransformKind::HighPriced => high_priced_transform(&mech, &inst)?,
                TransformKind::Shift => {
                    let (m, rep) = shift_transform_with_report(&mech, &inst)?;
                    say!(
                        "fixes={} boundary_cleared={} boundary_revenue_loss={:.12} boundary_recovered={:.12}",
                        rep.fixes.len(),
                        rep.boundary_cleared.len(),
                        rep.boundary_revenue_loss,
                        rep.boundary_recovered
                    );
                    if let Some(p) = report {
                        serde_json::to_writer_pretty(create(&p)?, &rep)?;
                    }
                    m
                }
            };
            let after = expected_revenue(&result, &inst.joint_shrunk)?;
            result.save(&out)?;
            say!("revenue {before:.12} -> {after:.12}");
            let valid = validate_mechanism(&result, &inst.joint_shrunk)?.is_valid();
            Ok(if valid && after >= before - AXIOM_TOL {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::Sweep {
            d,
            eps,
            z,
            csv,
            lp_check,
        } => {
            let rows = gap_sweep(&parse_d_list(&d)?, &parse_eps_list(&eps)?, z, lp_check)?;
            match csv {
                Some(p) => {
                    let mut w = create(&p)?;
                    write_csv(&rows, &mut w)?;
                    w.flush()?;
                    for r in &rows {
                        say!("d={} epsilon={} ratio={:.6}", r.d, r.epsilon, r.ratio);
                    }
                }
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
            for r in rows.iter().filter_map(|r| r.lp.as_ref().map(|lp| (r, lp))) {
                let (r, lp) = r;
                say!(
                    "lp check d={} epsilon={}: lp_shrunk={:.9} lp_full={:.9} lp_ratio={:.6} trunc_error={:.6} agrees={}",
                    r.d, r.epsilon, lp.lp_shrunk, lp.lp_full, lp.lp_ratio, lp.trunc_error, lp.agrees
                );
            }
            Ok(Outcome::Ok)
        }
        Command::Lemmas { d, z, tol } => {
            let ds: Vec<usize> = parse_d_list(&d)?.into_iter().map(|v| v as usize).collect();
            let rows = lemma_suite(ds, z, tol)?;
            let mut ok = true;
            for r in &rows {
                ok &= r.passed;
                say!(
                    "d={} item {}: {} (float cases {}, max error {:.3e}; exact cases {})",
                    r.d,
                    r.item,
                    if r.passed { "pass" } else { "FAIL" },
                    r.float_cases,
                    r.float_max_error,
                    r.exact_cases
                );
            }
            Ok(if ok { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Montecarlo {
            instance,
            mech,
            samples,
            seed,
        } => {
            let inst = load_instance(&instance)?;
            let mech = match mech {
                Some(p) => load_mechanism(&p)?,
                None => explicit_full_mechanism(&inst),
            };
            let est = monte_carlo_revenue(&mech, &inst, samples, RngSeed::new(seed))?;
            say!(
                "estimate={:.12} std_error={:.12} samples={}",
                est.estimate, est.std_error, est.samples
            );
            Ok(Outcome::Ok)
        }
    }
}
