//! Command line front end.
//!
//! Every command writes a CSV (to `--out`, or stdout) whose first lines are
//! `#` comments echoing the parameters. With `--out`, a JSON record of the
//! run is appended to `<out>.meta.jsonl`.
//!
//! Exit codes: 0 success, 2 domain or usage error, 3 convergence or
//! conditioning failure, 4 failed validation check.

use crate::ensemble::{mc_density_histogram, mc_smallest_histogram, mc_split_compare, Histogram, Model, SamplerConfig};
use crate::error::{Error, Result};
use crate::jpdf::{corr_rk_bruteforce, MAX_BRUTEFORCE_N};
use crate::kernels::Kernel;
use crate::sop::{norm_h, p_poly, q_poly};
use crate::suite::{self, Check, SuiteOptions};
use crate::weights::TransitionParams;
use crate::Nu;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Exit code for a failed validation check.
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "crossover", version, about = "Antisymmetric random matrices between chGOE and GAOE")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral density R_1 on a grid: columns lambda, density.
    Density(CurveArgs),
    /// Monte Carlo histogram of all singular values: columns bin_lo, bin_hi, density, poisson_err.
    DensityMc(McArgs),
    /// Truncated smallest-value density on a grid: columns s, value.
    Smallest(SmallestArgs),
    /// Monte Carlo histogram of the smallest singular value.
    SmallestMc(McArgs),
    /// Coefficients of p_j and q_j in powers of x^2, j < n: columns j, k, p, q, h.
    Sop(SopArgs),
    /// Kernel R_1 against brute-force integration of the joint density, n <= 3.
    JpdfCheck(CurveArgs),
    /// Run a validation suite and print a pass/fail table.
    Suite(SuiteArgs),
    /// Kolmogorov-Smirnov test of the large-a split into two GAOE blocks.
    SplitTest(SplitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Number of singular values.
    #[arg(long)]
    pub n: usize,
    /// Zero modes, 0 or 1.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub nu: u8,
    /// Coupling, 0 < a < 1 for analytic curves.
    #[arg(long)]
    pub a: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<TransitionParams> {
        TransitionParams::new(self.n, Nu::try_from(self.nu as usize)?, self.a)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Evaluation grid lo:hi:points, endpoints included.
    #[arg(long, default_value = "0:3:300")]
    pub grid: Grid,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SmallestArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Terms of the expansion in correlation functions, 1 or 2.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Two,
    Three,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Two => Model::TwoMatrix,
            ModelArg::Three => Model::ThreeMatrix,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = suite::DEFAULT_SEED)]
    pub seed: u64,
    /// Independent random streams; results depend on this, not on the thread count.
    #[arg(long, default_value_t = suite::DEFAULT_STREAMS)]
    pub streams: u32,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = ModelArg::Two)]
    pub model: ModelArg,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    /// Histogram range lo:hi; a trailing point count is ignored.
    #[arg(long)]
    pub grid: Option<Grid>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SopArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    /// One of the suite names, or `all`.
    #[arg(long)]
    pub name: String,
    /// Restrict suites that scan several couplings to this one.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = suite::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = suite::DEFAULT_STREAMS)]
    pub streams: u32,
    /// Summary CSV: columns check, observed, limit, passed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = suite::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = suite::DEFAULT_STREAMS)]
    pub streams: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `lo:hi[:points]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Grid, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(format!("expected lo:hi or lo:hi:points, got '{s}'"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"));
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let points = match parts.get(2) {
            Some(p) => p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}"))?,
            None => 2,
        };
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("need finite lo < hi, got {lo}:{hi}"));
        }
        if points < 2 {
            return Err(format!("need at least 2 points, got {points}"));
        }
        Ok(Grid { lo, hi, points })
    }
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { self.hi } else { self.lo + step * i as f64 }).collect()
    }
}

/// A finished command: CSV text and fields for the metadata record.
struct Output {
    csv: String,
    meta: serde_json::Value,
    failed: Vec<Check>,
    table: Option<String>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Messages go to stdout/stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let out_path = out_path(&cli.command).cloned();
    let result = execute(&cli.command).and_then(|o| {
        emit(&o, out_path.as_deref(), &argv, start)?;
        Ok(o)
    });
    match result {
        Ok(o) => {
            if let Some(t) = &o.table {
                print!("{t}");
            }
            if o.failed.is_empty() {
                0
            } else {
                for c in &o.failed {
                    eprintln!("check failed: {}: observed {:e}, limit {:e}", c.name, c.observed, c.limit);
                }
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn out_path(c: &Command) -> Option<&PathBuf> {
    match c {
        Command::Density(a) | Command::JpdfCheck(a) => a.out.as_ref(),
        Command::Smallest(a) => a.curve.out.as_ref(),
        Command::DensityMc(a) | Command::SmallestMc(a) => a.out.as_ref(),
        Command::Sop(a) => a.out.as_ref(),
        Command::Suite(a) => a.out.as_ref(),
        Command::SplitTest(a) => a.out.as_ref(),
    }
}

fn emit(o: &Output, out: Option<&Path>, argv: &[String], start: Instant) -> Result<()> {
    let Some(path) = out else {
        // the suite table already goes to stdout
        if o.table.is_none() {
            print!("{}", o.csv);
        }
        return Ok(());
    };
    std::fs::write(path, &o.csv)?;
    let mut meta = o.meta.clone();
    meta["argv"] = json!(argv);
    meta["git_describe"] = json!(git_describe());
    meta["elapsed_s"] = json!(start.elapsed().as_secs_f64());
    meta["out"] = json!(path.display().to_string());
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.jsonl");
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(PathBuf::from(name))?;
    writeln!(f, "{meta}")?;
    Ok(())
}

fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

fn header(command: &str, fields: &[(&str, String)], columns: &[&str]) -> String {
    let mut s = format!("# crossover {command} {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in fields {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s.push_str(&columns.join(","));
    s.push('\n');
    s
}

fn param_fields(p: &TransitionParams) -> Vec<(&'static str, String)> {
    vec![("n", p.n.to_string()), ("nu", p.nu.to_string()), ("a", p.a.to_string()), ("N", p.dim().to_string())]
}

fn param_json(p: &TransitionParams) -> serde_json::Value {
    json!({"n": p.n, "nu": p.nu.value(), "a": p.a})
}

fn grid_field(g: &Grid) -> (&'static str, String) {
    ("grid", format!("{}:{}:{}", g.lo, g.hi, g.points))
}

fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Density(c) => curve(c, "density", &["lambda", "density"], Vec::new(), |k, x| k.density(x)),
        Command::Smallest(s) => {
            let order = s.order as usize;
            curve(&s.curve, "smallest", &["s", "value"], vec![("order", order.to_string())], move |k, x| {
                k.smallest_truncated(x, order).map(|t| t.value)
            })
        }
        Command::DensityMc(m) => histogram(m, "density-mc", false),
        Command::SmallestMc(m) => histogram(m, "smallest-mc", true),
        Command::Sop(s) => sop(s),
        Command::JpdfCheck(c) => jpdf_check(c),
        Command::Suite(s) => run_suites(s),
        Command::SplitTest(s) => split_test(s),
    }
}

fn curve(
    c: &CurveArgs,
    command: &str,
    columns: &[&str],
    mut extra: Vec<(&'static str, String)>,
    f: impl Fn(&Kernel, f64) -> Result<f64>,
) -> Result<Output> {
    let p = c.params.params()?;
    let k = Kernel::new(p)?;
    let mut fields = param_fields(&p);
    fields.push(grid_field(&c.grid));
    fields.append(&mut extra);
    if k.is_extended() {
        fields.push(("precision", "double-double".into()));
    }
    let mut csv = header(command, &fields, columns);
    for x in c.grid.values() {
        let _ = writeln!(csv, "{x},{}", f(&k, x)?);
    }
    let meta = json!({"command": command, "params": param_json(&p), "grid": [c.grid.lo, c.grid.hi, c.grid.points]});
    Ok(Output { csv, meta, failed: Vec::new(), table: None })
}

fn histogram(m: &McArgs, command: &str, smallest: bool) -> Result<Output> {
    let p = m.params.params()?;
    let cfg = SamplerConfig {
        model: m.model.into(),
        params: p,
        samples: m.sampling.samples,
        seed: m.sampling.seed,
        streams: m.sampling.streams,
    };
    cfg.validate()?;
    if m.bins == 0 {
        return Err(Error::Domain("need at least one bin".into()));
    }
    let (lo, hi) = match m.grid {
        Some(g) => (g.lo, g.hi),
        None if smallest => suite::SMALLEST_RANGE,
        None => (0.0, default_upper_edge(&p, m.sampling.samples)),
    };
    let h = if smallest {
        mc_smallest_histogram(&cfg, lo, hi, m.bins)?
    } else {
        mc_density_histogram(&cfg, lo, hi, m.bins)?
    };
    let model = match m.model {
        ModelArg::Two => "two",
        ModelArg::Three => "three",
    };
    let mut fields = param_fields(&p);
    fields.extend([
        ("model", model.to_string()),
        ("samples", cfg.samples.to_string()),
        ("seed", cfg.seed.to_string()),
        ("streams", cfg.streams.to_string()),
        ("range", format!("{lo}:{hi}")),
        ("bins", m.bins.to_string()),
        ("outside", h.outside.to_string()),
    ]);
    let csv = histogram_csv(&h, header(command, &fields, &["bin_lo", "bin_hi", "density", "poisson_err"]));
    let meta = json!({
        "command": command, "params": param_json(&p), "model": model, "samples": cfg.samples,
        "seed": cfg.seed, "streams": cfg.streams, "bins": m.bins, "range": [lo, hi],
    });
    Ok(Output { csv, meta, failed: Vec::new(), table: None })
}

fn default_upper_edge(p: &TransitionParams, samples: u64) -> f64 {
    // the analytic tail rule where the kernel exists, otherwise a generous edge
    // scaled like the largest singular value
    let width = if p.a > 1.0 { p.a } else { 1.0 };
    Kernel::new(*p)
        .and_then(|k| suite::histogram_upper_edge(&k, samples))
        .unwrap_or_else(|_| width * ((p.n as f64).sqrt() + 2.5))
}

fn histogram_csv(h: &Histogram, mut csv: String) -> String {
    for k in 0..h.bins() {
        let (lo, hi) = h.edges(k);
        let _ = writeln!(csv, "{lo},{hi},{},{}", h.density(k), h.poisson_err(k));
    }
    csv
}

fn sop(s: &SopArgs) -> Result<Output> {
    let p = s.params.params()?;
    p.require_interpolating()?;
    let mut fields = param_fields(&p);
    fields.push(("gauge", "c_tilde = 0".into()));
    let mut csv = header("sop", &fields, &["j", "k", "p", "q", "h"]);
    for j in 0..p.n {
        let (pj, qj, h) = (p_poly(j, p.nu, p.a)?, q_poly(j, p.nu, p.a, 0.0)?, norm_h(j, p.nu, p.a)?);
        for (k, qc) in qj.coeffs().iter().enumerate() {
            let pc = pj.coeffs().get(k).copied().unwrap_or(0.0);
            let _ = writeln!(csv, "{j},{k},{pc},{qc},{h}");
        }
    }
    let meta = json!({"command": "sop", "params": param_json(&p)});
    Ok(Output { csv, meta, failed: Vec::new(), table: None })
}

/// Tolerance of `jpdf-check`.
pub const JPDF_CHECK_TOL: f64 = 1e-6;

fn jpdf_check(c: &CurveArgs) -> Result<Output> {
    let p = c.params.params()?;
    if p.n > MAX_BRUTEFORCE_N {
        return Err(Error::SizeLimit(format!("jpdf-check supports n <= {MAX_BRUTEFORCE_N}, got {}", p.n)));
    }
    let k = Kernel::new(p)?;
    let mut fields = param_fields(&p);
    fields.push(grid_field(&c.grid));
    fields.push(("tolerance", JPDF_CHECK_TOL.to_string()));
    let mut csv = header("jpdf-check", &fields, &["lambda", "kernel", "bruteforce", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for x in c.grid.values() {
        let (kv, bv) = (k.density(x)?, corr_rk_bruteforce(p.n, 1, p.nu, p.a, &[x])?);
        worst = worst.max((kv - bv).abs());
        let _ = writeln!(csv, "{x},{kv},{bv},{}", (kv - bv).abs());
    }
    let check = Check::below("kernel R1 vs brute-force R1", worst, JPDF_CHECK_TOL);
    let failed = if check.passed { Vec::new() } else { vec![check] };
    let meta = json!({"command": "jpdf-check", "params": param_json(&p), "max_abs_diff": worst});
    Ok(Output { csv, meta, failed, table: None })
}

fn run_suites(s: &SuiteArgs) -> Result<Output> {
    let opts = SuiteOptions { a: s.a, seed: s.seed, streams: s.streams };
    let names: Vec<&str> = if s.name == "all" { suite::SUITES.to_vec() } else { vec![s.name.as_str()] };
    let mut checks = Vec::new();
    for name in &names {
        for mut c in suite::run_suite(name, &opts)? {
            c.name = format!("{name}: {}", c.name);
            checks.push(c);
        }
    }
    let mut fields = vec![("suite", s.name.clone()), ("seed", s.seed.to_string()), ("streams", s.streams.to_string())];
    if let Some(a) = s.a {
        fields.push(("a", a.to_string()));
    }
    let mut csv = header("suite", &fields, &["check", "observed", "limit", "passed"]);
    for c in &checks {
        let _ = writeln!(csv, "\"{}\",{},{},{}", c.name.replace('"', "\"\""), c.observed, c.limit, c.passed);
    }
    let failed: Vec<Check> = checks.iter().filter(|c| !c.passed).cloned().collect();
    let meta = json!({
        "command": "suite", "suite": s.name, "a": s.a, "seed": s.seed, "streams": s.streams,
        "checks": checks.len(), "failed": failed.len(),
    });
    Ok(Output { csv, meta, failed, table: Some(suite::format_table(&checks)) })
}

fn split_test(s: &SplitArgs) -> Result<Output> {
    let p = s.params.params()?;
    let ks = mc_split_compare(p.n, p.nu, p.a, s.samples, s.seed, s.streams)?;
    let mut fields = param_fields(&p);
    fields.extend([("samples", s.samples.to_string()), ("seed", s.seed.to_string()), ("streams", s.streams.to_string())]);
    let mut csv = header("split-test", &fields, &["statistic", "critical_1pct", "passes"]);
    let _ = writeln!(csv, "{},{},{}", ks.statistic, ks.critical_1pct, ks.passes());
    let meta = json!({
        "command": "split-test", "params": param_json(&p), "samples": s.samples, "seed": s.seed,
        "streams": s.streams, "statistic": ks.statistic, "critical_1pct": ks.critical_1pct,
    });
    Ok(Output { csv, meta, failed: Vec::new(), table: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:3:4".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!("1:2".parse::<Grid>().unwrap().points, 2);
        assert!("3:1:5".parse::<Grid>().is_err());
        assert!("0:1:1".parse::<Grid>().is_err());
        assert!("0:x".parse::<Grid>().is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_from(["crossover", "density", "--n", "2", "--nu", "0", "--a", "0.5", "--bogus"]), 2);
        assert_eq!(run_from(["crossover", "density", "--n", "2", "--nu", "3", "--a", "0.5"]), 2);
        assert_eq!(run_from(["crossover", "density", "--n", "2", "--nu", "0", "--a", "1.5"]), 2);
    }
}
