//! The `polylog` command line: evaluation, verification suites and
//! regulator tables.
//!
//! Reports are JSON Lines (one record per check) or CSV. The first JSON
//! line is a header carrying the run configuration and the calibrated
//! action convention. Exit codes: 0 all checks passed, 1 a check failed,
//! 2 usage or domain error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cyclotomic::{distribution_check, li_at_root_bounded, regulator_vector, split_log_fiber, RootOfUnity};
use crate::dd::{cdd, Cdd, WORKING_DIGITS};
use crate::error::{Error, Result};
use crate::localsys::{
    check_rigidity, format_word, h0, h1, log_rep, log_transition, parse_word, words_up_to, Word,
};
use crate::periods::{compare_paths, convention, verify_equivariance, verify_equivariance_levels, verify_f_invariance};
use crate::polynum::{li_principal, Method, Path};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Cohomology,
    Rigidity,
    Monodromy,
    #[value(name = "f-invariance")]
    FInvariance,
    Splitting,
    Cyclotomic,
    Distribution,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Cohomology => "cohomology",
            Suite::Rigidity => "rigidity",
            Suite::Monodromy => "monodromy",
            Suite::FInvariance => "f-invariance",
            Suite::Splitting => "splitting",
            Suite::Cyclotomic => "cyclotomic",
            Suite::Distribution => "distribution",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polylog", version, about = "Classical polylogarithms: values, monodromy and regulator tables")]
pub struct Cli {
    /// Acceptance tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = WORKING_DIGITS)]
    pub precision: u32,
    /// Largest level `n` (and weight `j`) accepted.
    #[arg(long, global = true, default_value_t = 12)]
    pub max_level: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Li_j at a point or at a root of unity.
    Eval {
        #[arg(long)]
        j: usize,
        /// Point as `re,im` (or just `re`).
        #[arg(long, conflicts_with = "root", allow_hyphen_values = true)]
        t: Option<String>,
        /// Root of unity `e^{2πi a/d}` as `a/d`.
        #[arg(long)]
        root: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Restrict to one level.
        #[arg(long)]
        n: Option<usize>,
        /// Restrict to one loop: `alpha0`, `alpha1` or a word such as
        /// `alpha1*alpha0^-1`.
        #[arg(long = "loop")]
        loop_word: Option<String>,
    },
    /// Regulator table over the primitive d-th roots of unity.
    Regulator {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        d: i64,
    },
}

/// Validated run settings.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub working_precision: u32,
    pub tol: f64,
    pub max_level: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(working_precision: u32, tol: f64, max_level: usize, output: Option<PathBuf>, format: Format) -> Result<Self> {
        if working_precision == 0 || working_precision > WORKING_DIGITS {
            return Err(Error::Domain(format!(
                "precision {working_precision} unavailable: arithmetic carries {WORKING_DIGITS} digits"
            )));
        }
        let floor = 10f64.powi(3 - working_precision as i32);
        if !(tol.is_finite() && tol > 0.0) || tol < floor {
            return Err(Error::Domain(format!(
                "tolerance {tol:e} is below what {working_precision} digits support ({floor:e})"
            )));
        }
        Ok(RunConfig {
            working_precision,
            tol,
            max_level,
            output,
            format,
        })
    }
}

/// One line of a suite report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub index: usize,
    pub suite: &'static str,
    pub label: String,
    pub passed: bool,
    /// Residual or other headline number, when the check has one.
    pub metric: Option<f64>,
    pub detail: Value,
}

fn record<T: Serialize>(suite: &'static str, label: String, passed: bool, metric: Option<f64>, detail: &T) -> Result<CheckRecord> {
    Ok(CheckRecord {
        index: 0,
        suite,
        label,
        passed,
        metric,
        detail: serde_json::to_value(detail)?,
    })
}

fn parse_point(s: &str) -> Result<Cdd> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Domain(format!("bad number {x:?}")));
    match parts.as_slice() {
        [re] => Ok(cdd(num(re)?, 0.0)),
        [re, im] => Ok(cdd(num(re)?, num(im)?)),
        _ => Err(Error::Domain(format!("expected re,im, got {s:?}"))),
    }
}

fn parse_root(s: &str) -> Result<RootOfUnity> {
    let (a, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Domain(format!("expected a/d, got {s:?}")))?;
    let a = a.trim().parse::<i64>().map_err(|_| Error::Domain(format!("bad numerator {a:?}")))?;
    let d = d.trim().parse::<i64>().map_err(|_| Error::Domain(format!("bad denominator {d:?}")))?;
    RootOfUnity::reduced(a, d)
}

// ---- suites ----

fn level_range(n: Option<usize>, max: usize) -> Vec<usize> {
    match n {
        Some(n) => vec![n],
        None => (0..=max).collect(),
    }
}

fn suite_cohomology(n: Option<usize>, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    level_range(n, cfg.max_level.min(12))
        .into_par_iter()
        .map(|n| {
            let rep = log_rep(n);
            let inv = h0(&rep);
            let h = h1(&rep);
            let killed = if n == 0 {
                true
            } else {
                let t = log_transition(n)?;
                inv.iter().all(|v| t.matrix.mul_vec(v).iter().all(num_traits::Zero::is_zero))
            };
            let passed = inv.len() == 1 && h.dimension() == n + 2 && killed;
            let detail = json!({"n": n, "h0": inv.len(), "h1": h.dimension(), "transition_kills_h0": killed});
            record("cohomology", format!("n={n}"), passed, None, &detail)
        })
        .collect()
}

fn suite_rigidity(n: Option<usize>, _cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    level_range(n, 8)
        .into_par_iter()
        .map(|n| {
            let r = check_rigidity(n, 8, 20_240_531)?;
            record("rigidity", format!("n={n}"), r.passed, None, &r)
        })
        .collect()
}

fn loop_words(spec: Option<&str>) -> Result<Vec<Word>> {
    match spec {
        Some(s) => Ok(vec![parse_word(s)?]),
        None => Ok(words_up_to(3)),
    }
}

fn suite_monodromy(n: Option<usize>, loop_word: Option<&str>, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let tol = cfg.tol;
    let words = loop_words(loop_word)?;
    let nested: Vec<Vec<CheckRecord>> = words
        .par_iter()
        .map(|w| -> Result<Vec<CheckRecord>> {
            let reports = match n {
                Some(n) => vec![verify_equivariance(w, n, tol)?],
                None => verify_equivariance_levels(w, 8, tol)?,
            };
            reports
                .into_iter()
                .map(|r| {
                    let label = format!("{} n={}", r.loop_word, r.n);
                    record("monodromy", label, r.passed, Some(r.max_residual), &r)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<CheckRecord> = nested.into_iter().flatten().collect();
    if loop_word.is_none() && n.is_none() {
        out.extend(path_checks(tol)?);
    }
    Ok(out)
}

/// Homotopic and non-homotopic paths to `0.3 + 0.4i`.
pub fn path_checks(tol: f64) -> Result<Vec<CheckRecord>> {
    let target = (0.3, 0.4);
    let direct = Path::from_points(&[target])?;
    let detour = Path::from_points(&[(0.45, -0.3), (0.8, 0.2), target])?;
    let mut out = Vec::new();
    let same = compare_paths(&detour, &[], &direct, 6, tol)?;
    let ok = same.raw_difference < tol && same.raw_difference <= 10.0 * same.combined_err.max(1e-25);
    out.push(record("monodromy", "homotopic paths".into(), ok, Some(same.raw_difference), &same)?);
    for w in ["alpha0", "alpha1", "alpha0*alpha1^-1"] {
        let c = compare_paths(&direct, &parse_word(w)?, &direct, 6, tol)?;
        let ok = c.residual_with_monodromy < tol;
        out.push(record("monodromy", format!("via {w}"), ok, Some(c.residual_with_monodromy), &c)?);
    }
    Ok(out)
}

fn suite_f_invariance(n: Option<usize>, loop_word: Option<&str>, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let words = match loop_word {
        Some(s) => vec![parse_word(s)?],
        None => ["alpha0", "alpha1", "alpha0^-1", "alpha1^-1"]
            .iter()
            .map(|s| parse_word(s))
            .collect::<Result<_>>()?,
    };
    let levels = match n {
        Some(n) => vec![n],
        None => (1..=8).collect(),
    };
    let jobs: Vec<(Word, usize)> = words
        .iter()
        .flat_map(|w| levels.iter().map(move |&n| (w.clone(), n)))
        .collect();
    jobs.par_iter()
        .map(|(w, n)| {
            let r = verify_f_invariance(w, *n, cfg.tol)?;
            record("f-invariance", format!("{} n={n}", format_word(w)), r.passed, Some(r.max_residual), &r)
        })
        .collect()
}

fn suite_splitting(n: Option<usize>, _cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let levels: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (1..=8).collect(),
    };
    let mut jobs = Vec::new();
    for d in 2..=12i64 {
        for a in (1..d).filter(|a| a.gcd(&d) == 1) {
            jobs.push((a, d));
        }
    }
    jobs.par_iter()
        .map(|&(a, d)| {
            let w = RootOfUnity::new(a, d)?;
            let mut ok = true;
            for &n in &levels {
                ok &= split_log_fiber(&w, n).is_ok();
            }
            let detail = json!({"a": a, "d": d, "levels": levels, "split": ok, "tolerance": 0});
            record("splitting", format!("{a}/{d}"), ok, None, &detail)
        })
        .collect()
}

fn suite_cyclotomic(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut jobs = Vec::new();
    for j in 2..=4u32 {
        for d in [2i64, 3, 4, 5, 6, 8, 12] {
            jobs.push((j, d));
        }
    }
    jobs.par_iter()
        .map(|&(j, d)| {
            let r = regulator_vector(j, d, cfg.tol)?;
            let worst = r.entries.iter().map(|e| e.residual_vs_direct).fold(0.0, f64::max);
            record("cyclotomic", format!("j={j} d={d}"), r.passed(), Some(worst), &r)
        })
        .collect()
}

/// Distribution relations are checked at `min(tol, 1e-10)`.
fn suite_distribution(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let tol = cfg.tol.min(1e-10);
    let mut jobs = Vec::new();
    for j in 2..=6u32 {
        for m in [2u32, 3] {
            for t in [(0.3, 0.0), (0.5, 0.2)] {
                jobs.push((j, m, t));
            }
        }
    }
    jobs.par_iter()
        .map(|&(j, m, (x, y))| {
            let r = distribution_check(j, cdd(x, y), m, tol)?;
            record("distribution", format!("j={j} m={m} t={x}+{y}i"), r.passed, Some(r.residual), &r)
        })
        .collect()
}

pub fn run_suite(suite: Suite, n: Option<usize>, loop_word: Option<&str>, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut out = match suite {
        Suite::Cohomology => suite_cohomology(n, cfg)?,
        Suite::Rigidity => suite_rigidity(n, cfg)?,
        Suite::Monodromy => suite_monodromy(n, loop_word, cfg)?,
        Suite::FInvariance => suite_f_invariance(n, loop_word, cfg)?,
        Suite::Splitting => suite_splitting(n, cfg)?,
        Suite::Cyclotomic => suite_cyclotomic(cfg)?,
        Suite::Distribution => suite_distribution(cfg)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [
                Suite::Cohomology,
                Suite::Rigidity,
                Suite::Monodromy,
                Suite::FInvariance,
                Suite::Splitting,
                Suite::Cyclotomic,
                Suite::Distribution,
            ] {
                all.extend(run_suite(s, n, loop_word, cfg)?);
            }
            all
        }
    };
    for (i, r) in out.iter_mut().enumerate() {
        r.index = i;
    }
    Ok(out)
}

// ---- output ----

struct Sink {
    out: Box<dyn Write>,
    format: Format,
}

impl Sink {
    fn open(cfg: &RunConfig) -> Result<Self> {
        let out: Box<dyn Write> = match &cfg.output {
            Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => Box::new(std::io::stdout().lock()),
        };
        Ok(Sink { out, format: cfg.format })
    }

    fn json_line(&mut self, v: &Value) -> Result<()> {
        serde_json::to_writer(&mut self.out, v)?;
        writeln!(self.out)?;
        Ok(())
    }

    fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(&mut self.out);
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::new(std::io::ErrorKind::Other, e.to_string()))
}

fn header(cfg: &RunConfig, command: &str) -> Result<Value> {
    Ok(json!({
        "kind": "header",
        "command": command,
        "config": cfg,
        "convention": convention()?,
    }))
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Shape(_) => 2,
        _ => 1,
    }
}

fn cmd_eval(cfg: &RunConfig, j: usize, t: Option<&str>, root: Option<&str>) -> Result<i32> {
    if j > cfg.max_level {
        return Err(Error::Domain(format!("weight {j} exceeds --max-level {}", cfg.max_level)));
    }
    let (value, err, method, at) = match (t, root) {
        (Some(t), None) => {
            let p = parse_point(t)?;
            let e = li_principal(j, p, cfg.tol * 1e-3)?;
            (e.value, e.err, e.method, json!({"t": [p.re.to_f64(), p.im.to_f64()]}))
        }
        (None, Some(r)) => {
            let w = parse_root(r)?;
            if j < 2 {
                return Err(Error::Domain("on |t| = 1 the series needs j >= 2".into()));
            }
            let (v, err) = li_at_root_bounded(j as u32, &w, cfg.tol * 1e-3)?;
            let at = json!({"root": format!("{}/{}", w.a(), w.d()), "primitive_input": w.is_primitive_input()});
            (v, err, Method::Hurwitz, at)
        }
        _ => return Err(Error::Domain("give exactly one of --t or --root".into())),
    };
    let mut sink = Sink::open(cfg)?;
    let (re, im) = (value.re.to_f64(), value.im.to_f64());
    match sink.format {
        Format::Json => {
            let mut v = json!({"kind": "value", "j": j, "re": re, "im": im, "err": err, "method": method});
            v.as_object_mut().expect("object").extend(at.as_object().expect("object").clone());
            sink.json_line(&v)?;
        }
        Format::Csv => {
            let m = serde_json::to_value(method)?;
            sink.csv(
                &["j", "re", "im", "err", "method"],
                &[vec![j.to_string(), re.to_string(), im.to_string(), format!("{err:e}"), m.as_str().unwrap_or("").to_string()]],
            )?;
        }
    }
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig, suite: Suite, n: Option<usize>, loop_word: Option<&str>) -> Result<i32> {
    if let Some(n) = n {
        if n > cfg.max_level {
            return Err(Error::Domain(format!("level {n} exceeds --max-level {}", cfg.max_level)));
        }
    }
    if let Some(w) = loop_word {
        parse_word(w)?;
    }
    let records = run_suite(suite, n, loop_word, cfg)?;
    let mut sink = Sink::open(cfg)?;
    match sink.format {
        Format::Json => {
            sink.json_line(&header(cfg, &format!("verify {}", suite.name()))?)?;
            for r in &records {
                sink.json_line(&serde_json::to_value(r)?)?;
            }
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.index.to_string(),
                        r.suite.to_string(),
                        r.label.clone(),
                        r.passed.to_string(),
                        r.metric.map(|m| format!("{m:e}")).unwrap_or_default(),
                    ]
                })
                .collect();
            sink.csv(&["index", "suite", "label", "passed", "metric"], &rows)?;
        }
    }
    let failed: Vec<&CheckRecord> = records.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        eprintln!("FAILED {} {}: {}", r.suite, r.label, serde_json::to_string(&r.detail)?);
    }
    Ok(if failed.is_empty() { 0 } else { 1 })
}

fn cmd_regulator(cfg: &RunConfig, j: u32, d: i64) -> Result<i32> {
    if j as usize > cfg.max_level {
        return Err(Error::Domain(format!("weight {j} exceeds --max-level {}", cfg.max_level)));
    }
    let r = regulator_vector(j, d, cfg.tol)?;
    let pair = |v: &crate::mhs::CycloScalar| {
        let z = v.value();
        [z.re.to_f64(), z.im.to_f64()]
    };
    let mut sink = Sink::open(cfg)?;
    match sink.format {
        Format::Json => {
            sink.json_line(&header(cfg, &format!("regulator --j {j} --d {d}"))?)?;
            for e in &r.entries {
                sink.json_line(&json!({
                    "d": d, "a": e.a, "j": j,
                    "class": pair(&e.class),
                    "neg_li": pair(&e.neg_li),
                    "epsilon": pair(&e.epsilon),
                    "residual_vs_direct": e.residual_vs_direct,
                    "plus_residual": e.plus_residual,
                    "agree": e.agree,
                }))?;
            }
            sink.json_line(&json!({"kind": "summary", "symmetric": r.symmetric, "passed": r.passed()}))?;
        }
        Format::Csv => {
            let body: Vec<Vec<String>> = r
                .entries
                .iter()
                .map(|e| {
                    let mut row = vec![d.to_string(), e.a.to_string(), j.to_string()];
                    for v in [&e.class, &e.neg_li, &e.epsilon] {
                        row.extend(pair(v).iter().map(|x| x.to_string()));
                    }
                    row.push(format!("{:e}", e.residual_vs_direct));
                    row.push(format!("{:e}", e.plus_residual));
                    row
                })
                .collect();
            sink.csv(
                &[
                    "d", "a", "j", "class_re", "class_im", "neg_li_re", "neg_li_im", "epsilon_re", "epsilon_im",
                    "residual_vs_direct", "plus_residual",
                ],
                &body,
            )?;
        }
    }
    Ok(if r.passed() { 0 } else { 1 })
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match RunConfig::new(cli.precision, cli.tol, cli.max_level, cli.out.clone(), cli.format) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Eval { j, t, root } => cmd_eval(&cfg, *j, t.as_deref(), root.as_deref()),
        Command::Verify { suite, n, loop_word } => cmd_verify(&cfg, *suite, *n, loop_word.as_deref()),
        Command::Regulator { j, d } => {
            if *d < 2 {
                eprintln!("error: --d must be at least 2");
                return 2;
            }
            cmd_regulator(&cfg, *j, *d)
        }
    };
    match result {
        Ok(code) => code,
        // downstream closed early (e.g. `| head`)
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
