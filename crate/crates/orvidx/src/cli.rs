//! Command-line front end: `analyze-seq`, `analyze-fn` and `verify`.
//!
//! Exit codes: 0 success, 1 definite verification failure, 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::associated::{duality_report_with, table_grid, AssociatedPair};
use crate::error::{Error, Result};
use crate::fn_model::{check_omega, OmegaCondition, WeightFunction};
use crate::generators::{four_index_sequence_to, make, Family, FamilySpec, SMOOTH_LN_CEILING};
use crate::indices::{gamma_m, omega_m_index, report, seq_indices};
use crate::legendre::{gamma_shift_check, upper_conjugate, ShiftDirection};
use crate::numeric::linspace;
use crate::seq_model::{check_condition, QuotientSequence, SeqCondition, WeightSequence};
use crate::suites::{run_suite, summary, SuiteConfig, SUITES};
use crate::verdict::num;

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "orvidx", version, about = "Growth and Matuszewska indices of weight sequences and weight functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Analyze a weight sequence given by a family spec or a CSV file.
    AnalyzeSeq(AnalyzeArgs),
    /// Analyze a weight function given by a family spec or a CSV file.
    AnalyzeFn(AnalyzeArgs),
    /// Run a verification suite over the family matrix.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Family spec such as `gevrey:alpha=2`.
    #[arg(value_name = "FAMILY")]
    spec: Option<String>,
    #[arg(long, conflicts_with = "spec")]
    family: Option<String>,
    /// CSV with header `p,log_m` / `p,log_M` (sequences) or `t,sigma` (functions).
    #[arg(long, conflicts_with_all = ["spec", "family"])]
    input: Option<PathBuf>,
    #[arg(long)]
    pmax: Option<usize>,
    #[arg(long)]
    xmax: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    /// Report path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot data path (CSV `series,x,y`).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    pmax: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Family(String),
    Csv(PathBuf),
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub source: Option<Source>,
    pub pmax: Option<usize>,
    pub x_max: Option<f64>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub suite: Option<String>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 0.5) {
            return Err(Error::Input(format!("--tol must lie in (0, 0.5), got {}", self.tol)));
        }
        if let Some(p) = self.pmax {
            if p < 16 {
                return Err(Error::Input(format!("--pmax must be at least 16, got {p}")));
            }
        }
        if let Some(x) = self.x_max {
            if !(x >= 1e3) {
                return Err(Error::Input(format!("--xmax must be at least 1e3, got {x}")));
            }
        }
        if let Some(s) = &self.suite {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::Input(format!("unknown suite '{s}', expected one of {}", SUITES.join(", "))));
            }
        }
        Ok(())
    }
}

fn analyze_config(command: &str, a: AnalyzeArgs) -> Result<RunConfig> {
    let source = match (a.spec.or(a.family), a.input) {
        (Some(f), None) => Source::Family(f),
        (None, Some(p)) => Source::Csv(p),
        _ => return Err(Error::Input("give a family spec or --input".into())),
    };
    Ok(RunConfig {
        command: command.into(),
        source: Some(source),
        pmax: a.pmax,
        x_max: a.xmax,
        tol: a.tol,
        out: a.out,
        plot: a.plot,
        suite: None,
    })
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match cli.cmd {
        Cmd::AnalyzeSeq(a) => analyze_config("analyze-seq", a),
        Cmd::AnalyzeFn(a) => analyze_config("analyze-fn", a),
        Cmd::Verify(v) => Ok(RunConfig {
            command: "verify".into(),
            source: None,
            pmax: v.pmax,
            x_max: None,
            tol: v.tol,
            out: v.out,
            plot: None,
            suite: Some(v.suite),
        }),
    };
    match cfg.and_then(|c| c.validate().map(|_| c)).and_then(|c| execute(&c)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("orvidx: {e}");
            match e {
                Error::Input(_) | Error::Domain(_) | Error::Io(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Executes a validated configuration; returns the exit code.
pub fn execute(cfg: &RunConfig) -> Result<i32> {
    match cfg.command.as_str() {
        "analyze-seq" => {
            let (rep, plot) = cmd_analyze_seq(cfg)?;
            emit(cfg, &rep, plot)?;
            Ok(0)
        }
        "analyze-fn" => {
            let (rep, plot) = cmd_analyze_fn(cfg)?;
            emit(cfg, &rep, plot)?;
            Ok(0)
        }
        "verify" => {
            let rep = cmd_verify(cfg)?;
            let ok = rep["contradictions"].as_array().map(|a| a.is_empty()).unwrap_or(false);
            if !ok {
                for c in rep["contradictions"].as_array().into_iter().flatten() {
                    eprintln!("contradiction: {c}");
                }
            }
            emit(cfg, &rep, None)?;
            Ok(if ok { 0 } else { 1 })
        }
        other => Err(Error::Input(format!("unknown command '{other}'"))),
    }
}

fn emit(cfg: &RunConfig, rep: &Value, plot: Option<String>) -> Result<()> {
    let text = serde_json::to_string_pretty(rep).expect("report serializes") + "\n";
    match &cfg.out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    if let (Some(p), Some(csv)) = (&cfg.plot, plot) {
        write_atomic(p, csv.as_bytes())?;
    }
    Ok(())
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Input(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(e)
    })
}

fn csv_rows(path: &Path) -> Result<(Vec<String>, Vec<(usize, f64, f64)>)> {
    let mut rd = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = rd
        .headers()
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() != 2 {
        return Err(Error::Input(format!("{}: expected two columns, got {:?}", path.display(), headers)));
    }
    let mut rows = vec![];
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Input(format!("{}: line {line}: {e}", path.display())))?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Input(format!("{}: line {line}: bad number in column {}", path.display(), k + 1)))
        };
        rows.push((line, parse(0)?, parse(1)?));
    }
    Ok((headers, rows))
}

/// Sequence from a CSV with header `p,log_m` or `p,log_M`.
pub fn read_sequence_csv(path: &Path) -> Result<WeightSequence> {
    let (h, rows) = csv_rows(path)?;
    if h[0] != "p" || (h[1] != "log_m" && h[1] != "log_M") {
        return Err(Error::Input(format!(
            "{}: header must be 'p,log_m' or 'p,log_M', got '{}'",
            path.display(),
            h.join(",")
        )));
    }
    let mut vals = Vec::with_capacity(rows.len());
    for (k, &(line, p, v)) in rows.iter().enumerate() {
        if p != k as f64 {
            let prev = if k == 0 { "start".to_string() } else { format!("p={}", k - 1) };
            return Err(Error::Input(format!(
                "{}: line {line}: indices must start at 0 and be contiguous, gap after {prev} (found p={p})",
                path.display()
            )));
        }
        if !v.is_finite() {
            return Err(Error::Input(format!("{}: line {line}: value must be finite", path.display())));
        }
        vals.push(v);
    }
    let label = format!("csv:{}", path.display());
    if h[1] == "log_m" {
        if vals.len() < 2 {
            return Err(Error::Input(format!("{}: need at least two rows", path.display())));
        }
        let q = QuotientSequence::from_log_m(vals)?;
        Ok(WeightSequence::from_quotients(&q).with_label(label))
    } else {
        if vals.len() < 3 {
            return Err(Error::Input(format!("{}: need at least three rows", path.display())));
        }
        Ok(WeightSequence::from_log_big_m(vals)?.with_label(label))
    }
}

/// Weight function from a CSV `t,sigma`, linearly interpolated.
pub fn read_function_csv(path: &Path) -> Result<WeightFunction> {
    let (h, rows) = csv_rows(path)?;
    if h[0] != "t" || h[1] != "sigma" {
        return Err(Error::Input(format!("{}: header must be 't,sigma', got '{}'", path.display(), h.join(","))));
    }
    if rows.len() < 4 {
        return Err(Error::Input(format!("{}: need at least four rows", path.display())));
    }
    let mut ts = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for &(line, t, y) in &rows {
        if let Some(&last) = ts.last() {
            if !(t > last) {
                return Err(Error::Input(format!("{}: line {line}: t must be strictly increasing", path.display())));
            }
        }
        if !(t >= 0.0) || !(y >= 0.0) || !y.is_finite() {
            return Err(Error::Input(format!("{}: line {line}: t and sigma must be nonnegative", path.display())));
        }
        if let Some(&prev) = ys.last() {
            if y < prev {
                return Err(Error::Input(format!("{}: line {line}: sigma must be nondecreasing", path.display())));
            }
        }
        ts.push(t);
        ys.push(y);
    }
    let threshold = ts[ys.iter().position(|&y| y > 0.0).unwrap_or(ts.len() - 1)];
    let x_max = ts[ts.len() - 1];
    let f = move |t: f64| crate::profile::interp(&ts, &ys, t);
    WeightFunction::from_fn(format!("csv:{}", path.display()), threshold, x_max, f)
}

fn source_label(s: &Source) -> String {
    match s {
        Source::Family(f) => f.clone(),
        Source::Csv(p) => format!("csv:{}", p.display()),
    }
}

fn load_sequence(cfg: &RunConfig) -> Result<WeightSequence> {
    match cfg.source.as_ref().ok_or_else(|| Error::Input("no input".into()))? {
        Source::Csv(p) => read_sequence_csv(p),
        Source::Family(f) => {
            let spec = FamilySpec::parse(f)?;
            if !spec.is_sequence() {
                return Err(Error::Input(format!("'{f}' is a function family; use analyze-fn")));
            }
            if let FamilySpec::FourIndex { beta, mu, rho, alpha } = spec {
                let p = cfg.pmax.unwrap_or(crate::generators::DEFAULT_PMAX);
                let x = cfg.x_max.unwrap_or(SMOOTH_LN_CEILING.exp());
                return four_index_sequence_to(beta, mu, rho, alpha, p, x);
            }
            match make(&spec, cfg.pmax)? {
                Family::Seq(m) => Ok(m),
                Family::Fn(_) => unreachable!("sequence spec built a function"),
            }
        }
    }
}

fn load_function(cfg: &RunConfig) -> Result<WeightFunction> {
    let f = match cfg.source.as_ref().ok_or_else(|| Error::Input("no input".into()))? {
        Source::Csv(p) => read_function_csv(p)?,
        Source::Family(s) => {
            let spec = FamilySpec::parse(s)?;
            match make(&spec, cfg.pmax)? {
                Family::Fn(f) => f,
                Family::Seq(_) => return Err(Error::Input(format!("'{s}' is a sequence family; use analyze-seq"))),
            }
        }
    };
    match cfg.x_max {
        Some(x) if x < f.x_max() => f.restricted(x),
        _ => Ok(f),
    }
}

fn err_json(e: &Error) -> Value {
    json!({"error": e.to_string()})
}

/// JSON report and plot CSV for a sequence.
pub fn cmd_analyze_seq(cfg: &RunConfig) -> Result<(Value, Option<String>)> {
    let m = load_sequence(cfg)?;
    let mut conditions = vec![];
    for c in [
        SeqCondition::Lc,
        SeqCondition::Mg,
        SeqCondition::Snq,
        SeqCondition::Nq,
        SeqCondition::GammaR(0.5),
        SeqCondition::GammaR(1.0),
        SeqCondition::GammaR(2.0),
    ] {
        conditions.push(serde_json::to_value(check_condition(&m, c)?).expect("verdict serializes"));
    }
    let idx = seq_indices(&m.quotients());
    let duality = duality_report_with(&m, 2.0 * cfg.tol);
    let (duality_json, srs, gamma_omega) = match &duality {
        Ok(d) => (
            serde_json::to_value(d).expect("duality serializes"),
            json!(d.srs.status),
            json!(d.gamma_om),
        ),
        Err(e) => (err_json(e), json!("inconclusive"), json!(null)),
    };
    let rep = json!({
        "schema": SCHEMA,
        "command": "analyze-seq",
        "source": source_label(cfg.source.as_ref().unwrap()),
        "label": m.label(),
        "horizon": m.horizon(),
        "x_max": num(m.x_max()),
        "tol": cfg.tol,
        "conditions": conditions,
        "indices": idx,
        "gamma": gamma_m(&m),
        "omega": omega_m_index(&m),
        "gamma_omega": gamma_omega,
        "srs": srs,
        "duality": duality_json,
    });
    let plot = cfg.plot.as_ref().map(|_| seq_plot(&m));
    Ok((rep, plot))
}

fn seq_plot(m: &WeightSequence) -> String {
    let mut s = String::from("series,x,y\n");
    let lm = m.quotients();
    for (p, v) in lm.table().iter().enumerate() {
        s.push_str(&format!("log_m,{p},{v:e}\n"));
    }
    // ω_M and ν_m against v = ln t; t itself overflows for fast sequences
    let pair = AssociatedPair::new(m);
    let vs: Vec<f64> = table_grid(m, 256).into_iter().map(f64::ln).collect();
    let tab = m.log_m_table();
    let top = tab[tab.len() - 1];
    let vs = if vs.iter().all(|v| v.is_finite()) { vs } else { linspace(tab[0] - 1.0, top - 1e-6 * (1.0 + top.abs()), 256) };
    for &v in &vs {
        if let Ok(w) = pair.omega_v(v) {
            s.push_str(&format!("omega,{v:e},{w:e}\n"));
        }
    }
    for &v in &vs {
        if let Ok(n) = pair.nu_v(v) {
            s.push_str(&format!("nu,{v:e},{n:e}\n"));
        }
    }
    s
}

/// JSON report and plot CSV for a function.
pub fn cmd_analyze_fn(cfg: &RunConfig) -> Result<(Value, Option<String>)> {
    let f = load_function(cfg)?;
    let conditions: Vec<Value> = OmegaCondition::ALL
        .iter()
        .map(|&c| serde_json::to_value(check_omega(&f, c)).expect("verdict serializes"))
        .collect();
    let r = report(&f);
    let shifts: Vec<Value> = [ShiftDirection::Upper, ShiftDirection::Lower]
        .iter()
        .map(|&d| serde_json::to_value(gamma_shift_check(&f, d, cfg.tol)).expect("verdict serializes"))
        .collect();
    let rep = json!({
        "schema": SCHEMA,
        "command": "analyze-fn",
        "source": source_label(cfg.source.as_ref().unwrap()),
        "label": f.label,
        "x_max": num(f.x_max()),
        "tol": cfg.tol,
        "conditions": conditions,
        "indices": r,
        "gamma": r.gamma,
        "gamma_bar": r.gamma_bar,
        "gamma_shift": shifts,
    });
    let plot = cfg.plot.as_ref().map(|_| fn_plot(&f));
    Ok((rep, plot))
}

fn fn_plot(f: &WeightFunction) -> String {
    let mut s = String::from("series,x,y\n");
    let p = f.profile();
    for u in linspace(p.lo, p.hi, 256) {
        s.push_str(&format!("sigma,{:e},{:e}\n", u.exp(), p.at(u).exp()));
    }
    if let Ok(c) = upper_conjugate(f) {
        let g = c.graph(p.hi.min(20.0), 129);
        for i in g.trusted() {
            s.push_str(&format!("conjugate,{:e},{:e}\n", g.x[i], g.y[i]));
        }
    }
    s
}

/// Suite report with `schema`, a summary and every entry.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Value> {
    let name = cfg.suite.as_deref().unwrap_or("all");
    let sc = SuiteConfig {
        pmax: cfg.pmax,
        tol: cfg.tol,
    };
    let r = run_suite(name, &sc).ok_or_else(|| Error::Input(format!("unknown suite '{name}'")))?;
    Ok(json!({
        "schema": SCHEMA,
        "command": "verify",
        "suite": name,
        "pmax": cfg.pmax,
        "tol": cfg.tol,
        "summary": summary(&r),
        "contradictions": r.contradictions,
        "entries": r.entries,
    }))
}
