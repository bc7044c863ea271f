//! Benchmark harness: random formula generation with a product-size filter,
//! a process-per-run experiment matrix, and cumulative-distribution
//! summaries of relative method performance.
//!
//! The matrix spawns one `check --negate --format json` worker process per
//! (model, formula, method) cell — verification checks the negated property,
//! so `empty` verdicts mean the property holds — and a crashing or runaway
//! run never takes the harness down.  Records land in the CSV schema
//! `model,formula-id,method,verdict,states,edges,peak-nodes,time-ms,status`.
//! Formula ids are `f<i>` for X-free formulas and `fx<i>` for formulas
//! containing the next-step operator, which lets summaries group by
//! stutter-sensitivity from the records alone.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cli::{CheckReport, Method, ModelSource};
use crate::error::{Deadline, Error, Result};
use crate::logic::DdManager;
use crate::ltl::{self, LtlAst};
use crate::symbolic;
use crate::tgba::Verdict;

/// Runs where every method finished under this bound are dropped from
/// summaries as trivial.
pub const TRIVIAL_MS: u64 = 100;

/// Failing runs are plotted at this percentage of the per-experiment worst.
pub const FAILURE_PERCENT: f64 = 120.0;

// ---------------------------------------------------------------------------
// Formula generation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FormulaKind {
    Random,
    Fairness,
    RandomWithX,
}

impl FormulaKind {
    pub fn from_name(s: &str) -> Result<FormulaKind> {
        match s {
            "random" => Ok(FormulaKind::Random),
            "fairness" => Ok(FormulaKind::Fairness),
            "random-with-x" => Ok(FormulaKind::RandomWithX),
            _ => Err(Error::usage(format!("unknown formula kind {s:?}"))),
        }
    }
}

/// Parameters for [`gen_formulas`].
pub struct FormulaSpec {
    pub kind: FormulaKind,
    /// Operator nesting bound for random subformulas.
    pub depth: usize,
    pub seed: u64,
    /// Keep only formulas whose plain product has at least this many states.
    pub min_product_states: u64,
    /// Candidate evaluations before giving up.
    pub attempt_budget: usize,
}

fn contains_x(f: &LtlAst) -> bool {
    !ltl::is_syntactically_stutter_invariant(f)
}

fn random_formula(rng: &mut StdRng, depth: usize, aps: &[String], allow_x: bool) -> LtlAst {
    let arity = if depth == 0 { 0 } else { rng.random_range(0..3) };
    match arity {
        0 => LtlAst::prop(&aps[rng.random_range(0..aps.len())]),
        1 => {
            let sub = random_formula(rng, depth - 1, aps, allow_x);
            let n_ops = if allow_x { 4 } else { 3 };
            match rng.random_range(0..n_ops) {
                0 => sub.not(),
                1 => sub.eventually(),
                2 => sub.always(),
                _ => sub.next(),
            }
        }
        _ => {
            let lhs = random_formula(rng, depth - 1, aps, allow_x);
            let rhs = random_formula(rng, depth - 1, aps, allow_x);
            match rng.random_range(0..5) {
                0 => lhs.and(rhs),
                1 => lhs.or(rhs),
                2 => lhs.implies(rhs),
                3 => lhs.until(rhs),
                _ => lhs.release(rhs),
            }
        }
    }
}

fn fairness_formula(rng: &mut StdRng, depth: usize, aps: &[String]) -> LtlAst {
    let terms = rng.random_range(1..=3);
    let mut premise: Option<LtlAst> = None;
    for _ in 0..terms {
        let p = LtlAst::prop(&aps[rng.random_range(0..aps.len())])
            .eventually()
            .always();
        premise = Some(match premise {
            None => p,
            Some(acc) => acc.and(p),
        });
    }
    premise.unwrap().implies(random_formula(rng, depth, aps, false))
}

fn candidate(rng: &mut StdRng, spec: &FormulaSpec, aps: &[String]) -> LtlAst {
    match spec.kind {
        FormulaKind::Random => random_formula(rng, spec.depth, aps, false),
        FormulaKind::Fairness => fairness_formula(rng, spec.depth, aps),
        FormulaKind::RandomWithX => {
            let f = random_formula(rng, spec.depth, aps, true);
            if contains_x(&f) {
                f
            } else {
                f.next()
            }
        }
    }
}

/// Generates `n` formulas over the model's atomic propositions.  Candidates
/// are evaluated the way the matrix later checks them — through the product
/// of the *negated* formula, whose emptiness means the property holds — and
/// kept only when that product reaches `min_product_states` states;
/// verified properties are balanced against violated ones to within one
/// formula.  Generation is deterministic in the seed.
pub fn gen_formulas(spec: &FormulaSpec, n: usize, source: &ModelSource) -> Result<Vec<LtlAst>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let aps: Vec<String> = {
        let scratch = DdManager::new();
        let m = source.build(&scratch)?;
        m.aps().iter().map(|&p| scratch.prop_name(p)).collect()
    };
    if aps.is_empty() {
        return Err(Error::usage(
            "model declares no atomic propositions to build formulas from".to_string(),
        ));
    }
    let mut rng = StdRng::seed_from_u64(spec.seed);
    let quota = n.div_ceil(2);
    let mut out = Vec::new();
    let mut kept = [0usize; 2]; // [verified, violated]
    for _ in 0..spec.attempt_budget {
        if out.len() == n {
            break;
        }
        let f = candidate(&mut rng, spec, &aps);
        // Evaluate the candidate on a private manager; a candidate that
        // blows its own budget is skipped, not fatal.
        let eval = || -> Result<Option<Verdict>> {
            let deadline = Deadline::after(Duration::from_secs(30));
            let mgr = DdManager::new();
            let model = source.build(&mgr)?;
            let aut = ltl::translate(&mgr, &f.clone().not())?;
            let p = symbolic::build_symbolic_product(&aut, model.as_ref())?;
            let reach = p.reachable(&deadline)?;
            let states = u64::try_from(&p.count(&reach)?).unwrap_or(u64::MAX);
            if states < spec.min_product_states {
                return Ok(None);
            }
            Ok(Some(symbolic::owcty(&p, &deadline)?.verdict))
        };
        let verdict = match eval() {
            Ok(Some(v)) => v,
            Ok(None) => continue,
            Err(Error::Timeout(_)) | Err(Error::Resource(_)) => continue,
            Err(e) => return Err(e),
        };
        let class = (verdict == Verdict::NonEmpty) as usize;
        if kept[class] < quota {
            kept[class] += 1;
            out.push(f);
        }
    }
    if out.len() < n {
        return Err(Error::Resource(format!(
            "formula filter exhausted: {} of {n} candidates qualified within {} attempts \
             ({} verified, {} violated kept)",
            out.len(),
            spec.attempt_budget,
            kept[0],
            kept[1]
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Run matrix
// ---------------------------------------------------------------------------

/// One cell of the experiment matrix.
#[derive(Clone, Debug)]
pub struct MatrixTask {
    pub model: ModelSource,
    pub formula_id: String,
    pub formula: String,
    pub method: Method,
    /// Check the negated formula, so an `empty` verdict means the property
    /// holds; this is how the benchmark protocol runs verification.
    pub negate: bool,
}

/// One CSV row of benchmark output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub model: String,
    #[serde(rename = "formula-id")]
    pub formula_id: String,
    pub method: String,
    /// `empty`, `non-empty`, or blank when the run produced no verdict.
    pub verdict: String,
    pub states: u64,
    pub edges: u64,
    #[serde(rename = "peak-nodes")]
    pub peak_nodes: u64,
    #[serde(rename = "time-ms")]
    pub time_ms: u64,
    /// `ok`, `timeout`, `resource`, or `error`.
    pub status: String,
}

fn run_worker(
    worker: &Path,
    task: &MatrixTask,
    timeout_secs: f64,
    node_ceiling: Option<usize>,
) -> ExperimentRecord {
    let started = Instant::now();
    let mut base = ExperimentRecord {
        model: task.model.display_name(),
        formula_id: task.formula_id.clone(),
        method: task.method.name().to_string(),
        verdict: String::new(),
        states: 0,
        edges: 0,
        peak_nodes: 0,
        time_ms: 0,
        status: "error".to_string(),
    };
    let mut cmd = Command::new(worker);
    cmd.arg("check")
        .arg("--formula")
        .arg(&task.formula)
        .arg("--model")
        .arg(task.model.cli_arg())
        .arg("--method")
        .arg(task.method.name())
        .arg("--timeout")
        .arg(format!("{timeout_secs}"))
        .arg("--format")
        .arg("json")
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null());
    if task.negate {
        cmd.arg("--negate");
    }
    if let Some(n) = node_ceiling {
        cmd.arg("--node-ceiling").arg(format!("{n}"));
    }
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(_) => {
            base.time_ms = started.elapsed().as_millis() as u64;
            return base;
        }
    };
    // Drain stdout on the side so a verbose child can't fill the pipe while
    // the parent is waiting on it.
    let mut stdout = child.stdout.take().expect("stdout piped");
    let reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });
    // The child limits itself in-process; this bound only reaps runaways.
    let grace = Duration::from_secs_f64(timeout_secs * 2.0 + 10.0);
    let exited = loop {
        match child.try_wait() {
            Ok(Some(_)) => break true,
            Ok(None) if started.elapsed() > grace => {
                let _ = child.kill();
                let _ = child.wait();
                break false;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(_) => break false,
        }
    };
    let output = reader.join().unwrap_or_default();
    base.time_ms = started.elapsed().as_millis() as u64;
    if !exited {
        base.status = "timeout".to_string();
        return base;
    }
    let parsed = output
        .lines()
        .rev()
        .find_map(|l| serde_json::from_str::<CheckReport>(l).ok());
    match parsed {
        Some(report) => ExperimentRecord {
            verdict: report.verdict.unwrap_or_default(),
            states: report.states,
            edges: report.edges,
            peak_nodes: report.peak_nodes,
            time_ms: report.time_ms,
            status: report.status,
            ..base
        },
        None => base,
    }
}

/// Verdict disagreements among completed rows of the same experiment; each
/// entry describes one unsound (model, formula) group.  An empty result is
/// the executable form of the product-equivalence theorems.
pub fn soundness_alarms(records: &[ExperimentRecord]) -> Vec<String> {
    let mut groups: BTreeMap<(&str, &str), BTreeSet<&str>> = BTreeMap::new();
    for r in records {
        if r.status == "ok" {
            groups
                .entry((&r.model, &r.formula_id))
                .or_default()
                .insert(&r.verdict);
        }
    }
    groups
        .into_iter()
        .filter(|(_, verdicts)| verdicts.len() > 1)
        .map(|((model, fid), verdicts)| {
            format!(
                "soundness alarm: {model}/{fid} has disagreeing verdicts: {}",
                verdicts.into_iter().collect::<Vec<_>>().join(", ")
            )
        })
        .collect()
}

/// Executes every task, up to `jobs` worker processes at a time, and appends
/// soundness alarms for any cross-method verdict disagreement.  A worker
/// crash is recorded as `status=error` and never aborts the matrix.
pub fn run_matrix(
    tasks: &[MatrixTask],
    timeout_secs: f64,
    node_ceiling: Option<usize>,
    jobs: usize,
    worker: &Path,
) -> Result<(Vec<ExperimentRecord>, Vec<String>)> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<ExperimentRecord>>> = Mutex::new(vec![None; tasks.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, tasks.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let rec = run_worker(worker, &tasks[i], timeout_secs, node_ceiling);
                results.lock().unwrap()[i] = Some(rec);
            });
        }
    });
    let records: Vec<ExperimentRecord> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect();
    let alarms = soundness_alarms(&records);
    Ok((records, alarms))
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Per-method win/lose/fail counts within one experiment group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TallyRow {
    /// `empty` or `non-empty`, plus `x` or `no-x`, comma separated.
    pub group: String,
    pub method: String,
    pub win: usize,
    pub lose: usize,
    pub fail: usize,
}

/// Cumulative-distribution data over an experiment record set.
#[derive(Clone, Debug)]
pub struct CdfSummary {
    /// Per method, the sorted relative-time percentages, one per non-trivial
    /// experiment the method participated in.
    pub points: Vec<(String, Vec<f64>)>,
    pub tallies: Vec<TallyRow>,
    /// Experiments dropped because every completed run beat the trivial
    /// threshold.
    pub trivial: Vec<(String, String)>,
}

/// Summarizes records: per experiment, each method's time is expressed as a
/// percentage of the worst completed method; failed runs are plotted at
/// [`FAILURE_PERCENT`].  Experiments with no completed run are skipped;
/// experiments where every completed run finished under [`TRIVIAL_MS`] are
/// dropped as trivial.  X-sensitivity is read off the `fx` formula-id
/// prefix.
pub fn cdf_summary(records: &[ExperimentRecord]) -> CdfSummary {
    let mut experiments: BTreeMap<(String, String), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        experiments
            .entry((r.model.clone(), r.formula_id.clone()))
            .or_default()
            .push(r);
    }
    let mut points: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut tally: BTreeMap<(String, String), (usize, usize, usize)> = BTreeMap::new();
    let mut trivial = Vec::new();
    for ((model, fid), rows) in experiments {
        let ok_times: Vec<u64> = rows
            .iter()
            .filter(|r| r.status == "ok")
            .map(|r| r.time_ms)
            .collect();
        let Some(&worst) = ok_times.iter().max() else {
            continue; // nothing completed; nothing to normalize against
        };
        if worst < TRIVIAL_MS {
            trivial.push((model, fid));
            continue;
        }
        let best = ok_times.iter().min().copied().unwrap_or(0);
        let verdict = rows
            .iter()
            .find(|r| r.status == "ok")
            .map(|r| r.verdict.as_str())
            .unwrap_or("");
        let x = if fid.starts_with("fx") { "x" } else { "no-x" };
        let group = format!("{verdict},{x}");
        for r in &rows {
            let pct = if r.status == "ok" {
                if worst == 0 {
                    100.0
                } else {
                    100.0 * r.time_ms as f64 / worst as f64
                }
            } else {
                FAILURE_PERCENT
            };
            points.entry(r.method.clone()).or_default().push(pct);
            let slot = tally.entry((group.clone(), r.method.clone())).or_default();
            if r.status != "ok" {
                slot.2 += 1;
            } else if r.time_ms == best {
                slot.0 += 1;
            } else {
                slot.1 += 1;
            }
        }
    }
    let points = points
        .into_iter()
        .map(|(m, mut v)| {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (m, v)
        })
        .collect();
    let tallies = tally
        .into_iter()
        .map(|((group, method), (win, lose, fail))| TallyRow {
            group,
            method,
            win,
            lose,
            fail,
        })
        .collect();
    CdfSummary { points, tallies, trivial }
}

impl CdfSummary {
    /// CSV of cumulative-distribution points: method, percentage, cumulative
    /// count of experiments at or below it.
    pub fn render_points_csv(&self) -> String {
        let mut out = String::from("method,percentage,cumulative\n");
        for (method, pts) in &self.points {
            for (i, p) in pts.iter().enumerate() {
                out.push_str(&format!("{method},{p:.1},{}\n", i + 1));
            }
        }
        out
    }

    /// CSV of win/lose/fail tallies per (group, method).
    pub fn render_tallies_csv(&self) -> String {
        let mut out = String::from("group,method,win,lose,fail\n");
        for t in &self.tallies {
            out.push_str(&format!(
                "\"{}\",{},{},{},{}\n",
                t.group, t.method, t.win, t.lose, t.fail
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Config and command
// ---------------------------------------------------------------------------

/// Parsed `key = value` benchmark configuration.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub models: Vec<String>,
    pub methods: Vec<Method>,
    pub kind: FormulaKind,
    pub count: usize,
    pub depth: usize,
    pub seed: u64,
    pub timeout_secs: f64,
    pub min_product_states: u64,
    pub attempt_budget: usize,
    pub node_ceiling: Option<usize>,
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<BenchConfig> {
        let mut cfg = BenchConfig {
            models: Vec::new(),
            methods: Method::ALL.to_vec(),
            kind: FormulaKind::Random,
            count: 4,
            depth: 4,
            seed: 0,
            timeout_secs: 30.0,
            min_product_states: 100,
            attempt_budget: 0,
            node_ceiling: None,
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::format(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`".to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            let parse_num = |what: &str| -> Result<u64> {
                value
                    .parse()
                    .map_err(|_| bad(format!("{what} must be a number, got {value:?}")))
            };
            match key {
                "models" => {
                    cfg.models = value.split_whitespace().map(String::from).collect()
                }
                "methods" => {
                    cfg.methods = value
                        .split_whitespace()
                        .map(Method::from_name)
                        .collect::<Result<_>>()?
                }
                "kind" => cfg.kind = FormulaKind::from_name(value)?,
                "count" => cfg.count = parse_num("count")? as usize,
                "depth" => cfg.depth = parse_num("depth")? as usize,
                "seed" => cfg.seed = parse_num("seed")?,
                "timeout-secs" => {
                    cfg.timeout_secs = value
                        .parse()
                        .map_err(|_| bad(format!("timeout-secs must be a number")))?
                }
                "min-product-states" => {
                    cfg.min_product_states = parse_num("min-product-states")?
                }
                "attempt-budget" => cfg.attempt_budget = parse_num("attempt-budget")? as usize,
                "node-ceiling" => {
                    cfg.node_ceiling = Some(parse_num("node-ceiling")? as usize)
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        if cfg.models.is_empty() {
            return Err(Error::format("config must list at least one model"));
        }
        if cfg.count == 0 {
            return Err(Error::format("count must be at least 1"));
        }
        if cfg.attempt_budget == 0 {
            cfg.attempt_budget = 500 * cfg.count;
        }
        Ok(cfg)
    }
}

/// Arguments collected by the CLI for the bench subcommand.
pub struct BenchCmd {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub cdf_out: Option<PathBuf>,
    pub tally_out: Option<PathBuf>,
    pub formulas_out: Option<PathBuf>,
    pub jobs: usize,
    pub summarize: Option<PathBuf>,
}

fn write_records_csv(records: &[ExperimentRecord], out: Option<&Path>) -> Result<()> {
    let mut w: csv::Writer<Box<dyn std::io::Write>> = match out {
        Some(p) => csv::Writer::from_writer(Box::new(std::fs::File::create(p)?)),
        None => csv::Writer::from_writer(Box::new(std::io::stdout())),
    };
    for r in records {
        w.serialize(r).map_err(|e| Error::format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn read_records_csv(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| Error::format(e.to_string()))?;
    rd.deserialize()
        .map(|r| r.map_err(|e| Error::format(e.to_string())))
        .collect()
}

fn write_summaries(cmd: &BenchCmd, records: &[ExperimentRecord]) -> Result<()> {
    let summary = cdf_summary(records);
    if let Some(p) = &cmd.cdf_out {
        std::fs::write(p, summary.render_points_csv())?;
    }
    if let Some(p) = &cmd.tally_out {
        std::fs::write(p, summary.render_tallies_csv())?;
    }
    if !summary.trivial.is_empty() {
        eprintln!(
            "note: {} trivial experiment(s) dropped from summaries",
            summary.trivial.len()
        );
    }
    Ok(())
}

/// Entry point for the bench subcommand.  Returns the process exit code:
/// nonzero when any soundness alarm fired.
pub fn cmd_bench(cmd: &BenchCmd) -> Result<i32> {
    if let Some(path) = &cmd.summarize {
        let records = read_records_csv(path)?;
        let alarms = soundness_alarms(&records);
        for a in &alarms {
            eprintln!("{a}");
        }
        write_summaries(cmd, &records)?;
        if cmd.cdf_out.is_none() && cmd.tally_out.is_none() {
            let summary = cdf_summary(&records);
            print!("{}", summary.render_tallies_csv());
        }
        return Ok(if alarms.is_empty() { 0 } else { 2 });
    }

    let cfg = BenchConfig::parse(&std::fs::read_to_string(&cmd.config)?)?;
    let worker = std::env::current_exe()?;
    let mut tasks = Vec::new();
    let mut formula_lines = Vec::new();
    for spec_str in &cfg.models {
        let source = ModelSource::parse(spec_str)?;
        let spec = FormulaSpec {
            kind: cfg.kind,
            depth: cfg.depth,
            seed: cfg.seed,
            min_product_states: cfg.min_product_states,
            attempt_budget: cfg.attempt_budget,
        };
        let formulas = gen_formulas(&spec, cfg.count, &source)?;
        for (i, f) in formulas.iter().enumerate() {
            let id = if contains_x(f) {
                format!("fx{i}")
            } else {
                format!("f{i}")
            };
            formula_lines.push(format!("{}\t{id}\t{f}", source.display_name()));
            for &method in &cfg.methods {
                tasks.push(MatrixTask {
                    model: source.clone(),
                    formula_id: id.clone(),
                    formula: f.to_string(),
                    method,
                    negate: true,
                });
            }
        }
    }
    if let Some(p) = &cmd.formulas_out {
        std::fs::write(p, formula_lines.join("\n") + "\n")?;
    }
    let (records, alarms) = run_matrix(
        &tasks,
        cfg.timeout_secs,
        cfg.node_ceiling,
        cmd.jobs,
        &worker,
    )?;
    for a in &alarms {
        eprintln!("{a}");
    }
    write_records_csv(&records, cmd.out.as_deref())?;
    write_summaries(cmd, &records)?;
    Ok(if alarms.is_empty() { 0 } else { 2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(
        model: &str,
        fid: &str,
        method: &str,
        verdict: &str,
        time_ms: u64,
        status: &str,
    ) -> ExperimentRecord {
        ExperimentRecord {
            model: model.to_string(),
            formula_id: fid.to_string(),
            method: method.to_string(),
            verdict: verdict.to_string(),
            states: 0,
            edges: 0,
            peak_nodes: 0,
            time_ms,
            status: status.to_string(),
        }
    }

    #[test]
    fn config_parsing_and_defaults() {
        let cfg = BenchConfig::parse(
            "# comment\nmodels = philo:2 ring:1\nkind = fairness\ncount = 3\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.models, vec!["philo:2", "ring:1"]);
        assert_eq!(cfg.kind, FormulaKind::Fairness);
        assert_eq!(cfg.count, 3);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.methods.len(), 8);
        assert_eq!(cfg.timeout_secs, 30.0);
        assert_eq!(cfg.attempt_budget, 1500);
        assert!(BenchConfig::parse("frobnicate = 1\nmodels = a\n").is_err());
        assert!(BenchConfig::parse("count = 1\n").is_err(), "models required");
    }

    #[test]
    fn generation_is_seeded_and_balanced() {
        let source = ModelSource::Builtin { name: "philo".to_string(), scale: 2 };
        let spec = FormulaSpec {
            kind: FormulaKind::Random,
            depth: 3,
            seed: 11,
            min_product_states: 10,
            attempt_budget: 400,
        };
        let a = gen_formulas(&spec, 4, &source).unwrap();
        let b = gen_formulas(&spec, 4, &source).unwrap();
        assert_eq!(a, b, "same seed, same formulas");
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|f| !contains_x(f)));

        // Verify the advertised balance by re-deciding each property.
        let mut verified = 0usize;
        for f in &a {
            let mgr = DdManager::new();
            let model = source.build(&mgr).unwrap();
            let aut = ltl::translate(&mgr, &f.clone().not()).unwrap();
            let p = symbolic::build_symbolic_product(&aut, model.as_ref()).unwrap();
            if symbolic::owcty(&p, &Deadline::none()).unwrap().verdict == Verdict::Empty {
                verified += 1;
            }
        }
        assert_eq!(verified, 2, "two verified, two violated");
    }

    #[test]
    fn with_x_kind_always_contains_next() {
        let source = ModelSource::Builtin { name: "philo".to_string(), scale: 2 };
        let spec = FormulaSpec {
            kind: FormulaKind::RandomWithX,
            depth: 3,
            seed: 3,
            min_product_states: 10,
            attempt_budget: 400,
        };
        let formulas = gen_formulas(&spec, 3, &source).unwrap();
        assert!(formulas.iter().all(contains_x));
    }

    #[test]
    fn fairness_kind_has_the_template_shape() {
        let source = ModelSource::Builtin { name: "philo".to_string(), scale: 2 };
        let spec = FormulaSpec {
            kind: FormulaKind::Fairness,
            depth: 3,
            seed: 5,
            min_product_states: 5,
            attempt_budget: 2000,
        };
        fn is_gf_conjunction(f: &LtlAst) -> bool {
            match f {
                LtlAst::Always(inner) => matches!(**inner, LtlAst::Eventually(_)),
                LtlAst::And(l, r) => is_gf_conjunction(l) && is_gf_conjunction(r),
                _ => false,
            }
        }
        for f in gen_formulas(&spec, 3, &source).unwrap() {
            match f {
                LtlAst::Implies(premise, _) => assert!(
                    is_gf_conjunction(&premise),
                    "premise is a conjunction of G F terms: {premise}"
                ),
                other => panic!("fairness formula is an implication, got {other}"),
            }
        }
    }

    #[test]
    fn filter_exhaustion_is_reported() {
        let source = ModelSource::Builtin { name: "philo".to_string(), scale: 2 };
        let spec = FormulaSpec {
            kind: FormulaKind::Random,
            depth: 2,
            seed: 1,
            min_product_states: u64::MAX,
            attempt_budget: 10,
        };
        match gen_formulas(&spec, 2, &source) {
            Err(Error::Resource(msg)) => assert!(msg.contains("exhausted")),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn soundness_alarm_fires_on_disagreement() {
        let records = vec![
            record("m", "f0", "slap", "empty", 10, "ok"),
            record("m", "f0", "sop", "non-empty", 10, "ok"),
            record("m", "f1", "slap", "empty", 10, "ok"),
            record("m", "f1", "sop", "", 0, "timeout"),
        ];
        let alarms = soundness_alarms(&records);
        assert_eq!(alarms.len(), 1);
        assert!(alarms[0].contains("m/f0"));
    }

    #[test]
    fn cdf_summary_normalizes_and_tallies() {
        // Experiment (m, f0): slap 200 ms, sop 400 ms, bcz timeout.
        // Experiment (m, f1): slap 100 ms, sop 100 ms (tie).
        // Experiment (m, f2): everything under the trivial bound - dropped.
        let records = vec![
            record("m", "f0", "slap", "empty", 200, "ok"),
            record("m", "f0", "sop", "empty", 400, "ok"),
            record("m", "f0", "bcz", "", 0, "timeout"),
            record("m", "f1", "slap", "non-empty", 100, "ok"),
            record("m", "f1", "sop", "non-empty", 100, "ok"),
            record("m", "f2", "slap", "empty", 5, "ok"),
            record("m", "f2", "sop", "empty", 9, "ok"),
        ];
        let s = cdf_summary(&records);
        assert_eq!(s.trivial, vec![("m".to_string(), "f2".to_string())]);
        let by_method: BTreeMap<&str, &Vec<f64>> =
            s.points.iter().map(|(m, v)| (m.as_str(), v)).collect();
        assert_eq!(by_method["slap"], &vec![50.0, 100.0]);
        assert_eq!(by_method["sop"], &vec![100.0, 100.0]);
        assert_eq!(by_method["bcz"], &vec![120.0]);
        let find = |group: &str, method: &str| {
            s.tallies
                .iter()
                .find(|t| t.group == group && t.method == method)
                .cloned()
                .unwrap()
        };
        assert_eq!(find("empty,no-x", "slap"), TallyRow {
            group: "empty,no-x".to_string(),
            method: "slap".to_string(),
            win: 1,
            lose: 0,
            fail: 0,
        });
        assert_eq!(find("empty,no-x", "sop").lose, 1);
        assert_eq!(find("empty,no-x", "bcz").fail, 1);
        // The tie experiment: both win.
        assert_eq!(find("non-empty,no-x", "slap").win, 1);
        assert_eq!(find("non-empty,no-x", "sop").win, 1);
    }

    #[test]
    fn records_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let records = vec![
            record("philo:2", "f0", "slap", "non-empty", 12, "ok"),
            record("philo:2", "f0", "owcty", "", 0, "timeout"),
        ];
        write_records_csv(&records, Some(&path)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "model,formula-id,method,verdict,states,edges,peak-nodes,time-ms,status"
        ));
        let back = read_records_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].method, "slap");
        assert_eq!(back[1].status, "timeout");
    }
}
