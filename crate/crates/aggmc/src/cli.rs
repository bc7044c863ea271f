//! Command-line surface: binds formulas, models, and checking methods, and
//! maps outcomes to stable exit codes (0 = empty, 1 = non-empty,
//! 2 = error/timeout).

use std::path::{Path, PathBuf};
use std::rc::Rc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bench;
use crate::error::{Deadline, Error, Result};
use crate::logic::DdManager;
use crate::ltl::{self, LtlAst};
use crate::model::{self, ExplicitKs, KripkeModel, PetriNetKs};
use crate::products::{
    bcz_product, concretize, dump_graph, plain_product, slap, slap_fst, sog_build, sop,
};
use crate::symbolic::{build_symbolic_product, el, owcty};
use crate::tgba::{
    emptiness_check, export_automaton, validate_lasso, Lasso, LazyGraph, Verdict,
};

#[derive(Parser)]
#[command(
    name = "aggmc",
    version,
    about = "LTL model checking through aggregation-based products"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a formula against a model and report the product's emptiness.
    Check(CheckArgs),
    /// Translate an LTL formula and print the automaton in text form.
    Translate {
        /// Formula text, e.g. "G (req -> F ack)".
        formula: String,
    },
    /// Build a model and report its reachable state count.
    ModelStats {
        /// Builtin name, `name:scale`, or path to a model file.
        model: String,
        /// Scale for a builtin given by bare name.
        scale: Option<u64>,
        #[arg(long)]
        timeout: Option<f64>,
        /// Decision-diagram node ceiling.
        #[arg(long)]
        node_ceiling: Option<usize>,
    },
    /// Run a benchmark matrix from a config file and emit CSV records.
    Bench(BenchArgs),
}

/// Product construction / emptiness algorithm selector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, ValueEnum)]
pub enum Method {
    Product,
    Sog,
    Sop,
    Slap,
    SlapFst,
    Bcz,
    Owcty,
    El,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Product,
        Method::Sog,
        Method::Sop,
        Method::Slap,
        Method::SlapFst,
        Method::Bcz,
        Method::Owcty,
        Method::El,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Product => "product",
            Method::Sog => "sog",
            Method::Sop => "sop",
            Method::Slap => "slap",
            Method::SlapFst => "slap-fst",
            Method::Bcz => "bcz",
            Method::Owcty => "owcty",
            Method::El => "el",
        }
    }

    pub fn from_name(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown method {s:?}")))
    }

    /// Methods that aggregate by observed labels only work for
    /// stutter-invariant properties.
    pub fn requires_stutter_invariance(self) -> bool {
        matches!(self, Method::Sog | Method::Sop)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Args)]
pub struct CheckArgs {
    /// Formula text.
    #[arg(long, conflicts_with = "formula_file")]
    pub formula: Option<String>,
    /// File holding exactly one formula.
    #[arg(long)]
    pub formula_file: Option<PathBuf>,
    /// Builtin `name:scale` or path to a model file.
    #[arg(long)]
    pub model: String,
    #[arg(long, value_enum, default_value_t = Method::Slap)]
    pub method: Method,
    /// Check the negated formula instead.
    #[arg(long)]
    pub negate: bool,
    /// Print expansion statistics.
    #[arg(long)]
    pub stats: bool,
    /// Re-run the plain product to produce a concrete model trace for a
    /// non-empty verdict.
    #[arg(long)]
    pub concretize: bool,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Decision-diagram node ceiling.
    #[arg(long)]
    pub node_ceiling: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print the fully expanded product graph (explicit-style methods).
    #[arg(long)]
    pub dump: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    /// Key-value config file; see the bench module documentation.
    #[arg(long)]
    config: PathBuf,
    /// Records CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cumulative-distribution points CSV destination.
    #[arg(long)]
    cdf_out: Option<PathBuf>,
    /// Win/lose/fail tally CSV destination.
    #[arg(long)]
    tally_out: Option<PathBuf>,
    /// Generated formulas, one `id<TAB>formula` line each.
    #[arg(long)]
    formulas_out: Option<PathBuf>,
    /// Concurrent worker processes.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Summarize an existing records CSV instead of running the matrix.
    #[arg(long)]
    summarize: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Model sources
// ---------------------------------------------------------------------------

/// Where a model comes from: a builtin net at a scale, or a file in one of
/// the two text formats.
#[derive(Clone, Debug)]
pub enum ModelSource {
    Builtin { name: String, scale: u64 },
    KsFile { path: PathBuf, text: String },
    PnFile { path: PathBuf, text: String },
}

impl ModelSource {
    /// Parses a `--model` argument: `name:scale` for builtins, otherwise a
    /// path whose format is detected from its contents.
    pub fn parse(arg: &str) -> Result<ModelSource> {
        if let Some((name, scale)) = arg.split_once(':') {
            if !Path::new(arg).exists() {
                let scale: u64 = scale.parse().map_err(|_| {
                    Error::usage(format!("bad scale in model spec {arg:?}"))
                })?;
                return Ok(ModelSource::Builtin { name: name.to_string(), scale });
            }
        }
        let path = Path::new(arg);
        if !path.exists() {
            return Err(Error::usage(format!(
                "model {arg:?} is neither a file nor a `name:scale` builtin spec"
            )));
        }
        Self::from_file(path)
    }

    /// Parses the `model-stats` form: bare builtin name plus separate scale,
    /// or a file path.
    pub fn parse_with_scale(name: &str, scale: Option<u64>) -> Result<ModelSource> {
        match scale {
            Some(s) => Ok(ModelSource::Builtin { name: name.to_string(), scale: s }),
            None => Self::parse(name),
        }
    }

    fn from_file(path: &Path) -> Result<ModelSource> {
        let text = std::fs::read_to_string(path)?;
        let petri = text.lines().map(str::trim).any(|l| {
            l.starts_with("place ") || l.starts_with("trans ")
        });
        let path = path.to_path_buf();
        if petri {
            Ok(ModelSource::PnFile { path, text })
        } else {
            Ok(ModelSource::KsFile { path, text })
        }
    }

    /// Builds the model on the given manager.
    pub fn build(&self, mgr: &Rc<DdManager>) -> Result<Box<dyn KripkeModel>> {
        match self {
            ModelSource::Builtin { name, scale } => {
                Ok(Box::new(model::builtin_model(mgr, name, *scale)?))
            }
            ModelSource::KsFile { text, .. } => Ok(Box::new(ExplicitKs::parse(mgr, text)?)),
            ModelSource::PnFile { text, .. } => Ok(Box::new(PetriNetKs::parse(mgr, text)?)),
        }
    }

    /// The argument to hand a `check` worker process.
    pub fn cli_arg(&self) -> String {
        match self {
            ModelSource::Builtin { name, scale } => format!("{name}:{scale}"),
            ModelSource::KsFile { path, .. } | ModelSource::PnFile { path, .. } => {
                path.display().to_string()
            }
        }
    }

    /// Short name for report columns.
    pub fn display_name(&self) -> String {
        match self {
            ModelSource::Builtin { name, scale } => format!("{name}:{scale}"),
            ModelSource::KsFile { path, .. } | ModelSource::PnFile { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Check
// ---------------------------------------------------------------------------

/// Machine-readable outcome of one check run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    /// `ok`, `timeout`, `resource`, or `error`.
    pub status: String,
    /// `empty` or `non-empty`; absent unless status is `ok`.
    pub verdict: Option<String>,
    /// Expanded product states (reachable set size for symbolic methods).
    pub states: u64,
    /// Scanned product edges (0 for symbolic methods).
    pub edges: u64,
    pub peak_nodes: u64,
    pub time_ms: u64,
    /// Outer fixpoint iterations; symbolic methods only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concrete: Option<String>,
}

struct RunOutcome {
    verdict: Verdict,
    states: u64,
    edges: u64,
    outer_iterations: Option<u64>,
    counterexample: Option<String>,
    dump: Option<String>,
}

fn format_lasso<G: LazyGraph>(g: &G, lasso: &Lasso<G::Node>) -> String {
    let mut out = String::new();
    out.push_str("prefix:\n");
    for (n, acc) in &lasso.prefix {
        out.push_str(&format!("  {} {}\n", g.describe(n), acc));
    }
    out.push_str("cycle:\n");
    for (n, acc) in &lasso.cycle {
        out.push_str(&format!("  {} {}\n", g.describe(n), acc));
    }
    out
}

fn run_graph<G: LazyGraph>(
    g: &mut G,
    deadline: &Deadline,
    want_dump: bool,
) -> Result<RunOutcome> {
    let r = emptiness_check(g, deadline)?;
    let counterexample = match &r.lasso {
        Some(l) => {
            validate_lasso(g, l)?;
            Some(format_lasso(g, l))
        }
        None => None,
    };
    let dump = if want_dump {
        Some(dump_graph(g, deadline)?)
    } else {
        None
    };
    Ok(RunOutcome {
        verdict: r.verdict,
        states: r.stats.expanded as u64,
        edges: r.stats.edges as u64,
        outer_iterations: None,
        counterexample,
        dump,
    })
}

fn read_one_formula(args: &CheckArgs) -> Result<LtlAst> {
    let text = match (&args.formula, &args.formula_file) {
        (Some(s), None) => s.clone(),
        (None, Some(p)) => {
            let body = std::fs::read_to_string(p)?;
            let lines: Vec<&str> = body
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect();
            match lines.as_slice() {
                [one] => one.to_string(),
                [] => return Err(Error::usage("formula file is empty".to_string())),
                more => {
                    return Err(Error::usage(format!(
                        "check takes a single formula; file has {}",
                        more.len()
                    )))
                }
            }
        }
        _ => return Err(Error::usage("provide --formula or --formula-file".to_string())),
    };
    ltl::parse_ltl(&text)
}

/// Runs one check request end to end.  Returns the report and the exit code
/// (0 empty, 1 non-empty, 2 otherwise); errors are folded into the report's
/// status with the message on the side.
pub fn run_check(args: &CheckArgs) -> (CheckReport, Option<String>, i32) {
    let start = Instant::now();
    let mut peak: u64 = 0;
    let mut attempt = || -> Result<(CheckReport, i32)> {
        let formula = read_one_formula(args)?;
        let formula = if args.negate { formula.not() } else { formula };
        if args.method.requires_stutter_invariance()
            && !ltl::is_syntactically_stutter_invariant(&formula)
        {
            return Err(Error::usage(format!(
                "method {} requires a stutter-invariant (X-free) formula",
                args.method
            )));
        }
        let source = ModelSource::parse(&args.model)?;
        let deadline = match args.timeout {
            Some(secs) => Deadline::after(Duration::from_secs_f64(secs)),
            None => Deadline::none(),
        };
        let mgr = match args.node_ceiling {
            Some(n) => DdManager::with_node_ceiling(n),
            None => DdManager::new(),
        };
        let model = source.build(&mgr)?;
        let model: &dyn KripkeModel = model.as_ref();
        let aut = ltl::translate(&mgr, &formula)?;
        let outcome = match args.method {
            Method::Product => {
                run_graph(&mut plain_product(&aut, model, deadline)?, &deadline, args.dump)?
            }
            Method::Sog => {
                let sog = sog_build(model, aut.aps(), &deadline)?;
                run_graph(
                    &mut plain_product(&aut, sog.ks(), deadline)?,
                    &deadline,
                    args.dump,
                )?
            }
            Method::Sop => run_graph(&mut sop(&aut, model, deadline)?, &deadline, args.dump)?,
            Method::Slap => {
                run_graph(&mut slap(&aut, model, deadline)?, &deadline, args.dump)?
            }
            Method::SlapFst => {
                run_graph(&mut slap_fst(&aut, model, deadline)?, &deadline, args.dump)?
            }
            Method::Bcz => {
                run_graph(&mut bcz_product(&aut, model, deadline)?, &deadline, args.dump)?
            }
            Method::Owcty | Method::El => {
                if args.dump {
                    return Err(Error::usage(
                        "--dump applies to explicit-style methods only".to_string(),
                    ));
                }
                let p = build_symbolic_product(&aut, model)?;
                let run = if args.method == Method::Owcty {
                    owcty(&p, &deadline)?
                } else {
                    el(&p, &deadline)?
                };
                let states = u64::try_from(&p.count(&p.reachable(&deadline)?)?)
                    .unwrap_or(u64::MAX);
                RunOutcome {
                    verdict: run.verdict,
                    states,
                    edges: 0,
                    outer_iterations: Some(run.outer_iterations as u64),
                    counterexample: None,
                    dump: None,
                }
            }
        };
        peak = mgr.node_count() as u64;
        let concrete = if args.concretize && outcome.verdict == Verdict::NonEmpty {
            concretize(&aut, model, deadline)?.map(|tr| {
                let mut s = String::new();
                s.push_str("prefix:\n");
                for st in &tr.prefix {
                    s.push_str(&format!("  {}\n", model.describe_state(st)));
                }
                s.push_str("cycle:\n");
                for st in &tr.cycle {
                    s.push_str(&format!("  {}\n", model.describe_state(st)));
                }
                s
            })
        } else {
            None
        };
        peak = mgr.node_count() as u64;
        if let Some(d) = &outcome.dump {
            print!("{d}");
        }
        let exit = match outcome.verdict {
            Verdict::Empty => 0,
            Verdict::NonEmpty => 1,
        };
        Ok((
            CheckReport {
                status: "ok".to_string(),
                verdict: Some(
                    match outcome.verdict {
                        Verdict::Empty => "empty",
                        Verdict::NonEmpty => "non-empty",
                    }
                    .to_string(),
                ),
                states: outcome.states,
                edges: outcome.edges,
                peak_nodes: peak,
                time_ms: start.elapsed().as_millis() as u64,
                outer_iterations: outcome.outer_iterations,
                counterexample: outcome.counterexample,
                concrete,
            },
            exit,
        ))
    };
    match attempt() {
        Ok((report, exit)) => (report, None, exit),
        Err(e) => {
            let status = match &e {
                Error::Timeout(_) => "timeout",
                Error::Resource(_) => "resource",
                _ => "error",
            };
            (
                CheckReport {
                    status: status.to_string(),
                    verdict: None,
                    states: 0,
                    edges: 0,
                    peak_nodes: peak,
                    time_ms: start.elapsed().as_millis() as u64,
                    outer_iterations: None,
                    counterexample: None,
                    concrete: None,
                },
                Some(e.to_string()),
                2,
            )
        }
    }
}

fn print_report(report: &CheckReport, message: Option<&str>, args: &CheckArgs) {
    match args.format {
        Format::Json => {
            println!("{}", serde_json::to_string(report).expect("report serializes"));
            if let Some(m) = message {
                eprintln!("error: {m}");
            }
        }
        Format::Text => {
            if report.status != "ok" {
                println!("status: {}", report.status);
                if let Some(m) = message {
                    eprintln!("error: {m}");
                }
                return;
            }
            println!("verdict: {}", report.verdict.as_deref().unwrap_or("?"));
            if args.stats {
                println!("states: {}", report.states);
                println!("edges: {}", report.edges);
                if let Some(it) = report.outer_iterations {
                    println!("outer-iterations: {it}");
                }
                println!("peak-nodes: {}", report.peak_nodes);
                println!("time-ms: {}", report.time_ms);
            }
            if let Some(cex) = &report.counterexample {
                println!("counterexample:");
                print!("{cex}");
            }
            if let Some(tr) = &report.concrete {
                println!("concrete witness:");
                print!("{tr}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Other subcommands
// ---------------------------------------------------------------------------

fn cmd_translate(formula: &str) -> Result<()> {
    let ast = ltl::parse_ltl(formula)?;
    let mgr = DdManager::new();
    let aut = ltl::translate(&mgr, &ast)?;
    print!("{}", export_automaton(&aut));
    Ok(())
}

fn cmd_model_stats(
    spec: &str,
    scale: Option<u64>,
    timeout: Option<f64>,
    node_ceiling: Option<usize>,
) -> Result<()> {
    let source = ModelSource::parse_with_scale(spec, scale)?;
    let deadline = match timeout {
        Some(secs) => Deadline::after(Duration::from_secs_f64(secs)),
        None => Deadline::none(),
    };
    let mgr = match node_ceiling {
        Some(n) => DdManager::with_node_ceiling(n),
        None => DdManager::new(),
    };
    let start = Instant::now();
    let model = source.build(&mgr)?;
    let reach = model::reachable_states(model.as_ref(), &deadline)?;
    let count = model::count_states(model.as_ref(), &reach)?;
    println!("reachable-states: {count}");
    println!("peak-nodes: {}", mgr.node_count());
    println!("time-ms: {}", start.elapsed().as_millis());
    Ok(())
}

/// Parses arguments from the process command line and runs the requested
/// subcommand, then exits with the documented code.
pub fn main_entry() {
    let cli = Cli::parse();
    let code = dispatch(cli);
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Check(args) => {
            let (report, message, code) = run_check(&args);
            print_report(&report, message.as_deref(), &args);
            code
        }
        Cmd::Translate { formula } => match cmd_translate(&formula) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Cmd::ModelStats { model, scale, timeout, node_ceiling } => {
            match cmd_model_stats(&model, scale, timeout, node_ceiling) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Cmd::Bench(args) => {
            let params = bench::BenchCmd {
                config: args.config,
                out: args.out,
                cdf_out: args.cdf_out,
                tally_out: args.tally_out,
                formulas_out: args.formulas_out,
                jobs: args.jobs.max(1),
                summarize: args.summarize,
            };
            match bench::cmd_bench(&params) {
                Ok(code) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
    }
}
