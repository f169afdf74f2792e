//! `nlstl`: command-line front end for parsing, monitoring, scoring, dataset
//! growth and translation of STL formulas.

mod backends;
mod exit;
mod review;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlstl_core::dataset::{self, apply_review, read_decisions, run_round, select_exemplars, Dataset, DatasetConfig, ReviewDecision};
use nlstl_core::embed::{kmeans, KnowledgeStore};
use nlstl_core::kgst::{self, Mode, Stages, TransformRequest};
use nlstl_core::llm::{ChatBackend, FnBackend, LlmError};
use nlstl_core::metrics::score_corpus;
use nlstl_core::pair::{read_jsonl, NlStlPair};
use nlstl_core::prompts::PromptSet;
use nlstl_core::semantics::{evaluate, evaluate_all, EvalError, EvalOptions, Trace, TraceError};
use nlstl_core::stats::compute_stats_with;
use nlstl_core::syntax::{extract_template, format, formula_lines, parse, Diagnostic};
use serde_json::json;

use backends::BackendFlags;
use exit::{domain, io, usage, CmdResult, Failure, Status};

#[derive(Debug, Parser)]
#[command(name = "nlstl", version, about = "Signal temporal logic toolkit: parse, monitor, score, grow datasets, translate")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for clustering and anything else randomized.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Concurrent backend requests for round, transform and bench.
    #[arg(long, global = true, default_value_t = 4)]
    jobs: usize,
    /// Key = value settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory with prompt template overrides.
    #[arg(long, global = true)]
    prompts: Option<PathBuf>,
    /// Log backend traffic and filter decisions to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Print the canonical form of formulas.
    Parse(Exprs),
    /// Check formulas for syntax and interval errors.
    Check(Exprs),
    /// Evaluate a formula on a CSV trace.
    Eval(EvalArgs),
    /// Print the template of formulas.
    Template(Exprs),
    /// Score predicted formulas against references.
    Metrics(MetricsArgs),
    /// Grow a dataset: init, round, review, stats, cluster.
    #[command(subcommand)]
    Dataset(DatasetCmd),
    /// Most similar pairs of a knowledge file.
    Retrieve(RetrieveArgs),
    /// Translate sentences into formulas.
    Transform(TransformArgs),
    /// Translate a labelled split and score the results.
    Bench(BenchArgs),
    /// Corpus statistics of a pairs file.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct Exprs {
    /// Formula file, one per line (`#` comments); `-` for stdin.
    file: Option<PathBuf>,
    /// Formula given inline; repeatable.
    #[arg(short = 'e', long = "expr")]
    exprs: Vec<String>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(short = 'e', long = "expr")]
    expr: String,
    #[arg(long)]
    trace: PathBuf,
    /// Sample time to evaluate at; all samples when omitted.
    #[arg(long)]
    at: Option<f64>,
    /// Windows reaching past the trace end are undefined instead of clipped.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Reference formulas: pairs JSON Lines or one formula per line.
    #[arg(long)]
    refs: PathBuf,
    /// Predicted formulas, one per line.
    #[arg(long)]
    preds: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DirArg {
    /// Dataset workspace directory.
    #[arg(long, default_value = "dataset")]
    dir: PathBuf,
}

#[derive(Debug, Subcommand)]
enum DatasetCmd {
    /// Create a workspace from seed pairs (bundled seeds by default).
    Init {
        #[command(flatten)]
        dir: DirArg,
        #[arg(long)]
        seeds: Option<PathBuf>,
    },
    /// Run one augmentation round and queue the survivors.
    Round {
        #[command(flatten)]
        dir: DirArg,
        #[arg(long, default_value_t = 10)]
        candidates: usize,
        /// Candidates per generation request (default: all in one).
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long, default_value_t = 5)]
        exemplars: usize,
        #[arg(long, default_value_t = dataset::DEFAULT_NOVELTY_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        backend: BackendFlags,
    },
    /// Decide on queued candidates, interactively or from a file.
    Review {
        #[command(flatten)]
        dir: DirArg,
        /// Decisions as JSON Lines.
        #[arg(long, conflicts_with_all = ["accept_all", "reject_all"])]
        decisions: Option<PathBuf>,
        #[arg(long, conflicts_with = "reject_all")]
        accept_all: bool,
        #[arg(long)]
        reject_all: bool,
        #[arg(long)]
        reason: Option<String>,
        #[arg(long, default_value = "cli")]
        reviewer: String,
    },
    /// Statistics of the pool.
    Stats {
        #[command(flatten)]
        dir: DirArg,
        #[arg(long, default_value_t = 3)]
        ngram: usize,
    },
    /// Cluster exemplars of the pool, or of a pairs file.
    Cluster {
        #[command(flatten)]
        dir: DirArg,
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(short, default_value_t = 5)]
        k: usize,
    },
}

#[derive(Debug, Args)]
struct RetrieveArgs {
    #[arg(long)]
    knowledge: PathBuf,
    #[arg(long)]
    nl: String,
    #[arg(short, default_value_t = 5)]
    k: usize,
}

#[derive(Debug, Args)]
struct ModeArgs {
    #[arg(long, default_value = "kgst")]
    mode: Mode,
    /// Reference pairs (JSON Lines); no references when omitted.
    #[arg(long)]
    knowledge: Option<PathBuf>,
    #[arg(short, default_value_t = kgst::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    iterations: usize,
    #[command(flatten)]
    backend: BackendFlags,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    nl: Option<String>,
    /// One sentence per line, or JSON Lines with an `nl` field.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[command(flatten)]
    mode: ModeArgs,
    /// Leave backend transcripts out of JSON output.
    #[arg(long)]
    no_transcript: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Labelled pairs (JSON Lines).
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    ngram: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.verbose {
        tracing_subscriber::fmt()
            .with_writer(std::io::stderr)
            .with_max_level(tracing_subscriber::filter::LevelFilter::DEBUG)
            .init();
    }
    match run(&cli) {
        Ok(s) => s.into(),
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.status.into()
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.cmd {
        Cmd::Parse(a) => cmd_parse(cli, a),
        Cmd::Check(a) => cmd_check(cli, a),
        Cmd::Eval(a) => cmd_eval(cli, a),
        Cmd::Template(a) => cmd_template(cli, a),
        Cmd::Metrics(a) => cmd_metrics(cli, a),
        Cmd::Dataset(d) => cmd_dataset(cli, d),
        Cmd::Retrieve(a) => cmd_retrieve(cli, a),
        Cmd::Transform(a) => cmd_transform(cli, a),
        Cmd::Bench(a) => cmd_bench(cli, a),
        Cmd::Stats(a) => cmd_stats(cli, a),
    }
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable output"));
}

/// Inline formulas first, then file lines, each with a location label.
fn gather(a: &Exprs) -> Result<Vec<(String, String)>, Failure> {
    let mut out: Vec<(String, String)> = a.exprs.iter().map(|e| (String::new(), e.clone())).collect();
    if let Some(path) = &a.file {
        let text = exit::read(path)?;
        for (line, f) in formula_lines(&text) {
            out.push((format!("{}:{line}", path.display()), f.to_string()));
        }
    }
    if out.is_empty() {
        return Err(usage("give a formula file or -e EXPR"));
    }
    Ok(out)
}

fn located(loc: &str, src: &str, d: &Diagnostic) -> String {
    let (l, c) = d.line_col(src);
    if loc.is_empty() {
        format!("{l}:{c}: {}", d.message)
    } else {
        format!("{loc}:{c}: {}", d.message)
    }
}

fn cmd_parse(cli: &Cli, a: &Exprs) -> CmdResult {
    let mut status = Status::Ok;
    let mut rows = Vec::new();
    for (loc, src) in gather(a)? {
        match parse(&src) {
            Ok(f) => {
                if cli.json {
                    rows.push(json!({"input": src, "canonical": format(&f), "ast": f}));
                } else {
                    println!("{}", format(&f));
                }
            }
            Err(e) => {
                status = Status::Domain;
                let msg = located(&loc, &src, &Diagnostic::from(&e));
                if cli.json {
                    rows.push(json!({"input": src, "error": msg}));
                } else {
                    println!("{msg}");
                }
            }
        }
    }
    if cli.json {
        print_json(&rows);
    }
    Ok(status)
}

fn cmd_check(cli: &Cli, a: &Exprs) -> CmdResult {
    let items = gather(a)?;
    let mut failures = Vec::new();
    for (loc, src) in &items {
        if let Err(e) = parse(src) {
            failures.push(json!({"input": src, "location": loc, "diagnostic": located(loc, src, &Diagnostic::from(&e))}));
        }
    }
    if cli.json {
        print_json(&json!({"checked": items.len(), "failures": failures}));
    } else if failures.is_empty() {
        println!("Ok");
    } else {
        for f in &failures {
            println!("{}", f["diagnostic"].as_str().unwrap_or_default());
        }
    }
    Ok(if failures.is_empty() { Status::Ok } else { Status::Domain })
}

fn eval_failure(e: EvalError) -> Failure {
    domain(e)
}

fn load_trace(path: &Path) -> Result<Trace, Failure> {
    Trace::load_csv(path).map_err(|e| match e {
        TraceError::Io(_) => io(format!("{}: {e}", path.display())),
        _ => domain(format!("{}: {e}", path.display())),
    })
}

fn cmd_eval(cli: &Cli, a: &EvalArgs) -> CmdResult {
    let f = parse(&a.expr).map_err(|e| domain(located("", &a.expr, &Diagnostic::from(&e))))?;
    let trace = load_trace(&a.trace)?;
    let opts = if a.strict { EvalOptions::strict() } else { EvalOptions::clip() };
    match a.at {
        Some(t) => {
            let v = evaluate(&f, &trace, t, opts).map_err(eval_failure)?;
            if cli.json {
                print_json(&json!({"time": t, "value": v}));
            } else {
                println!("{v}");
            }
        }
        None => {
            let vs = evaluate_all(&f, &trace, opts).map_err(eval_failure)?;
            if cli.json {
                let rows: Vec<_> = trace
                    .timestamps()
                    .iter()
                    .zip(&vs)
                    .map(|(t, v)| json!({"time": t, "value": v}))
                    .collect();
                print_json(&rows);
            } else {
                for (t, v) in trace.timestamps().iter().zip(&vs) {
                    let shown = v.map_or("undefined".to_string(), |b| b.to_string());
                    println!("{t}\t{shown}");
                }
            }
        }
    }
    Ok(Status::Ok)
}

fn cmd_template(cli: &Cli, a: &Exprs) -> CmdResult {
    let mut status = Status::Ok;
    let mut rows = Vec::new();
    for (loc, src) in gather(a)? {
        match parse(&src) {
            Ok(f) => {
                let t = extract_template(&f).render();
                if cli.json {
                    rows.push(json!({"input": src, "template": t}));
                } else {
                    println!("{t}");
                }
            }
            Err(e) => {
                status = Status::Domain;
                println!("{}", located(&loc, &src, &Diagnostic::from(&e)));
            }
        }
    }
    if cli.json {
        print_json(&rows);
    }
    Ok(status)
}

/// Reference formulas from pairs JSON Lines or plain lines.
fn read_refs(path: &Path) -> Result<Vec<String>, Failure> {
    let text = exit::read(path)?;
    let looks_json = text.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.trim_start().starts_with('{'));
    if looks_json {
        let pairs = read_jsonl(&text).map_err(|e| domain(format!("{}: {e}", path.display())))?;
        Ok(pairs.into_iter().map(|p| p.stl).collect())
    } else {
        Ok(text.lines().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()).collect())
    }
}

fn cmd_metrics(cli: &Cli, a: &MetricsArgs) -> CmdResult {
    let refs = read_refs(&a.refs)?;
    let preds: Vec<String> = exit::read(&a.preds)?.lines().map(|l| l.trim().to_string()).collect();
    if refs.len() != preds.len() || refs.is_empty() {
        return Err(usage(format!("{} references but {} predictions", refs.len(), preds.len())));
    }
    let report = score_corpus(&refs, &preds).map_err(usage)?;
    if let Some(p) = &a.report {
        exit::write(p, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    if cli.json {
        print_json(&report);
    } else {
        print!("{}", report.table(&refs, &preds));
        let e = &report.errors;
        println!(
            "errors: operator {}  numeric {}  parse {}  template {}",
            e.operator, e.numeric, e.parse_failure, e.template_mismatch
        );
    }
    Ok(Status::Ok)
}

fn datagen_failure(e: dataset::DatagenError) -> Failure {
    use dataset::DatagenError as E;
    match e {
        E::Backend(_) | E::Io(_) | E::Store(_) | E::Workspace(_) | E::Json(_) => io(e),
        E::UnknownCandidate(_) | E::DuplicateDecision(_) => usage(e),
        _ => domain(e),
    }
}

fn open(dir: &DirArg) -> Result<Dataset, Failure> {
    Dataset::open(&dir.dir).map_err(datagen_failure)
}

fn prompt_set(cli: &Cli) -> Result<PromptSet, Failure> {
    match &cli.prompts {
        Some(d) => PromptSet::load_dir(d).map_err(usage),
        None => Ok(PromptSet::default()),
    }
}

fn read_pairs(path: &Path) -> Result<Vec<NlStlPair>, Failure> {
    read_jsonl(&exit::read(path)?).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn cmd_dataset(cli: &Cli, d: &DatasetCmd) -> CmdResult {
    match d {
        DatasetCmd::Init { dir, seeds } => {
            let pairs = match seeds {
                Some(p) => read_pairs(p)?,
                None => nlstl_core::fixtures::seed_pairs(),
            };
            let ds = Dataset::init(&dir.dir, pairs).map_err(datagen_failure)?;
            if cli.json {
                print_json(&json!({"dir": dir.dir, "pool": ds.pool().len()}));
            } else {
                println!("initialized {} with {} pairs", dir.dir.display(), ds.pool().len());
            }
        }
        DatasetCmd::Round {
            dir,
            candidates,
            batch,
            exemplars,
            threshold,
            backend,
        } => {
            let mut ds = open(dir)?;
            let settings = backends::settings(cli.config.as_ref())?;
            let b = backend.build(&settings, "augmenter")?;
            let cfg = DatasetConfig {
                candidates: *candidates,
                batch: *batch,
                exemplars: *exemplars,
                novelty_threshold: *threshold,
                seed: cli.seed,
                jobs: cli.jobs,
            };
            let r = run_round(&mut ds, b.as_ref(), &prompt_set(cli)?, &cfg).map_err(datagen_failure)?;
            if cli.json {
                print_json(&r);
            } else {
                println!("round {}", r.round);
                println!("  exemplars        {}", r.exemplar_ids.join(", "));
                println!("  generated        {}", r.generated);
                println!("  syntax-rejected  {}", r.syntax_rejected);
                println!("  novelty-rejected {}", r.novelty_rejected);
                println!("  queued           {}", r.queued);
                println!("  dropped blocks   {}", r.dropped_blocks);
                println!("  queue size       {}", ds.queue().len());
            }
        }
        DatasetCmd::Review {
            dir,
            decisions,
            accept_all,
            reject_all,
            reason,
            reviewer,
        } => {
            let mut ds = open(dir)?;
            let ids: Vec<String> = ds.queue().iter().map(|q| q.pair.id.clone()).collect();
            let with_reviewer = |d: ReviewDecision| ReviewDecision {
                reviewer: reviewer.clone(),
                ..d
            };
            let list: Vec<ReviewDecision> = if let Some(p) = decisions {
                read_decisions(&exit::read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?
            } else if *accept_all {
                ids.iter().map(|i| with_reviewer(ReviewDecision::accept(i))).collect()
            } else if *reject_all {
                ids.iter()
                    .map(|i| ReviewDecision {
                        reason: reason.clone(),
                        ..with_reviewer(ReviewDecision::reject(i, ""))
                    })
                    .collect()
            } else {
                let stdin = std::io::stdin();
                let mut out = std::io::stdout();
                let d = review::interactive(ds.queue(), reviewer, &mut stdin.lock(), &mut out).map_err(io)?;
                writeln!(out).map_err(io)?;
                d
            };
            let outcome = apply_review(&mut ds, &list).map_err(datagen_failure)?;
            if cli.json {
                print_json(&json!({"outcome": outcome, "pool": ds.pool().len(), "queue": ds.queue().len()}));
            } else {
                println!(
                    "accepted {}  rejected {}  pool {}  still queued {}",
                    outcome.accepted.len(),
                    outcome.rejected.len(),
                    ds.pool().len(),
                    ds.queue().len()
                );
            }
        }
        DatasetCmd::Stats { dir, ngram } => {
            let ds = open(dir)?;
            return print_stats(cli, ds.pool(), *ngram, None);
        }
        DatasetCmd::Cluster { dir, pairs, k } => {
            let store = match pairs {
                Some(p) => KnowledgeStore::with_pairs(read_pairs(p)?).map_err(domain)?,
                None => KnowledgeStore::with_pairs(open(dir)?.pool().to_vec()).map_err(domain)?,
            };
            let c = kmeans(&store, *k, cli.seed).map_err(domain)?;
            if cli.json {
                print_json(&json!({"exemplars": c.exemplar_ids, "assignments": c.assignments, "iterations": c.iterations}));
            } else {
                let ex = select_exemplars(&store, *k, cli.seed).map_err(datagen_failure)?;
                for (i, p) in ex.iter().enumerate() {
                    println!("{}\t{}\t{} members\t{}", i, p.id, c.members(i).len(), p.nl);
                }
            }
        }
    }
    Ok(Status::Ok)
}

fn knowledge(path: Option<&PathBuf>) -> Result<KnowledgeStore, Failure> {
    let pairs = match path {
        Some(p) => read_pairs(p)?,
        None => Vec::new(),
    };
    KnowledgeStore::with_pairs(pairs).map_err(domain)
}

fn cmd_retrieve(cli: &Cli, a: &RetrieveArgs) -> CmdResult {
    let store = knowledge(Some(&a.knowledge))?;
    let refs = kgst::retrieve_references(&a.nl, &store, a.k).map_err(domain)?;
    if cli.json {
        print_json(&refs);
    } else {
        for (i, r) in refs.iter().enumerate() {
            println!("{}\t{:.4}\t{}\t{}\t{}", i + 1, r.score, r.pair.id, r.pair.nl, r.pair.stl);
        }
    }
    Ok(Status::Ok)
}

fn unused_role(role: &'static str) -> Box<dyn ChatBackend> {
    Box::new(FnBackend::new(role, move |_| {
        Err(LlmError::Script(format!("the {role} is not used in this mode")))
    }))
}

/// Backends for the roles a mode uses.
fn stage_backends(cli: &Cli, m: &ModeArgs) -> Result<(Box<dyn ChatBackend>, Box<dyn ChatBackend>), Failure> {
    let settings = backends::settings(cli.config.as_ref())?;
    let generator = match m.mode {
        Mode::NoFinetune => unused_role("generator"),
        _ => m.backend.build(&settings, "generator")?,
    };
    let refiner = match m.mode {
        Mode::NoRefine => unused_role("refiner"),
        _ => m.backend.build(&settings, "refiner")?,
    };
    Ok((generator, refiner))
}

fn template_request(m: &ModeArgs, nl: &str) -> TransformRequest {
    TransformRequest {
        nl: nl.to_string(),
        k: m.k,
        iterations: m.iterations,
        mode: m.mode,
    }
}

fn batch_sentences(path: &Path) -> Result<Vec<String>, Failure> {
    let text = exit::read(path)?;
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if line.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(line).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let nl = v["nl"].as_str().ok_or_else(|| usage(format!("{}: line without an nl field", path.display())))?;
            out.push(nl.to_string());
        } else {
            out.push(line.to_string());
        }
    }
    Ok(out)
}

fn kgst_failure(e: &kgst::KgstError) -> Failure {
    if e.is_backend() {
        io(e)
    } else {
        domain(e)
    }
}

fn result_json(r: &kgst::TransformResult, transcript: bool) -> serde_json::Value {
    let mut v = serde_json::to_value(r).expect("result serializes");
    if !transcript {
        v.as_object_mut().expect("object").remove("transcript");
    }
    v
}

fn cmd_transform(cli: &Cli, a: &TransformArgs) -> CmdResult {
    let store = knowledge(a.mode.knowledge.as_ref())?;
    let (g, r) = stage_backends(cli, &a.mode)?;
    let prompts = prompt_set(cli)?;
    let stages = Stages {
        generator: g.as_ref(),
        refiner: r.as_ref(),
        prompts: &prompts,
    };
    if let Some(nl) = &a.nl {
        let res = kgst::transform(&template_request(&a.mode, nl), stages, &store).map_err(|e| kgst_failure(&e))?;
        if cli.json {
            print_json(&result_json(&res, !a.no_transcript));
        } else {
            println!("{}", res.final_stl);
            if cli.verbose {
                eprintln!("preliminary: {}", res.preliminary);
                for x in &res.references {
                    eprintln!("reference {:.4} {}: {}", x.score, x.pair.id, x.pair.stl);
                }
                for x in &res.transcript {
                    eprintln!("--- {} ({})\n{}\n>>> {}", x.stage, x.backend, x.prompt, x.response);
                }
                eprintln!("fallback used: {}", res.fallback_used);
            }
        }
        return Ok(Status::Ok);
    }

    let sentences = batch_sentences(a.batch.as_ref().expect("clap requires nl or batch"))?;
    let reqs: Vec<_> = sentences.iter().map(|s| template_request(&a.mode, s)).collect();
    let mut status = Status::Ok;
    for (nl, res) in sentences.iter().zip(kgst::transform_batch(&reqs, stages, &store, cli.jobs)) {
        let line = match res {
            Ok(r) => result_json(&r, !a.no_transcript),
            Err(e) => {
                let f = kgst_failure(&e);
                if status == Status::Ok || f.status == Status::Io {
                    status = f.status;
                }
                json!({"nl": nl, "error": e.to_string()})
            }
        };
        println!("{}", serde_json::to_string(&line).expect("json"));
    }
    Ok(status)
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> CmdResult {
    let test = read_pairs(&a.dataset)?;
    if test.is_empty() {
        return Err(usage(format!("{} has no pairs", a.dataset.display())));
    }
    let store = knowledge(a.mode.knowledge.as_ref())?;
    let (g, r) = stage_backends(cli, &a.mode)?;
    let prompts = prompt_set(cli)?;
    let stages = Stages {
        generator: g.as_ref(),
        refiner: r.as_ref(),
        prompts: &prompts,
    };
    let report = kgst::bench(&test, &template_request(&a.mode, ""), stages, &store, cli.jobs).map_err(domain)?;
    if let Some(p) = &a.report {
        exit::write(p, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    if cli.json {
        print_json(&report);
    } else {
        print!("{}", report.table());
    }
    Ok(Status::Ok)
}

fn print_stats(cli: &Cli, pairs: &[NlStlPair], ngram: usize, report: Option<&PathBuf>) -> CmdResult {
    if ngram == 0 {
        return Err(usage("--ngram must be at least 1"));
    }
    let s = compute_stats_with(pairs, ngram).map_err(domain)?;
    if let Some(p) = report {
        exit::write(p, &serde_json::to_string_pretty(&s).expect("stats serialize"))?;
    }
    if cli.json {
        print_json(&s);
    } else {
        print!("{}", s.table());
    }
    Ok(Status::Ok)
}

fn cmd_stats(cli: &Cli, a: &StatsArgs) -> CmdResult {
    print_stats(cli, &read_pairs(&a.dataset)?, a.ngram, a.report.as_ref())
}
