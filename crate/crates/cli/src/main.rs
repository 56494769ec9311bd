//! Command-line front end: decide equations, normalize terms, compare and
//! decompose closed processes, check derivations and run the soundness sweep.

mod compact;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use procalg::axioms::{format_trace, parse_trace, verify_trace, Mode};
use procalg::decider::{decide_detailed, refute_by_search, separate, Verdict};
use procalg::decomposition::parallel_decompose;
use procalg::normalize::{f_normalize, h_normalize};
use procalg::oracle::{axiom_soundness_sweep, SearchBound};
use procalg::semantics::{compare, Bisimilarity, CommFunction, CommKind, Semantics};
use procalg::syntax::{parse_equation, parse_term, Alphabet, Equation, ProcessTerm};
use serde_json::json;

const DEFAULT_ALPHABET: &str = "a,~a,b,~b,c,~c,d,~d";

#[derive(Parser, Debug)]
#[command(
    name = "procalg",
    version,
    about = "Equational reasoning for CCS with left merge and communication merge"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Communication function: none, ccs, or table:PATH.
    #[arg(long, global = true, default_value = "none")]
    comm: String,
    /// Declared actions, comma separated; co-names are written ~a.
    #[arg(long, global = true, default_value = DEFAULT_ALPHABET)]
    alphabet: String,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Seed for sampled searches.
    #[arg(long, global = true, env = "PROCALG_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    bound: BoundArgs,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Maximal depth of enumerated processes.
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    /// Maximal number of branches per state of enumerated processes.
    #[arg(long, global = true, default_value_t = 2)]
    fanout: usize,
    /// Actions of enumerated processes.
    #[arg(long, global = true, default_value = "a,~a")]
    search_alphabet: String,
    #[arg(long, global = true, default_value_t = 5000)]
    max_universe: usize,
    /// Instance spaces larger than this are sampled.
    #[arg(long, global = true, default_value_t = 20_000_000)]
    max_instances: u64,
    /// Number of samples drawn when a space is too large to exhaust.
    #[arg(long, global = true, default_value_t = 200_000)]
    sample: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Output {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TraceMode {
    Plain,
    F,
    H,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide an equation "P = Q", or every equation of a file.
    Decide {
        equation: Option<String>,
        /// One equation per line, `#` starts a comment.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Normal form of a term (F-normal under none, H-normal under ccs).
    Normalize {
        term: String,
        /// Also print the derivation.
        #[arg(long)]
        trace: bool,
    },
    /// Bisimilarity of two closed terms.
    Bisim { p: String, q: String },
    /// Transition graph of a closed term.
    Lts { term: String },
    /// Parallel prime decomposition of a closed term.
    Decompose { term: String },
    /// Verify a derivation file.
    CheckTrace {
        file: PathBuf,
        /// Admissible laws; defaults to F under none, H under ccs, plain otherwise.
        #[arg(long, value_enum)]
        mode: Option<TraceMode>,
    },
    /// Check every law on closed instances over the bounded universe.
    Soundness,
    /// Search the bounded universe for a counterexample to "P = Q".
    Refute { equation: String },
}

struct Ctx {
    comm: CommFunction,
    alphabet: Alphabet,
    bound: SearchBound,
    json: bool,
    verbose: bool,
    seed: u64,
    sample: usize,
}

/// Usage and input errors, reported with exit code 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

fn usage<T>(r: Result<T>) -> Result<T, Usage> {
    r.map_err(Usage)
}

fn context(g: &Global) -> Result<Ctx> {
    let alphabet = Alphabet::parse(&g.alphabet).map_err(|e| anyhow!("--alphabet: {e}"))?;
    let comm = match g.comm.as_str() {
        "none" => CommFunction::trivial(),
        "ccs" => CommFunction::ccs(),
        other => match other.strip_prefix("table:") {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                CommFunction::parse_table(&text).map_err(|e| anyhow!("{path}: {e}"))?
            }
            None => bail!("--comm must be none, ccs or table:PATH, not `{other}`"),
        },
    };
    if comm.kind() == CommKind::Ccs && !alphabet.is_bar_closed() {
        bail!("--comm ccs needs an alphabet closed under co-naming, got {{{alphabet}}}");
    }
    let b = &g.bound;
    let bound = SearchBound {
        max_depth: b.depth,
        max_fanout: b.fanout,
        alphabet: Alphabet::parse(&b.search_alphabet)
            .map_err(|e| anyhow!("--search-alphabet: {e}"))?,
        max_universe: b.max_universe,
        max_instances: b.max_instances,
    };
    bound.validate(&comm)?;
    Ok(Ctx {
        comm,
        alphabet,
        bound,
        json: g.output == Output::Json,
        verbose: g.verbose,
        seed: g.seed,
        sample: b.sample,
    })
}

fn print_json(v: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("values serialize")
    );
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Valid => 0,
        Verdict::Invalid { .. } => 1,
        Verdict::Unknown { .. } => 3,
    }
}

/// Re-checks an Invalid verdict's witness before it is shown.
fn recheck(ctx: &Ctx, eq: &Equation, v: &Verdict) -> Result<()> {
    if let Verdict::Invalid { witness, .. } = v {
        let mut sem = Semantics::new(ctx.comm.clone());
        if separate(eq, witness, &mut sem)?.is_none() {
            bail!("witness {witness} does not separate the two sides");
        }
    }
    Ok(())
}

fn report_verdict(ctx: &Ctx, eq: &Equation, v: &Verdict, extra: serde_json::Value) {
    if ctx.json {
        let mut obj = json!({ "equation": eq.to_string(), "comm": ctx.comm.to_string() });
        obj.as_object_mut().unwrap().extend(
            serde_json::to_value(v)
                .expect("verdict serializes")
                .as_object()
                .unwrap()
                .clone(),
        );
        if let serde_json::Value::Object(m) = extra {
            obj.as_object_mut().unwrap().extend(m);
        }
        print_json(&obj);
        return;
    }
    match v {
        Verdict::Valid => println!("VALID"),
        Verdict::Invalid {
            witness,
            experiment,
        } => {
            let (text, legend) = compact::render_valuation(witness);
            println!("INVALID");
            println!("witness: {text}");
            if !legend.is_empty() {
                println!("  {legend}");
            }
            println!("experiment: {experiment}  (holds for the left side only)");
        }
        Verdict::Unknown { searched } => println!("UNKNOWN (no counterexample in {searched})"),
    }
}

fn decide_one(ctx: &Ctx, eq: &Equation) -> Result<u8> {
    let verdict = if ctx.comm.kind() == CommKind::Custom {
        log::info!("no decision procedure for custom communication; searching instead");
        let v = refute_by_search(eq, &ctx.comm, &ctx.bound, ctx.sample, ctx.seed)?;
        recheck(ctx, eq, &v)?;
        report_verdict(ctx, eq, &v, json!({}));
        v
    } else {
        let d = decide_detailed(eq, &ctx.comm, &ctx.alphabet)?;
        recheck(ctx, eq, &d.verdict)?;
        if ctx.verbose && !ctx.json {
            println!("normal form (lhs): {}", d.lhs.term);
            println!("normal form (rhs): {}", d.rhs.term);
            println!("W = {}", d.width);
        }
        let extra = json!({
            "lhs_normal_form": d.lhs.term.to_string(),
            "rhs_normal_form": d.rhs.term.to_string(),
            "width": d.width,
        });
        report_verdict(
            ctx,
            eq,
            &d.verdict,
            if ctx.verbose { extra } else { json!({}) },
        );
        d.verdict
    };
    Ok(verdict_code(&verdict))
}

fn closed(ctx: &Ctx, text: &str) -> Result<ProcessTerm, Usage> {
    let t = usage(parse_term(text, &ctx.alphabet).map_err(anyhow::Error::from))?;
    if !t.is_closed() {
        return Err(Usage(anyhow!("`{text}` has free variables")));
    }
    Ok(t)
}

fn run(cli: Cli) -> Result<u8, Usage> {
    let ctx = usage(context(&cli.global))?;
    let fail = |e: anyhow::Error| Usage(e);
    match cli.command {
        Command::Decide { equation, file } => {
            let lines: Vec<String> = match (equation, file) {
                (Some(e), None) => vec![e],
                (None, Some(path)) => {
                    let text = usage(
                        fs::read_to_string(&path)
                            .with_context(|| format!("reading {}", path.display())),
                    )?;
                    text.lines()
                        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
                        .filter(|l| !l.is_empty())
                        .collect()
                }
                _ => return Err(Usage(anyhow!("give either an equation or --file"))),
            };
            let mut worst = 0;
            for line in lines {
                let eq = usage(parse_equation(&line, &ctx.alphabet).map_err(anyhow::Error::from))?;
                let code = decide_one(&ctx, &eq).map_err(fail)?;
                worst = match (worst, code) {
                    (1, _) | (_, 1) => 1,
                    (3, _) | (_, 3) => 3,
                    _ => 0,
                };
            }
            Ok(worst)
        }
        Command::Normalize { term, trace } => {
            let t = usage(parse_term(&term, &ctx.alphabet).map_err(anyhow::Error::from))?;
            let (nf, tr) = match ctx.comm.kind() {
                CommKind::Trivial => f_normalize(&t),
                CommKind::Ccs => h_normalize(&t, &ctx.comm).map_err(|e| fail(e.into()))?,
                CommKind::Custom => {
                    return Err(Usage(anyhow!(
                        "normal forms exist for --comm none and ccs only"
                    )))
                }
            };
            if ctx.json {
                print_json(&json!({
                    "term": t.to_string(),
                    "normal_form": nf.term.to_string(),
                    "mode": format!("{:?}", nf.mode),
                    "width": nf.width,
                    "trace": trace.then(|| format_trace(&tr)),
                }));
            } else {
                println!("{}", nf.term);
                if ctx.verbose {
                    println!("width {}", nf.width);
                }
                if trace {
                    print!("{}", format_trace(&tr));
                }
            }
            Ok(0)
        }
        Command::Bisim { p, q } => {
            let (p, q) = (closed(&ctx, &p)?, closed(&ctx, &q)?);
            let mut sem = Semantics::new(ctx.comm.clone());
            let cp = sem.canonicalize(&p).map_err(|e| fail(e.into()))?;
            let cq = sem.canonicalize(&q).map_err(|e| fail(e.into()))?;
            let result = compare(&cp, &cq);
            if ctx.json {
                print_json(
                    &json!({ "p": p.to_string(), "q": q.to_string(), "bisimilar": result.holds(),
                    "experiment": match &result { Bisimilarity::Distinguished(f) => Some(f.to_string()), _ => None } }),
                );
            } else {
                match &result {
                    Bisimilarity::Bisimilar => println!("bisimilar"),
                    Bisimilarity::Distinguished(f) => {
                        println!("not bisimilar: {f} holds for the first only")
                    }
                }
            }
            Ok(if result.holds() { 0 } else { 1 })
        }
        Command::Lts { term } => {
            let t = closed(&ctx, &term)?;
            let p = Semantics::new(ctx.comm.clone())
                .canonicalize(&t)
                .map_err(|e| fail(e.into()))?;
            let edges = p.lts();
            if ctx.json {
                let states: Vec<String> = p.reachable().iter().map(ToString::to_string).collect();
                let edges: Vec<_> = edges
                    .iter()
                    .map(|(s, l, t)| json!({ "from": s, "label": l, "to": t }))
                    .collect();
                print_json(&json!({ "states": states, "transitions": edges }));
            } else {
                for (s, l, t) in edges {
                    println!("{s} --{l}--> {t}");
                }
            }
            Ok(0)
        }
        Command::Decompose { term } => {
            let t = closed(&ctx, &term)?;
            let p = Semantics::new(ctx.comm.clone())
                .canonicalize(&t)
                .map_err(|e| fail(e.into()))?;
            let d = parallel_decompose(&p, &ctx.comm, &ctx.bound).map_err(|e| fail(e.into()))?;
            if ctx.json {
                print_json(&json!({ "term": t.to_string(), "factors": d.factors }));
            } else if d.factors.is_empty() {
                println!("0 (no factors)");
            } else {
                for f in &d.factors {
                    println!("{f}");
                }
            }
            Ok(0)
        }
        Command::CheckTrace { file, mode } => {
            let text = usage(
                fs::read_to_string(&file).with_context(|| format!("reading {}", file.display())),
            )?;
            let trace = usage(parse_trace(&text, &ctx.alphabet).map_err(anyhow::Error::from))?;
            let mode = match (mode, ctx.comm.kind()) {
                (Some(TraceMode::Plain), _) | (None, CommKind::Custom) => Mode::Plain,
                (Some(TraceMode::F), _) | (None, CommKind::Trivial) => Mode::F,
                (Some(TraceMode::H), _) | (None, CommKind::Ccs) => Mode::H,
            };
            let result = verify_trace(&trace, &ctx.comm, mode);
            if ctx.json {
                print_json(&json!({
                    "steps": trace.steps.len(),
                    "ok": result.is_ok(),
                    "error": result.as_ref().err().map(ToString::to_string),
                }));
            } else {
                match &result {
                    Ok(()) => println!("OK ({} steps)", trace.steps.len()),
                    Err(e) => println!("REJECTED: {e}"),
                }
            }
            Ok(if result.is_ok() { 0 } else { 1 })
        }
        Command::Soundness => {
            let report = axiom_soundness_sweep(&ctx.bound, ctx.sample, ctx.seed)
                .map_err(|e| fail(e.into()))?;
            if ctx.json {
                print_json(&serde_json::to_value(&report).expect("report serializes"));
            } else {
                print!("{report}");
            }
            Ok(if report.all_as_expected() { 0 } else { 1 })
        }
        Command::Refute { equation } => {
            let eq = usage(parse_equation(&equation, &ctx.alphabet).map_err(anyhow::Error::from))?;
            let v = refute_by_search(&eq, &ctx.comm, &ctx.bound, ctx.sample, ctx.seed)
                .map_err(|e| fail(e.into()))?;
            recheck(&ctx, &eq, &v).map_err(fail)?;
            report_verdict(&ctx, &eq, &v, json!({}));
            Ok(verdict_code(&v))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.global.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
