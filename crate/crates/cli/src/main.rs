//! `ndlr`: command-line driver for the calculus.

use std::fmt::Display;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use ndlr_core::diagram::{
    kind_of, parse_diagram_file, propose_diagrams, verify_complete_set, CheckParams, InstanceRecord, Kind,
};
use ndlr_core::equiv::{check_le_c, CtxSpec, EquivVerdict, Restrict};
use ndlr_core::standard::{ReductionStep, StandardRedex};
use ndlr_core::step::{apply_rule, classify};
use ndlr_core::{
    count_terms, enumerate_terms, parse, pretty, standard_redex, standard_reduce, EnumParams, EvalResult, Expr, Name,
    NdPolicy, Position, Rule, Signature, StepClass, StuckClass,
};

const CONFIG_ENV: &str = "NDLR_CONFIG";

#[derive(Parser, Debug)]
#[command(name = "ndlr", version, about = "Reduction, transformations, diagram checking and equivalence testing")]
struct Cli {
    /// Signature file (`type Bool = True/0 | False/0` per line).
    #[arg(long, global = true)]
    sig: Option<PathBuf>,
    /// Worker count; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Line-delimited JSON records instead of text.
    #[arg(long, global = true)]
    records: bool,
    /// Configuration file (TOML); defaults to $NDLR_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NdMode {
    Left,
    Right,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiagramMode {
    Fork,
    Commute,
    Propose,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a term and print it canonically.
    Parse { file: Option<PathBuf> },
    /// Standard reduction trace.
    Reduce {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "left")]
        nd: NdMode,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Apply one rule at a position.
    Apply {
        file: Option<PathBuf>,
        #[arg(long)]
        rule: Rule,
        #[arg(long)]
        pos: Position,
        /// Binders dropped by ldelcyc, comma separated.
        #[arg(long, value_delimiter = ',')]
        group: Vec<String>,
    },
    /// List (or count) closed terms up to a size.
    Enumerate {
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 2)]
        binders: usize,
        #[arg(long, default_value_t = 2)]
        bindings: usize,
        #[arg(long)]
        partial_constructors: bool,
        #[arg(long)]
        count: bool,
    },
    /// Verify or propose a complete set of diagrams.
    CheckDiagrams {
        #[arg(long)]
        red: Rule,
        #[arg(long)]
        diagrams: Option<PathBuf>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum)]
        mode: DiagramMode,
    },
    /// Search for a context refuting s ≤c t.
    CheckEquiv {
        s: PathBuf,
        t: PathBuf,
        #[arg(long)]
        ctx_size: Option<usize>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        reduction_contexts: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Config {
    signature: Option<PathBuf>,
    step_bound: usize,
    size: usize,
    depth: usize,
    ctx_size: usize,
    diagram_dir: Option<PathBuf>,
    workers: usize,
    output: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            signature: None,
            step_bound: 200,
            size: 7,
            depth: 6,
            ctx_size: 5,
            diagram_dir: None,
            workers: 1,
            output: Format::Text,
        }
    }
}

/// A failure with its exit status.
struct Fail(u8, String);

impl<E: Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(2, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

fn load_config(cli: &Cli) -> Result<Config, Fail> {
    let path = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| usage(format!("config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))?
        }
        None => Config::default(),
    };
    if let Some(s) = &cli.sig {
        cfg.signature = Some(s.clone());
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if cli.records {
        cfg.output = Format::Records;
    }
    if cfg.step_bound == 0 || cfg.size == 0 || cfg.depth == 0 || cfg.ctx_size == 0 || cfg.workers == 0 {
        return Err(usage("config: bounds and worker count must be positive"));
    }
    if let Some(d) = &cfg.diagram_dir {
        if !d.is_dir() {
            return Err(usage(format!("config: diagram directory {} does not exist", d.display())));
        }
    }
    Ok(cfg)
}

fn load_sig(cfg: &Config) -> Result<Signature, Fail> {
    match &cfg.signature {
        None => Ok(Signature::bool_list()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("signature {}: {e}", p.display())))?;
            Signature::parse(&text).map_err(|e| usage(format!("signature {}: {e}", p.display())))
        }
    }
}

fn read_input(file: &Option<PathBuf>) -> Result<String, Fail> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn read_term(file: &Option<PathBuf>, sig: &Signature) -> Result<Expr, Fail> {
    let text = read_input(file)?;
    parse(&text, sig).map_err(|e| usage(format!("parse error: {e}")))
}

fn read_closed(file: &Option<PathBuf>, sig: &Signature) -> Result<Expr, Fail> {
    let e = read_term(file, sig)?;
    let free = e.free_vars();
    if !free.is_empty() {
        let names: Vec<&str> = free.iter().map(Name::as_str).collect();
        return Err(usage(format!("term is not closed: free {}", names.join(", "))));
    }
    Ok(e)
}

fn step_record(s: &ReductionStep) -> serde_json::Value {
    json!({"type": "step", "label": s.label, "flag": s.flag, "pos": s.pos, "after": s.after})
}

fn result_record(r: &EvalResult, arms: Option<&str>) -> serde_json::Value {
    let (kind, class, nd, term) = match r {
        EvalResult::Converged { result, nd_count } => ("Converged", None, *nd_count, Some(result)),
        EvalResult::Stuck { result, class, nd_count } => ("Stuck", Some(*class), *nd_count, Some(result)),
        EvalResult::Exhausted { .. } => ("Exhausted", None, 0, None),
    };
    json!({"type": "result", "result": kind, "class": class.map(|c| c.to_string()), "nd": nd, "term": term, "arms": arms})
}

/// One leaf of the nd branch tree.
struct Leaf {
    arms: String,
    result: EvalResult,
}

fn branch_tree(e: &Expr, bound: usize) -> Vec<Leaf> {
    let mut leaves = Vec::new();
    let mut stack = vec![(e.clone(), 0usize, String::new())];
    while let Some((mut cur, mut steps, arms)) = stack.pop() {
        let nd = arms.len();
        loop {
            if steps >= bound {
                leaves.push(Leaf { arms, result: EvalResult::Exhausted { steps } });
                break;
            }
            match standard_redex(&cur) {
                StandardRedex::None(class) => {
                    let result = if class == StuckClass::Value {
                        EvalResult::Converged { result: cur, nd_count: nd }
                    } else {
                        EvalResult::Stuck { result: cur, class, nd_count: nd }
                    };
                    leaves.push(Leaf { arms, result });
                    break;
                }
                StandardRedex::Deterministic(s) => {
                    cur = s.after;
                    steps += 1;
                }
                StandardRedex::NdChoice(l, r) => {
                    stack.push((r.after, steps + 1, format!("{arms}R")));
                    stack.push((l.after, steps + 1, format!("{arms}L")));
                    break;
                }
            }
        }
    }
    leaves
}

fn cmd_reduce(
    cfg: &Config,
    sig: &Signature,
    file: &Option<PathBuf>,
    nd: NdMode,
    max: Option<usize>,
) -> Result<u8, Fail> {
    let e = read_closed(file, sig)?;
    let bound = max.unwrap_or(cfg.step_bound);
    let records = cfg.output == Format::Records;
    let policy = match nd {
        NdMode::Left => NdPolicy::Left,
        NdMode::Right => NdPolicy::Right,
        NdMode::All => {
            let leaves = branch_tree(&e, bound);
            let mut exhausted = false;
            for l in &leaves {
                exhausted |= matches!(l.result, EvalResult::Exhausted { .. });
                let arms = if l.arms.is_empty() { "-" } else { &l.arms };
                if records {
                    println!("{}", result_record(&l.result, Some(arms)));
                } else {
                    let term = match &l.result {
                        EvalResult::Converged { result, .. } | EvalResult::Stuck { result, .. } => pretty(result),
                        EvalResult::Exhausted { .. } => String::new(),
                    };
                    println!("LEAF {arms} {} {term}", l.result.summary());
                }
            }
            if !records {
                println!("LEAVES {}", leaves.len());
            }
            return Ok(if exhausted { 3 } else { 0 });
        }
    };
    let (result, trace) = standard_reduce(&e, &policy, bound);
    for s in &trace {
        if records {
            println!("{}", step_record(s));
        } else {
            println!("{s}");
        }
    }
    if records {
        println!("{}", result_record(&result, None));
    } else {
        println!("{}", result.summary());
    }
    Ok(if matches!(result, EvalResult::Exhausted { .. }) { 3 } else { 0 })
}

fn cmd_apply(
    cfg: &Config,
    sig: &Signature,
    file: &Option<PathBuf>,
    rule: Rule,
    pos: &Position,
    group: &[String],
) -> Result<u8, Fail> {
    let e = read_term(file, sig)?;
    let group: Vec<Name> = group.iter().map(|s| Name::new(s)).collect();
    let (after, label) = apply_rule(&e, rule, pos, &group).map_err(|err| usage(err.to_string()))?;
    let mut redex = ndlr_core::Redex::new(label, pos.clone());
    redex.group = group;
    let class = match classify(&e, &redex, &after) {
        Ok(StepClass::Standard) => "st",
        Ok(StepClass::Internal) => "i",
        _ => "neither",
    };
    if cfg.output == Format::Records {
        println!("{}", json!({"type": "apply", "label": label, "class": class, "pos": pos, "after": after}));
    } else {
        println!("{}", pretty(&after));
        println!("STEP {label} {class}");
    }
    Ok(0)
}

fn cmd_enumerate(
    cfg: &Config,
    sig: &Signature,
    size: Option<usize>,
    b: usize,
    m: usize,
    partial: bool,
    count: bool,
) -> Result<u8, Fail> {
    let mut p = EnumParams::new(sig.clone(), size.unwrap_or(cfg.size));
    p.max_binders = b;
    p.max_letrec_bindings = m;
    p.partial_constructors = partial;
    if count {
        println!("{}", count_terms(&p));
    } else {
        for t in enumerate_terms(&p) {
            if cfg.output == Format::Records {
                println!("{}", json!({"type": "term", "term": t, "size": t.size()}));
            } else {
                println!("{t}");
            }
        }
    }
    Ok(0)
}

fn print_record(r: &InstanceRecord) {
    match serde_json::to_string(r) {
        Ok(s) => println!("{s}"),
        Err(e) => eprintln!("record: {e}"),
    }
}

fn diagram_path(cfg: &Config, p: &Path) -> PathBuf {
    match &cfg.diagram_dir {
        Some(d) if !p.exists() => d.join(p),
        _ => p.to_path_buf(),
    }
}

fn cmd_check_diagrams(
    cfg: &Config,
    sig: &Signature,
    red: Rule,
    diagrams: &Option<PathBuf>,
    size: Option<usize>,
    depth: Option<usize>,
    mode: DiagramMode,
) -> Result<u8, Fail> {
    let p = EnumParams::new(sig.clone(), size.unwrap_or(cfg.size));
    let params = CheckParams { depth: depth.unwrap_or(cfg.depth), ..CheckParams::default() };
    let records = cfg.output == Format::Records;
    let kind = match mode {
        DiagramMode::Fork => Kind::Forking,
        DiagramMode::Commute => Kind::Commuting,
        DiagramMode::Propose => {
            let mut out = 0;
            for kind in [Kind::Forking, Kind::Commuting] {
                let prop = propose_diagrams(red, kind, &[], &p, params);
                let name = if kind == Kind::Forking { "fork" } else { "commute" };
                println!("# {red} {name}: {} diagrams, {} unresolved", prop.diagrams.len(), prop.unresolved);
                for d in &prop.diagrams {
                    println!("{d}");
                }
                if prop.unresolved > 0 {
                    out = 1;
                }
            }
            return Ok(out);
        }
    };
    let path = diagrams.as_ref().ok_or_else(|| usage("--diagrams is required for fork and commute"))?;
    let path = diagram_path(cfg, path);
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let set = parse_diagram_file(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if !set.is_empty() && kind_of(&set) != Some(kind) {
        return Err(usage(format!("{}: diagrams are not all of the requested kind", path.display())));
    }
    let mut sink = |r: &InstanceRecord| {
        if records {
            print_record(r);
        }
    };
    let report = verify_complete_set(red, &set, kind, &p, params, &mut sink);
    if records {
        println!("{}", json!({"type": "summary", "report": report}));
    } else {
        println!("{}", report.summary());
        for (i, d) in set.iter().enumerate() {
            println!("  [{i}] {:>8}  {d}", report.matches[i]);
        }
        for c in &report.counterexamples {
            println!("COUNTEREXAMPLE {} --{}@{}--> {}", c.source, c.red.label, c.red.pos, c.target);
            for b in c.branches.iter().filter(|b| !b.is_covered()) {
                println!("  {}", serde_json::to_string(b).unwrap_or_default());
            }
        }
    }
    Ok(if report.is_complete() { 0 } else { 1 })
}

fn cmd_check_equiv(
    cfg: &Config,
    sig: &Signature,
    s: &Path,
    t: &Path,
    ctx_size: Option<usize>,
    max_steps: Option<usize>,
    reduction_contexts: bool,
) -> Result<u8, Fail> {
    let s = read_term(&Some(s.to_path_buf()), sig)?;
    let t = read_term(&Some(t.to_path_buf()), sig)?;
    let restrict = if reduction_contexts { Restrict::ReductionContexts } else { Restrict::AllContexts };
    let spec = CtxSpec::new(sig.clone(), ctx_size.unwrap_or(cfg.ctx_size), restrict);
    let v = check_le_c(&s, &t, &spec, max_steps.unwrap_or(cfg.step_bound));
    if cfg.output == Format::Records {
        println!("{}", serde_json::to_string(&v)?);
    } else {
        match &v {
            EquivVerdict::NoCounterexample { contexts_checked, exhausted } => {
                println!("NO COUNTEREXAMPLE contexts={contexts_checked} exhausted={exhausted}")
            }
            EquivVerdict::Counterexample { context, d, detail } => {
                println!("COUNTEREXAMPLE context={context} D={d}");
                println!("  {detail}");
            }
        }
    }
    Ok(match v {
        EquivVerdict::Counterexample { .. } => 1,
        EquivVerdict::NoCounterexample { exhausted, .. } if exhausted > 0 => 3,
        EquivVerdict::NoCounterexample { .. } => 0,
    })
}

fn run(cli: &Cli) -> Result<u8, Fail> {
    let cfg = load_config(cli)?;
    let sig = load_sig(&cfg)?;
    match &cli.cmd {
        Cmd::Parse { file } => {
            let e = read_term(file, &sig)?;
            if cfg.output == Format::Records {
                println!("{}", json!({"type": "term", "term": e}));
            } else {
                println!("{}", pretty(&e));
            }
            Ok(0)
        }
        Cmd::Reduce { file, nd, max_steps } => cmd_reduce(&cfg, &sig, file, *nd, *max_steps),
        Cmd::Apply { file, rule, pos, group } => cmd_apply(&cfg, &sig, file, *rule, pos, group),
        Cmd::Enumerate { size, binders, bindings, partial_constructors, count } => {
            cmd_enumerate(&cfg, &sig, *size, *binders, *bindings, *partial_constructors, *count)
        }
        Cmd::CheckDiagrams { red, diagrams, size, depth, mode } => {
            cmd_check_diagrams(&cfg, &sig, *red, diagrams, *size, *depth, *mode)
        }
        Cmd::CheckEquiv { s, t, ctx_size, max_steps, reduction_contexts } => {
            cmd_check_equiv(&cfg, &sig, s, t, *ctx_size, *max_steps, *reduction_contexts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
