// SPDX-License-Identifier: MIT
//! `ancestral`: command-line front end for the ancestral-graph workbench.
//!
//! Every verb builds an [`AuditReport`] and prints it either as text or as
//! JSON; both renderings come from the same report, so they always agree.
//! Exit codes: 0 on success, 1 when a verdict is false under `--strict` (or
//! a bundled example disagrees with its manifest, or a guarantee's
//! hypotheses hold without its conclusion), 2 on usage or input errors.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ancestral::fixtures::{fixture, run_fixture, FIXTURE_IDS};
use ancestral::graph::{minimal_collider_paths, minimal_order, parse_graph};
use ancestral::imodel::{check_property, parse_model, path_stable, skeleton_of_model, v_stable, PropertyId};
use ancestral::learn::{audit_with, best_method, markov_equivalent, stable_orientations_with, LearnOptions, Method};
use ancestral::nodeset::MAX_NODES;
use ancestral::scm::{builtin, parse_scm, scm_audit, BUILTIN_IDS};
use ancestral::separation::{connecting_path, is_maximal};
use ancestral::{AuditReport, Graph, IndependenceModel, NodeSet, Scm, SeparationQuery, Verdict, DEFAULT_MAX_NODES};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "ancestral", version, about = "Ancestral graphs, independence models and structure learning")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Global {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 1 when the verb's verdict is false.
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads for the orientation search (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Largest accepted node count.
    #[arg(long, global = true, value_name = "N", env = "CS_MAX_NODES", default_value_t = DEFAULT_MAX_NODES,
          value_parser = node_bound)]
    max_nodes: usize,
}

#[derive(Subcommand)]
enum Verb {
    /// Check that a graph is ancestral and maximal; list its minimal collider paths.
    GraphCheck { graph: PathBuf },
    /// Decide m-separation of two node sets given a third.
    Msep {
        graph: PathBuf,
        /// Comma-separated labels.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<String>,
    },
    /// Check the structural properties of an independence model.
    Model {
        model: PathBuf,
        /// Check the ordered properties against this graph's minimal order.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Enumerate the orientations of the model skeleton the model is stable for.
    Learn {
        model: PathBuf,
        #[arg(long)]
        dags_only: bool,
    },
    /// Decide Markov equivalence of two graphs.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        /// dag, mag or brute (default: the cheapest applicable criterion).
        #[arg(long)]
        method: Option<Method>,
    },
    /// Audit a model against a presumed causal graph.
    Audit {
        model: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dags_only: bool,
    },
    /// Audit a structural causal model from a file or a built-in name.
    Scm { source: String },
    /// Run a bundled worked example and compare against its expected verdicts.
    Paper {
        /// Example id, or `all`.
        id: String,
    },
}

fn node_bound(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if (1..=MAX_NODES).contains(&n) => Ok(n),
        _ => Err(format!("expected a node count between 1 and {MAX_NODES}")),
    }
}

/// What a verb produced: the report, its headline verdict, and any extra
/// JSON fields (learned graphs, paths) that the report does not carry.
struct Outcome {
    report: AuditReport,
    verdict: bool,
    /// Failure that sets exit status 1 regardless of `--strict`.
    hard_failure: Option<String>,
    extra: Vec<(&'static str, Value)>,
    /// Text printed before the report in human mode.
    headline: Vec<String>,
}

impl Outcome {
    fn new(report: AuditReport, verdict: bool) -> Self {
        Outcome { report, verdict, hard_failure: None, extra: Vec::new(), headline: Vec::new() }
    }
}

type Fallible<T> = Result<T, String>;

fn err(context: impl Display, e: impl Display) -> String {
    format!("{context}: {e}")
}

fn read(path: &Path) -> Fallible<String> {
    std::fs::read_to_string(path).map_err(|e| err(path.display(), e))
}

fn bounded(path: &Path, n: usize, max: usize) -> Fallible<()> {
    if n > max {
        return Err(format!("{}: {n} nodes exceed the bound of {max} (see --max-nodes)", path.display()));
    }
    Ok(())
}

fn load_graph(path: &Path, max: usize) -> Fallible<Graph> {
    let g = parse_graph(&read(path)?).map_err(|e| err(path.display(), e))?;
    bounded(path, g.n(), max)?;
    Ok(g)
}

fn load_model(path: &Path, max: usize) -> Fallible<IndependenceModel> {
    let parsed = parse_model(&read(path)?, max).map_err(|e| err(path.display(), e))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed.model)
}

fn node_set(g: &Graph, labels: &[String]) -> Fallible<NodeSet> {
    let refs: Vec<&str> = labels.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    g.set_of(&refs).map_err(|e| e.to_string())
}

fn graph_texts(gs: &[Graph]) -> Value {
    Value::Array(gs.iter().map(|g| Value::String(g.to_text())).collect())
}

fn graph_check(path: &Path, max: usize) -> Fallible<Outcome> {
    let g = load_graph(path, max)?;
    let mut r = AuditReport::new(&format!("graph {}", path.display()));
    let ancestral = g.is_ancestral();
    let ok = ancestral.holds();
    r.push("ancestral", ancestral.map(|w| g.render_non_ancestral(&w)));
    if ok {
        let maximal = is_maximal(&g);
        r.push("maximal", maximal.map(|(a, b)| format!("{} and {} cannot be separated", g.label(a), g.label(b))));
    }
    let verdict = r.flags.iter().all(|f| f.value);
    let mut out = Outcome::new(r, verdict);
    out.headline.push(format!("{} nodes, {} edges, {}", g.n(), g.edge_count(), if g.is_dag() { "a DAG" } else { "not a DAG" }));
    if ok {
        let ord = minimal_order(&g).map_err(|e| e.to_string())?;
        let paths: Vec<String> = minimal_collider_paths(&g).iter().map(|p| p.render(&g)).collect();
        out.headline.push(format!("minimal order: {}", ord.render(&g)));
        out.headline.push(format!("minimal collider paths: {}", if paths.is_empty() { "none".into() } else { paths.join(" ") }));
        out.extra.push(("minimal_collider_paths", paths.into_iter().map(Value::String).collect()));
    }
    Ok(out)
}

fn msep(path: &Path, a: &[String], b: &[String], c: &[String], max: usize) -> Fallible<Outcome> {
    let g = load_graph(path, max)?;
    let q = SeparationQuery::new(node_set(&g, a)?, node_set(&g, b)?, node_set(&g, c)?).map_err(|e| e.to_string())?;
    let witness = connecting_path(&g, &q).map_err(|e| err(path.display(), e))?;
    let mut r = AuditReport::new(&format!(
        "{} _||_ {} | {} in {}",
        g.render_set(q.a),
        g.render_set(q.b),
        g.render_set(q.c),
        path.display()
    ));
    let separated = witness.is_none();
    let text = witness.as_ref().map(|p| format!("connecting path {}", p.render(&g)));
    r.push("separated", text.clone().into());
    let mut out = Outcome::new(r, separated);
    out.headline.push(match &text {
        None => "separated".to_string(),
        Some(t) => format!("connected: {t}"),
    });
    Ok(out)
}

fn model(path: &Path, graph: Option<&Path>, max: usize) -> Fallible<Outcome> {
    let j = load_model(path, max)?;
    let ord = match graph {
        Some(gp) => {
            let g = load_graph(gp, max)?;
            if g.labels() != j.labels() {
                return Err(format!("{} and {} are over different node lists", path.display(), gp.display()));
            }
            Some(minimal_order(&g).map_err(|e| err(gp.display(), e))?)
        }
        None => None,
    };
    let mut r = AuditReport::new(&format!("model {}", path.display()));
    for p in PropertyId::ALL {
        if p.needs_order() && ord.is_none() {
            continue;
        }
        let v = check_property(&j, p, ord.as_ref()).map_err(|e| e.to_string())?;
        r.push(&p.to_string(), v.map(|w| w.render(&j)));
    }
    r.push("v-stable", v_stable(&j).map(|w| w.render(&j)));
    r.push("path-stable", path_stable(&j).map(|w| w.render(&j)));
    if ord.is_none() {
        r.notes.push("ordered properties skipped; pass --graph to check them".into());
    }
    let verdict = r.flags.iter().all(|f| f.value);
    let mut out = Outcome::new(r, verdict);
    let sk = skeleton_of_model(&j);
    out.headline.push(format!("{} nodes, {} statements, skeleton edges: {}", j.n(), j.len(), sk.edges().len()));
    Ok(out)
}

fn learn(path: &Path, dags_only: bool, max: usize) -> Fallible<Outcome> {
    let j = load_model(path, max)?;
    let graphs = stable_orientations_with(&j, LearnOptions::dags(dags_only)).map_err(|e| e.to_string())?;
    let mut r = AuditReport::new(&format!("{} orientations of {}", if dags_only { "DAG" } else { "ancestral" }, path.display()));
    r.push("stable_orientation_exists", if graphs.is_empty() { Verdict::Fails("none".into()) } else { Verdict::Holds });
    let mut unique = Verdict::Holds;
    for h in graphs.iter().skip(1) {
        let v = markov_equivalent(&graphs[0], h, best_method(&graphs[0], h)).map_err(|e| e.to_string())?;
        if !v.equivalent {
            unique = Verdict::Fails(format!("{:?} vs {:?}", graphs[0], h));
            break;
        }
    }
    r.push("outputs_equivalent", unique);
    let verdict = r.flags.iter().all(|f| f.value);
    let mut out = Outcome::new(r, verdict);
    out.headline.push(format!("{} stable orientation(s)", graphs.len()));
    for (i, g) in graphs.iter().enumerate() {
        out.headline.push(format!("--- {}\n{}", i + 1, g.to_text().trim_end()));
    }
    out.extra.push(("graphs", graph_texts(&graphs)));
    Ok(out)
}

fn equiv(first: &Path, second: &Path, method: Option<Method>, max: usize) -> Fallible<Outcome> {
    let g = load_graph(first, max)?;
    let h = load_graph(second, max)?;
    let method = method.unwrap_or_else(|| best_method(&g, &h));
    let v = markov_equivalent(&g, &h, method).map_err(|e| e.to_string())?;
    let witness = v.witness.as_ref().map(|w| w.render(&g));
    let mut r = AuditReport::new(&format!("{} vs {} ({})", first.display(), second.display(), method.name()));
    r.push("equivalent", witness.clone().into());
    let mut out = Outcome::new(r, v.equivalent);
    out.headline.push(match &witness {
        None => "equivalent".to_string(),
        Some(w) => format!("not equivalent: {w}"),
    });
    Ok(out)
}

fn with_ledger_check(report: AuditReport, verdict: bool) -> Outcome {
    let broken: Vec<String> = report.inconsistencies().iter().map(|e| e.claim.clone()).collect();
    let mut out = Outcome::new(report, verdict && broken.is_empty());
    if !broken.is_empty() {
        out.hard_failure = Some(format!("hypotheses met but conclusion missing: {}", broken.join(", ")));
    }
    out
}

fn audit_cmd(model: &Path, graph: &Path, dags_only: bool, max: usize) -> Fallible<Outcome> {
    let j = load_model(model, max)?;
    let g = load_graph(graph, max)?;
    let mut r = audit_with(&j, &g, LearnOptions::dags(dags_only)).map_err(|e| e.to_string())?;
    r.subject = format!("audit of {} against {}", model.display(), graph.display());
    r.provenance.inputs = vec![model.display().to_string(), graph.display().to_string()];
    let verdict = r.flag(if dags_only && g.is_dag() { "dag_learner_equivalent" } else { "learner_equivalent" }) == Some(true);
    Ok(with_ledger_check(r, verdict))
}

fn scm_cmd(source: &str, max: usize) -> Fallible<Outcome> {
    let (s, origin): (Scm, String) = if BUILTIN_IDS.contains(&source) {
        (builtin(source).map_err(|e| e.to_string())?, format!("built-in {source}"))
    } else {
        let p = Path::new(source);
        if !p.exists() {
            return Err(format!("{source}: no such file and not a built-in ({})", BUILTIN_IDS.join(", ")));
        }
        (parse_scm(&read(p)?).map_err(|e| err(source, e))?, source.to_string())
    };
    bounded(Path::new(source), s.n(), max)?;
    let mut r = scm_audit(&s).map_err(|e| e.to_string())?;
    r.subject = format!("SCM audit of {origin}");
    r.provenance.inputs.push(origin);
    let verdict = r.flag("markovian") == Some(true);
    Ok(with_ledger_check(r, verdict))
}

fn paper(id: &str) -> Fallible<Vec<Outcome>> {
    let ids: Vec<&str> = if id == "all" { FIXTURE_IDS.to_vec() } else { vec![id] };
    let mut outs = Vec::new();
    for id in ids {
        let f = fixture(id).map_err(|e| e.to_string())?;
        let run = run_fixture(&f).map_err(|e| err(id, e))?;
        let expected: Vec<Value> = f
            .expected
            .iter()
            .map(|e| serde_json::json!({ "flag": e.flag, "value": e.value, "origin": e.origin.to_string() }))
            .collect();
        let mismatches: Vec<String> = run
            .mismatches
            .iter()
            .map(|(e, got)| {
                let got = got.map_or("missing".to_string(), |b| b.to_string());
                format!("{} ({}): expected {}, got {got}", e.flag, e.origin, e.value)
            })
            .collect();
        let mut out = with_ledger_check(run.report, run.mismatches.is_empty());
        out.report.notes.push(format!(
            "manifest: {}/{} expectations met",
            f.expected.len() - mismatches.len(),
            f.expected.len()
        ));
        if !mismatches.is_empty() {
            let msg = format!("{id} disagrees with its manifest: {}", mismatches.join("; "));
            out.hard_failure = Some(match out.hard_failure {
                Some(prev) => format!("{msg}; {prev}"),
                None => msg,
            });
        }
        out.extra.push(("expected", Value::Array(expected)));
        out.extra.push(("mismatches", mismatches.into_iter().map(Value::String).collect()));
        outs.push(out);
    }
    Ok(outs)
}

fn to_json(out: &Outcome) -> Value {
    let mut v = serde_json::to_value(&out.report).expect("report serializes");
    let obj = v.as_object_mut().expect("report is an object");
    obj.insert("verdict".into(), Value::Bool(out.verdict));
    for (k, x) in &out.extra {
        obj.insert((*k).into(), x.clone());
    }
    if let Some(h) = &out.hard_failure {
        obj.insert("failure".into(), Value::String(h.clone()));
    }
    v
}

fn run(cli: Cli) -> Fallible<Vec<Outcome>> {
    let max = cli.global.max_nodes;
    let one = |o: Fallible<Outcome>| o.map(|o| vec![o]);
    match &cli.verb {
        Verb::GraphCheck { graph } => one(graph_check(graph, max)),
        Verb::Msep { graph, a, b, c } => one(msep(graph, a, b, c, max)),
        Verb::Model { model: m, graph } => one(model(m, graph.as_deref(), max)),
        Verb::Learn { model, dags_only } => one(learn(model, *dags_only, max)),
        Verb::Equiv { first, second, method } => one(equiv(first, second, *method, max)),
        Verb::Audit { model, graph, dags_only } => one(audit_cmd(model, graph, *dags_only, max)),
        Verb::Scm { source } => one(scm_cmd(source, max)),
        Verb::Paper { id } => paper(id),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (json, strict) = (cli.global.json, cli.global.strict);
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let outs = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if json {
        let v = if outs.len() == 1 { to_json(&outs[0]) } else { Value::Array(outs.iter().map(to_json).collect()) };
        println!("{}", serde_json::to_string_pretty(&v).expect("JSON serializes"));
    } else {
        for (i, o) in outs.iter().enumerate() {
            if i > 0 {
                println!();
            }
            for h in &o.headline {
                println!("{h}");
            }
            print!("{}", o.report.render());
        }
    }
    let mut code = 0;
    for o in &outs {
        if let Some(h) = &o.hard_failure {
            eprintln!("error: {h}");
            code = 1;
        } else if strict && !o.verdict {
            code = 1;
        }
    }
    ExitCode::from(code)
}
