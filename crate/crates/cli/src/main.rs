//! `rado`: JSON command-line interface to the rado library.
//!
//! Exit codes: 0 success, 1 domain error, 2 budget exhausted or
//! inconclusive, 64 usage error.

mod input;
mod suite;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rado::behavior::{self, BinaryType, TypeTerm};
use rado::closure::{self, InterpolationGoal, Interpolation, SearchLimits, Term};
use rado::galois::{self, GaloisError, Relation};
use rado::generic::{GenericStructure, NodeConstraint, Signature};
use rado::operations::FunctionSample;
use rado::ramsey::{self, ArrowInstance, ArrowOutcome, ConstantGraph, OrderedGraph, RamseyError};
use rado::{PartialIso, Vertex};
use serde_json::{json, Value};

use input::OpArgs;

#[derive(Debug, Parser)]
#[command(name = "rado", version, about = "Computations in the random graph (BIT model)")]
struct Cli {
    /// Indent JSON output and print a summary line on stderr
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads for parallel searches
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for the generic structure and the self-test battery
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Least vertex adjacent to --adj and non-adjacent to --nonadj
    Witness {
        #[arg(long, default_value = "")]
        adj: String,
        #[arg(long, default_value = "")]
        nonadj: String,
    },
    /// Induced subgraph on --vertices, or the first copy of --find below --bound
    Subgraph {
        #[arg(long, conflicts_with = "find")]
        vertices: Option<String>,
        #[arg(long, requires = "bound")]
        find: Option<String>,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Extends a partial isomorphism by forth then back steps
    ExtendIso {
        /// Pairs "a:b,c:d" or PartialIso JSON
        #[arg(long, default_value = "")]
        map: String,
        #[arg(long, default_value = "")]
        forth: String,
        #[arg(long, default_value = "")]
        back: String,
    },
    /// Builds a named operation sample
    MakeOp {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        domain: String,
        /// Second coordinate set of binary operations (default: --domain)
        #[arg(long)]
        second: Option<String>,
    },
    /// Classifies a unary or binary sample
    Classify {
        #[arg(long)]
        sample: Option<String>,
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        second: Option<String>,
        /// Graph for unary classification (default: induced on the domain)
        #[arg(long)]
        graph: Option<String>,
        /// Partition of the graph's vertex indices, e.g. "0;1;2,3"
        #[arg(long)]
        parts: Option<String>,
    },
    /// Predicted type of a composite term
    ComposeTypes {
        /// Type of symbol f (g, h, ... come from --other)
        #[arg(long)]
        outer: String,
        /// Whole term, e.g. "f(f(u,v), a(v))"
        #[arg(long, conflicts_with_all = ["left", "right"])]
        term: Option<String>,
        #[arg(long, requires = "right")]
        left: Option<String>,
        #[arg(long, requires = "left")]
        right: Option<String>,
        #[arg(long)]
        other: Vec<String>,
    },
    /// Minimality class of a type and the classes reachable from it
    Minimality {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Decides S -> (H)^P_k
    ArrowCheck {
        #[arg(long = "S")]
        s: String,
        #[arg(long = "H")]
        h: String,
        #[arg(long = "P")]
        p: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Smallest ordered graph S with S -> (H)^P_k
    ArrowSearch {
        #[arg(long = "H")]
        h: String,
        #[arg(long = "P")]
        p: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Copy of H in the region on which the sample colors pairs constantly
    MonoCopy {
        #[arg(long)]
        sample: String,
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        region: String,
    },
    /// Copy of a graph with constants on which the sample is canonical
    CanonicalCopy {
        #[arg(long)]
        sample: String,
        #[arg(long)]
        graph: String,
        /// "index:vertex" pairs
        #[arg(long)]
        constants: String,
        #[arg(long)]
        region: String,
    },
    /// Evaluates a relation on a tuple
    EvalRel {
        #[arg(long)]
        rel: String,
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
    /// Checks that an operation preserves a relation on all tuples over --range
    Preserves {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        sample: Option<String>,
        #[arg(long)]
        rel: String,
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
    /// Intersection-closedness of a finite relation sample
    IcCheck {
        /// JSON list of tuples
        #[arg(long, conflicts_with_all = ["rel", "range"])]
        tuples: Option<String>,
        #[arg(long, requires = "range")]
        rel: Option<String>,
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
    /// Injective homomorphism of the square e x e into the BIT model
    SquareHom {
        #[arg(long)]
        e: String,
        #[arg(long = "rel", default_values_t = ["E".to_string(), "N".to_string(), "neq".to_string()])]
        rels: Vec<String>,
        #[arg(long, default_value_t = 500)]
        bound: u64,
        #[arg(long, default_value_t = 50_000_000)]
        node_cap: u64,
    },
    /// Searches for a term agreeing with the target
    Interpolate {
        /// Generator sample (repeatable), JSON
        #[arg(long = "generator", required = true)]
        generators: Vec<String>,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        region: u64,
        #[arg(long, default_value_t = 200_000)]
        move_cap: usize,
        #[arg(long, default_value_t = 200_000)]
        state_cap: usize,
        #[arg(long)]
        monotone: bool,
    },
    /// Deletes graph edges with an edge-deleting sample
    DeleteEdge {
        /// Sample JSON (default: edge-deletion on --domain)
        #[arg(long)]
        sample: Option<String>,
        #[arg(long, default_value = "0..11")]
        domain: String,
        /// Constants of the sample, "a,b"
        #[arg(long, default_value = "0,1")]
        constants: String,
        #[arg(long)]
        graph: String,
        /// Graph edge by vertex indices "i,j"
        #[arg(long, conflicts_with = "all")]
        edge: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Builds a generic structure from node requests
    Generic {
        #[arg(long)]
        ordered: bool,
        /// Node request "adj=0,1;non=2;above=0;below=1" (repeatable)
        #[arg(long)]
        node: Vec<String>,
    },
    /// Re-validates JSON emitted by another subcommand
    Verify {
        /// witness, iso, op, classify, arrow, square-hom, interpolate
        #[arg(long)]
        kind: String,
        #[arg(long)]
        input: String,
        #[arg(long, default_value = "")]
        adj: String,
        #[arg(long, default_value = "")]
        nonadj: String,
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        second: Option<String>,
        #[arg(long)]
        sample: Option<String>,
        #[arg(long = "S")]
        s: Option<String>,
        #[arg(long = "H")]
        h: Option<String>,
        #[arg(long = "P")]
        p: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "rel")]
        rels: Vec<String>,
        #[arg(long, default_value_t = 500)]
        bound: u64,
        #[arg(long = "generator")]
        generators: Vec<String>,
        #[arg(long)]
        target: Option<String>,
    },
    /// Runs a fixed seeded battery and prints all results
    Suite,
}

/// Invalid input, reported before any computation.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| anyhow!(Usage(e)))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() {
            return 64;
        }
        if let Some(RamseyError::Budget { .. }) = cause.downcast_ref::<RamseyError>() {
            return 2;
        }
        if let Some(GaloisError::Budget { .. } | GaloisError::Inconclusive { .. }) = cause.downcast_ref::<GaloisError>() {
            return 2;
        }
    }
    1
}

/// JSON result and exit code.
struct Outcome {
    value: Value,
    code: u8,
    summary: String,
}

fn ok(value: Value, summary: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        value,
        code: 0,
        summary: summary.into(),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match run(&cli) {
        Ok(out) => {
            print_json(&out.value, cli.pretty);
            if cli.pretty {
                eprintln!("{}", out.summary);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            let code = exit_code(&e);
            print_json(&json!({ "error": format!("{e:#}") }), cli.pretty);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn print_json(value: &Value, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    };
    // a closed pipe is not an error for a filter
    let _ = writeln!(std::io::stdout(), "{}", text.expect("serializable"));
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn sample_or_op(sample: &Option<String>, op: &OpArgs, domain: &Option<String>, second: &Option<String>) -> Result<FunctionSample> {
    if let Some(s) = sample {
        return usage(input::json(s));
    }
    let domain = usage(domain.as_deref().ok_or_else(|| anyhow!("--domain or --sample is required")).and_then(input::vertices))?;
    let second = match second {
        Some(s) => usage(input::vertices(s))?,
        None => domain.clone(),
    };
    if op.op.is_none() {
        return usage(Err(anyhow!("--op or --sample is required")));
    }
    op.build(&domain, &second)
}

fn ordered(text: &str) -> Result<OrderedGraph> {
    Ok(OrderedGraph(usage(input::graph(text))?))
}

fn relations(texts: &[String]) -> Result<Vec<Relation>> {
    texts.iter().map(|t| usage(input::relation(t))).collect()
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Witness { adj, nonadj } => {
            let adj = usage(input::vertices(adj))?;
            let non = usage(input::vertices(nonadj))?;
            let v = rado::find_witness(&adj, &non)?;
            ok(json!({ "vertex": v }), format!("witness {v}"))
        }
        Command::Subgraph { vertices, find, bound } => {
            if let Some(h) = find {
                let h = usage(input::graph(h))?;
                let copy = rado::find_copy(&h, &Vertex::new(bound.expect("required by clap")));
                let summary = if copy.is_some() { "copy found" } else { "no copy below the bound" };
                return ok(json!({ "copy": copy }), summary);
            }
            let vs = usage(vertices.as_deref().ok_or_else(|| anyhow!("--vertices or --find is required")).and_then(input::vertices))?;
            let g = rado::induced_subgraph(&vs);
            ok(json!({ "graph": g }), format!("{} vertices, {} edges", g.len(), g.edge_count()))
        }
        Command::ExtendIso { map, forth, back } => {
            let mut iso = if map.is_empty() { PartialIso::default() } else { usage(input::iso(map))? };
            for v in usage(input::vertices(forth))? {
                iso = rado::extend_iso(&iso, &v)?;
            }
            for w in usage(input::vertices(back))? {
                iso = rado::extend_iso_back(&iso, &w)?;
            }
            let n = iso.len();
            ok(json!({ "iso": iso }), format!("{n} pairs"))
        }
        Command::MakeOp { op, domain, second } => {
            let f = sample_or_op(&None, op, &Some(domain.clone()), second)?;
            let n = f.len();
            ok(to_value(&f), format!("{n} entries"))
        }
        Command::Classify {
            sample,
            op,
            domain,
            second,
            graph,
            parts,
        } => classify(sample_or_op(sample, op, domain, second)?, graph, parts),
        Command::ComposeTypes { outer, term, left, right, other } => {
            let outer = BinaryType::from_spec(&usage(input::spec(outer))?);
            let others: Vec<BinaryType> = other.iter().map(|s| Ok(BinaryType::from_spec(&usage(input::spec(s))?))).collect::<Result<_>>()?;
            let t = match (term, left, right) {
                (Some(term), _, _) => {
                    let term = usage(TypeTerm::parse(term).map_err(Into::into))?;
                    let mut symbols = vec![outer];
                    symbols.extend(others);
                    behavior::term_type(&term, &symbols)?
                }
                (None, Some(l), Some(r)) => {
                    let l = usage(TypeTerm::parse(l).map_err(Into::into))?;
                    let r = usage(TypeTerm::parse(r).map_err(Into::into))?;
                    behavior::compose_types(&outer, &l, &r, &others)?
                }
                _ => return usage(Err(anyhow!("give --term or both --left and --right"))),
            };
            let class = behavior::minimality_class(&t).ok().flatten();
            ok(json!({ "type": t, "text": t.to_string(), "class": class }), t.to_string())
        }
        Command::Minimality { spec, depth } => {
            let spec = usage(input::spec(spec))?;
            let class = behavior::minimality_class_of_spec(&spec);
            let reachable = behavior::reachable_types(&BinaryType::from_spec(&spec), *depth)?;
            let classes: std::collections::BTreeSet<u8> = reachable.iter().filter_map(|t| behavior::minimality_class(t).ok().flatten()).collect();
            let name = class.map(behavior::minimality_class_name);
            ok(
                json!({
                    "spec": spec.to_string(),
                    "class": class,
                    "name": name,
                    "reachable_classes": classes,
                    "reachable_types": reachable.iter().map(|t| t.to_string()).collect::<std::collections::BTreeSet<_>>(),
                }),
                format!("class {class:?}, reaches {classes:?}"),
            )
        }
        Command::ArrowCheck { s, h, p, k, budget } => {
            let inst = ArrowInstance {
                s: ordered(s)?,
                h: ordered(h)?,
                p: ordered(p)?,
                k: *k,
            };
            let out = ramsey::arrow_check(&inst, *budget)?;
            let summary = format!("arrow {} after {} nodes", out.arrow, out.explored);
            ok(to_value(&out), summary)
        }
        Command::ArrowSearch { h, p, k, max_size, budget } => {
            let found = ramsey::arrow_search(&ordered(h)?, &ordered(p)?, *k, *max_size, *budget)?;
            let summary = match &found {
                Some(g) => format!("arrow holds for a graph on {} vertices", g.len()),
                None => format!("no graph on at most {max_size} vertices"),
            };
            ok(json!({ "graph": found, "max_size": max_size }), summary)
        }
        Command::MonoCopy { sample, h, region } => {
            let f: FunctionSample = usage(input::json(sample))?;
            let h = usage(input::graph(h))?;
            let copy = ramsey::find_mono_copy(&f, &h, &usage(input::vertices(region))?)?;
            let summary = if copy.is_some() { "copy found" } else { "no copy in the region" };
            ok(json!({ "copy": copy }), summary)
        }
        Command::CanonicalCopy { sample, graph, constants, region } => {
            let f: FunctionSample = usage(input::json(sample))?;
            let graph = usage(input::graph(graph))?;
            let constants = usage(input::pairs(constants))?
                .into_iter()
                .map(|(i, v)| Ok((i.as_u64().and_then(|i| usize::try_from(i).ok()).ok_or_else(|| anyhow!("bad index"))?, v)))
                .collect::<Result<Vec<_>>>()?;
            let target = ConstantGraph { graph, constants };
            let copy = ramsey::find_canonical_copy(&f, &target, &usage(input::vertices(region))?)?;
            let summary = if copy.is_some() { "copy found" } else { "no copy in the region" };
            ok(json!({ "copy": copy, "parts": target.part_lists() }), summary)
        }
        Command::EvalRel { rel, tuple, bound } => {
            let r = usage(input::relation(rel))?;
            let t = usage(input::vertices(tuple))?;
            let holds = r.eval(&t, *bound)?;
            ok(json!({ "holds": holds }), format!("{holds}"))
        }
        Command::Preserves { op, sample, rel, range, bound } => {
            let r = usage(input::relation(rel))?;
            let points = usage(input::vertices(range))?;
            let f = match sample {
                Some(s) => usage(input::json(s))?,
                None => {
                    if op.op.is_none() {
                        return usage(Err(anyhow!("--op or --sample is required")));
                    }
                    op.build(&points, &points)?
                }
            };
            let tuples = input::tuples(&points, r.arity());
            let out = galois::preserves(&f, &r, &tuples, *bound)?;
            let summary = if out.is_preserved() { "preserved" } else { "counterexample found" };
            ok(to_value(&out), summary)
        }
        Command::IcCheck { tuples, rel, range, bound } => {
            let sample: Vec<Vec<Vertex>> = match (tuples, rel, range) {
                (Some(t), _, _) => usage(input::json(t))?,
                (None, Some(r), Some(range)) => {
                    let r = usage(input::relation(r))?;
                    let mut members = Vec::new();
                    for t in input::tuples(&usage(input::vertices(range))?, r.arity()) {
                        if r.eval(&t, *bound)? {
                            members.push(t);
                        }
                    }
                    members
                }
                _ => return usage(Err(anyhow!("give --tuples, or --rel with --range"))),
            };
            match galois::intersection_closed_check(&sample) {
                None => ok(json!({ "closed": true, "size": sample.len() }), "intersection closed"),
                Some((i, j)) => ok(
                    json!({ "closed": false, "size": sample.len(), "pair": [i, j], "tuples": [sample[i], sample[j]] }),
                    format!("tuples {i} and {j} have no common refinement"),
                ),
            }
        }
        Command::SquareHom { e, rels, bound, node_cap } => {
            let e = usage(input::vertices(e))?;
            let rels = relations(rels)?;
            let hom = galois::injective_square_hom(&e, &rels, *bound, *node_cap)?;
            let verified = match &hom.images {
                Some(images) => Some(galois::verify_square_hom(&e, &rels, images, *bound)?),
                None => None,
            };
            let summary = format!("{} after {} nodes", if hom.images.is_some() { "found" } else { "none" }, hom.nodes);
            let mut value = to_value(&hom);
            value["verified"] = json!(verified);
            ok(value, summary)
        }
        Command::Interpolate {
            generators,
            target,
            depth,
            region,
            move_cap,
            state_cap,
            monotone,
        } => {
            let generators: Vec<FunctionSample> = generators.iter().map(|g| usage(input::json(g))).collect::<Result<_>>()?;
            let goal = InterpolationGoal {
                target: usage(input::json(target))?,
                depth_cap: *depth,
                region_bound: Vertex::new(*region),
            };
            let limits = SearchLimits {
                move_cap: *move_cap,
                state_cap: *state_cap,
                monotone_moves: *monotone,
            };
            let out = closure::interpolate_search(&generators, &goal, limits)?;
            let (code, summary) = match &out {
                Interpolation::Found { term, .. } => (0, format!("found {term}")),
                Interpolation::Inconclusive { depth, .. } => (2, format!("inconclusive at depth {depth}")),
                Interpolation::Impossible { reason, .. } => (0, format!("impossible: {reason}")),
            };
            Ok(Outcome {
                value: to_value(&out),
                code,
                summary,
            })
        }
        Command::DeleteEdge {
            sample,
            domain,
            constants,
            graph,
            edge,
            all,
        } => {
            let cs = usage(input::vertices(constants))?;
            let [c1, c2] = cs.as_slice() else {
                return usage(Err(anyhow!("--constants needs exactly two vertices")));
            };
            let e = match sample {
                Some(s) => usage(input::json(s))?,
                None => rado::operations::make_edge_deletion(c1, c2, &usage(input::vertices(domain))?)?,
            };
            let g = usage(input::graph(graph))?;
            if *all {
                let steps = closure::delete_all_edges(&e, (c1, c2), &g)?;
                let n = steps.len();
                return ok(json!({ "steps": steps }), format!("{n} edges deleted"));
            }
            let edge = edge.as_deref().ok_or_else(|| anyhow!(Usage(anyhow!("give --edge or --all"))))?;
            let ends: Vec<usize> = usage(edge.split(',').map(|s| s.trim().parse::<usize>().context("bad edge index")).collect())?;
            let [a, b] = ends.as_slice() else {
                return usage(Err(anyhow!("--edge needs two indices")));
            };
            let step = closure::delete_one_edge(&e, (c1, c2), &g, (*a, *b))?;
            let n = step.result.edge_count();
            ok(to_value(&step), format!("{n} edges left"))
        }
        Command::Generic { ordered, node } => {
            let signature = if *ordered { Signature::OrderedGraph } else { Signature::Graph };
            let mut g = GenericStructure::new(signature, cli.seed);
            for request in node {
                let c = usage(node_constraint(request))?;
                g.fresh_node(&c)?;
            }
            let snap = g.snapshot();
            let summary = format!("{} nodes, {} edges", snap.nodes, snap.edges.len());
            ok(to_value(&snap), summary)
        }
        Command::Verify { .. } => verify(&cli.command),
        Command::Suite => {
            let value = suite::run(cli.seed)?;
            ok(value, format!("battery with seed {}", cli.seed))
        }
    }
}

fn classify(f: FunctionSample, graph: &Option<String>, parts: &Option<String>) -> Result<Outcome> {
    match f.arity() {
        1 => {
            let g = match graph {
                Some(g) => usage(input::graph(g))?,
                None => rado::induced_subgraph(&f.unary_domain()),
            };
            if let Some(parts) = parts {
                let parts: Vec<Vec<usize>> = usage(
                    parts
                        .split(';')
                        .map(|p| p.split(',').map(|i| i.trim().parse::<usize>().context("bad part index")).collect())
                        .collect(),
                )?;
                let table = behavior::is_canonical_partitioned(&f, &g, &parts)?;
                let summary = if table.canonical { "canonical" } else { "not canonical" };
                return ok(json!({ "kind": "unary", "partition": table }), summary);
            }
            let kind = behavior::classify_unary(&f, &g)?;
            ok(json!({ "kind": "unary", "behavior": kind }), format!("{kind:?}"))
        }
        2 => {
            let t = behavior::classify_binary(&f)?;
            let class = behavior::minimality_class(&t).ok().flatten();
            ok(json!({ "kind": "binary", "type": t, "text": t.to_string(), "class": class }), t.to_string())
        }
        n => bail!("cannot classify operations of arity {n}"),
    }
}

fn node_constraint(text: &str) -> Result<NodeConstraint> {
    let mut c = NodeConstraint::default();
    let ids = |s: &str| -> Result<Vec<usize>> { s.split(',').filter(|x| !x.trim().is_empty()).map(|x| Ok(x.trim().parse()?)).collect() };
    for field in text.split(';').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field.split_once('=').ok_or_else(|| anyhow!("expected key=value, found '{field}'"))?;
        match key.trim() {
            "adj" => c.adjacent_to.extend(ids(value)?),
            "non" => c.non_adjacent_to.extend(ids(value)?),
            "above" => c.above = Some(value.trim().parse()?),
            "below" => c.below = Some(value.trim().parse()?),
            other => bail!("unknown field '{other}'"),
        }
    }
    Ok(c)
}

fn verify(command: &Command) -> Result<Outcome> {
    let Command::Verify {
        kind,
        input: raw,
        adj,
        nonadj,
        op,
        domain,
        second,
        sample,
        s,
        h,
        p,
        k,
        rels,
        bound,
        generators,
        target,
    } = command
    else {
        unreachable!("dispatched on Verify")
    };
    let value: Value = usage(input::json(raw))?;
    let field = |name: &str| -> Result<Value> { usage(value.get(name).cloned().ok_or_else(|| anyhow!("input has no '{name}' field"))) };
    let valid = match kind.as_str() {
        "witness" => {
            let v: Vertex = serde_json::from_value(field("vertex")?)?;
            let adj = usage(input::vertices(adj))?;
            let non = usage(input::vertices(nonadj))?;
            adj.iter().all(|u| u != &v && rado::bit_adjacent(u, &v)) && non.iter().all(|u| u != &v && !rado::bit_adjacent(u, &v))
        }
        "iso" => {
            let iso: PartialIso = serde_json::from_value(value.get("iso").cloned().unwrap_or(value.clone()))?;
            iso.is_valid()
        }
        "op" => {
            let f: FunctionSample = serde_json::from_value(value.clone())?;
            let rebuilt = sample_or_op(&None, op, domain, second)?;
            f == rebuilt
        }
        "classify" => {
            let f = sample_or_op(sample, op, domain, second)?;
            match f.arity() {
                2 => {
                    let claimed: BinaryType = serde_json::from_value(field("type")?)?;
                    behavior::classify_binary(&f)? == claimed
                }
                _ => {
                    let claimed: behavior::UnaryKind = serde_json::from_value(field("behavior")?)?;
                    behavior::classify_unary(&f, &rado::induced_subgraph(&f.unary_domain()))? == claimed
                }
            }
        }
        "arrow" => {
            let out: ArrowOutcome = serde_json::from_value(value.clone())?;
            let need = |x: &Option<String>, flag: &str| usage(x.clone().ok_or_else(|| anyhow!("--{flag} is required")));
            let inst = ArrowInstance {
                s: ordered(&need(s, "S")?)?,
                h: ordered(&need(h, "H")?)?,
                p: ordered(&need(p, "P")?)?,
                k: usage(k.ok_or_else(|| anyhow!("--k is required")))?,
            };
            match (&out.arrow, &out.witness) {
                (false, Some(coloring)) => ramsey::is_bad_coloring(&inst, coloring),
                (true, None) => ramsey::arrow_check(&inst, u64::MAX)?.arrow,
                _ => false,
            }
        }
        "square-hom" => {
            let points: Vec<(Vertex, Vertex)> = serde_json::from_value(field("points")?)?;
            let images: Option<Vec<Vertex>> = serde_json::from_value(field("images")?)?;
            let e: Vec<Vertex> = points.iter().map(|(x, _)| x.clone()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            let rels = if rels.is_empty() { relations(&["E".into(), "N".into(), "neq".into()])? } else { relations(rels)? };
            match images {
                Some(images) => galois::verify_square_hom(&e, &rels, &images, *bound)?,
                None => false,
            }
        }
        "interpolate" => {
            let term_value = field("term")?;
            let text = term_value.get("term").and_then(Value::as_str).ok_or_else(|| anyhow!(Usage(anyhow!("input has no term text"))))?;
            let moves: Vec<PartialIso> = serde_json::from_value(term_value.get("moves").cloned().unwrap_or(json!([])))?;
            let term = usage(Term::parse(text, &moves).map_err(Into::into))?;
            let generators: Vec<FunctionSample> = generators.iter().map(|g| usage(input::json(g))).collect::<Result<_>>()?;
            let target: FunctionSample = usage(input::json(target.as_deref().ok_or_else(|| anyhow!(Usage(anyhow!("--target is required"))))?))?;
            let points: Vec<Vec<Vertex>> = target.domain().cloned().collect();
            term.restrict(&generators, &points).map(|r| r == target).unwrap_or(false)
        }
        other => return usage(Err(anyhow!("unknown kind '{other}'"))),
    };
    Ok(Outcome {
        value: json!({ "valid": valid }),
        code: if valid { 0 } else { 1 },
        summary: if valid { "valid".into() } else { "invalid".into() },
    })
}

