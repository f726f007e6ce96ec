//! End-to-end acceptance criteria. Each prints one PASS or FAIL line; the
//! test fails if any criterion does.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rado::behavior::algebra::realize_term_sample;
use rado::behavior::{classify_binary, minimal_representatives, term_type, BinaryType, TypeTerm};
use rado::closure::{delete_one_edge, interpolate_search, Interpolation, InterpolationGoal, SearchLimits};
use rado::galois::{injective_square_hom, preserves, verify_square_hom, Preservation, Relation};
use rado::operations::{self, BinaryTypeSpec, Combine, FunctionSample, Slice};
use rado::ramsey::{arrow_check, arrow_check_naive, copies_of, is_bad_coloring, ordered_graph_from_mask, ArrowInstance, OrderedGraph};
use rado::{bit_adjacent, extend_iso, extend_iso_back, find_witness, FiniteGraph, PartialIso, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WITNESS_LIMIT: Duration = Duration::from_secs(5);
const PRESERVATION_LIMIT: Duration = Duration::from_secs(30);
const ARROW_LIMIT: Duration = Duration::from_secs(10);
const CLOSURE_LIMIT: Duration = Duration::from_secs(60);
const SQUARE_HOM_LIMIT: Duration = Duration::from_secs(60);
const ISO_SAMPLES: usize = 1000;
const ARROW_INSTANCES: usize = 50;
const ARROW_MAX_COLORINGS: u64 = 1 << 16;
const NEQ_BOUND: u64 = 64;
const SQUARE_BOUND: u64 = 500;
const SQUARE_NODE_CAP: u64 = 100_000_000;
const SEED: u64 = 20240611;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn range(n: u64) -> Vec<Vertex> {
    (0..n).map(Vertex::new).collect()
}

fn tuples(points: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Vertex>| {
                points.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(p.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn timed(limit: Option<Duration>, run: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let result = run();
    let elapsed = start.elapsed();
    match (result, limit) {
        (Ok(detail), Some(limit)) if elapsed >= limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
        (Ok(detail), _) => Ok(format!("{detail} in {elapsed:.2?}")),
        (Err(e), _) => Err(e),
    }
}

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn extension_property() -> Outcome {
    let mut checked = 0;
    for code in 0..3u32.pow(9) {
        let (mut adj, mut non) = (Vec::new(), Vec::new());
        let mut c = code;
        for i in 0..9 {
            match c % 3 {
                1 => adj.push(Vertex::new(i)),
                2 => non.push(Vertex::new(i)),
                _ => {}
            }
            c /= 3;
        }
        let w = find_witness(&adj, &non).map_err(|e| e.to_string())?;
        ensure(adj.iter().all(|a| a != &w && bit_adjacent(a, &w)), || format!("{w} misses an adjacency for code {code}"))?;
        ensure(non.iter().all(|b| b != &w && !bit_adjacent(b, &w)), || format!("{w} has an extra adjacency for code {code}"))?;
        checked += 1;
    }
    Ok(format!("{checked} assignments"))
}

fn is_induced_iso(p: &PartialIso) -> bool {
    let pairs: Vec<(&Vertex, &Vertex)> = p.pairs().collect();
    pairs.iter().enumerate().all(|(i, (a, fa))| {
        pairs[..i].iter().all(|(b, fb)| a != b && fa != fb && bit_adjacent(a, b) == bit_adjacent(fa, fb))
    })
}

fn homogeneity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let points = range(31);
    let mut failures = 0;
    let mut extended = 0;
    for _ in 0..ISO_SAMPLES {
        let mut iso = loop {
            let size = rng.gen_range(1..=5);
            let domain: Vec<Vertex> = points.choose_multiple(&mut rng, size).cloned().collect();
            let image: Vec<Vertex> = points.choose_multiple(&mut rng, size).cloned().collect();
            if let Ok(p) = PartialIso::new(domain.into_iter().zip(image)) {
                break p;
            }
        };
        for step in 0..3 {
            let forth = step % 2 == 0;
            let taken: BTreeSet<Vertex> = if forth { iso.domain().cloned().collect() } else { iso.range().cloned().collect() };
            let free: Vec<&Vertex> = points.iter().filter(|v| !taken.contains(v)).collect();
            let v = (*free.choose(&mut rng).expect("at most 8 taken")).clone();
            iso = if forth { extend_iso(&iso, &v) } else { extend_iso_back(&iso, &v) }.map_err(|e| e.to_string())?;
            extended += 1;
        }
        if !is_induced_iso(&iso) || iso.len() < 4 {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} of {ISO_SAMPLES} mappings are not isomorphisms"))?;
    Ok(format!("{ISO_SAMPLES} mappings, {extended} extensions, 0 failures"))
}

fn unary_pairs(f: &FunctionSample) -> Vec<(Vertex, Vertex, Vertex, Vertex)> {
    let entries: Vec<(Vertex, Vertex)> = f.entries().map(|(x, y)| (x[0].clone(), y.clone())).collect();
    let mut out = Vec::new();
    for (i, (x, fx)) in entries.iter().enumerate() {
        for (y, fy) in &entries[..i] {
            out.push((x.clone(), y.clone(), fx.clone(), fy.clone()));
        }
    }
    out
}

fn constructors() -> Outcome {
    let twenty = range(20);
    let clique = unary_pairs(&operations::make_eE(&twenty));
    let independent = unary_pairs(&operations::make_eN(&twenty));
    ensure(clique.len() == 190 && independent.len() == 190, || "wrong pair count".into())?;
    let bad_e = clique.iter().filter(|(_, _, a, b)| a == b || !bit_adjacent(a, b)).count();
    let bad_n = independent.iter().filter(|(_, _, a, b)| a == b || bit_adjacent(a, b)).count();
    let fifteen = range(15);
    let minus = unary_pairs(&operations::make_minus(&fifteen));
    let bad_minus = minus.iter().filter(|(x, y, a, b)| a == b || bit_adjacent(x, y) == bit_adjacent(a, b)).count();
    let sw = unary_pairs(&operations::make_switch(&[Vertex::ZERO].into(), &fifteen).map_err(|e| e.to_string())?);
    let flipped: Vec<_> = sw.iter().filter(|(x, y, a, b)| bit_adjacent(x, y) != bit_adjacent(a, b)).collect();
    let bad_sw = flipped.iter().filter(|(x, y, _, _)| *x != Vertex::ZERO && *y != Vertex::ZERO).count() + 14usize.abs_diff(flipped.len());
    let violations = bad_e + bad_n + bad_minus + bad_sw;
    ensure(minus.len() == 105 && violations == 0, || format!("{violations} violations"))?;
    Ok("eE 190/190, eN 190/190, minus 105/105, sw flips 14 pairs through 0".into())
}

fn preservation_table() -> Outcome {
    let ten = range(10);
    let minus = operations::make_minus(&ten);
    let sw = operations::make_switch(&[Vertex::ZERO].into(), &ten).map_err(|e| e.to_string())?;
    let mut cells = Vec::new();
    for (name, f, k, expected) in [
        ("minus", &minus, 3, false),
        ("minus", &minus, 4, true),
        ("minus", &minus, 5, true),
        ("sw", &sw, 3, true),
        ("sw", &sw, 4, false),
        ("sw", &sw, 5, true),
    ] {
        let r = Relation::parity(k);
        let result = preserves(f, &r, &tuples(&ten, k), 0).map_err(|e| e.to_string())?;
        ensure(result.is_preserved() == expected, || format!("{name} on R{k}: expected preserved={expected}"))?;
        if let Preservation::Counterexample { inputs, output } = &result {
            let valid = r.eval(&inputs[0], 0) == Ok(true) && r.eval(output, 0) == Ok(false) && f.at(&inputs[0][0]).is_some();
            ensure(valid, || format!("{name} on R{k}: counterexample does not verify"))?;
            cells.push(format!("{name} breaks R{k} at {:?}", inputs[0].iter().map(Vertex::to_string).collect::<Vec<_>>()));
        }
    }
    Ok(format!("minus keeps R4 R5, sw keeps R3 R5; {}", cells.join("; ")))
}

fn pp_disequality() -> Outcome {
    let r = Relation::neq_pp();
    let mut agree = 0;
    for t in tuples(&range(10), 2) {
        let holds = r.eval(&t, NEQ_BOUND).map_err(|e| e.to_string())?;
        ensure(holds == (t[0] != t[1]), || format!("disagrees on ({}, {})", t[0], t[1]))?;
        agree += 1;
    }
    Ok(format!("{agree}/100 pairs agree, witness bound {NEQ_BOUND}"))
}

fn round_trip_specs() -> Vec<BinaryTypeSpec> {
    let mut specs = minimal_representatives().to_vec();
    specs.extend([
        BinaryTypeSpec::uniform(Combine::P2, Slice::E, Slice::E),
        BinaryTypeSpec::uniform(Combine::P2, Slice::N, Slice::N),
        BinaryTypeSpec::uniform(Combine::P1, Slice::Id, Slice::E),
        BinaryTypeSpec::uniform(Combine::P1, Slice::Id, Slice::N),
    ]);
    specs
}

fn classifier_round_trip() -> Outcome {
    let six = range(6);
    let specs = round_trip_specs();
    let mut passed = 0;
    for spec in &specs {
        let f = operations::make_binary_injection(spec, &six, &six);
        let t = classify_binary(&f).map_err(|e| format!("{spec}: {e}"))?;
        ensure(t.spec() == Some(*spec), || format!("{spec} classified as {t}"))?;
        let dual = operations::dual(&f).map_err(|e| e.to_string())?;
        let td = classify_binary(&dual).map_err(|e| format!("dual of {spec}: {e}"))?;
        ensure(td.spec() == Some(spec.dual()), || format!("dual of {spec} classified as {td}"))?;
        passed += 1;
    }
    Ok(format!("{passed}/{} specs, duals of each also classified", specs.len()))
}

fn algebra_soundness() -> Outcome {
    let skew = BinaryTypeSpec::uniform(Combine::P2, Slice::E, Slice::Id);
    let mut cases: Vec<(&str, BinaryTypeSpec)> = ["f(v,u)", "f(u,f(u,v))", "f(v,f(u,v))", "f(f(u,v),v)", "f(f(u,v),u)", "f(f(u,v),f(v,u))"]
        .into_iter()
        .map(|t| (t, skew))
        .collect();
    cases.push(("f(f(u,v),a(v))", BinaryTypeSpec::new(Combine::Max, Combine::Min, Slice::Id, Slice::Id)));
    cases.push(("f(f(u,v),f(u,a(v)))", BinaryTypeSpec::new(Combine::Max, Combine::P1, Slice::Id, Slice::Id)));
    cases.push(("f(f(u,v),f(u,a(v)))", BinaryTypeSpec::new(Combine::Max, Combine::P2, Slice::Id, Slice::Id)));
    let six = range(6);
    for (text, spec) in &cases {
        let term = TypeTerm::parse(text).map_err(|e| e.to_string())?;
        let predicted = term_type(&term, &[BinaryType::from_spec(spec)]).map_err(|e| format!("{text}: {e}"))?;
        let sample = realize_term_sample(&term, &[*spec], &six, &six).map_err(|e| e.to_string())?;
        let observed = classify_binary(&sample).map_err(|e| format!("{text}: {e}"))?;
        ensure(predicted == observed, || format!("{text} over {spec}: predicted {predicted}, observed {observed}"))?;
    }
    Ok(format!("{}/{} identities, 0 mismatches", cases.len(), cases.len()))
}

fn triangle(n: usize) -> ArrowInstance {
    ArrowInstance {
        s: OrderedGraph::complete(n),
        h: OrderedGraph::complete(3),
        p: OrderedGraph::complete(2),
        k: 2,
    }
}

fn arrows() -> Outcome {
    let start = Instant::now();
    let k6 = arrow_check(&triangle(6), 1 << 24).map_err(|e| e.to_string())?;
    let t6 = start.elapsed();
    ensure(k6.arrow && t6 < ARROW_LIMIT, || format!("K6: arrow={} in {t6:?}", k6.arrow))?;
    let start = Instant::now();
    let k5_inst = triangle(5);
    let k5 = arrow_check(&k5_inst, 1 << 24).map_err(|e| e.to_string())?;
    let t5 = start.elapsed();
    let witness = k5.witness.clone().unwrap_or_default();
    ensure(!k5.arrow && t5 < ARROW_LIMIT && is_bad_coloring(&k5_inst, &witness), || format!("K5: arrow={} in {t5:?}", k5.arrow))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut done = 0;
    let mut positive = 0;
    while done < ARROW_INSTANCES {
        let mut graph = |lo: usize, hi: usize| {
            let n = rng.gen_range(lo..hi);
            ordered_graph_from_mask(n, rng.gen_range(0..1u64 << (n * (n - 1) / 2)))
        };
        let (s, h, p) = (graph(2, 8), graph(1, 4), graph(1, 3));
        let k = rng.gen_range(1..4usize);
        if p.len() > h.len() || h.len() > s.len() {
            continue;
        }
        let m = copies_of(&s, &p).len() as u32;
        if (k as u64).checked_pow(m).is_none_or(|c| c > ARROW_MAX_COLORINGS) {
            continue;
        }
        let inst = ArrowInstance { s, h, p, k };
        let pruned = arrow_check(&inst, ARROW_MAX_COLORINGS).map_err(|e| e.to_string())?;
        ensure(pruned.arrow == arrow_check_naive(&inst), || format!("instance {done} disagrees"))?;
        positive += pruned.arrow as usize;
        done += 1;
    }
    Ok(format!(
        "K6 true ({t6:.2?}), K5 false with a valid witness ({t5:.2?}); {done} random instances agree ({positive} arrows)"
    ))
}

fn closure_search() -> Outcome {
    let e = FunctionSample::unary(range(16).into_iter().map(|v| {
        let image = match v.as_u64() {
            Some(1) => 0,
            Some(2) => 3,
            other => other.expect("small"),
        };
        (v, Vertex::new(image))
    }));
    let breaks_e = bit_adjacent(&Vertex::ZERO, &Vertex::new(1));
    let breaks_n = !bit_adjacent(&Vertex::new(2), &Vertex::new(3));
    ensure(breaks_e && breaks_n, || "generator does not violate both E and N".into())?;
    let target = operations::make_constant(&range(4), &Vertex::ZERO);
    let goal = InterpolationGoal {
        target: target.clone(),
        depth_cap: 6,
        region_bound: Vertex::new(15),
    };
    let depth = match interpolate_search(std::slice::from_ref(&e), &goal, SearchLimits::default()).map_err(|err| err.to_string())? {
        Interpolation::Found { term, .. } => {
            let points: Vec<Vec<Vertex>> = target.domain().cloned().collect();
            let again = term.restrict(&[e], &points).map_err(|err| err.to_string())?;
            ensure(again == target && term.depth() <= 6, || format!("term {term} does not interpolate"))?;
            term.depth()
        }
        other => return Err(format!("constant not reached: {}", serde_json::to_string(&other).unwrap_or_default())),
    };

    let (c1, c2) = (Vertex::ZERO, Vertex::new(1));
    let deleter = operations::make_edge_deletion(&c1, &c2, &range(12)).map_err(|err| err.to_string())?;
    let mut g = FiniteGraph::complete(3);
    let mut steps = 0;
    while let Some(&edge) = g.edge_indices().first() {
        g = delete_one_edge(&deleter, (&c1, &c2), &g, edge).map_err(|err| err.to_string())?.result;
        steps += 1;
    }
    ensure(g.len() == 3 && g.edge_count() == 0 && steps == 3, || "triangle not emptied".into())?;
    Ok(format!("constant on 4 points at depth {depth}; triangle emptied in {steps} deletions"))
}

fn square_hom() -> Outcome {
    let rels = ["E", "N", "neq"].map(|n| Relation::named(n).expect("named"));
    let e = range(4);
    let hom = injective_square_hom(&e, &rels, SQUARE_BOUND, SQUARE_NODE_CAP).map_err(|err| err.to_string())?;
    let images = hom.images.ok_or("no injective homomorphism within the bound")?;
    let valid = verify_square_hom(&e, &rels, &images, SQUARE_BOUND).map_err(|err| err.to_string())?;
    let max = images.iter().max().cloned().unwrap_or_default();
    ensure(valid && max <= Vertex::new(SQUARE_BOUND), || "image fails verification".into())?;
    Ok(format!("16 points mapped into 0..={max} after {} nodes", hom.nodes))
}

fn run_suite(seed: u64) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rado"))
        .args(["suite", "--seed", &seed.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("suite exited with {}", out.status))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let first = run_suite(SEED)?;
    let second = run_suite(SEED)?;
    ensure(first == second, || "outputs differ".into())?;
    serde_json::from_slice::<serde_json::Value>(&first).map_err(|e| e.to_string())?;
    let other = run_suite(SEED + 1)?;
    ensure(other != first, || "seed has no effect".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        ("extension property", Some(WITNESS_LIMIT), extension_property),
        ("homogeneity", None, homogeneity),
        ("operation constructors", None, constructors),
        ("preservation table", Some(PRESERVATION_LIMIT), preservation_table),
        ("pp-definition of disequality", None, pp_disequality),
        ("classifier round trip", None, classifier_round_trip),
        ("type-algebra soundness", None, algebra_soundness),
        ("ramsey arrows", None, arrows),
        ("closure search", Some(CLOSURE_LIMIT), closure_search),
        ("injective square homomorphism", Some(SQUARE_HOM_LIMIT), square_hom),
        ("determinism", None, determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        match timed(limit, run) {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                println!("FAIL {:>2} {name}: {reason}", i + 1);
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
