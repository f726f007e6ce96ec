//! Fixed battery over every module; identical seeds give identical output.

use std::collections::BTreeSet;

use anyhow::Result;
use rado::behavior::{self, BinaryType};
use rado::closure::{self, InterpolationGoal, SearchLimits};
use rado::galois::{self, Relation};
use rado::generic::{GenericStructure, NodeConstraint, Signature};
use rado::operations::{self, FunctionSample};
use rado::ramsey::{self, ArrowInstance, OrderedGraph};
use rado::{PartialIso, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn range(n: u64) -> Vec<Vertex> {
    (0..n).map(Vertex::new).collect()
}

/// A random partial isomorphism between induced subgraphs of `0..n`.
pub fn random_partial_iso(rng: &mut impl Rng, n: u64, max_size: usize) -> PartialIso {
    let points = range(n);
    loop {
        let size = rng.gen_range(1..=max_size);
        let domain: Vec<Vertex> = points.choose_multiple(rng, size).cloned().collect();
        let image: Vec<Vertex> = points.choose_multiple(rng, size).cloned().collect();
        if let Ok(iso) = PartialIso::new(domain.into_iter().zip(image)) {
            return iso;
        }
    }
}

fn generic(seed: u64, rng: &mut ChaCha8Rng) -> Result<Value> {
    let mut g = GenericStructure::new(Signature::OrderedGraph, seed);
    for _ in 0..12 {
        let existing = g.len();
        let mut adj = BTreeSet::new();
        let mut non = BTreeSet::new();
        for node in 0..existing {
            match rng.gen_range(0..3) {
                0 => {
                    adj.insert(node);
                }
                1 => {
                    non.insert(node);
                }
                _ => {}
            }
        }
        let order = g.nodes_in_order();
        let (above, below) = if order.is_empty() {
            (None, None)
        } else {
            let slot = rng.gen_range(0..=order.len());
            (slot.checked_sub(1).map(|i| order[i]), order.get(slot).copied())
        };
        g.fresh_node(&NodeConstraint::new(adj, non).between(above, below))?;
    }
    Ok(serde_json::to_value(g.snapshot())?)
}

fn homogeneity(rng: &mut ChaCha8Rng) -> Result<Value> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let mut iso = random_partial_iso(rng, 31, 5);
        for step in 0..3 {
            let forth = step % 2 == 0;
            let taken: BTreeSet<Vertex> = if forth { iso.domain().cloned().collect() } else { iso.range().cloned().collect() };
            let free: Vec<Vertex> = range(31).into_iter().filter(|v| !taken.contains(v)).collect();
            let v = free.choose(rng).expect("at most 8 taken").clone();
            iso = if forth { rado::extend_iso(&iso, &v)? } else { rado::extend_iso_back(&iso, &v)? };
        }
        out.push(iso);
    }
    Ok(serde_json::to_value(out)?)
}

pub fn run(seed: u64) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ten = range(10);
    let witness = rado::find_witness(&[Vertex::new(0), Vertex::new(1)], &[Vertex::new(2)])?;
    let classified: Vec<Value> = behavior::minimal_representatives()
        .iter()
        .map(|spec| {
            let f = operations::make_binary_injection(spec, &range(6), &range(6));
            let t = behavior::classify_binary(&f)?;
            Ok(json!({ "spec": spec.to_string(), "type": t.to_string(), "class": behavior::minimality_class(&t)? }))
        })
        .collect::<Result<_>>()?;
    let minus = operations::make_minus(&ten);
    let preservation = galois::preserves(&minus, &Relation::parity(3), &crate::input::tuples(&ten, 3), 0)?;
    let arrow = ramsey::arrow_check(
        &ArrowInstance {
            s: OrderedGraph::complete(5),
            h: OrderedGraph::complete(3),
            p: OrderedGraph::complete(2),
            k: 2,
        },
        100_000_000,
    )?;
    let rels = [Relation::named("E"), Relation::named("N"), Relation::named("neq")].map(|r| r.expect("named"));
    let hom = galois::injective_square_hom(&range(2), &rels, 64, 1_000_000)?;
    let collapse = FunctionSample::unary(range(16).into_iter().map(|v| {
        let image = match v.as_u64() {
            Some(1) => 0,
            Some(2) => 3,
            other => other.expect("small"),
        };
        (v, Vertex::new(image))
    }));
    let goal = InterpolationGoal {
        target: operations::make_constant(&range(4), &Vertex::ZERO),
        depth_cap: 6,
        region_bound: Vertex::new(15),
    };
    let term = closure::interpolate_search(&[collapse], &goal, SearchLimits::default())?;
    let reachable: Vec<String> = behavior::reachable_types(&BinaryType::from_spec(&behavior::minimal_representatives()[1]), 1)?
        .iter()
        .map(|t| t.to_string())
        .collect();
    Ok(json!({
        "seed": seed,
        "witness": witness,
        "generic": generic(seed, &mut rng)?,
        "homogeneity": homogeneity(&mut rng)?,
        "eE": operations::make_eE(&ten),
        "eN": operations::make_eN(&ten),
        "minus": minus,
        "classified": classified,
        "reachable_from_max": reachable,
        "minus_R3": preservation,
        "arrow_K5_K3_K2": arrow,
        "square_hom_2": hom,
        "collapse": term,
    }))
}
