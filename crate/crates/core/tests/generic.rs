use std::collections::BTreeSet;

use proptest::prelude::*;
use rado::generic::{GenericError, GenericStructure, NodeConstraint, Signature};
use rado::{find_copy, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grows an ordered structure by `steps` random constrained requests.
fn grow(seed: u64, steps: usize) -> (GenericStructure, Vec<(NodeConstraint, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    let mut g = GenericStructure::new(Signature::OrderedGraph, seed);
    let mut log = Vec::new();
    for _ in 0..steps {
        let mut adj = BTreeSet::new();
        let mut non = BTreeSet::new();
        for node in 0..g.len() {
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
        let slot = rng.gen_range(0..=order.len());
        let above = slot.checked_sub(1).map(|i| order[i]);
        let below = order.get(slot).copied();
        let c = NodeConstraint::new(adj, non).between(above, below);
        let id = g.fresh_node(&c).unwrap();
        log.push((c, id));
    }
    (g, log)
}

#[test]
fn requests_are_honoured() {
    for seed in 0..20 {
        let (mut g, log) = grow(seed, 15);
        for (c, id) in &log {
            for &a in &c.adjacent_to {
                assert!(g.query_edge(*id, a).unwrap());
            }
            for &b in &c.non_adjacent_to {
                assert!(!g.query_edge(*id, b).unwrap());
            }
            if let Some(above) = c.above {
                assert!(g.query_before(above, *id).unwrap());
            }
            if let Some(below) = c.below {
                assert!(g.query_before(*id, below).unwrap());
            }
        }
    }
}

#[test]
fn same_seed_same_store() {
    for seed in [0, 1, 99] {
        let (mut a, _) = grow(seed, 20);
        let (mut b, _) = grow(seed, 20);
        for i in 0..20 {
            for j in 0..i {
                assert_eq!(a.query_edge(i, j).unwrap(), b.query_edge(i, j).unwrap());
            }
        }
        assert_eq!(serde_json::to_string(&a.snapshot()).unwrap(), serde_json::to_string(&b.snapshot()).unwrap());
    }
}

#[test]
fn order_is_strict_and_total() {
    let (g, _) = grow(5, 25);
    let order = g.nodes_in_order();
    assert_eq!(order.len(), 25);
    for (i, &a) in order.iter().enumerate() {
        assert!(!g.query_before(a, a).unwrap());
        for &b in &order[i + 1..] {
            assert!(g.query_before(a, b).unwrap());
            assert!(!g.query_before(b, a).unwrap());
        }
    }
}

#[test]
fn induced_structures_embed_in_the_bit_model() {
    for seed in 0..10 {
        let (mut g, _) = grow(seed, 7);
        let nodes: Vec<usize> = (0..g.len()).collect();
        for i in 0..nodes.len() {
            for j in 0..i {
                g.query_edge(i, j).unwrap();
            }
        }
        let h = g.induced(&nodes);
        let bound = (0..h.len()).fold(Vertex::new(64), |t, _| Vertex::from_bits(vec![t]));
        let images = find_copy(&h, &bound).unwrap();
        assert!(h.embeds_via(&images));
    }
}

#[test]
fn errors_surface() {
    let mut g = GenericStructure::new(Signature::Graph, 3);
    let a = g.fresh_node(&NodeConstraint::default()).unwrap();
    assert_eq!(g.fresh_node(&NodeConstraint::new([a], [a])), Err(GenericError::Contradiction(a)));
    assert_eq!(g.fresh_node(&NodeConstraint::new([7], [])), Err(GenericError::UnknownNode(7)));
    assert_eq!(g.fresh_node(&NodeConstraint::default().between(Some(a), None)), Err(GenericError::Unordered));

    let mut o = GenericStructure::new(Signature::OrderedGraph, 3);
    let x = o.fresh_node(&NodeConstraint::default()).unwrap();
    let y = o.fresh_node(&NodeConstraint::default().between(Some(x), None)).unwrap();
    assert_eq!(o.fresh_node(&NodeConstraint::default().between(Some(y), Some(x))), Err(GenericError::EmptyInterval));
}

proptest! {
    #[test]
    fn ordered_extension_always_succeeds(seed in any::<u64>(), mask in any::<u32>(), slot in 0usize..13) {
        let (mut g, _) = grow(seed, 12);
        let order = g.nodes_in_order();
        let adj: Vec<usize> = (0..12).filter(|i| mask >> i & 1 == 1).collect();
        let non: Vec<usize> = (0..12).filter(|i| mask >> (i + 12) & 1 == 1 && mask >> i & 1 == 0).collect();
        let above = slot.checked_sub(1).map(|i| order[i]);
        let below = order.get(slot).copied();
        let id = g.fresh_node(&NodeConstraint::new(adj.clone(), non.clone()).between(above, below)).unwrap();
        prop_assert!(adj.iter().all(|&a| g.peek_edge(id, a)));
        prop_assert!(non.iter().all(|&b| !g.peek_edge(id, b)));
        let rank = g.nodes_in_order().iter().position(|&n| n == id).unwrap();
        prop_assert_eq!(rank, slot);
    }
}
