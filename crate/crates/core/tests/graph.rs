use proptest::prelude::*;
use rado::{bit_adjacent, extend_iso, extend_iso_back, find_copy, find_witness, induced_subgraph, FiniteGraph, PartialIso, Vertex};

fn v(n: u64) -> Vertex {
    Vertex::new(n)
}

/// Scans upward from the largest requested vertex.
fn least_witness(adj: &[u64], non: &[u64]) -> u64 {
    let start = adj.iter().chain(non).max().map_or(0, |m| m + 1);
    (start..).find(|w| adj.iter().all(|&a| w >> a & 1 == 1) && non.iter().all(|&b| w >> b & 1 == 0)).unwrap()
}

fn split(code: u32, n: u64) -> (Vec<u64>, Vec<u64>) {
    let (mut adj, mut non) = (Vec::new(), Vec::new());
    let mut c = code;
    for i in 0..n {
        match c % 3 {
            1 => adj.push(i),
            2 => non.push(i),
            _ => {}
        }
        c /= 3;
    }
    (adj, non)
}

#[test]
fn witness_matches_scan_on_small_universe() {
    for code in 0..3u32.pow(7) {
        let (adj, non) = split(code, 7);
        let w = find_witness(&adj.iter().copied().map(v).collect::<Vec<_>>(), &non.iter().copied().map(v).collect::<Vec<_>>()).unwrap();
        assert_eq!(w, v(least_witness(&adj, &non)), "{adj:?} {non:?}");
    }
}

#[test]
fn overlapping_requests_fail() {
    assert!(find_witness(&[v(1), v(2)], &[v(2)]).is_err());
}

#[test]
fn bit_adjacency_symmetric_irreflexive() {
    for a in 0..=1000u64 {
        assert!(!bit_adjacent(&v(a), &v(a)));
        for b in 0..a {
            assert_eq!(bit_adjacent(&v(a), &v(b)), bit_adjacent(&v(b), &v(a)));
            if b < 64 {
                assert_eq!(bit_adjacent(&v(a), &v(b)), a >> b & 1 == 1);
            }
        }
    }
}

#[test]
fn witness_past_u64_is_large() {
    let adj = [v(63)];
    let non: Vec<Vertex> = (0..63).map(v).collect();
    let w = find_witness(&adj, &non).unwrap();
    assert_eq!(w, v(1 << 63));
    let w2 = find_witness(std::slice::from_ref(&w), &[]).unwrap();
    assert!(!w2.is_small());
    assert!(bit_adjacent(&w, &w2));
}

fn is_induced_iso(p: &PartialIso) -> bool {
    let pairs: Vec<(&Vertex, &Vertex)> = p.pairs().collect();
    pairs.iter().enumerate().all(|(i, (a, fa))| {
        pairs[..i].iter().all(|(b, fb)| a != b && fa != fb && bit_adjacent(a, b) == bit_adjacent(fa, fb))
    })
}

fn arb_graph(max: usize) -> impl Strategy<Value = FiniteGraph> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            // row-major lower triangle: pair (i, j) with j < i sits at i(i-1)/2 + j
            FiniteGraph::from_fn(n, move |i, j| {
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                hi != lo && bits[hi * (hi - 1) / 2 + lo]
            })
        })
    })
}

proptest! {
    #[test]
    fn witness_has_requested_adjacencies(set in proptest::collection::btree_set(0u64..200, 0..8), mask in any::<u8>()) {
        let (adj, non): (Vec<u64>, Vec<u64>) = set.iter().enumerate().fold((vec![], vec![]), |(mut a, mut n), (i, &x)| {
            if mask >> i & 1 == 1 { a.push(x) } else { n.push(x) }
            (a, n)
        });
        let av: Vec<Vertex> = adj.iter().copied().map(v).collect();
        let nv: Vec<Vertex> = non.iter().copied().map(v).collect();
        let w = find_witness(&av, &nv).unwrap();
        prop_assert!(av.iter().all(|a| bit_adjacent(a, &w) && a < &w));
        prop_assert!(nv.iter().all(|b| !bit_adjacent(b, &w) && b < &w));
    }

    #[test]
    fn witness_is_least(set in proptest::collection::btree_set(0u64..14, 0..8), mask in any::<u8>()) {
        let (adj, non): (Vec<u64>, Vec<u64>) = set.iter().partition(|&&x| mask >> (x % 8) & 1 == 1);
        let av: Vec<Vertex> = adj.iter().copied().map(v).collect();
        let nv: Vec<Vertex> = non.iter().copied().map(v).collect();
        prop_assert_eq!(find_witness(&av, &nv).unwrap(), v(least_witness(&adj, &non)));
    }

    #[test]
    fn extensions_stay_isomorphisms(
        pairs in proptest::collection::vec((0u64..31, 0u64..31), 1..6),
        steps in proptest::collection::vec((any::<bool>(), 0u64..40), 0..6),
    ) {
        let Ok(mut p) = PartialIso::new(pairs.into_iter().map(|(a, b)| (v(a), v(b)))) else {
            return Ok(());
        };
        for (forth, x) in steps {
            let x = v(x);
            let taken = if forth { p.get(&x).is_some() } else { p.range().any(|r| r == &x) };
            if taken {
                continue;
            }
            let before = p.clone();
            p = if forth { extend_iso(&p, &x).unwrap() } else { extend_iso_back(&p, &x).unwrap() };
            prop_assert_eq!(p.len(), before.len() + 1);
            prop_assert!(before.pairs().all(|(a, b)| p.get(a) == Some(b)));
            prop_assert!(is_induced_iso(&p));
            prop_assert!(p.is_valid());
        }
    }

    #[test]
    fn copies_reproduce_the_graph(h in arb_graph(7)) {
        // each greedy image is below two to the power of one more than its predecessor
        let bound = (0..h.len()).fold(v(64), |t, _| Vertex::from_bits(vec![t]));
        let images = find_copy(&h, &bound).expect("bound exceeds every greedy image");
        let image = induced_subgraph(&images);
        for i in 0..h.len() {
            for j in 0..i {
                let (a, b) = (image.index_of(&images[i]).unwrap(), image.index_of(&images[j]).unwrap());
                prop_assert_eq!(h.adjacent(i, j), image.adjacent(a, b));
            }
        }
        prop_assert!(h.embeds_via(&images));
    }
}

#[test]
fn copy_bound_is_respected() {
    let k4 = FiniteGraph::complete(4);
    assert_eq!(find_copy(&k4, &v(100)), Some(vec![v(0), v(1), v(3), v(11)]));
    assert_eq!(find_copy(&k4, &v(10)), None);
}
