//! The BIT model of the random graph, its finite induced subgraphs, extension
//! witnesses and back-and-forth extension of partial isomorphisms.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vertex::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} is required both adjacent and non-adjacent")]
    Overlap(Vertex),
    #[error("vertex {0} is already in the domain")]
    AlreadyMapped(Vertex),
    #[error("vertex {0} is already in the range")]
    AlreadyInRange(Vertex),
    #[error("mapping is not injective: {0} has two preimages")]
    NotInjective(Vertex),
    #[error("pair ({0}, {1}) changes adjacency")]
    NotIsomorphism(Vertex, Vertex),
    #[error("edge ({0}, {1}) mentions a vertex outside the graph")]
    UnknownEdgeEndpoint(Vertex, Vertex),
    #[error("loop at {0}")]
    Loop(Vertex),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(Vertex),
}

/// Adjacency in the BIT model: for `m < n`, bit `m` of `n` is one.
pub fn bit_adjacent(u: &Vertex, v: &Vertex) -> bool {
    match u.cmp(v) {
        std::cmp::Ordering::Less => v.bit(u),
        std::cmp::Ordering::Greater => u.bit(v),
        std::cmp::Ordering::Equal => false,
    }
}

/// The least vertex above every element of `adjacent ∪ non_adjacent` that is
/// adjacent to all of `adjacent` and to none of `non_adjacent`.
pub fn find_witness(adjacent: &[Vertex], non_adjacent: &[Vertex]) -> Result<Vertex, GraphError> {
    let forbidden: HashSet<&Vertex> = non_adjacent.iter().collect();
    if let Some(v) = adjacent.iter().find(|v| forbidden.contains(v)) {
        return Err(GraphError::Overlap(v.clone()));
    }
    let Some(max) = adjacent.iter().chain(non_adjacent).max() else {
        return Ok(Vertex::ZERO);
    };
    let base = Vertex::from_bits(adjacent.to_vec());
    if &base > max {
        return Ok(base);
    }

    // The answer agrees with `max` above some position p where `max` has a
    // zero, has a one at p and only the required ones below. Any position
    // where `max` contradicts the constraints must lie at or below p.
    let conflict = adjacent
        .iter()
        .filter(|u| !max.bit(u))
        .chain(non_adjacent.iter().filter(|u| max.bit(u)))
        .max();
    let mut p = conflict.cloned().unwrap_or(Vertex::ZERO);
    while max.bit(&p) || forbidden.contains(&p) {
        p = p.succ();
    }
    let mut bits: Vec<Vertex> = max.bits().into_iter().filter(|b| b > &p).collect();
    bits.extend(adjacent.iter().filter(|u| *u < &p).cloned());
    bits.push(p);
    Ok(Vertex::from_bits(bits))
}

/// A finite graph on explicitly labelled vertices.
///
/// The vertex sequence is ordered; indices into it are used by every
/// enumeration in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    vertices: Vec<Vertex>,
    adjacency: Vec<bool>,
}

impl FiniteGraph {
    pub fn new(vertices: Vec<Vertex>, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut graph = FiniteGraph::edgeless(vertices);
        for (a, b) in edges {
            let (Some(i), Some(j)) = (graph.index_of(a), graph.index_of(b)) else {
                return Err(GraphError::UnknownEdgeEndpoint(a.clone(), b.clone()));
            };
            if i == j {
                return Err(GraphError::Loop(a.clone()));
            }
            graph.set_edge(i, j, true);
        }
        Ok(graph)
    }

    fn edgeless(vertices: Vec<Vertex>) -> Self {
        let n = vertices.len();
        FiniteGraph {
            vertices,
            adjacency: vec![false; n * n],
        }
    }

    /// Builds a graph on `0..n` from an index predicate.
    pub fn from_fn(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut graph = FiniteGraph::edgeless((0..n).map(Vertex::from).collect());
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    graph.set_edge(i, j, true);
                }
            }
        }
        graph
    }

    pub fn complete(n: usize) -> Self {
        FiniteGraph::from_fn(n, |_, _| true)
    }

    pub fn independent(n: usize) -> Self {
        FiniteGraph::from_fn(n, |_, _| false)
    }

    pub fn path(n: usize) -> Self {
        FiniteGraph::from_fn(n, |i, j| j == i + 1)
    }

    pub fn cycle(n: usize) -> Self {
        FiniteGraph::from_fn(n, |i, j| j == i + 1 || (n > 2 && i == 0 && j == n - 1))
    }

    fn set_edge(&mut self, i: usize, j: usize, value: bool) {
        let n = self.vertices.len();
        self.adjacency[i * n + j] = value;
        self.adjacency[j * n + i] = value;
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    /// Adjacency by index.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.vertices.len() + j]
    }

    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.adjacent(i, j))
    }

    /// Index pairs `i < j` that are edges.
    pub fn edge_indices(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacent(i, j))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_indices().len()
    }

    /// Edges by label, smaller endpoint first, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut edges: Vec<_> = self
            .edge_indices()
            .into_iter()
            .map(|(i, j)| {
                let (a, b) = (self.vertices[i].clone(), self.vertices[j].clone());
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort();
        edges
    }

    /// Whether the adjacency agrees with the BIT model on every pair.
    pub fn is_bit_induced(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| self.adjacent(i, j) == bit_adjacent(&self.vertices[i], &self.vertices[j]))
        })
    }

    /// The subgraph induced on the given indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> FiniteGraph {
        let mut graph = FiniteGraph::edgeless(indices.iter().map(|&i| self.vertices[i].clone()).collect());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate().skip(a + 1) {
                if self.adjacent(i, j) {
                    graph.set_edge(a, b, true);
                }
            }
        }
        graph
    }

    /// Whether `images[i]` (in the BIT model) reproduces this graph.
    pub fn embeds_via(&self, images: &[Vertex]) -> bool {
        let n = self.len();
        if images.len() != n || images.iter().collect::<HashSet<_>>().len() != n {
            return false;
        }
        (0..n).all(|i| (i + 1..n).all(|j| self.adjacent(i, j) == bit_adjacent(&images[i], &images[j])))
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in &self.vertices {
            out.push_str(&format!("  \"{v}\";\n"));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("  \"{a}\" -- \"{b}\";\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
}

impl Serialize for FiniteGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            vertices: self.vertices.clone(),
            edges: self.edges(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(deserializer)?;
        FiniteGraph::new(raw.vertices, &raw.edges).map_err(serde::de::Error::custom)
    }
}

/// The subgraph of the BIT model induced on `set`, vertices ascending.
pub fn induced_subgraph<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> FiniteGraph {
    let vertices: Vec<Vertex> = set.into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut graph = FiniteGraph::edgeless(vertices);
    let n = graph.len();
    for i in 0..n {
        for j in i + 1..n {
            if bit_adjacent(&graph.vertices[i], &graph.vertices[j]) {
                graph.set_edge(i, j, true);
            }
        }
    }
    graph
}

/// A finite isomorphism between induced subgraphs of the BIT model.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialIso {
    pairs: BTreeMap<Vertex, Vertex>,
}

impl PartialIso {
    pub fn identity<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> Self {
        PartialIso {
            pairs: set.into_iter().map(|v| (v.clone(), v.clone())).collect(),
        }
    }

    /// Validates injectivity and preservation of adjacency.
    pub fn new(pairs: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, GraphError> {
        let mut map = BTreeMap::new();
        let mut range = HashSet::new();
        for (a, b) in pairs {
            if map.contains_key(&a) {
                return Err(GraphError::AlreadyMapped(a));
            }
            if !range.insert(b.clone()) {
                return Err(GraphError::NotInjective(b));
            }
            map.insert(a, b);
        }
        let iso = PartialIso { pairs: map };
        iso.check()?;
        Ok(iso)
    }

    /// Skips validation; callers guarantee the invariant.
    pub(crate) fn from_map_unchecked(pairs: BTreeMap<Vertex, Vertex>) -> Self {
        PartialIso { pairs }
    }

    fn check(&self) -> Result<(), GraphError> {
        let entries: Vec<_> = self.pairs.iter().collect();
        for (i, (a, fa)) in entries.iter().enumerate() {
            for (b, fb) in entries.iter().skip(i + 1) {
                if bit_adjacent(a, b) != bit_adjacent(fa, fb) {
                    return Err(GraphError::NotIsomorphism((*a).clone(), (*b).clone()));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        let injective = self.pairs.values().collect::<HashSet<_>>().len() == self.pairs.len();
        injective && self.check().is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, v: &Vertex) -> Option<&Vertex> {
        self.pairs.get(v)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Vertex, &Vertex)> {
        self.pairs.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Vertex> {
        self.pairs.keys()
    }

    pub fn range(&self) -> impl Iterator<Item = &Vertex> {
        self.pairs.values()
    }

    pub fn inverse(&self) -> PartialIso {
        PartialIso {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// `other ∘ self`, defined where both steps are.
    pub fn then(&self, other: &PartialIso) -> PartialIso {
        PartialIso {
            pairs: self
                .pairs
                .iter()
                .filter_map(|(a, b)| other.get(b).map(|c| (a.clone(), c.clone())))
                .collect(),
        }
    }
}

/// One forth step: extends `p` to `v` with the least image that keeps the
/// mapping an isomorphism.
pub fn extend_iso(p: &PartialIso, v: &Vertex) -> Result<PartialIso, GraphError> {
    if p.pairs.contains_key(v) {
        return Err(GraphError::AlreadyMapped(v.clone()));
    }
    let (adjacent, non_adjacent): (Vec<_>, Vec<_>) = p.pairs.iter().partition(|(u, _)| bit_adjacent(u, v));
    let adjacent: Vec<Vertex> = adjacent.into_iter().map(|(_, w)| w.clone()).collect();
    let non_adjacent: Vec<Vertex> = non_adjacent.into_iter().map(|(_, w)| w.clone()).collect();
    let w = find_witness(&adjacent, &non_adjacent)?;
    let mut pairs = p.pairs.clone();
    pairs.insert(v.clone(), w);
    Ok(PartialIso { pairs })
}

/// One back step: extends `p` so that `w` enters its range.
pub fn extend_iso_back(p: &PartialIso, w: &Vertex) -> Result<PartialIso, GraphError> {
    if p.pairs.values().any(|x| x == w) {
        return Err(GraphError::AlreadyInRange(w.clone()));
    }
    Ok(extend_iso(&p.inverse(), w)?.inverse())
}

/// Images of `h`'s vertices (in order) realizing `h` as an induced subgraph of
/// the BIT model, built greedily with least witnesses. `None` if a witness
/// exceeds `bound`.
pub fn find_copy(h: &FiniteGraph, bound: &Vertex) -> Option<Vec<Vertex>> {
    let mut images: Vec<Vertex> = Vec::with_capacity(h.len());
    for i in 0..h.len() {
        let (adjacent, non_adjacent): (Vec<_>, Vec<_>) = (0..i).partition(|&j| h.adjacent(i, j));
        let adjacent: Vec<Vertex> = adjacent.into_iter().map(|j| images[j].clone()).collect();
        let non_adjacent: Vec<Vertex> = non_adjacent.into_iter().map(|j| images[j].clone()).collect();
        let w = find_witness(&adjacent, &non_adjacent).expect("earlier images are distinct");
        if &w > bound {
            return None;
        }
        images.push(w);
    }
    Some(images)
}

impl Serialize for PartialIso {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            pairs: Vec<(&'a Vertex, &'a Vertex)>,
        }
        Json {
            pairs: self.pairs.iter().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartialIso {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Json {
            pairs: Vec<(Vertex, Vertex)>,
        }
        let raw = Json::deserialize(deserializer)?;
        PartialIso::new(raw.pairs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(xs: &[u64]) -> Vec<Vertex> {
        xs.iter().copied().map(Vertex::new).collect()
    }

    #[test]
    fn bit_adjacency_examples() {
        assert!(bit_adjacent(&0u64.into(), &1u64.into()));
        assert!(!bit_adjacent(&0u64.into(), &2u64.into()));
        assert!(!bit_adjacent(&5u64.into(), &5u64.into()));
    }

    #[test]
    fn bit_adjacency_symmetric_irreflexive() {
        for u in 0..=1000u64 {
            assert!(!bit_adjacent(&u.into(), &u.into()));
            for v in u + 1..=1000 {
                assert_eq!(bit_adjacent(&u.into(), &v.into()), bit_adjacent(&v.into(), &u.into()));
                assert_eq!(bit_adjacent(&u.into(), &v.into()), u < 64 && (v >> u) & 1 == 1);
            }
        }
    }

    #[test]
    fn witness_examples() {
        assert_eq!(find_witness(&vs(&[0, 1]), &vs(&[2])).unwrap(), Vertex::new(3));
        assert_eq!(find_witness(&[], &[]).unwrap(), Vertex::new(0));
        assert_eq!(find_witness(&vs(&[0, 1, 3]), &[]).unwrap(), Vertex::new(11));
        assert_eq!(find_witness(&vs(&[1]), &vs(&[1])), Err(GraphError::Overlap(Vertex::new(1))));
    }

    /// Brute-force least witness over machine integers.
    fn brute_witness(adj: &[u64], non: &[u64]) -> u64 {
        let floor = adj.iter().chain(non).max().map_or(0, |m| m + 1);
        (floor..)
            .find(|&v| adj.iter().all(|&u| (v >> u) & 1 == 1) && non.iter().all(|&u| (v >> u) & 1 == 0))
            .unwrap()
    }

    #[test]
    fn witness_matches_brute_force_on_small_sets() {
        for mask in 0..3u32.pow(7) {
            let (mut adj, mut non) = (vec![], vec![]);
            let mut m = mask;
            for v in 0..7u64 {
                match m % 3 {
                    1 => adj.push(v),
                    2 => non.push(v),
                    _ => {}
                }
                m /= 3;
            }
            let got = find_witness(&vs(&adj), &vs(&non)).unwrap();
            assert_eq!(got, Vertex::new(brute_witness(&adj, &non)), "adj={adj:?} non={non:?}");
        }
    }

    #[test]
    fn witness_handles_mid_range_maximum() {
        // max is a non-neighbour: the witness stays close to it
        for (adj, non) in [(vec![1u64, 4], vec![37u64]), (vec![2], vec![0, 30, 31]), (vec![], vec![63])] {
            let got = find_witness(&vs(&adj), &vs(&non)).unwrap();
            assert_eq!(got, Vertex::new(brute_witness(&adj, &non)));
        }
    }

    #[test]
    fn witness_against_tower_vertices() {
        let clique = find_copy(&FiniteGraph::complete(7), &Vertex::from_bits(vec![Vertex::from_bits(vec![Vertex::new(100_000)])]))
            .expect("bound is far above a 7-clique");
        assert!(FiniteGraph::complete(7).embeds_via(&clique));
        assert!(clique[6].height() >= 2);
        let w = find_witness(&[clique[3].clone(), clique[6].clone()], &[clique[5].clone()]).unwrap();
        assert!(bit_adjacent(&w, &clique[3]) && bit_adjacent(&w, &clique[6]) && !bit_adjacent(&w, &clique[5]));
        assert!(w > clique[6]);
    }

    #[test]
    fn induced_subgraph_examples() {
        let g = induced_subgraph(&vs(&[0, 1, 2]));
        assert_eq!(g.edges(), vec![(Vertex::new(0), Vertex::new(1)), (Vertex::new(1), Vertex::new(2))]);
        assert!(induced_subgraph(&[]).is_empty());
        let single = induced_subgraph(&vs(&[7]));
        assert_eq!((single.len(), single.edge_count()), (1, 0));
    }

    #[test]
    fn extend_iso_examples() {
        let empty = PartialIso::default();
        let p = extend_iso(&empty, &Vertex::new(0)).unwrap();
        assert_eq!(p, PartialIso::new([(0u64.into(), 0u64.into())]).unwrap());
        let q = extend_iso(&p, &Vertex::new(1)).unwrap();
        assert_eq!(q.get(&Vertex::new(1)), Some(&Vertex::new(1)));
        let r = extend_iso(&p, &Vertex::new(2)).unwrap();
        assert_eq!(r.get(&Vertex::new(2)), Some(&Vertex::new(2)));
        assert_eq!(extend_iso(&p, &Vertex::new(0)), Err(GraphError::AlreadyMapped(Vertex::new(0))));
    }

    #[test]
    fn find_copy_examples() {
        let big = Vertex::new(16);
        assert_eq!(find_copy(&FiniteGraph::complete(3), &big), Some(vs(&[0, 1, 3])));
        assert_eq!(find_copy(&FiniteGraph::complete(1), &Vertex::new(0)), Some(vs(&[0])));
        assert_eq!(find_copy(&FiniteGraph::independent(3), &big), Some(vs(&[0, 2, 8])));
        assert_eq!(find_copy(&FiniteGraph::complete(4), &Vertex::new(10)), None);
    }

    #[test]
    fn graph_json_format() {
        let g = induced_subgraph(&vs(&[2, 0, 1]));
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"vertices":[0,1,2],"edges":[[0,1],[1,2]]}"#);
        let back: FiniteGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        let iso = PartialIso::new([(1u64.into(), 3u64.into()), (0u64.into(), 1u64.into())]).unwrap();
        assert_eq!(serde_json::to_string(&iso).unwrap(), r#"{"pairs":[[0,1],[1,3]]}"#);
    }
}
