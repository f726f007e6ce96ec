//! Desk-scale Ramsey machinery: ordered copies, arrow verification and search,
//! and copies on which a unary sample behaves canonically.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behavior::ImageRel;
use crate::graph::{bit_adjacent, FiniteGraph};
use crate::operations::FunctionSample;
use crate::vertex::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamseyError {
    #[error("budget exhausted after exploring {explored} partial colorings")]
    Budget { explored: u64 },
    #[error("at least one color is required")]
    NoColors,
    #[error("sample is undefined at {0}")]
    Undefined(Vertex),
    #[error("constant {0} of the target is out of range")]
    BadConstant(usize),
}

/// A finite graph ordered by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderedGraph(pub FiniteGraph);

impl OrderedGraph {
    /// Reorders `g` so that `order[0] ≺ order[1] ≺ ...` (indices into `g`).
    pub fn with_order(g: &FiniteGraph, order: &[usize]) -> OrderedGraph {
        OrderedGraph(g.restrict(order))
    }

    pub fn complete(n: usize) -> OrderedGraph {
        OrderedGraph(FiniteGraph::complete(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.0
    }
}

/// All order- and adjacency-preserving induced embeddings of `b` into `a`, as
/// increasing index sequences in lexicographic order.
pub fn copies_of(a: &OrderedGraph, b: &OrderedGraph) -> Vec<Vec<usize>> {
    fn extend(a: &FiniteGraph, b: &FiniteGraph, partial: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = partial.len();
        if i == b.len() {
            out.push(partial.clone());
            return;
        }
        let start = partial.last().map_or(0, |&x| x + 1);
        let remaining = b.len() - i;
        for candidate in start..a.len().saturating_sub(remaining - 1) {
            if (0..i).all(|j| a.adjacent(partial[j], candidate) == b.adjacent(j, i)) {
                partial.push(candidate);
                extend(a, b, partial, out);
                partial.pop();
            }
        }
    }
    let mut out = Vec::new();
    if b.len() <= a.len() {
        extend(&a.0, &b.0, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowInstance {
    pub s: OrderedGraph,
    pub h: OrderedGraph,
    pub p: OrderedGraph,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowOutcome {
    pub arrow: bool,
    /// A coloring of the copies of `P` in `S` with no monochromatic copy of
    /// `H`, indexed like [`copies_of`]; present iff `arrow` is false.
    pub witness: Option<Vec<usize>>,
    pub explored: u64,
}

/// Copies of `P` in `S` and, for each copy of `H` in `S`, the indices of the
/// copies of `P` inside it.
fn incidence(inst: &ArrowInstance) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let p_copies = copies_of(&inst.s, &inst.p);
    let index: HashMap<&Vec<usize>, usize> = p_copies.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let p_in_h = copies_of(&inst.h, &inst.p);
    let members = copies_of(&inst.s, &inst.h)
        .iter()
        .map(|h| p_in_h.iter().map(|c| index[&c.iter().map(|&x| h[x]).collect::<Vec<_>>()]).collect())
        .collect();
    (p_copies, members)
}

struct Search<'a> {
    k: usize,
    members: &'a [Vec<usize>],
    watchers: Vec<Vec<usize>>,
    last: Vec<usize>,
    counts: Vec<Vec<u32>>,
    distinct: Vec<u32>,
    bichromatic: usize,
    coloring: Vec<usize>,
    explored: u64,
    budget: u64,
}

impl Search<'_> {
    /// Looks for a coloring of copies `i..` making every copy of `H`
    /// bichromatic.
    fn run(&mut self, i: usize, used: usize) -> Result<bool, RamseyError> {
        if self.bichromatic == self.members.len() {
            return Ok(true);
        }
        if i == self.coloring.len() {
            return Ok(false);
        }
        // colors are interchangeable: open at most one new color per level
        for c in 0..self.k.min(used + 1) {
            self.explored += 1;
            if self.explored > self.budget {
                return Err(RamseyError::Budget { explored: self.explored });
            }
            self.coloring[i] = c;
            let mut dead = false;
            for &h in &self.watchers[i] {
                self.counts[h][c] += 1;
                if self.counts[h][c] == 1 {
                    self.distinct[h] += 1;
                    if self.distinct[h] == 2 {
                        self.bichromatic += 1;
                    }
                }
                dead |= self.last[h] == i && self.distinct[h] == 1;
            }
            if !dead && self.run(i + 1, used.max(c + 1))? {
                return Ok(true);
            }
            for &h in &self.watchers[i] {
                self.counts[h][c] -= 1;
                if self.counts[h][c] == 0 {
                    if self.distinct[h] == 2 {
                        self.bichromatic -= 1;
                    }
                    self.distinct[h] -= 1;
                }
            }
        }
        Ok(false)
    }
}

/// Decides `S → (H)^P_k` by backtracking over colorings of the copies of `P`,
/// pruning as soon as a copy of `H` is complete and monochromatic and
/// stopping as soon as every copy of `H` is bichromatic.
pub fn arrow_check(inst: &ArrowInstance, budget: u64) -> Result<ArrowOutcome, RamseyError> {
    if inst.k == 0 {
        return Err(RamseyError::NoColors);
    }
    let (p_copies, members) = incidence(inst);
    let m = p_copies.len();
    if members.iter().any(|h| h.len() <= 1) || inst.k == 1 && !members.is_empty() {
        return Ok(ArrowOutcome {
            arrow: true,
            witness: None,
            explored: 0,
        });
    }
    let mut watchers = vec![Vec::new(); m];
    for (h, ps) in members.iter().enumerate() {
        for &p in ps {
            watchers[p].push(h);
        }
    }
    let mut search = Search {
        k: inst.k,
        members: &members,
        watchers,
        last: members.iter().map(|ps| *ps.iter().max().expect("nonempty")).collect(),
        counts: vec![vec![0; inst.k]; members.len()],
        distinct: vec![0; members.len()],
        bichromatic: 0,
        coloring: vec![0; m],
        explored: 0,
        budget,
    };
    let bad = search.run(0, 0)?;
    Ok(ArrowOutcome {
        arrow: !bad,
        witness: bad.then(|| search.coloring.clone()),
        explored: search.explored,
    })
}

/// Exhaustive reference: every `k`-coloring checked without pruning.
pub fn arrow_check_naive(inst: &ArrowInstance) -> bool {
    let (p_copies, members) = incidence(inst);
    let m = p_copies.len() as u32;
    let total = (inst.k as u64).pow(m);
    (0..total).all(|code| {
        let coloring: Vec<usize> = (0..m).map(|i| (code / (inst.k as u64).pow(i) % inst.k as u64) as usize).collect();
        members.iter().any(|ps| ps.iter().all(|&p| coloring[p] == coloring[ps[0]]))
    })
}

/// Whether `coloring` leaves every copy of `H` bichromatic.
pub fn is_bad_coloring(inst: &ArrowInstance, coloring: &[usize]) -> bool {
    let (p_copies, members) = incidence(inst);
    coloring.len() == p_copies.len()
        && coloring.iter().all(|&c| c < inst.k)
        && members.iter().all(|ps| ps.iter().any(|&p| coloring[p] != coloring[ps[0]]))
}

/// Ordered graph on `n` vertices whose pair `(i, j)`, `i < j`, is an edge iff
/// bit `rank(i, j)` of `mask` is set, pairs ranked lexicographically.
pub fn ordered_graph_from_mask(n: usize, mask: u64) -> OrderedGraph {
    let mut rank = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = rank.len();
            rank.insert((i, j), r);
        }
    }
    OrderedGraph(FiniteGraph::from_fn(n, |i, j| mask >> rank[&(i, j)] & 1 == 1))
}

/// The first ordered graph with at most `max_size` vertices (by size, then
/// mask) satisfying the arrow. Ordered graphs are rigid, so masks enumerate
/// isomorphism classes without repetition.
pub fn arrow_search(h: &OrderedGraph, p: &OrderedGraph, k: usize, max_size: usize, budget: u64) -> Result<Option<OrderedGraph>, RamseyError> {
    for n in h.len().max(1)..=max_size {
        let pairs = n * (n - 1) / 2;
        for mask in 0..1u64 << pairs {
            let s = ordered_graph_from_mask(n, mask);
            let inst = ArrowInstance {
                s: s.clone(),
                h: h.clone(),
                p: p.clone(),
                k,
            };
            if arrow_check(&inst, budget)?.arrow {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

fn pair_color(f: &FunctionSample, a: &Vertex, b: &Vertex) -> Result<ImageRel, RamseyError> {
    let fa = f.at(a).ok_or_else(|| RamseyError::Undefined(a.clone()))?;
    let fb = f.at(b).ok_or_else(|| RamseyError::Undefined(b.clone()))?;
    Ok(ImageRel::of(fa, fb))
}

/// Color classes keyed by (part, part, edge) that must stay constant.
type ColorBook = BTreeMap<(usize, usize, bool), ImageRel>;

/// Backtracking over copies of `h` in `region` (BIT adjacency). Vertex `i` of
/// `h` lies in part `parts[i]`; `fixed[i]` pins its image.
fn canonical_search(
    f: &FunctionSample,
    h: &FiniteGraph,
    parts: &[usize],
    fixed: &[Option<Vertex>],
    region: &[Vertex],
) -> Result<Option<Vec<Vertex>>, RamseyError> {
    fn go(
        f: &FunctionSample,
        h: &FiniteGraph,
        parts: &[usize],
        fixed: &[Option<Vertex>],
        region: &[Vertex],
        chosen: &mut Vec<Vertex>,
        book: &mut ColorBook,
    ) -> Result<bool, RamseyError> {
        let i = chosen.len();
        if i == h.len() {
            return Ok(true);
        }
        let candidates: Vec<&Vertex> = match &fixed[i] {
            Some(v) => vec![v],
            None => region.iter().collect(),
        };
        'candidates: for v in candidates {
            if chosen.contains(v) {
                continue;
            }
            let mut added = Vec::new();
            for j in 0..i {
                let edge = h.adjacent(i, j);
                if bit_adjacent(&chosen[j], v) != edge {
                    for key in added {
                        book.remove(&key);
                    }
                    continue 'candidates;
                }
                let key = (parts[i].min(parts[j]), parts[i].max(parts[j]), edge);
                let color = pair_color(f, &chosen[j], v)?;
                match book.get(&key) {
                    Some(&c) if c != color => {
                        for key in added {
                            book.remove(&key);
                        }
                        continue 'candidates;
                    }
                    Some(_) => {}
                    None => {
                        book.insert(key, color);
                        added.push(key);
                    }
                }
            }
            chosen.push(v.clone());
            if go(f, h, parts, fixed, region, chosen, book)? {
                return Ok(true);
            }
            chosen.pop();
            for key in added {
                book.remove(&key);
            }
        }
        Ok(false)
    }
    let mut chosen = Vec::with_capacity(h.len());
    let mut book = ColorBook::new();
    Ok(go(f, h, parts, fixed, region, &mut chosen, &mut book)?.then_some(chosen))
}

/// First copy of `h` inside `region` (images of `h`'s vertices, in order) on
/// which the pair coloring of `f` is constant on edges and on non-edges.
pub fn find_mono_copy(f: &FunctionSample, h: &FiniteGraph, region: &[Vertex]) -> Result<Option<Vec<Vertex>>, RamseyError> {
    let mut region = region.to_vec();
    region.sort();
    region.dedup();
    canonical_search(f, h, &vec![0; h.len()], &vec![None; h.len()], &region)
}

/// A graph with some vertices pinned to designated BIT vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantGraph {
    pub graph: FiniteGraph,
    /// `(vertex index, designated vertex)` pairs.
    pub constants: Vec<(usize, Vertex)>,
}

impl ConstantGraph {
    /// Constants become singleton parts (in listed order); the remaining
    /// vertices are grouped by adjacency profile to the constants. Returns
    /// the part of each vertex.
    pub fn parts(&self) -> Vec<usize> {
        let k = self.constants.len();
        let mut profiles: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        let mut part = vec![0; self.graph.len()];
        let constant_of: HashMap<usize, usize> = self.constants.iter().enumerate().map(|(c, (i, _))| (*i, c)).collect();
        let mut proper = Vec::new();
        for (i, slot) in part.iter_mut().enumerate() {
            if let Some(&c) = constant_of.get(&i) {
                *slot = c;
            } else {
                proper.push(i);
            }
        }
        for &i in &proper {
            let profile: Vec<bool> = self.constants.iter().map(|(c, _)| self.graph.adjacent(i, *c)).collect();
            let next = k + profiles.len();
            part[i] = *profiles.entry(profile).or_insert(next);
        }
        part
    }

    /// The parts as index lists.
    pub fn part_lists(&self) -> Vec<Vec<usize>> {
        let part = self.parts();
        let count = part.iter().max().map_or(0, |m| m + 1);
        let mut lists = vec![Vec::new(); count];
        for (i, &p) in part.iter().enumerate() {
            lists[p].push(i);
        }
        lists.retain(|l| !l.is_empty());
        lists
    }
}

/// First copy of the constant graph in `region` whose constants land on their
/// designated vertices and on which `f` is canonical for the induced
/// partition.
pub fn find_canonical_copy(f: &FunctionSample, target: &ConstantGraph, region: &[Vertex]) -> Result<Option<Vec<Vertex>>, RamseyError> {
    let mut fixed = vec![None; target.graph.len()];
    for (i, v) in &target.constants {
        *fixed.get_mut(*i).ok_or(RamseyError::BadConstant(*i))? = Some(v.clone());
    }
    let mut region = region.to_vec();
    region.sort();
    region.dedup();
    canonical_search(f, &target.graph, &target.parts(), &fixed, &region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operations::make_minus;

    fn inst(s: OrderedGraph, h: OrderedGraph, p: OrderedGraph, k: usize) -> ArrowInstance {
        ArrowInstance { s, h, p, k }
    }

    #[test]
    fn copies_examples() {
        assert_eq!(copies_of(&OrderedGraph::complete(3), &OrderedGraph::complete(2)).len(), 3);
        let path = OrderedGraph(FiniteGraph::path(3));
        assert_eq!(copies_of(&path, &OrderedGraph::complete(2)), vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(copies_of(&path, &OrderedGraph::complete(1)).len(), 3);
    }

    #[test]
    fn classical_triangle_arrows() {
        let k2 = OrderedGraph::complete(2);
        let k3 = OrderedGraph::complete(3);
        let yes = arrow_check(&inst(OrderedGraph::complete(6), k3.clone(), k2.clone(), 2), u64::MAX).unwrap();
        assert!(yes.arrow && yes.witness.is_none());
        let five = inst(OrderedGraph::complete(5), k3, k2, 2);
        let no = arrow_check(&five, u64::MAX).unwrap();
        assert!(!no.arrow);
        assert!(is_bad_coloring(&five, no.witness.as_ref().unwrap()));
    }

    #[test]
    fn trivial_arrow() {
        let p = OrderedGraph(FiniteGraph::path(3));
        assert!(arrow_check(&inst(p.clone(), p.clone(), p, 3), 10).unwrap().arrow);
    }

    #[test]
    fn budget_is_reported() {
        let i = inst(OrderedGraph::complete(6), OrderedGraph::complete(3), OrderedGraph::complete(2), 2);
        assert!(matches!(arrow_check(&i, 5), Err(RamseyError::Budget { explored: 6 })));
    }

    #[test]
    fn search_examples() {
        let k1 = OrderedGraph::complete(1);
        let k2 = OrderedGraph::complete(2);
        let k3 = OrderedGraph::complete(3);
        assert_eq!(arrow_search(&k2, &k1, 2, 4, u64::MAX).unwrap(), Some(k3.clone()));
        assert_eq!(arrow_search(&k1, &k1, 2, 3, u64::MAX).unwrap(), Some(k1.clone()));
        assert_eq!(arrow_search(&k3, &k2, 2, 5, u64::MAX).unwrap(), None);
    }

    #[test]
    fn mono_copy_examples() {
        let region: Vec<Vertex> = (0..=20u64).map(Vertex::new).collect();
        let minus = make_minus(&region);
        let tri = FiniteGraph::complete(3);
        let copy = find_mono_copy(&minus, &tri, &region).unwrap().unwrap();
        assert_eq!(copy, crate::graph::find_copy(&tri, &Vertex::new(20)).unwrap());
        assert_eq!(find_mono_copy(&minus, &FiniteGraph::complete(4), &region[..3]).unwrap(), None);
    }
}
