use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{GaloisError, Relation};
use crate::graph::find_witness;
use crate::operations::FunctionSample;
use crate::vertex::Vertex;

/// Outcome of a preservation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preservation {
    Preserved,
    /// `inputs[i]` is the i-th argument tuple; `output` is `f` applied
    /// componentwise, which lies outside the relation.
    Counterexample { inputs: Vec<Vec<Vertex>>, output: Vec<Vertex> },
}

impl Serialize for Preservation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(None)?;
        match self {
            Preservation::Preserved => map.serialize_entry("preserved", &true)?,
            Preservation::Counterexample { inputs, output } => {
                map.serialize_entry("preserved", &false)?;
                map.serialize_entry("inputs", inputs)?;
                map.serialize_entry("output", output)?;
            }
        }
        map.end()
    }
}

impl Preservation {
    pub fn is_preserved(&self) -> bool {
        matches!(self, Preservation::Preserved)
    }
}

/// Checks every selection of `arity(f)` members of `R` among `test_tuples`,
/// in lexicographic order of their positions, and reports the first one whose
/// componentwise image leaves `R`. Existential witnesses use `bound`.
pub fn preserves(f: &FunctionSample, relation: &Relation, test_tuples: &[Vec<Vertex>], bound: u64) -> Result<Preservation, GaloisError> {
    let mut members = Vec::new();
    for t in test_tuples {
        if relation.eval(t, bound)? {
            members.push(t);
        }
    }
    let k = f.arity();
    if members.is_empty() {
        return Ok(Preservation::Preserved);
    }
    let total = (members.len() as u128).pow(k as u32);
    let check = |index: u128| -> Result<Option<Preservation>, GaloisError> {
        let mut rest = index;
        let mut picks = vec![0usize; k];
        for slot in picks.iter_mut().rev() {
            *slot = (rest % members.len() as u128) as usize;
            rest /= members.len() as u128;
        }
        let output = (0..relation.arity())
            .map(|c| {
                let args: Vec<Vertex> = picks.iter().map(|&p| members[p][c].clone()).collect();
                f.get(&args).cloned().ok_or(GaloisError::Undefined(args))
            })
            .collect::<Result<Vec<Vertex>, _>>()?;
        if relation.eval(&output, bound)? {
            Ok(None)
        } else {
            Ok(Some(Preservation::Counterexample {
                inputs: picks.iter().map(|&p| members[p].clone()).collect(),
                output,
            }))
        }
    };
    let found = (0..total)
        .into_par_iter()
        .map(check)
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(Preservation::Preserved),
        Some(result) => result.map(|r| r.expect("filtered")),
    }
}

/// Finds the first pair `(i, j)`, `i <= j`, of tuples for which no member of
/// the sample is distinct wherever either of them is.
pub fn intersection_closed_check(tuples: &[Vec<Vertex>]) -> Option<(usize, usize)> {
    let pattern = |t: &[Vertex]| -> Vec<bool> {
        let r = t.len();
        (0..r).flat_map(|a| (a + 1..r).map(move |b| (a, b))).map(|(a, b)| t[a] != t[b]).collect()
    };
    let patterns: Vec<Vec<bool>> = tuples.iter().map(|t| pattern(t)).collect();
    for i in 0..tuples.len() {
        for j in i..tuples.len() {
            let need: Vec<bool> = patterns[i].iter().zip(&patterns[j]).map(|(a, b)| *a || *b).collect();
            let refined = patterns.iter().any(|w| w.len() == need.len() && w.iter().zip(&need).all(|(have, want)| *have || !*want));
            if !refined {
                return Some((i, j));
            }
        }
    }
    None
}

/// Result of the injective homomorphism search on a square grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareHom {
    /// Grid points in row-major order.
    pub points: Vec<(Vertex, Vertex)>,
    /// `images[i]` is the image of `points[i]`.
    pub images: Option<Vec<Vertex>>,
    pub nodes: u64,
}

struct Constraint {
    relation: usize,
    points: Vec<usize>,
}

fn grid(e: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    e.iter().flat_map(|x| e.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

/// All tuples of grid points whose two projections both lie in the relation.
fn constraints(points: &[(Vertex, Vertex)], relations: &[Relation], bound: u64) -> Result<Vec<Constraint>, GaloisError> {
    let mut out = Vec::new();
    for (ri, relation) in relations.iter().enumerate() {
        let r = relation.arity();
        let count = points.len().checked_pow(r as u32).expect("grid too large");
        let mut projection_cache: HashMap<Vec<Vertex>, bool> = HashMap::new();
        let mut holds = |t: Vec<Vertex>| -> Result<bool, GaloisError> {
            if let Some(&b) = projection_cache.get(&t) {
                return Ok(b);
            }
            let b = relation.eval(&t, bound)?;
            projection_cache.insert(t, b);
            Ok(b)
        };
        for index in 0..count {
            let mut rest = index;
            let mut tuple = vec![0usize; r];
            for slot in tuple.iter_mut().rev() {
                *slot = rest % points.len();
                rest /= points.len();
            }
            let first: Vec<Vertex> = tuple.iter().map(|&p| points[p].0.clone()).collect();
            if !holds(first)? {
                continue;
            }
            let second: Vec<Vertex> = tuple.iter().map(|&p| points[p].1.clone()).collect();
            if holds(second)? {
                out.push(Constraint { relation: ri, points: tuple });
            }
        }
    }
    Ok(out)
}

/// Whether some injective image of the constraint's points can satisfy it:
/// every graph on the distinct points is realized and tested.
fn satisfiable(relation: &Relation, points: &[usize], bound: u64) -> Result<bool, GaloisError> {
    let distinct: Vec<usize> = points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let c = distinct.len();
    let pairs: Vec<(usize, usize)> = (0..c).flat_map(|a| (a + 1..c).map(move |b| (a, b))).collect();
    for mask in 0..1u64 << pairs.len() {
        let mut realized: Vec<Vertex> = Vec::with_capacity(c);
        for b in 0..c {
            let (adj, non): (Vec<_>, Vec<_>) = (0..b).partition(|&a| {
                let bit = pairs.iter().position(|&p| p == (a, b)).expect("pair");
                mask >> bit & 1 == 1
            });
            let adj: Vec<Vertex> = adj.into_iter().map(|a| realized[a].clone()).collect();
            let non: Vec<Vertex> = non.into_iter().map(|a| realized[a].clone()).collect();
            let w = find_witness(&adj, &non).expect("disjoint");
            debug_assert!(!realized.contains(&w));
            realized.push(w);
        }
        let tuple: Vec<Vertex> = points
            .iter()
            .map(|p| realized[distinct.binary_search(p).expect("present")].clone())
            .collect();
        if relation.eval(&tuple, bound)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Backtracking search for an injective map from the grid `e x e` to
/// `0..=bound` under which every relation holding in both projections holds
/// on the images. Points are assigned most-constrained first (ties to the
/// lower grid index), candidates in increasing order; the first solution in
/// that order is returned.
/// Existential witnesses use `bound`; `node_cap` limits the search.
pub fn injective_square_hom(e: &[Vertex], relations: &[Relation], bound: u64, node_cap: u64) -> Result<SquareHom, GaloisError> {
    let points = grid(e);
    let all = constraints(&points, relations, bound)?;
    let mut seen: HashMap<(usize, Vec<usize>), bool> = HashMap::new();
    for c in &all {
        let kernel = kernel_of(&c.points);
        let ok = match seen.get(&(c.relation, kernel.clone())) {
            Some(&b) => b,
            None => {
                let b = satisfiable(&relations[c.relation], &c.points, bound)?;
                seen.insert((c.relation, kernel), b);
                b
            }
        };
        if !ok {
            return Ok(SquareHom { points, images: None, nodes: 0 });
        }
    }
    let words = (bound as usize + 1).div_ceil(64);
    let mut full = vec![u64::MAX; words];
    if !(bound + 1).is_multiple_of(64) {
        full[words - 1] = (1u64 << ((bound + 1) % 64)) - 1;
    }
    let mut domain: Vec<Bits> = vec![full; points.len()];
    let mut touching: Vec<Vec<(&Constraint, Vec<usize>)>> = vec![Vec::new(); points.len()];
    for c in &all {
        let distinct: Vec<usize> = c.points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if distinct.len() == 1 {
            let relation = &relations[c.relation];
            for v in members(&domain[distinct[0]].clone()) {
                if !relation.eval(&vec![Vertex::new(v); c.points.len()], bound)? {
                    clear(&mut domain[distinct[0]], v);
                }
            }
        } else {
            for &p in &distinct {
                touching[p].push((c, distinct.clone()));
            }
        }
    }
    let mut search = Search {
        relations,
        touching: &touching,
        bound,
        node_cap,
        nodes: 0,
        assigned: vec![None; points.len()],
        rows: HashMap::new(),
    };
    let found = search.run(domain)?;
    Ok(SquareHom {
        images: found.then(|| search.assigned.iter().map(|v| Vertex::new(v.expect("complete"))).collect()),
        nodes: search.nodes,
        points,
    })
}

fn kernel_of(points: &[usize]) -> Vec<usize> {
    points.iter().map(|p| points.iter().position(|q| q == p).expect("present")).collect()
}

type Bits = Vec<u64>;

fn clear(bits: &mut Bits, v: u64) {
    bits[(v / 64) as usize] &= !(1u64 << (v % 64));
}

fn count(bits: &Bits) -> u32 {
    bits.iter().map(|w| w.count_ones()).sum()
}

fn members(bits: &Bits) -> impl Iterator<Item = u64> + '_ {
    bits.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            (w != 0).then(|| {
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                i as u64 * 64 + b
            })
        })
    })
}

/// Cached filter for a constraint with two distinct points: relation, which
/// tuple positions hold the open point, and the assigned value.
type RowKey = (usize, Vec<bool>, u64);

/// The next point is the unassigned one with the fewest remaining
/// candidates, ties to the lower grid index; candidates are tried in
/// increasing order. A constraint filters the domain of its last unassigned
/// point, so every surviving candidate is consistent with the assignment.
struct Search<'a> {
    relations: &'a [Relation],
    touching: &'a [Vec<(&'a Constraint, Vec<usize>)>],
    bound: u64,
    node_cap: u64,
    nodes: u64,
    assigned: Vec<Option<u64>>,
    rows: HashMap<RowKey, Bits>,
}

impl Search<'_> {
    fn allowed(&mut self, c: &Constraint, last: usize, candidates: &Bits) -> Result<Bits, GaloisError> {
        let relation = &self.relations[c.relation];
        let tuple_with = |assigned: &[Option<u64>], v: u64| -> Vec<Vertex> {
            c.points
                .iter()
                .map(|&p| Vertex::new(if p == last { v } else { assigned[p].expect("assigned") }))
                .collect()
        };
        let distinct_assigned: BTreeSet<u64> = c.points.iter().filter(|&&p| p != last).map(|&p| self.assigned[p].expect("assigned")).collect();
        if distinct_assigned.len() == 1 {
            let other = *distinct_assigned.first().expect("one");
            let key = (c.relation, c.points.iter().map(|&p| p == last).collect::<Vec<_>>(), other);
            if let Some(row) = self.rows.get(&key) {
                return Ok(row.iter().zip(candidates).map(|(a, b)| a & b).collect());
            }
            let mut row = vec![0u64; candidates.len()];
            for v in 0..=self.bound {
                if relation.eval(&tuple_with(&self.assigned, v), self.bound)? {
                    row[(v / 64) as usize] |= 1 << (v % 64);
                }
            }
            let out = row.iter().zip(candidates).map(|(a, b)| a & b).collect();
            self.rows.insert(key, row);
            return Ok(out);
        }
        let mut out = candidates.clone();
        for v in members(candidates) {
            if !relation.eval(&tuple_with(&self.assigned, v), self.bound)? {
                clear(&mut out, v);
            }
        }
        Ok(out)
    }

    fn run(&mut self, domain: Vec<Bits>) -> Result<bool, GaloisError> {
        let Some(i) = (0..domain.len()).filter(|&p| self.assigned[p].is_none()).min_by_key(|&p| (count(&domain[p]), p)) else {
            return Ok(true);
        };
        let touching = self.touching;
        'candidates: for candidate in members(&domain[i]) {
            self.nodes += 1;
            if self.nodes > self.node_cap {
                return Err(GaloisError::Budget { nodes: self.nodes });
            }
            self.assigned[i] = Some(candidate);
            let mut next = domain.clone();
            for (p, d) in next.iter_mut().enumerate() {
                if self.assigned[p].is_none() {
                    clear(d, candidate);
                }
            }
            for (c, distinct) in &touching[i] {
                let mut open = distinct.iter().filter(|&&p| self.assigned[p].is_none());
                let (Some(&last), None) = (open.next(), open.next()) else {
                    continue;
                };
                let kept = self.allowed(c, last, &next[last])?;
                if kept.iter().all(|&w| w == 0) {
                    continue 'candidates;
                }
                next[last] = kept;
            }
            if (0..next.len()).any(|p| self.assigned[p].is_none() && next[p].iter().all(|&w| w == 0)) {
                continue;
            }
            if self.run(next)? {
                return Ok(true);
            }
        }
        self.assigned[i] = None;
        Ok(false)
    }
}

/// Re-checks an assignment produced by [`injective_square_hom`].
pub fn verify_square_hom(e: &[Vertex], relations: &[Relation], images: &[Vertex], bound: u64) -> Result<bool, GaloisError> {
    let points = grid(e);
    if images.len() != points.len() || images.iter().collect::<BTreeSet<_>>().len() != images.len() {
        return Ok(false);
    }
    for c in constraints(&points, relations, bound)? {
        let tuple: Vec<Vertex> = c.points.iter().map(|&p| images[p].clone()).collect();
        if !relations[c.relation].eval(&tuple, bound)? {
            return Ok(false);
        }
    }
    Ok(true)
}
