//! Finite samples of operations and constructors for the named operations.
//!
//! Every constructor assigns images greedily: inputs are processed in a fixed
//! order and each receives the least BIT witness for its required adjacencies
//! to the images assigned so far. Images therefore increase strictly along the
//! processing order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bit_adjacent, find_witness};
use crate::vertex::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperationError {
    #[error("switch set must be nonempty")]
    EmptyFlipSet,
    #[error("expected arity {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("sample is not injective")]
    NotInjective,
    #[error("sample is undefined at {0:?}")]
    Undefined(Vec<Vertex>),
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(Vertex, Vertex),
    #[error("vertex {0} is outside the domain")]
    OutsideDomain(Vertex),
    #[error("cannot parse type: {0}")]
    Parse(String),
}

/// A finite partial function `V^k → V`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionSample {
    arity: usize,
    entries: BTreeMap<Vec<Vertex>, Vertex>,
}

impl FunctionSample {
    pub fn new(arity: usize, entries: impl IntoIterator<Item = (Vec<Vertex>, Vertex)>) -> Result<Self, OperationError> {
        let mut map = BTreeMap::new();
        for (input, output) in entries {
            if input.len() != arity {
                return Err(OperationError::Arity {
                    expected: arity,
                    found: input.len(),
                });
            }
            map.insert(input, output);
        }
        Ok(FunctionSample { arity, entries: map })
    }

    pub fn unary(entries: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        FunctionSample {
            arity: 1,
            entries: entries.into_iter().map(|(x, y)| (vec![x], y)).collect(),
        }
    }

    pub fn identity<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> Self {
        FunctionSample::unary(set.into_iter().map(|v| (v.clone(), v.clone())))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, input: &[Vertex]) -> Option<&Vertex> {
        self.entries.get(input)
    }

    /// Unary lookup.
    pub fn at(&self, x: &Vertex) -> Option<&Vertex> {
        debug_assert_eq!(self.arity, 1);
        self.entries.get(std::slice::from_ref(x))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Vertex>, &Vertex)> {
        self.entries.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Vec<Vertex>> {
        self.entries.keys()
    }

    /// Unary domain as a set of vertices.
    pub fn unary_domain(&self) -> BTreeSet<Vertex> {
        self.entries.keys().map(|k| k[0].clone()).collect()
    }

    /// Coordinate `i` of the domain tuples.
    pub fn coordinate_set(&self, i: usize) -> BTreeSet<Vertex> {
        self.entries.keys().map(|k| k[i].clone()).collect()
    }

    pub fn image(&self) -> BTreeSet<Vertex> {
        self.entries.values().cloned().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.entries.len()
    }

    /// Whether the domain is exactly the product of its coordinate sets.
    pub fn is_grid(&self) -> bool {
        let product: usize = (0..self.arity).map(|i| self.coordinate_set(i).len()).product();
        product == self.entries.len()
    }

    /// `self ∘ inner` for unary samples, on the inputs where it is defined.
    pub fn after(&self, inner: &FunctionSample) -> Result<FunctionSample, OperationError> {
        if self.arity != 1 {
            return Err(OperationError::Arity {
                expected: 1,
                found: self.arity,
            });
        }
        let mut entries = BTreeMap::new();
        for (input, mid) in &inner.entries {
            let out = self.at(mid).ok_or_else(|| OperationError::Undefined(vec![mid.clone()]))?;
            entries.insert(input.clone(), out.clone());
        }
        Ok(FunctionSample {
            arity: inner.arity,
            entries,
        })
    }

    pub fn restrict<'a>(&self, inputs: impl IntoIterator<Item = &'a Vec<Vertex>>) -> Result<FunctionSample, OperationError> {
        let mut entries = BTreeMap::new();
        for input in inputs {
            let out = self.get(input).ok_or_else(|| OperationError::Undefined(input.clone()))?;
            entries.insert(input.clone(), out.clone());
        }
        Ok(FunctionSample {
            arity: self.arity,
            entries,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SampleJson {
    arity: usize,
    entries: Vec<(Vec<Vertex>, Vertex)>,
}

impl Serialize for FunctionSample {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SampleJson {
            arity: self.arity,
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FunctionSample {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SampleJson::deserialize(deserializer)?;
        FunctionSample::new(raw.arity, raw.entries).map_err(serde::de::Error::custom)
    }
}

/// Behavior on inputs whose coordinates both differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    Min,
    Max,
    P1,
    P2,
}

impl Combine {
    pub const ALL: [Combine; 4] = [Combine::Min, Combine::Max, Combine::P1, Combine::P2];

    pub fn apply(self, first: bool, second: bool) -> bool {
        match self {
            Combine::Min => first && second,
            Combine::Max => first || second,
            Combine::P1 => first,
            Combine::P2 => second,
        }
    }

    /// Recognizes a truth table `[ff, ft, tf, tt]`.
    pub fn from_table(table: [bool; 4]) -> Option<Combine> {
        Combine::ALL.into_iter().find(|c| {
            [(false, false), (false, true), (true, false), (true, true)]
                .iter()
                .enumerate()
                .all(|(i, &(a, b))| c.apply(a, b) == table[i])
        })
    }

    pub fn dual(self) -> Combine {
        match self {
            Combine::Min => Combine::Max,
            Combine::Max => Combine::Min,
            other => other,
        }
    }

    pub fn swapped(self) -> Combine {
        match self {
            Combine::P1 => Combine::P2,
            Combine::P2 => Combine::P1,
            other => other,
        }
    }
}

/// Behavior on inputs where exactly one coordinate differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slice {
    E,
    N,
    #[serde(rename = "id")]
    Id,
    #[serde(rename = "minus")]
    Minus,
}

impl Slice {
    pub const ALL: [Slice; 4] = [Slice::E, Slice::N, Slice::Id, Slice::Minus];

    pub fn apply(self, edge: bool) -> bool {
        match self {
            Slice::E => true,
            Slice::N => false,
            Slice::Id => edge,
            Slice::Minus => !edge,
        }
    }

    /// Recognizes the images of a non-edge and an edge.
    pub fn from_table(on_non_edge: bool, on_edge: bool) -> Slice {
        match (on_non_edge, on_edge) {
            (true, true) => Slice::E,
            (false, false) => Slice::N,
            (false, true) => Slice::Id,
            (true, false) => Slice::Minus,
        }
    }

    pub fn dual(self) -> Slice {
        match self {
            Slice::E => Slice::N,
            Slice::N => Slice::E,
            other => other,
        }
    }
}

/// The adjacency behavior of a canonical binary injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryTypeSpec {
    pub straight: Combine,
    pub twisted: Combine,
    pub neq_eq: Slice,
    pub eq_neq: Slice,
}

impl BinaryTypeSpec {
    pub const fn new(straight: Combine, twisted: Combine, neq_eq: Slice, eq_neq: Slice) -> Self {
        BinaryTypeSpec {
            straight,
            twisted,
            neq_eq,
            eq_neq,
        }
    }

    /// Same behavior on straight and twisted inputs.
    pub const fn uniform(combine: Combine, neq_eq: Slice, eq_neq: Slice) -> Self {
        BinaryTypeSpec::new(combine, combine, neq_eq, eq_neq)
    }

    /// Type of `−f(−x, −y)`.
    pub fn dual(self) -> Self {
        BinaryTypeSpec {
            straight: self.straight.dual(),
            twisted: self.twisted.dual(),
            neq_eq: self.neq_eq.dual(),
            eq_neq: self.eq_neq.dual(),
        }
    }

    /// Required image adjacency for two distinct grid points.
    pub fn image_edge(&self, p: (&Vertex, &Vertex), q: (&Vertex, &Vertex)) -> bool {
        let first = bit_adjacent(p.0, q.0);
        let second = bit_adjacent(p.1, q.1);
        match (p.0 == q.0, p.1 == q.1) {
            (false, false) => {
                let combine = if (p.0 < q.0) == (p.1 < q.1) { self.straight } else { self.twisted };
                combine.apply(first, second)
            }
            (false, true) => self.neq_eq.apply(first),
            (true, false) => self.eq_neq.apply(second),
            (true, true) => unreachable!("distinct grid points"),
        }
    }
}

impl std::str::FromStr for Combine {
    type Err = OperationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(Combine::Min),
            "max" => Ok(Combine::Max),
            "p1" => Ok(Combine::P1),
            "p2" => Ok(Combine::P2),
            other => Err(OperationError::Parse(format!("unknown behavior '{other}'"))),
        }
    }
}

impl std::str::FromStr for Slice {
    type Err = OperationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" | "eE" => Ok(Slice::E),
            "N" | "eN" => Ok(Slice::N),
            "id" => Ok(Slice::Id),
            "minus" | "-" => Ok(Slice::Minus),
            other => Err(OperationError::Parse(format!("unknown behavior '{other}'"))),
        }
    }
}

/// Text form `straight[/twisted] [neq_eq/eq_neq]`, e.g. `max E/E` or
/// `p1/p1 id/E`; the slices default to `id/id`.
impl std::str::FromStr for BinaryTypeSpec {
    type Err = OperationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut words = s.split_whitespace();
        let combine = words.next().ok_or_else(|| OperationError::Parse("empty type".into()))?;
        let (straight, twisted) = combine.split_once('/').unwrap_or((combine, combine));
        let (neq_eq, eq_neq) = match words.next() {
            Some(slices) => slices.split_once('/').ok_or_else(|| OperationError::Parse(format!("expected two slices in '{slices}'")))?,
            None => ("id", "id"),
        };
        if let Some(extra) = words.next() {
            return Err(OperationError::Parse(format!("unexpected '{extra}'")));
        }
        Ok(BinaryTypeSpec::new(straight.parse()?, twisted.parse()?, neq_eq.parse()?, eq_neq.parse()?))
    }
}

impl fmt::Display for BinaryTypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |s: Slice| match s {
            Slice::E => "E",
            Slice::N => "N",
            Slice::Id => "id",
            Slice::Minus => "minus",
        };
        let comb = |c: Combine| match c {
            Combine::Min => "min",
            Combine::Max => "max",
            Combine::P1 => "p1",
            Combine::P2 => "p2",
        };
        write!(f, "{}/{} {}/{}", comb(self.straight), comb(self.twisted), name(self.neq_eq), name(self.eq_neq))
    }
}

/// Greedy realization: the `i`-th image is the least witness adjacent to the
/// earlier images `j` with `edge(i, j)` and non-adjacent to the rest.
pub(crate) fn realize(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Vec<Vertex> {
    let mut images: Vec<Vertex> = Vec::with_capacity(n);
    for i in 0..n {
        let mut adjacent = Vec::new();
        let mut non_adjacent = Vec::new();
        for (j, image) in images.iter().enumerate() {
            if edge(i, j) {
                adjacent.push(image.clone());
            } else {
                non_adjacent.push(image.clone());
            }
        }
        images.push(find_witness(&adjacent, &non_adjacent).expect("earlier images are distinct"));
    }
    images
}

fn sorted<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> Vec<Vertex> {
    set.into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Unary injection on `set` whose image adjacency is `rule(x, y, adjacent)`.
fn relabel<'a>(set: impl IntoIterator<Item = &'a Vertex>, rule: impl Fn(&Vertex, &Vertex, bool) -> bool) -> FunctionSample {
    let points = sorted(set);
    let images = realize(points.len(), |i, j| rule(&points[i], &points[j], bit_adjacent(&points[i], &points[j])));
    FunctionSample::unary(points.into_iter().zip(images))
}

pub fn make_constant<'a>(set: impl IntoIterator<Item = &'a Vertex>, c: &Vertex) -> FunctionSample {
    FunctionSample::unary(set.into_iter().map(|v| (v.clone(), c.clone())))
}

/// Injection onto a clique.
#[allow(non_snake_case)]
pub fn make_eE<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> FunctionSample {
    relabel(set, |_, _, _| true)
}

/// Injection onto an independent set.
#[allow(non_snake_case)]
pub fn make_eN<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> FunctionSample {
    relabel(set, |_, _, _| false)
}

/// Injection mapping edges to non-edges and non-edges to edges.
pub fn make_minus<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> FunctionSample {
    relabel(set, |_, _, e| !e)
}

/// Injection flipping exactly the pairs with one endpoint in `flip`.
pub fn make_switch<'a>(flip: &BTreeSet<Vertex>, set: impl IntoIterator<Item = &'a Vertex>) -> Result<FunctionSample, OperationError> {
    if flip.is_empty() {
        return Err(OperationError::EmptyFlipSet);
    }
    Ok(relabel(set, |x, y, e| e ^ (flip.contains(x) != flip.contains(y))))
}

/// Injection deleting the edge `{a, b}` and preserving every other pair.
pub fn make_edge_deletion<'a>(a: &Vertex, b: &Vertex, set: impl IntoIterator<Item = &'a Vertex>) -> Result<FunctionSample, OperationError> {
    if !bit_adjacent(a, b) {
        return Err(OperationError::NotAnEdge(a.clone(), b.clone()));
    }
    let points = sorted(set);
    for v in [a, b] {
        if !points.contains(v) {
            return Err(OperationError::OutsideDomain(v.clone()));
        }
    }
    let pinned = |x: &Vertex, y: &Vertex| (x == a && y == b) || (x == b && y == a);
    Ok(relabel(&points, |x, y, e| e && !pinned(x, y)))
}

/// Order-reversing injection preserving adjacency.
pub fn make_alpha<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> FunctionSample {
    let mut points = sorted(set);
    points.reverse();
    let images = realize(points.len(), |i, j| bit_adjacent(&points[i], &points[j]));
    FunctionSample::unary(points.into_iter().zip(images))
}

/// Canonical binary injection of type `spec` on `a × b`.
pub fn make_binary_injection<'a>(
    spec: &BinaryTypeSpec,
    a: impl IntoIterator<Item = &'a Vertex>,
    b: impl IntoIterator<Item = &'a Vertex>,
) -> FunctionSample {
    let b = sorted(b);
    let points: Vec<(Vertex, Vertex)> = sorted(a).into_iter().flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone()))).collect();
    make_binary_injection_on(spec, points)
}

/// Canonical binary injection of type `spec` on an arbitrary finite point set.
/// Points are processed in lexicographic order.
pub fn make_binary_injection_on(spec: &BinaryTypeSpec, points: impl IntoIterator<Item = (Vertex, Vertex)>) -> FunctionSample {
    let points: Vec<(Vertex, Vertex)> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let images = realize(points.len(), |i, j| {
        spec.image_edge((&points[i].0, &points[i].1), (&points[j].0, &points[j].1))
    });
    FunctionSample {
        arity: 2,
        entries: points.into_iter().map(|(x, y)| vec![x, y]).zip(images).collect(),
    }
}

/// The dual `−f(−x, −y)` of a binary injection, on the transported grid.
pub fn dual(f: &FunctionSample) -> Result<FunctionSample, OperationError> {
    if f.arity() != 2 {
        return Err(OperationError::Arity {
            expected: 2,
            found: f.arity(),
        });
    }
    if !f.is_injective() {
        return Err(OperationError::NotInjective);
    }
    // m and n are order preserving complement isomorphisms
    let coordinates: BTreeSet<Vertex> = f.coordinate_set(0).into_iter().chain(f.coordinate_set(1)).collect();
    let m = make_minus(&coordinates);
    let n = make_minus(&f.image());
    let entries = f.entries().map(|(input, output)| {
        let moved = input.iter().map(|x| m.at(x).expect("coordinate set").clone()).collect();
        (moved, n.at(output).expect("image").clone())
    });
    FunctionSample::new(2, entries)
}
