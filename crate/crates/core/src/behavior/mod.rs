//! Canonical behavior of function samples.
//!
//! A unary sample colors each pair of distinct inputs by what happens to it:
//! collapsed, mapped to an edge, or mapped to a non-edge. A binary sample is
//! described by its image adjacency on each class of input pairs together with
//! the coordinate that dictates the image order.

pub mod algebra;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bit_adjacent, FiniteGraph};
use crate::operations::{BinaryTypeSpec, Combine, FunctionSample, Slice};
use crate::vertex::Vertex;

pub use algebra::{compose_types, reachable_types, realize_term, term_type, AlgebraError, PairType, TypeTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviorError {
    #[error("sample has arity {found}, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("sample is undefined at {0}")]
    Undefined(Vertex),
    #[error("binary sample is not injective")]
    NotInjective,
    #[error("binary sample domain is not a product grid")]
    NotAGrid,
    #[error("grid is {first}x{second}; each side needs at least 4 points")]
    GridTooSmall { first: usize, second: usize },
    #[error("input class {0} is not witnessed by the sample")]
    UnderWitnessed(String),
    #[error("parts do not partition the graph")]
    InvalidPartition,
    #[error("type has a non-canonical field")]
    NonCanonical,
}

/// What a function does to a pair of distinct inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageRel {
    Collapsed,
    E,
    N,
}

impl ImageRel {
    pub fn of(a: &Vertex, b: &Vertex) -> ImageRel {
        if a == b {
            ImageRel::Collapsed
        } else if bit_adjacent(a, b) {
            ImageRel::E
        } else {
            ImageRel::N
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnaryKind {
    #[serde(rename = "identity")]
    Identity,
    #[serde(rename = "minus")]
    Minus,
    #[serde(rename = "eE")]
    EE,
    #[serde(rename = "eN")]
    EN,
    #[serde(rename = "constant")]
    Constant,
    #[serde(rename = "non-canonical")]
    NonCanonical,
}

impl UnaryKind {
    /// Kind from the (edge color, non-edge color) pair.
    pub fn from_colors(on_edges: ImageRel, on_non_edges: ImageRel) -> UnaryKind {
        match (on_edges, on_non_edges) {
            (ImageRel::Collapsed, ImageRel::Collapsed) => UnaryKind::Constant,
            (ImageRel::E, ImageRel::N) => UnaryKind::Identity,
            (ImageRel::N, ImageRel::E) => UnaryKind::Minus,
            (ImageRel::E, ImageRel::E) => UnaryKind::EE,
            (ImageRel::N, ImageRel::N) => UnaryKind::EN,
            _ => UnaryKind::NonCanonical,
        }
    }
}

fn image_of<'a>(f: &'a FunctionSample, v: &Vertex) -> Result<&'a Vertex, BehaviorError> {
    f.at(v).ok_or_else(|| BehaviorError::Undefined(v.clone()))
}

fn require_arity(f: &FunctionSample, expected: usize) -> Result<(), BehaviorError> {
    if f.arity() == expected {
        Ok(())
    } else {
        Err(BehaviorError::Arity {
            expected,
            found: f.arity(),
        })
    }
}

/// Behavior of a unary sample on the pairs of `g`, with `g` read through its
/// own adjacency.
pub fn classify_unary(f: &FunctionSample, g: &FiniteGraph) -> Result<UnaryKind, BehaviorError> {
    require_arity(f, 1)?;
    let mut on_edges = BTreeSet::new();
    let mut on_non_edges = BTreeSet::new();
    let images: Vec<&Vertex> = g.vertices().iter().map(|v| image_of(f, v)).collect::<Result<_, _>>()?;
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let color = ImageRel::of(images[i], images[j]);
            if g.adjacent(i, j) {
                on_edges.insert(color);
            } else {
                on_non_edges.insert(color);
            }
        }
    }
    if on_edges.is_empty() {
        return Err(BehaviorError::UnderWitnessed("edges".into()));
    }
    if on_non_edges.is_empty() {
        return Err(BehaviorError::UnderWitnessed("non-edges".into()));
    }
    if on_edges.len() > 1 || on_non_edges.len() > 1 {
        return Ok(UnaryKind::NonCanonical);
    }
    let first = |s: &BTreeSet<ImageRel>| *s.iter().next().expect("nonempty");
    Ok(UnaryKind::from_colors(first(&on_edges), first(&on_non_edges)))
}

/// Observed colors within one part or between two parts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartBehavior {
    pub on_edges: BTreeSet<ImageRel>,
    pub on_non_edges: BTreeSet<ImageRel>,
}

impl PartBehavior {
    pub fn is_constant(&self) -> bool {
        self.on_edges.len() <= 1 && self.on_non_edges.len() <= 1
    }

    /// The behavior symbol, when both relations are witnessed and constant.
    pub fn kind(&self) -> Option<UnaryKind> {
        if !self.is_constant() {
            return Some(UnaryKind::NonCanonical);
        }
        Some(UnaryKind::from_colors(*self.on_edges.iter().next()?, *self.on_non_edges.iter().next()?))
    }
}

impl Serialize for PartitionTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            edges: Vec<&'a ImageRel>,
            non_edges: Vec<&'a ImageRel>,
            behavior: Option<UnaryKind>,
        }
        #[derive(Serialize)]
        struct Json<'a> {
            canonical: bool,
            table: BTreeMap<String, Entry<'a>>,
        }
        let table = self
            .entries
            .iter()
            .map(|(&(i, j), b)| {
                let name = if i == j { format!("{i}") } else { format!("{i}-{j}") };
                let entry = Entry {
                    edges: b.on_edges.iter().collect(),
                    non_edges: b.on_non_edges.iter().collect(),
                    behavior: b.kind(),
                };
                (name, entry)
            })
            .collect();
        Json {
            canonical: self.canonical,
            table,
        }
        .serialize(serializer)
    }
}

/// Per part and per pair of parts behavior of a unary sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTable {
    pub canonical: bool,
    /// Keyed by `(i, i)` for pairs inside part `i` and `(i, j)`, `i < j`,
    /// for pairs between parts.
    pub entries: BTreeMap<(usize, usize), PartBehavior>,
}

impl PartitionTable {
    pub fn get(&self, i: usize, j: usize) -> Option<&PartBehavior> {
        self.entries.get(&(i.min(j), i.max(j)))
    }
}

/// Checks that the pair coloring of `f` is constant on edges and on non-edges
/// inside each part and between each pair of parts. Parts are index lists
/// into `g` and must partition it.
pub fn is_canonical_partitioned(f: &FunctionSample, g: &FiniteGraph, parts: &[Vec<usize>]) -> Result<PartitionTable, BehaviorError> {
    require_arity(f, 1)?;
    let mut part_of = vec![usize::MAX; g.len()];
    for (p, part) in parts.iter().enumerate() {
        for &i in part {
            if i >= g.len() || part_of[i] != usize::MAX {
                return Err(BehaviorError::InvalidPartition);
            }
            part_of[i] = p;
        }
    }
    if part_of.contains(&usize::MAX) {
        return Err(BehaviorError::InvalidPartition);
    }
    let images: Vec<&Vertex> = g.vertices().iter().map(|v| image_of(f, v)).collect::<Result<_, _>>()?;
    let mut entries: BTreeMap<(usize, usize), PartBehavior> = BTreeMap::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let (a, b) = (part_of[i], part_of[j]);
            let entry = entries.entry((a.min(b), a.max(b))).or_default();
            let color = ImageRel::of(images[i], images[j]);
            if g.adjacent(i, j) {
                entry.on_edges.insert(color);
            } else {
                entry.on_non_edges.insert(color);
            }
        }
    }
    let canonical = entries.values().all(PartBehavior::is_constant);
    Ok(PartitionTable { canonical, entries })
}

/// Which coordinate dictates the image order on inputs differing in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    P1,
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

impl Orientation {
    pub fn from_agreement(agrees: bool) -> Orientation {
        if agrees {
            Orientation::Increasing
        } else {
            Orientation::Decreasing
        }
    }

    pub fn preserves(self) -> bool {
        self == Orientation::Increasing
    }
}

mod maybe {
    use serde::de::{DeserializeOwned, Error};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub const NON_CANONICAL: &str = "non-canonical";

    pub fn serialize<T: Serialize, S: Serializer>(value: &Option<T>, serializer: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => v.serialize(serializer),
            None => serializer.serialize_str(NON_CANONICAL),
        }
    }

    pub fn deserialize<'de, T: DeserializeOwned, D: Deserializer<'de>>(deserializer: D) -> Result<Option<T>, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        if value == NON_CANONICAL {
            return Ok(None);
        }
        T::deserialize(value).map(Some).map_err(D::Error::custom)
    }
}

/// Behavior of a binary injection. `None` fields are non-canonical.
///
/// `order` and `orientation` describe inputs differing in both coordinates;
/// the slice orientations describe inputs differing in one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryType {
    #[serde(with = "maybe")]
    pub straight: Option<Combine>,
    #[serde(with = "maybe")]
    pub twisted: Option<Combine>,
    #[serde(with = "maybe")]
    pub neq_eq: Option<Slice>,
    #[serde(with = "maybe")]
    pub eq_neq: Option<Slice>,
    #[serde(with = "maybe")]
    pub order: Option<Coordinate>,
    #[serde(with = "maybe")]
    pub orientation: Option<Orientation>,
    #[serde(with = "maybe")]
    pub neq_eq_orientation: Option<Orientation>,
    #[serde(with = "maybe")]
    pub eq_neq_orientation: Option<Orientation>,
}

impl BinaryType {
    /// The type of `make_binary_injection(spec, ..)`: increasing, order by the
    /// first coordinate.
    pub fn from_spec(spec: &BinaryTypeSpec) -> BinaryType {
        BinaryType {
            straight: Some(spec.straight),
            twisted: Some(spec.twisted),
            neq_eq: Some(spec.neq_eq),
            eq_neq: Some(spec.eq_neq),
            order: Some(Coordinate::P1),
            orientation: Some(Orientation::Increasing),
            neq_eq_orientation: Some(Orientation::Increasing),
            eq_neq_orientation: Some(Orientation::Increasing),
        }
    }

    pub fn spec(&self) -> Option<BinaryTypeSpec> {
        Some(BinaryTypeSpec::new(self.straight?, self.twisted?, self.neq_eq?, self.eq_neq?))
    }

    pub fn is_canonical(&self) -> bool {
        self.spec().is_some()
            && self.order.is_some()
            && self.orientation.is_some()
            && self.neq_eq_orientation.is_some()
            && self.eq_neq_orientation.is_some()
    }

    pub fn is_increasing(&self) -> bool {
        [self.orientation, self.neq_eq_orientation, self.eq_neq_orientation]
            .iter()
            .all(|o| *o == Some(Orientation::Increasing))
    }
}

impl fmt::Display for BinaryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spec() {
            Some(spec) => write!(f, "{spec}")?,
            None => write!(f, "non-canonical")?,
        }
        match self.order {
            Some(Coordinate::P1) => write!(f, " order p1"),
            Some(Coordinate::P2) => write!(f, " order p2"),
            None => write!(f, " order non-canonical"),
        }
    }
}

#[derive(Default)]
struct Observations {
    values: BTreeMap<(bool, bool), BTreeSet<bool>>,
}

impl Observations {
    fn record(&mut self, key: (bool, bool), value: bool) {
        self.values.entry(key).or_default().insert(value);
    }

    fn lookup(&self, key: (bool, bool), class: &str) -> Result<Option<bool>, BehaviorError> {
        match self.values.get(&key) {
            None => Err(BehaviorError::UnderWitnessed(class.into())),
            Some(set) if set.len() == 1 => Ok(set.iter().next().copied()),
            Some(_) => Ok(None),
        }
    }

    fn combine(&self, class: &str) -> Result<Option<Combine>, BehaviorError> {
        let mut table = [false; 4];
        for (i, key) in [(false, false), (false, true), (true, false), (true, true)].into_iter().enumerate() {
            match self.lookup(key, class)? {
                Some(v) => table[i] = v,
                None => return Ok(None),
            }
        }
        Ok(Combine::from_table(table))
    }

    fn slice(&self, class: &str) -> Result<Option<Slice>, BehaviorError> {
        let non_edge = self.lookup((false, false), class)?;
        let edge = self.lookup((true, false), class)?;
        Ok(non_edge.zip(edge).map(|(n, e)| Slice::from_table(n, e)))
    }
}

fn single(set: &BTreeSet<bool>) -> Option<Orientation> {
    (set.len() == 1).then(|| Orientation::from_agreement(*set.iter().next().expect("nonempty")))
}

/// Classifies a binary injection on a product grid, ordering vertices
/// naturally.
pub fn classify_binary(f: &FunctionSample) -> Result<BinaryType, BehaviorError> {
    classify_binary_with(f, |a, b| a < b)
}

/// As [`classify_binary`] with an explicit strict order on grid and image
/// vertices.
pub fn classify_binary_with(f: &FunctionSample, before: impl Fn(&Vertex, &Vertex) -> bool) -> Result<BinaryType, BehaviorError> {
    require_arity(f, 2)?;
    if !f.is_grid() {
        return Err(BehaviorError::NotAGrid);
    }
    let (first, second) = (f.coordinate_set(0).len(), f.coordinate_set(1).len());
    if first < 4 || second < 4 {
        return Err(BehaviorError::GridTooSmall { first, second });
    }
    if !f.is_injective() {
        return Err(BehaviorError::NotInjective);
    }

    let mut straight = Observations::default();
    let mut twisted = Observations::default();
    let mut neq_eq = Observations::default();
    let mut eq_neq = Observations::default();
    let (mut agree_first, mut agree_second) = (BTreeSet::new(), BTreeSet::new());
    let (mut neq_eq_order, mut eq_neq_order) = (BTreeSet::new(), BTreeSet::new());

    let entries: Vec<(&Vec<Vertex>, &Vertex)> = f.entries().collect();
    for (i, &(p, fp)) in entries.iter().enumerate() {
        for &(q, fq) in &entries[i + 1..] {
            // orient so that the first differing coordinate increases
            let (p, fp, q, fq) = if p[0] != q[0] {
                if before(&p[0], &q[0]) { (p, fp, q, fq) } else { (q, fq, p, fp) }
            } else if before(&p[1], &q[1]) {
                (p, fp, q, fq)
            } else {
                (q, fq, p, fp)
            };
            let e1 = bit_adjacent(&p[0], &q[0]);
            let e2 = bit_adjacent(&p[1], &q[1]);
            let image_edge = bit_adjacent(fp, fq);
            let image_before = before(fp, fq);
            match (p[0] != q[0], p[1] != q[1]) {
                (true, true) => {
                    let second_before = before(&p[1], &q[1]);
                    let class = if second_before { &mut straight } else { &mut twisted };
                    class.record((e1, e2), image_edge);
                    agree_first.insert(image_before);
                    agree_second.insert(image_before == second_before);
                }
                (true, false) => {
                    neq_eq.record((e1, false), image_edge);
                    neq_eq_order.insert(image_before);
                }
                (false, true) => {
                    eq_neq.record((e2, false), image_edge);
                    eq_neq_order.insert(image_before);
                }
                (false, false) => unreachable!("distinct grid points"),
            }
        }
    }

    let (order, orientation) = match (single(&agree_first), single(&agree_second)) {
        (Some(o), _) => (Some(Coordinate::P1), Some(o)),
        (None, Some(o)) => (Some(Coordinate::P2), Some(o)),
        (None, None) => (None, None),
    };
    Ok(BinaryType {
        straight: straight.combine("straight")?,
        twisted: twisted.combine("twisted")?,
        neq_eq: neq_eq.slice("(≠,=)")?,
        eq_neq: eq_neq.slice("(=,≠)")?,
        order,
        orientation,
        neq_eq_orientation: single(&neq_eq_order),
        eq_neq_orientation: single(&eq_neq_order),
    })
}

/// Class number (1 to 9) of a canonical type among the minimal binary
/// behaviors, or `None` when the type is not minimal. Order and orientation
/// are ignored.
pub fn minimality_class(t: &BinaryType) -> Result<Option<u8>, BehaviorError> {
    let spec = t.spec().ok_or(BehaviorError::NonCanonical)?;
    Ok(minimality_class_of_spec(&spec))
}

pub fn minimality_class_of_spec(spec: &BinaryTypeSpec) -> Option<u8> {
    use Combine::*;
    use Slice::*;
    if spec.straight != spec.twisted {
        return None;
    }
    let projection = matches!(spec.straight, P1 | P2);
    let class = match (spec.straight, spec.neq_eq, spec.eq_neq) {
        (_, Id, Id) if projection => 1,
        (Max, Id, Id) => 2,
        (Min, Id, Id) => 3,
        (Max, E, E) => 4,
        (Min, N, N) => 5,
        (_, E, E) if projection => 6,
        (_, N, N) if projection => 7,
        (P2, E, Id) | (P1, Id, E) => 8,
        (P2, N, Id) | (P1, Id, N) => 9,
        _ => return None,
    };
    Some(class)
}

pub fn minimality_class_name(class: u8) -> &'static str {
    match class {
        1 => "projection and balanced",
        2 => "max and balanced",
        3 => "min and balanced",
        4 => "max and E-dominated",
        5 => "min and N-dominated",
        6 => "projection and E-dominated",
        7 => "projection and N-dominated",
        8 => "p2 and E/id, or p1 and id/E",
        9 => "p2 and N/id, or p1 and id/N",
        _ => "not minimal",
    }
}

/// One representative specification per minimal class, in class order.
pub fn minimal_representatives() -> [BinaryTypeSpec; 9] {
    use Combine::*;
    use Slice::*;
    [
        BinaryTypeSpec::uniform(P1, Id, Id),
        BinaryTypeSpec::uniform(Max, Id, Id),
        BinaryTypeSpec::uniform(Min, Id, Id),
        BinaryTypeSpec::uniform(Max, E, E),
        BinaryTypeSpec::uniform(Min, N, N),
        BinaryTypeSpec::uniform(P1, E, E),
        BinaryTypeSpec::uniform(P1, N, N),
        BinaryTypeSpec::uniform(P2, E, Id),
        BinaryTypeSpec::uniform(P2, N, Id),
    ]
}
