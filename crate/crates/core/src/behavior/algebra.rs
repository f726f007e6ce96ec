//! Type algebra of binary canonical injections.
//!
//! A canonical binary function acts on pair types: given the type of the pair
//! of first arguments and the type of the pair of second arguments it
//! determines the type of the pair of values. Terms over typed symbols, the
//! two variables and the order-reversing automorphism α are evaluated on all
//! 25 combinations of input pair types, and the resulting table is read back
//! as a `BinaryType`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use super::{BinaryType, Coordinate, Orientation};
use crate::operations::{make_alpha, make_binary_injection_on, BinaryTypeSpec, Combine, FunctionSample, Slice};
use crate::vertex::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("symbol {0} has a non-canonical type")]
    NonCanonicalSymbol(usize),
    #[error("term refers to symbol {0}, which is not defined")]
    UnknownSymbol(usize),
    #[error("term is not injective")]
    NotInjective,
    #[error("term does not depend on both variables")]
    NotEssential,
    #[error("term behaves non-canonically on {0} inputs")]
    NonCanonical(&'static str),
    #[error("cannot parse term: {0}")]
    Parse(String),
}

/// Type of a pair `(a, b)` of values: equal, or distinct with `a ≺ b` or not
/// and adjacent or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairType {
    Equal,
    Differ { before: bool, edge: bool },
}

impl PairType {
    pub const ALL: [PairType; 5] = [
        PairType::Equal,
        PairType::Differ { before: true, edge: true },
        PairType::Differ { before: true, edge: false },
        PairType::Differ { before: false, edge: true },
        PairType::Differ { before: false, edge: false },
    ];

    fn alpha(self) -> PairType {
        match self {
            PairType::Equal => PairType::Equal,
            PairType::Differ { before, edge } => PairType::Differ { before: !before, edge },
        }
    }
}

/// Terms over symbols `0, 1, ..`, the variables `u, v` and α.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeTerm {
    U,
    V,
    Alpha(Box<TypeTerm>),
    Apply(usize, Box<TypeTerm>, Box<TypeTerm>),
}

impl TypeTerm {
    pub fn alpha(t: TypeTerm) -> TypeTerm {
        TypeTerm::Alpha(Box::new(t))
    }

    pub fn apply(symbol: usize, left: TypeTerm, right: TypeTerm) -> TypeTerm {
        TypeTerm::Apply(symbol, Box::new(left), Box::new(right))
    }

    /// Parses `f(u, a(v))`-style terms. Symbols are `f`, `g`, `h` (0, 1, 2)
    /// or `f<n>`; `a` and `alpha` denote α.
    pub fn parse(text: &str) -> Result<TypeTerm, AlgebraError> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let term = parse_term(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(AlgebraError::Parse(format!("trailing input after token {pos}")));
        }
        Ok(term)
    }

    pub fn max_symbol(&self) -> Option<usize> {
        match self {
            TypeTerm::U | TypeTerm::V => None,
            TypeTerm::Alpha(t) => t.max_symbol(),
            TypeTerm::Apply(s, l, r) => Some(*s).max(l.max_symbol()).max(r.max_symbol()),
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' {
            current.push(c);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if matches!(c, '(' | ')' | ',') {
                tokens.push(c.to_string());
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn expect(tokens: &[String], pos: &mut usize, want: &str) -> Result<(), AlgebraError> {
    if tokens.get(*pos).map(String::as_str) == Some(want) {
        *pos += 1;
        Ok(())
    } else {
        Err(AlgebraError::Parse(format!("expected '{want}' at token {pos}")))
    }
}

fn parse_term(tokens: &[String], pos: &mut usize) -> Result<TypeTerm, AlgebraError> {
    let name = tokens.get(*pos).ok_or_else(|| AlgebraError::Parse("unexpected end".into()))?.clone();
    *pos += 1;
    match name.as_str() {
        "u" | "x" => return Ok(TypeTerm::U),
        "v" | "y" => return Ok(TypeTerm::V),
        _ => {}
    }
    expect(tokens, pos, "(")?;
    let first = parse_term(tokens, pos)?;
    if name == "a" || name == "alpha" {
        expect(tokens, pos, ")")?;
        return Ok(TypeTerm::alpha(first));
    }
    let symbol = match name.as_str() {
        "f" => 0,
        "g" => 1,
        "h" => 2,
        other => other
            .strip_prefix('f')
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| AlgebraError::Parse(format!("unknown symbol '{other}'")))?,
    };
    expect(tokens, pos, ",")?;
    let second = parse_term(tokens, pos)?;
    expect(tokens, pos, ")")?;
    Ok(TypeTerm::apply(symbol, first, second))
}

impl fmt::Display for TypeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTerm::U => write!(f, "u"),
            TypeTerm::V => write!(f, "v"),
            TypeTerm::Alpha(t) => write!(f, "a({t})"),
            TypeTerm::Apply(s, l, r) => write!(f, "f{s}({l}, {r})"),
        }
    }
}

/// Semantics of a canonical symbol.
#[derive(Debug, Clone, Copy)]
struct Symbol {
    straight: Combine,
    twisted: Combine,
    neq_eq: Slice,
    eq_neq: Slice,
    order: Coordinate,
    orientation: Orientation,
    neq_eq_orientation: Orientation,
    eq_neq_orientation: Orientation,
}

impl Symbol {
    fn new(t: &BinaryType, index: usize) -> Result<Symbol, AlgebraError> {
        let missing = AlgebraError::NonCanonicalSymbol(index);
        Ok(Symbol {
            straight: t.straight.ok_or(missing.clone())?,
            twisted: t.twisted.ok_or(missing.clone())?,
            neq_eq: t.neq_eq.ok_or(missing.clone())?,
            eq_neq: t.eq_neq.ok_or(missing.clone())?,
            order: t.order.ok_or(missing.clone())?,
            orientation: t.orientation.ok_or(missing.clone())?,
            neq_eq_orientation: t.neq_eq_orientation.ok_or(missing.clone())?,
            eq_neq_orientation: t.eq_neq_orientation.ok_or(missing)?,
        })
    }

    fn apply(&self, s: PairType, t: PairType) -> PairType {
        match (s, t) {
            (PairType::Equal, PairType::Equal) => PairType::Equal,
            (PairType::Differ { before, edge }, PairType::Equal) => PairType::Differ {
                before: before == self.neq_eq_orientation.preserves(),
                edge: self.neq_eq.apply(edge),
            },
            (PairType::Equal, PairType::Differ { before, edge }) => PairType::Differ {
                before: before == self.eq_neq_orientation.preserves(),
                edge: self.eq_neq.apply(edge),
            },
            (PairType::Differ { before: b1, edge: e1 }, PairType::Differ { before: b2, edge: e2 }) => {
                let combine = if b1 == b2 { self.straight } else { self.twisted };
                let dictator = match self.order {
                    Coordinate::P1 => b1,
                    Coordinate::P2 => b2,
                };
                PairType::Differ {
                    before: dictator == self.orientation.preserves(),
                    edge: combine.apply(e1, e2),
                }
            }
        }
    }
}

/// Value pair type for each of the 25 input combinations, indexed
/// `5 * u + v` over [`PairType::ALL`].
type Table = [PairType; 25];

fn variable_table(first: bool) -> Table {
    let mut table = [PairType::Equal; 25];
    for (i, &a) in PairType::ALL.iter().enumerate() {
        for (j, &b) in PairType::ALL.iter().enumerate() {
            table[5 * i + j] = if first { a } else { b };
        }
    }
    table
}

fn eval(term: &TypeTerm, symbols: &[Symbol]) -> Result<Table, AlgebraError> {
    Ok(match term {
        TypeTerm::U => variable_table(true),
        TypeTerm::V => variable_table(false),
        TypeTerm::Alpha(t) => eval(t, symbols)?.map(PairType::alpha),
        TypeTerm::Apply(s, l, r) => {
            let symbol = symbols.get(*s).ok_or(AlgebraError::UnknownSymbol(*s))?;
            combine_tables(symbol, &eval(l, symbols)?, &eval(r, symbols)?)
        }
    })
}

fn combine_tables(symbol: &Symbol, left: &Table, right: &Table) -> Table {
    let mut out = [PairType::Equal; 25];
    for i in 0..25 {
        out[i] = symbol.apply(left[i], right[i]);
    }
    out
}

const D: fn(bool, bool) -> usize = |before, edge| 1 + 2 * (!before as usize) + (!edge as usize);

fn at(table: &Table, u: usize, v: usize) -> PairType {
    table[5 * u + v]
}

fn differ(p: PairType) -> Option<(bool, bool)> {
    match p {
        PairType::Equal => None,
        PairType::Differ { before, edge } => Some((before, edge)),
    }
}

fn read_type(table: &Table) -> Result<BinaryType, AlgebraError> {
    let depends_on_u = (0..5).any(|v| (1..5).any(|u| at(table, u, v) != at(table, 0, v)));
    let depends_on_v = (0..5).any(|u| (1..5).any(|v| at(table, u, v) != at(table, u, 0)));
    if !depends_on_u || !depends_on_v {
        return Err(AlgebraError::NotEssential);
    }
    if (1..25).any(|i| table[i] == PairType::Equal) {
        return Err(AlgebraError::NotInjective);
    }
    let value = |u: usize, v: usize| differ(at(table, u, v)).expect("injective");

    let mut combines = Vec::new();
    let mut dictators = BTreeSet::new();
    for (name, second_before) in [("straight", true), ("twisted", false)] {
        let mut truth = [false; 4];
        let mut befores = BTreeSet::new();
        for (k, (a, b)) in [(false, false), (false, true), (true, false), (true, true)].into_iter().enumerate() {
            let (before, edge) = value(D(true, a), D(second_before, b));
            truth[k] = edge;
            befores.insert(before);
        }
        if befores.len() != 1 {
            return Err(AlgebraError::NonCanonical(name));
        }
        dictators.insert((second_before, befores.into_iter().next().expect("nonempty")));
        combines.push(Combine::from_table(truth).ok_or(AlgebraError::NonCanonical(name))?);
    }
    let straight_before = dictators.iter().find(|d| d.0).expect("straight").1;
    let twisted_before = dictators.iter().find(|d| !d.0).expect("twisted").1;
    let order = if straight_before == twisted_before { Coordinate::P1 } else { Coordinate::P2 };

    let mut slices = Vec::new();
    for (name, first) in [("(≠,=)", true), ("(=,≠)", false)] {
        let pick = |edge: bool| if first { value(D(true, edge), 0) } else { value(0, D(true, edge)) };
        let (b_non, non_edge) = pick(false);
        let (b_edge, edge) = pick(true);
        if b_non != b_edge {
            return Err(AlgebraError::NonCanonical(name));
        }
        slices.push((Slice::from_table(non_edge, edge), Orientation::from_agreement(b_edge)));
    }
    Ok(BinaryType {
        straight: Some(combines[0]),
        twisted: Some(combines[1]),
        neq_eq: Some(slices[0].0),
        eq_neq: Some(slices[1].0),
        order: Some(order),
        orientation: Some(Orientation::from_agreement(straight_before)),
        neq_eq_orientation: Some(slices[0].1),
        eq_neq_orientation: Some(slices[1].1),
    })
}

fn symbols_of(types: &[BinaryType]) -> Result<Vec<Symbol>, AlgebraError> {
    types.iter().enumerate().map(|(i, t)| Symbol::new(t, i)).collect()
}

/// Predicted type of `term`, whose symbol `i` has type `symbols[i]`.
pub fn term_type(term: &TypeTerm, symbols: &[BinaryType]) -> Result<BinaryType, AlgebraError> {
    read_type(&eval(term, &symbols_of(symbols)?)?)
}

/// Predicted type of `outer(left, right)`. Inside the subterms, symbol `0` is
/// `outer` and symbol `i > 0` is `others[i - 1]`.
pub fn compose_types(outer: &BinaryType, left: &TypeTerm, right: &TypeTerm, others: &[BinaryType]) -> Result<BinaryType, AlgebraError> {
    let mut symbols = vec![*outer];
    symbols.extend_from_slice(others);
    term_type(&TypeTerm::apply(0, left.clone(), right.clone()), &symbols)
}

/// Types of all essential binary terms over `f` and α of nesting depth at
/// most `depth`.
pub fn reachable_types(f: &BinaryType, depth: usize) -> Result<BTreeSet<BinaryType>, AlgebraError> {
    let symbol = Symbol::new(f, 0)?;
    let mut known: Vec<Table> = vec![variable_table(true), variable_table(false)];
    let mut seen: HashSet<Table> = known.iter().copied().collect();
    for _ in 0..depth {
        let mut fresh = Vec::new();
        for t in &known {
            fresh.push(t.map(PairType::alpha));
            for r in &known {
                fresh.push(combine_tables(&symbol, t, r));
            }
        }
        let before = known.len();
        for t in fresh {
            if seen.insert(t) {
                known.push(t);
            }
        }
        if known.len() == before {
            break;
        }
    }
    Ok(known.iter().filter_map(|t| read_type(t).ok()).collect())
}

/// Concrete values of `term` on each point of `grid`, realizing every symbol
/// occurrence and every α independently on exactly the points it needs.
pub fn realize_term(term: &TypeTerm, specs: &[BinaryTypeSpec], grid: &[(Vertex, Vertex)]) -> Result<Vec<Vertex>, AlgebraError> {
    Ok(match term {
        TypeTerm::U => grid.iter().map(|p| p.0.clone()).collect(),
        TypeTerm::V => grid.iter().map(|p| p.1.clone()).collect(),
        TypeTerm::Alpha(t) => {
            let values = realize_term(t, specs, grid)?;
            let alpha = make_alpha(&values);
            values.iter().map(|v| alpha.at(v).expect("alpha domain").clone()).collect()
        }
        TypeTerm::Apply(s, l, r) => {
            let spec = specs.get(*s).ok_or(AlgebraError::UnknownSymbol(*s))?;
            let left = realize_term(l, specs, grid)?;
            let right = realize_term(r, specs, grid)?;
            let points: Vec<(Vertex, Vertex)> = left.into_iter().zip(right).collect();
            let f = make_binary_injection_on(spec, points.iter().cloned());
            points.into_iter().map(|(x, y)| f.get(&[x, y]).expect("realized point").clone()).collect()
        }
    })
}

/// [`realize_term`] on the product grid `a × b`, as a sample.
pub fn realize_term_sample(term: &TypeTerm, specs: &[BinaryTypeSpec], a: &[Vertex], b: &[Vertex]) -> Result<FunctionSample, AlgebraError> {
    let grid: Vec<(Vertex, Vertex)> = a.iter().flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone()))).collect();
    let values = realize_term(term, specs, &grid)?;
    Ok(FunctionSample::new(2, grid.into_iter().map(|(x, y)| vec![x, y]).zip(values)).expect("binary entries"))
}
