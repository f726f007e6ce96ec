//! Relations over the random graph given by formulas in `E`, `N` and `=`,
//! their evaluation in the BIT model, and preservation checks.
//!
//! Text syntax (prefix, whitespace separated):
//!
//! ```text
//! formula := true | false
//!          | (E i j) | (N i j) | (= i j)
//!          | (not formula)
//!          | (and formula...) | (or formula...) | (xor formula...)
//!          | (exists k formula)        ; top level only
//! ```
//!
//! Variables are numbered from 0; an `exists k` block binds the `k` variables
//! following the free ones.

mod checks;

pub use checks::{injective_square_hom, intersection_closed_check, preserves, verify_square_hom, Preservation, SquareHom};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bit_adjacent, find_witness};
use crate::vertex::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("cannot parse relation: {0}")]
    Parse(String),
    #[error("variable {index} out of range for {available} variables")]
    Variable { index: usize, available: usize },
    #[error("tuple has length {found}, relation has arity {arity}")]
    Arity { arity: usize, found: usize },
    #[error("existential block allowed only at the top level")]
    NestedExists,
    #[error("existential search inconclusive: {configurations} configurations exceed the cap")]
    Inconclusive { configurations: u64 },
    #[error("sample is undefined at {0:?}")]
    Undefined(Vec<Vertex>),
    #[error("search budget exhausted after {nodes} nodes")]
    Budget { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    E(usize, usize),
    N(usize, usize),
    Eq(usize, usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Xor(Vec<Formula>),
    Exists(usize, Box<Formula>),
}

impl Formula {
    fn max_variable(&self) -> Option<usize> {
        match self {
            Formula::True | Formula::False => None,
            Formula::E(a, b) | Formula::N(a, b) | Formula::Eq(a, b) => Some(*a.max(b)),
            Formula::Not(f) | Formula::Exists(_, f) => f.max_variable(),
            Formula::And(fs) | Formula::Or(fs) | Formula::Xor(fs) => fs.iter().filter_map(Formula::max_variable).max(),
        }
    }

    fn has_exists(&self) -> bool {
        match self {
            Formula::Exists(..) => true,
            Formula::Not(f) => f.has_exists(),
            Formula::And(fs) | Formula::Or(fs) | Formula::Xor(fs) => fs.iter().any(Formula::has_exists),
            _ => false,
        }
    }

    /// Quantifier-free evaluation on `values`.
    pub fn holds(&self, values: &[Vertex]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::E(a, b) => bit_adjacent(&values[*a], &values[*b]),
            Formula::N(a, b) => values[*a] != values[*b] && !bit_adjacent(&values[*a], &values[*b]),
            Formula::Eq(a, b) => values[*a] == values[*b],
            Formula::Not(f) => !f.holds(values),
            Formula::And(fs) => fs.iter().all(|f| f.holds(values)),
            Formula::Or(fs) => fs.iter().any(|f| f.holds(values)),
            Formula::Xor(fs) => fs.iter().filter(|f| f.holds(values)).count() % 2 == 1,
            Formula::Exists(..) => unreachable!("existential blocks are handled by Relation::eval"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, fs: &[Formula]| {
            write!(f, "({name}")?;
            for g in fs {
                write!(f, " {g}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::E(a, b) => write!(f, "(E {a} {b})"),
            Formula::N(a, b) => write!(f, "(N {a} {b})"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(fs) => list(f, "and", fs),
            Formula::Or(fs) => list(f, "or", fs),
            Formula::Xor(fs) => list(f, "xor", fs),
            Formula::Exists(k, g) => write!(f, "(exists {k} {g})"),
        }
    }
}

/// A relation of fixed arity defined by a formula with an optional top-level
/// existential block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    formula: Formula,
}

/// Cap on equality/adjacency configurations in exact existential evaluation.
pub const EXISTS_CONFIGURATION_CAP: u64 = 1 << 20;

impl Relation {
    pub fn new(arity: usize, formula: Formula) -> Result<Relation, GaloisError> {
        let (bound, body) = match &formula {
            Formula::Exists(k, body) => (*k, body.as_ref()),
            other => (0, other),
        };
        if body.has_exists() {
            return Err(GaloisError::NestedExists);
        }
        let available = arity + bound;
        if let Some(index) = body.max_variable().filter(|&m| m >= available) {
            return Err(GaloisError::Variable { index, available });
        }
        Ok(Relation { arity, formula })
    }

    /// Parses the text syntax; the arity is one more than the largest free
    /// variable unless given.
    pub fn parse(text: &str, arity: Option<usize>) -> Result<Relation, GaloisError> {
        let tokens: Vec<String> = text.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_owned).collect();
        let mut pos = 0;
        let formula = parse_formula(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(GaloisError::Parse(format!("trailing input at token {pos}")));
        }
        let arity = match arity {
            Some(a) => a,
            None => {
                let bound = if let Formula::Exists(k, _) = &formula { *k } else { 0 };
                let max = formula.max_variable().map_or(0, |m| m + 1);
                max.saturating_sub(bound).max(1)
            }
        };
        Relation::new(arity, formula)
    }

    /// Named relations: `E`, `N`, `eq`, `neq`, `neq-pp`, `R<k>`.
    pub fn named(name: &str) -> Option<Relation> {
        let rel = match name {
            "E" => Relation::new(2, Formula::E(0, 1)),
            "N" => Relation::new(2, Formula::N(0, 1)),
            "eq" | "=" => Relation::new(2, Formula::Eq(0, 1)),
            "neq" | "!=" => Relation::new(2, Formula::Not(Box::new(Formula::Eq(0, 1)))),
            "neq-pp" => Ok(Relation::neq_pp()),
            other => {
                let k: usize = other.strip_prefix('R')?.parse().ok()?;
                return (k >= 3).then(|| Relation::parity(k));
            }
        };
        rel.ok()
    }

    /// `R^(k)`: pairwise distinct with an odd number of edges.
    pub fn parity(k: usize) -> Relation {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        let mut parts: Vec<Formula> = pairs.iter().map(|&(i, j)| Formula::Not(Box::new(Formula::Eq(i, j)))).collect();
        parts.push(Formula::Xor(pairs.iter().map(|&(i, j)| Formula::E(i, j)).collect()));
        Relation::new(k, Formula::And(parts)).expect("well formed")
    }

    /// `∃z (E(x, z) ∧ N(y, z))`.
    pub fn neq_pp() -> Relation {
        Relation::new(2, Formula::Exists(1, Box::new(Formula::And(vec![Formula::E(0, 2), Formula::N(1, 2)])))).expect("well formed")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn is_quantifier_free(&self) -> bool {
        !matches!(self.formula, Formula::Exists(..))
    }

    /// Truth of the relation on `t`. Existential witnesses are first searched
    /// in `0..=bound`; when none is found there the question is decided
    /// exactly by enumerating the possible types of the witnesses over `t`,
    /// each realized by the extension property.
    pub fn eval(&self, t: &[Vertex], bound: u64) -> Result<bool, GaloisError> {
        if t.len() != self.arity {
            return Err(GaloisError::Arity {
                arity: self.arity,
                found: t.len(),
            });
        }
        let Formula::Exists(k, body) = &self.formula else {
            return Ok(self.formula.holds(t));
        };
        let mut values = t.to_vec();
        if bounded_search(body, &mut values, *k, bound) {
            return Ok(true);
        }
        let mut count = 0;
        let mut values = t.to_vec();
        exact_search(body, &mut values, *k, &mut count)
    }
}

fn bounded_search(body: &Formula, values: &mut Vec<Vertex>, remaining: usize, bound: u64) -> bool {
    if remaining == 0 {
        return body.holds(values);
    }
    for z in 0..=bound {
        values.push(Vertex::new(z));
        let found = bounded_search(body, values, remaining - 1, bound);
        values.pop();
        if found {
            return true;
        }
    }
    false
}

/// Each witness equals an earlier value or is fresh with a chosen adjacency
/// pattern to the distinct earlier values.
fn exact_search(body: &Formula, values: &mut Vec<Vertex>, remaining: usize, count: &mut u64) -> Result<bool, GaloisError> {
    if remaining == 0 {
        *count += 1;
        if *count > EXISTS_CONFIGURATION_CAP {
            return Err(GaloisError::Inconclusive { configurations: *count });
        }
        return Ok(body.holds(values));
    }
    let mut distinct: Vec<Vertex> = values.clone();
    distinct.sort();
    distinct.dedup();
    for v in distinct.clone() {
        values.push(v);
        let found = exact_search(body, values, remaining - 1, count)?;
        values.pop();
        if found {
            return Ok(true);
        }
    }
    if distinct.len() >= 63 {
        return Err(GaloisError::Inconclusive { configurations: u64::MAX });
    }
    for pattern in 0..1u64 << distinct.len() {
        let (adjacent, non_adjacent): (Vec<_>, Vec<_>) = distinct.iter().enumerate().partition(|(i, _)| pattern >> i & 1 == 1);
        let adjacent: Vec<Vertex> = adjacent.into_iter().map(|(_, v)| v.clone()).collect();
        let non_adjacent: Vec<Vertex> = non_adjacent.into_iter().map(|(_, v)| v.clone()).collect();
        values.push(find_witness(&adjacent, &non_adjacent).expect("disjoint"));
        let found = exact_search(body, values, remaining - 1, count)?;
        values.pop();
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

fn parse_index(tokens: &[String], pos: &mut usize) -> Result<usize, GaloisError> {
    let token = tokens.get(*pos).ok_or_else(|| GaloisError::Parse("unexpected end".into()))?;
    *pos += 1;
    token.parse().map_err(|_| GaloisError::Parse(format!("expected a variable index, found '{token}'")))
}

fn parse_formula(tokens: &[String], pos: &mut usize) -> Result<Formula, GaloisError> {
    let token = tokens.get(*pos).ok_or_else(|| GaloisError::Parse("unexpected end".into()))?.clone();
    *pos += 1;
    match token.as_str() {
        "true" => return Ok(Formula::True),
        "false" => return Ok(Formula::False),
        "(" => {}
        other => return Err(GaloisError::Parse(format!("unexpected '{other}'"))),
    }
    let head = tokens.get(*pos).ok_or_else(|| GaloisError::Parse("unexpected end".into()))?.clone();
    *pos += 1;
    let formula = match head.as_str() {
        "E" | "N" | "=" => {
            let a = parse_index(tokens, pos)?;
            let b = parse_index(tokens, pos)?;
            match head.as_str() {
                "E" => Formula::E(a, b),
                "N" => Formula::N(a, b),
                _ => Formula::Eq(a, b),
            }
        }
        "not" => Formula::Not(Box::new(parse_formula(tokens, pos)?)),
        "exists" => {
            let k = parse_index(tokens, pos)?;
            Formula::Exists(k, Box::new(parse_formula(tokens, pos)?))
        }
        "and" | "or" | "xor" => {
            let mut parts = Vec::new();
            while tokens.get(*pos).map(String::as_str) != Some(")") {
                if *pos >= tokens.len() {
                    return Err(GaloisError::Parse("unclosed list".into()));
                }
                parts.push(parse_formula(tokens, pos)?);
            }
            match head.as_str() {
                "and" => Formula::And(parts),
                "or" => Formula::Or(parts),
                _ => Formula::Xor(parts),
            }
        }
        other => return Err(GaloisError::Parse(format!("unknown operator '{other}'"))),
    };
    if tokens.get(*pos).map(String::as_str) != Some(")") {
        return Err(GaloisError::Parse(format!("expected ')' at token {pos}")));
    }
    *pos += 1;
    Ok(formula)
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)
    }
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json {
            arity: usize,
            formula: String,
        }
        Json {
            arity: self.arity,
            formula: self.formula.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Json {
            arity: usize,
            formula: String,
        }
        let raw = Json::deserialize(deserializer)?;
        Relation::parse(&raw.formula, Some(raw.arity)).map_err(serde::de::Error::custom)
    }
}
