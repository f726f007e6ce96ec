//! Parsers for command-line values.

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use rado::galois::Relation;
use rado::operations::{self, BinaryTypeSpec, FunctionSample};
use rado::{FiniteGraph, PartialIso, Vertex};
use serde::de::DeserializeOwned;

/// `0,1,5..9` with inclusive ranges; the empty string is the empty list.
pub fn vertices(text: &str) -> Result<Vec<Vertex>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().with_context(|| format!("bad range start in '{part}'"))?;
            let b: u64 = b.trim().trim_start_matches('=').parse().with_context(|| format!("bad range end in '{part}'"))?;
            if b < a {
                bail!("empty range '{part}'");
            }
            out.extend((a..=b).map(Vertex::new));
        } else {
            out.push(Vertex::new(part.parse().with_context(|| format!("'{part}' is not a vertex"))?));
        }
    }
    Ok(out)
}

pub fn vertex_set(text: &str) -> Result<BTreeSet<Vertex>> {
    Ok(vertices(text)?.into_iter().collect())
}

/// `a:b,c:d`.
pub fn pairs(text: &str) -> Result<Vec<(Vertex, Vertex)>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| anyhow!("expected 'a:b', found '{p}'"))?;
            Ok((Vertex::new(a.trim().parse()?), Vertex::new(b.trim().parse()?)))
        })
        .collect()
}

/// Inline JSON, `-` for standard input, or a file path.
pub fn json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let trimmed = text.trim_start();
    let raw = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        text.to_owned()
    } else if text == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(text).with_context(|| format!("cannot read '{text}'"))?
    };
    serde_json::from_str(&raw).with_context(|| format!("invalid JSON in '{}'", abbreviate(text)))
}

fn abbreviate(text: &str) -> String {
    if text.len() > 40 {
        format!("{}...", &text[..40])
    } else {
        text.to_owned()
    }
}

/// `K<n>`, `I<n>`, `P<n>`, `C<n>`, `bit:<vertices>` or JSON.
pub fn graph(text: &str) -> Result<FiniteGraph> {
    if let Some(list) = text.strip_prefix("bit:") {
        return Ok(rado::induced_subgraph(&vertices(list)?));
    }
    let mut chars = text.chars();
    if let (Some(kind @ ('K' | 'I' | 'P' | 'C')), Ok(n)) = (chars.next(), chars.as_str().parse::<usize>()) {
        return Ok(match kind {
            'K' => FiniteGraph::complete(n),
            'I' => FiniteGraph::independent(n),
            'P' => FiniteGraph::path(n),
            _ => {
                if n < 3 {
                    bail!("a cycle needs at least 3 vertices");
                }
                FiniteGraph::cycle(n)
            }
        });
    }
    json(text)
}

/// A named relation, a formula, or JSON `{"arity", "formula"}`.
pub fn relation(text: &str) -> Result<Relation> {
    if let Some(r) = Relation::named(text) {
        return Ok(r);
    }
    if text.trim_start().starts_with('(') || text == "true" || text == "false" {
        return Ok(Relation::parse(text, None)?);
    }
    json(text)
}

pub fn spec(text: &str) -> Result<BinaryTypeSpec> {
    Ok(text.parse()?)
}

pub fn iso(text: &str) -> Result<PartialIso> {
    if text.trim_start().starts_with('{') || !text.contains(':') {
        return json(text);
    }
    Ok(PartialIso::new(pairs(text)?)?)
}

/// Named operation and its parameters.
#[derive(Debug, Clone, Args)]
pub struct OpArgs {
    /// identity, constant, eE, eN, minus, switch, edge-deletion, alpha,
    /// binary, dual
    #[arg(long)]
    pub op: Option<String>,
    /// Binary type, e.g. "max E/E" or "p1/p1 id/E"
    #[arg(long)]
    pub spec: Option<String>,
    /// Vertices flipped by switch
    #[arg(long, default_value = "0")]
    pub flip: String,
    /// Value of the constant operation
    #[arg(long, default_value_t = 0)]
    pub value: u64,
    /// Edge deleted by edge-deletion, as "a,b"
    #[arg(long, default_value = "0,1")]
    pub edge: String,
}

impl OpArgs {
    /// The sample on `domain` (and `second` for binary operations).
    pub fn build(&self, domain: &[Vertex], second: &[Vertex]) -> Result<FunctionSample> {
        let name = self.op.as_deref().ok_or_else(|| anyhow!("--op is required"))?;
        let binary_spec = || -> Result<BinaryTypeSpec> { spec(self.spec.as_deref().ok_or_else(|| anyhow!("--spec is required for '{name}'"))?) };
        Ok(match name {
            "identity" | "id" => FunctionSample::identity(domain),
            "constant" => operations::make_constant(domain, &Vertex::new(self.value)),
            "eE" => operations::make_eE(domain),
            "eN" => operations::make_eN(domain),
            "minus" => operations::make_minus(domain),
            "switch" | "sw" => operations::make_switch(&vertex_set(&self.flip)?, domain)?,
            "edge-deletion" => {
                let ends = vertices(&self.edge)?;
                let [a, b] = ends.as_slice() else {
                    bail!("--edge needs exactly two vertices");
                };
                operations::make_edge_deletion(a, b, domain)?
            }
            "alpha" => operations::make_alpha(domain),
            "binary" => operations::make_binary_injection(&binary_spec()?, domain, second),
            "dual" => operations::dual(&operations::make_binary_injection(&binary_spec()?, domain, second))?,
            other => bail!("unknown operation '{other}'"),
        })
    }
}

/// Every tuple of length `k` over `points`, in lexicographic order.
pub fn tuples(points: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Vertex>| {
                points.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(p.clone());
                    t
                })
            })
            .collect();
    }
    out
}
