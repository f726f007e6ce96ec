//! Bounded search for compositions of sample operations and automorphism
//! moves that agree with a target on a finite set.
//!
//! A term is evaluated pointwise: generators are looked up in their samples
//! and every move is a [`PartialIso`], so a term only ever denotes a finite
//! partial function. The search works on restrictions: two partial results
//! on the target's domain that differ by an automorphism (same kernel, same
//! graph on the value classes) are interchangeable, because every later move
//! can absorb the difference. Failure to find a term is never evidence that
//! the target is not generated in the infinite structure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{bit_adjacent, FiniteGraph, PartialIso};
use crate::operations::FunctionSample;
use crate::vertex::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("unknown generator g{0}")]
    UnknownGenerator(usize),
    #[error("generator g{generator} has arity {arity}, applied to {found} arguments")]
    Arity { generator: usize, arity: usize, found: usize },
    #[error("variable {index} out of range for input of length {len}")]
    Variable { index: usize, len: usize },
    #[error("generator g{generator} is undefined at {input:?}")]
    Undefined { generator: usize, input: Vec<Vertex> },
    #[error("move {0} is undefined at {1}")]
    OutsideMove(usize, Vertex),
    #[error("cannot parse term: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no placement of the graph inside the sample's domain")]
    NoPlacement,
}

/// Composition of generators, variables and automorphism moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Apply(usize, Vec<Term>),
    Aut(PartialIso, Box<Term>),
}

fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        n => format!("x{n}"),
    }
}

fn var_index(name: &str) -> Option<usize> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        other => other.strip_prefix('x')?.parse().ok(),
    }
}

impl Term {
    /// Variables count 1, each application adds 1, moves add nothing.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Apply(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Aut(_, inner) => inner.depth(),
        }
    }

    /// Moves in preorder; `(aut i ...)` in the text form refers to index `i`.
    pub fn moves(&self) -> Vec<&PartialIso> {
        let mut out = Vec::new();
        self.collect_moves(&mut out);
        out
    }

    fn collect_moves<'a>(&'a self, out: &mut Vec<&'a PartialIso>) {
        match self {
            Term::Var(_) => {}
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_moves(out)),
            Term::Aut(m, inner) => {
                out.push(m);
                inner.collect_moves(out);
            }
        }
    }

    pub fn eval(&self, generators: &[FunctionSample], input: &[Vertex]) -> Result<Vertex, ClosureError> {
        let mut counter = 0;
        self.eval_inner(generators, input, &mut counter)
    }

    fn eval_inner(&self, generators: &[FunctionSample], input: &[Vertex], counter: &mut usize) -> Result<Vertex, ClosureError> {
        match self {
            Term::Var(i) => input.get(*i).cloned().ok_or(ClosureError::Variable { index: *i, len: input.len() }),
            Term::Aut(m, inner) => {
                let index = *counter;
                *counter += 1;
                let v = inner.eval_inner(generators, input, counter)?;
                m.get(&v).cloned().ok_or(ClosureError::OutsideMove(index, v))
            }
            Term::Apply(g, args) => {
                let sample = generators.get(*g).ok_or(ClosureError::UnknownGenerator(*g))?;
                if sample.arity() != args.len() {
                    return Err(ClosureError::Arity {
                        generator: *g,
                        arity: sample.arity(),
                        found: args.len(),
                    });
                }
                let values = args.iter().map(|a| a.eval_inner(generators, input, counter)).collect::<Result<Vec<_>, _>>()?;
                sample.get(&values).cloned().ok_or(ClosureError::Undefined { generator: *g, input: values })
            }
        }
    }

    /// The restriction of the term to `points`, each of the target's arity.
    pub fn restrict(&self, generators: &[FunctionSample], points: &[Vec<Vertex>]) -> Result<FunctionSample, ClosureError> {
        let arity = points.first().map_or(1, Vec::len);
        let entries = points.iter().map(|p| Ok((p.clone(), self.eval(generators, p)?))).collect::<Result<Vec<_>, ClosureError>>()?;
        FunctionSample::new(arity, entries).map_err(|e| ClosureError::Precondition(e.to_string()))
    }

    /// Reads the text form; `moves` supplies the partial isomorphisms.
    pub fn parse(text: &str, moves: &[PartialIso]) -> Result<Term, ClosureError> {
        let tokens: Vec<String> = text.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_owned).collect();
        let mut pos = 0;
        let term = parse_term(&tokens, &mut pos, moves)?;
        if pos != tokens.len() {
            return Err(ClosureError::Parse(format!("trailing input at token {pos}")));
        }
        Ok(term)
    }
}

fn parse_term(tokens: &[String], pos: &mut usize, moves: &[PartialIso]) -> Result<Term, ClosureError> {
    let next = |pos: &mut usize| -> Result<String, ClosureError> {
        let t = tokens.get(*pos).cloned().ok_or_else(|| ClosureError::Parse("unexpected end".into()))?;
        *pos += 1;
        Ok(t)
    };
    let head = next(pos)?;
    if head != "(" {
        return var_index(&head).map(Term::Var).ok_or_else(|| ClosureError::Parse(format!("unknown variable '{head}'")));
    }
    let op = next(pos)?;
    let term = if op == "aut" {
        let index: usize = next(pos)?.parse().map_err(|_| ClosureError::Parse("expected a move index".into()))?;
        let m = moves.get(index).cloned().ok_or_else(|| ClosureError::Parse(format!("move {index} not supplied")))?;
        Term::Aut(m, Box::new(parse_term(tokens, pos, moves)?))
    } else {
        let g: usize = op
            .strip_prefix('g')
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| ClosureError::Parse(format!("unknown operator '{op}'")))?;
        let mut args = Vec::new();
        while tokens.get(*pos).map(String::as_str) != Some(")") {
            if *pos >= tokens.len() {
                return Err(ClosureError::Parse("unclosed application".into()));
            }
            args.push(parse_term(tokens, pos, moves)?);
        }
        Term::Apply(g, args)
    };
    if next(pos)? != ")" {
        return Err(ClosureError::Parse("expected ')'".into()));
    }
    Ok(term)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Term, f: &mut fmt::Formatter<'_>, counter: &mut usize) -> fmt::Result {
            match t {
                Term::Var(i) => write!(f, "{}", var_name(*i)),
                Term::Aut(_, inner) => {
                    write!(f, "(aut {} ", *counter)?;
                    *counter += 1;
                    go(inner, f, counter)?;
                    write!(f, ")")
                }
                Term::Apply(g, args) => {
                    write!(f, "(g{g}")?;
                    for a in args {
                        write!(f, " ")?;
                        go(a, f, counter)?;
                    }
                    write!(f, ")")
                }
            }
        }
        go(self, f, &mut 0)
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            term: String,
            depth: usize,
            moves: Vec<&'a PartialIso>,
        }
        Json {
            term: self.to_string(),
            depth: self.depth(),
            moves: self.moves(),
        }
        .serialize(serializer)
    }
}

/// Lexicographically first partial isomorphism from the sorted
/// `sample_points` into `target_points`, or `None` when the induced graph
/// of the sample does not embed there.
pub fn automorphism_move(sample_points: &BTreeSet<Vertex>, target_points: &BTreeSet<Vertex>) -> Option<PartialIso> {
    let reps: Vec<Vertex> = sample_points.iter().cloned().collect();
    let targets: Vec<Vertex> = target_points.iter().cloned().collect();
    let mut found = None;
    embeddings(&reps, &targets, false, 1, |images| {
        found = Some(PartialIso::from_map_unchecked(reps.iter().cloned().zip(images.iter().cloned()).collect()));
    });
    found
}

/// Calls `visit` on injective adjacency-preserving maps of `reps` into
/// `targets`, in lexicographic order of target positions, at most `cap`
/// times. Returns whether the cap cut the enumeration short.
fn embeddings(reps: &[Vertex], targets: &[Vertex], monotone: bool, cap: usize, mut visit: impl FnMut(&[Vertex])) -> bool {
    #[allow(clippy::too_many_arguments)]
    fn go(
        reps: &[Vertex],
        targets: &[Vertex],
        monotone: bool,
        cap: usize,
        chosen: &mut Vec<usize>,
        used: &mut [bool],
        count: &mut usize,
        visit: &mut dyn FnMut(&[Vertex]),
    ) -> bool {
        let i = chosen.len();
        if i == reps.len() {
            if *count == cap {
                return true;
            }
            *count += 1;
            let images: Vec<Vertex> = chosen.iter().map(|&t| targets[t].clone()).collect();
            visit(&images);
            return false;
        }
        for t in 0..targets.len() {
            if used[t] {
                continue;
            }
            // monotone maps keep the relative order of the sorted reps
            if monotone && chosen.iter().enumerate().any(|(j, &s)| (reps[j] < reps[i]) != (s < t)) {
                continue;
            }
            if (0..i).any(|j| bit_adjacent(&reps[j], &reps[i]) != bit_adjacent(&targets[chosen[j]], &targets[t])) {
                continue;
            }
            used[t] = true;
            chosen.push(t);
            let stop = go(reps, targets, monotone, cap, chosen, used, count, visit);
            chosen.pop();
            used[t] = false;
            if stop {
                return true;
            }
        }
        false
    }
    let mut used = vec![false; targets.len()];
    let mut count = 0;
    go(reps, targets, monotone, cap, &mut Vec::new(), &mut used, &mut count, &mut visit)
}

/// Target and bounds for [`interpolate_search`].
#[derive(Debug, Clone)]
pub struct InterpolationGoal {
    pub target: FunctionSample,
    pub depth_cap: usize,
    /// Moves place values only at generator coordinates `<= region_bound`.
    pub region_bound: Vertex,
}

/// Enumeration limits; hitting one makes a negative answer inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Moves (or move combinations) tried per application.
    pub move_cap: usize,
    /// Distinct restrictions kept.
    pub state_cap: usize,
    /// Restrict moves to order-preserving maps.
    pub monotone_moves: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            move_cap: 200_000,
            state_cap: 200_000,
            monotone_moves: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Interpolation {
    Found { term: Term, states: usize },
    /// The depth cap or a limit stopped the search first.
    Inconclusive { depth: usize, states: usize, capped: bool },
    /// No term over these samples can agree with the target.
    Impossible { reason: String, states: usize },
}

#[derive(Debug, Clone)]
enum Origin {
    Var(usize),
    Apply { generator: usize, args: Vec<usize>, moves: Vec<PartialIso> },
}

#[derive(Debug, Clone)]
struct State {
    values: Vec<Vertex>,
    depth: usize,
    origin: Origin,
}

type Key = (Vec<usize>, Vec<bool>, Vec<usize>);

/// New restrictions with the moves producing them, and whether a cap hit.
type Applied = (Vec<(Vec<Vertex>, Vec<PartialIso>)>, bool);

/// Kernel, adjacency between classes and, for monotone moves, the order of
/// the classes. Equal keys mean the restrictions differ by a move.
fn key_of(values: &[Vertex], monotone: bool) -> Key {
    let mut reps: Vec<&Vertex> = Vec::new();
    let kernel: Vec<usize> = values
        .iter()
        .map(|v| {
            reps.iter().position(|r| *r == v).unwrap_or_else(|| {
                reps.push(v);
                reps.len() - 1
            })
        })
        .collect();
    let c = reps.len();
    let adjacency = (0..c).flat_map(|a| (a + 1..c).map(move |b| (a, b))).map(|(a, b)| bit_adjacent(reps[a], reps[b])).collect();
    let order = if monotone {
        let mut idx: Vec<usize> = (0..c).collect();
        idx.sort_by(|&a, &b| reps[a].cmp(reps[b]));
        idx
    } else {
        Vec::new()
    };
    (kernel, adjacency, order)
}

fn classes(values: &[Vertex]) -> Vec<Vertex> {
    values.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

struct Engine<'a> {
    generators: &'a [FunctionSample],
    points: Vec<Vec<Vertex>>,
    limits: SearchLimits,
    coordinates: Vec<Vec<Vec<Vertex>>>,
    states: Vec<State>,
    memo: HashMap<Key, usize>,
    capped: bool,
}

enum LevelEnd {
    Stopped(usize),
    Saturated,
    Full,
    Continue,
}

impl<'a> Engine<'a> {
    fn new(generators: &'a [FunctionSample], points: Vec<Vec<Vertex>>, region_bound: &Vertex, limits: SearchLimits) -> Self {
        let coordinates = generators
            .iter()
            .map(|g| (0..g.arity()).map(|j| g.coordinate_set(j).into_iter().filter(|v| v <= region_bound).collect()).collect())
            .collect();
        Engine {
            generators,
            points,
            limits,
            coordinates,
            states: Vec::new(),
            memo: HashMap::new(),
            capped: false,
        }
    }

    fn insert(&mut self, state: State, stop: &dyn Fn(&[Vertex]) -> bool) -> Option<usize> {
        let key = key_of(&state.values, self.limits.monotone_moves);
        if self.memo.contains_key(&key) {
            return None;
        }
        let id = self.states.len();
        let hit = stop(&state.values);
        self.memo.insert(key, id);
        self.states.push(state);
        hit.then_some(id)
    }

    fn start(&mut self, stop: &dyn Fn(&[Vertex]) -> bool) -> Option<usize> {
        let arity = self.points.first().map_or(0, Vec::len);
        let mut hit = None;
        for i in 0..arity {
            let values = self.points.iter().map(|p| p[i].clone()).collect();
            let found = self.insert(State { values, depth: 1, origin: Origin::Var(i) }, stop);
            hit = hit.or(found);
        }
        hit
    }

    /// Every application whose deepest argument has depth `depth - 1`.
    fn level(&mut self, depth: usize, stop: &dyn Fn(&[Vertex]) -> bool) -> LevelEnd {
        let mut jobs: Vec<(usize, Vec<usize>)> = Vec::new();
        for (g, sample) in self.generators.iter().enumerate() {
            let m = sample.arity();
            let total = self.states.len().pow(m as u32);
            for index in 0..total {
                let mut rest = index;
                let mut args = vec![0; m];
                for slot in args.iter_mut().rev() {
                    *slot = rest % self.states.len();
                    rest /= self.states.len();
                }
                if args.iter().map(|&a| self.states[a].depth).max() == Some(depth - 1) {
                    jobs.push((g, args));
                }
            }
        }
        let results: Vec<Applied> = jobs.par_iter().map(|(g, args)| self.apply(*g, args)).collect();
        let before = self.states.len();
        for ((g, args), (outputs, capped)) in jobs.into_iter().zip(results) {
            self.capped |= capped;
            for (values, moves) in outputs {
                let state = State {
                    values,
                    depth,
                    origin: Origin::Apply {
                        generator: g,
                        args: args.clone(),
                        moves,
                    },
                };
                if let Some(id) = self.insert(state, stop) {
                    return LevelEnd::Stopped(id);
                }
                if self.states.len() >= self.limits.state_cap {
                    self.capped = true;
                    return LevelEnd::Full;
                }
            }
        }
        if self.states.len() == before {
            LevelEnd::Saturated
        } else {
            LevelEnd::Continue
        }
    }

    /// Restrictions of `g` applied to moved copies of the argument states,
    /// deduplicated by key in enumeration order.
    fn apply(&self, g: usize, args: &[usize]) -> Applied {
        let sample = &self.generators[g];
        let mut capped = false;
        let mut options: Vec<Vec<Vec<Vertex>>> = Vec::with_capacity(args.len());
        let reps: Vec<Vec<Vertex>> = args.iter().map(|&a| classes(&self.states[a].values)).collect();
        for (j, r) in reps.iter().enumerate() {
            let mut images = Vec::new();
            capped |= embeddings(r, &self.coordinates[g][j], self.limits.monotone_moves, self.limits.move_cap, |im| images.push(im.to_vec()));
            if images.is_empty() {
                return (Vec::new(), capped);
            }
            options.push(images);
        }
        let total: usize = options.iter().map(Vec::len).try_fold(1usize, |acc, n| acc.checked_mul(n)).unwrap_or(usize::MAX);
        if total > self.limits.move_cap {
            capped = true;
        }
        let lookups: Vec<BTreeMap<&Vertex, usize>> = reps.iter().map(|r| r.iter().enumerate().map(|(i, v)| (v, i)).collect()).collect();
        let mut seen: BTreeSet<Key> = BTreeSet::new();
        let mut out = Vec::new();
        'combos: for index in 0..total.min(self.limits.move_cap) {
            let mut rest = index;
            let mut pick = vec![0; args.len()];
            for (slot, opts) in pick.iter_mut().zip(&options).rev() {
                *slot = rest % opts.len();
                rest /= opts.len();
            }
            let mut values = Vec::with_capacity(self.points.len());
            for d in 0..self.points.len() {
                let input: Vec<Vertex> = args
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| options[j][pick[j]][lookups[j][&self.states[a].values[d]]].clone())
                    .collect();
                match sample.get(&input) {
                    Some(v) => values.push(v.clone()),
                    None => continue 'combos,
                }
            }
            if seen.insert(key_of(&values, self.limits.monotone_moves)) {
                let moves = (0..args.len())
                    .map(|j| PartialIso::from_map_unchecked(reps[j].iter().cloned().zip(options[j][pick[j]].iter().cloned()).collect()))
                    .collect();
                out.push((values, moves));
            }
        }
        (out, capped)
    }

    fn term(&self, id: usize) -> Term {
        match &self.states[id].origin {
            Origin::Var(i) => Term::Var(*i),
            Origin::Apply { generator, args, moves } => Term::Apply(
                *generator,
                args.iter().zip(moves).map(|(&a, m)| Term::Aut(m.clone(), Box::new(self.term(a)))).collect(),
            ),
        }
    }
}

/// Breadth-first search by depth for a term agreeing with the target on its
/// whole domain. The returned term is re-evaluated before it is reported.
pub fn interpolate_search(generators: &[FunctionSample], goal: &InterpolationGoal, limits: SearchLimits) -> Result<Interpolation, ClosureError> {
    let points: Vec<Vec<Vertex>> = goal.target.domain().cloned().collect();
    let target_values: Vec<Vertex> = points.iter().map(|p| goal.target.get(p).expect("domain").clone()).collect();
    if !goal.target.is_injective() && generators.iter().all(FunctionSample::is_injective) {
        return Ok(Interpolation::Impossible {
            reason: "target identifies points but every generator is injective".into(),
            states: 0,
        });
    }
    let target_key = key_of(&target_values, limits.monotone_moves);
    let stop = |values: &[Vertex]| key_of(values, limits.monotone_moves) == target_key;
    let mut engine = Engine::new(generators, points.clone(), &goal.region_bound, limits);
    let mut hit = engine.start(&stop);
    let mut depth = 1;
    while hit.is_none() && depth < goal.depth_cap {
        depth += 1;
        match engine.level(depth, &stop) {
            LevelEnd::Stopped(id) => hit = Some(id),
            LevelEnd::Saturated if !engine.capped => {
                return Ok(Interpolation::Impossible {
                    reason: "every restriction reachable from the samples has been seen".into(),
                    states: engine.states.len(),
                });
            }
            LevelEnd::Saturated | LevelEnd::Continue => {}
            LevelEnd::Full => break,
        }
    }
    let Some(id) = hit else {
        return Ok(Interpolation::Inconclusive {
            depth,
            states: engine.states.len(),
            capped: engine.capped,
        });
    };
    let values = &engine.states[id].values;
    let closing = PartialIso::from_map_unchecked(values.iter().cloned().zip(target_values.iter().cloned()).collect());
    let term = Term::Aut(closing, Box::new(engine.term(id)));
    let restricted = term.restrict(generators, &points)?;
    if restricted != goal.target {
        return Err(ClosureError::Precondition("term disagrees with the target on re-evaluation".into()));
    }
    Ok(Interpolation::Found {
        term,
        states: engine.states.len(),
    })
}

/// A restriction reached during [`explore`].
#[derive(Debug, Clone, Serialize)]
pub struct Explored {
    pub term: Term,
    pub sample: FunctionSample,
}

/// All restrictions to `points` reachable up to `depth_cap`, one per key.
/// The flag is true when no limit was hit.
pub fn explore(generators: &[FunctionSample], points: &[Vec<Vertex>], depth_cap: usize, region_bound: &Vertex, limits: SearchLimits) -> (Vec<Explored>, bool) {
    let never = |_: &[Vertex]| false;
    let mut engine = Engine::new(generators, points.to_vec(), region_bound, limits);
    engine.start(&never);
    for depth in 2..=depth_cap {
        match engine.level(depth, &never) {
            LevelEnd::Continue => {}
            _ => break,
        }
    }
    let arity = points.first().map_or(1, Vec::len);
    let out = (0..engine.states.len())
        .map(|id| Explored {
            term: engine.term(id),
            sample: FunctionSample::new(arity, points.iter().cloned().zip(engine.states[id].values.iter().cloned())).expect("arity"),
        })
        .collect();
    (out, !engine.capped)
}

/// One edge deletion: where the graph was placed and what it became.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeDeletion {
    /// `placement[i]` is the domain point receiving vertex `i` of the graph.
    pub placement: Vec<Vertex>,
    /// `images[i]` is the value of `e` at `placement[i]`.
    pub images: Vec<Vertex>,
    /// The graph on the same labels with the adjacency of the images.
    pub result: FiniteGraph,
}

/// Checks that `e` is injective, maps the edge `{c1, c2}` to a non-edge and
/// preserves every other pair of its domain.
pub fn check_edge_deleter(e: &FunctionSample, constants: (&Vertex, &Vertex)) -> Result<(), ClosureError> {
    let (c1, c2) = constants;
    if e.arity() != 1 {
        return Err(ClosureError::Precondition("the sample must be unary".into()));
    }
    if !bit_adjacent(c1, c2) {
        return Err(ClosureError::Precondition(format!("constants {c1} and {c2} are not adjacent")));
    }
    let domain: Vec<Vertex> = e.unary_domain().into_iter().collect();
    for c in [c1, c2] {
        if !domain.contains(c) {
            return Err(ClosureError::Precondition(format!("constant {c} is outside the domain")));
        }
    }
    if !e.is_injective() {
        return Err(ClosureError::Precondition("the sample is not injective".into()));
    }
    for (i, x) in domain.iter().enumerate() {
        for y in &domain[i + 1..] {
            let constant_pair = (x == c1 && y == c2) || (x == c2 && y == c1);
            let expected = bit_adjacent(x, y) && !constant_pair;
            if bit_adjacent(e.at(x).expect("domain"), e.at(y).expect("domain")) != expected {
                return Err(ClosureError::Precondition(format!("pair ({x}, {y}) does not behave like the identity with the constant edge deleted")));
            }
        }
    }
    Ok(())
}

/// Moves `g` into the domain of `e` with the endpoints of `edge` on the
/// constants, then applies `e`: the result is `g` without that edge.
pub fn delete_one_edge(e: &FunctionSample, constants: (&Vertex, &Vertex), g: &FiniteGraph, edge: (usize, usize)) -> Result<EdgeDeletion, ClosureError> {
    check_edge_deleter(e, constants)?;
    let (a, b) = edge;
    if a >= g.len() || b >= g.len() || a == b || !g.adjacent(a, b) {
        return Err(ClosureError::Precondition(format!("({a}, {b}) is not an edge of the graph")));
    }
    let domain: Vec<Vertex> = e.unary_domain().into_iter().filter(|v| v != constants.0 && v != constants.1).collect();
    let mut placement: Vec<Option<Vertex>> = vec![None; g.len()];
    placement[a] = Some(constants.0.clone());
    placement[b] = Some(constants.1.clone());
    let order: Vec<usize> = (0..g.len()).filter(|&i| i != a && i != b).collect();
    if !place(g, &order, &domain, &mut placement) {
        return Err(ClosureError::NoPlacement);
    }
    let placement: Vec<Vertex> = placement.into_iter().map(|p| p.expect("placed")).collect();
    let images: Vec<Vertex> = placement.iter().map(|p| e.at(p).expect("domain").clone()).collect();
    let result = FiniteGraph::from_fn(g.len(), |i, j| bit_adjacent(&images[i], &images[j]));
    let result = FiniteGraph::new(g.vertices().to_vec(), &result.edge_indices().iter().map(|&(i, j)| (g.vertex(i).clone(), g.vertex(j).clone())).collect::<Vec<_>>())
        .expect("same labels");
    Ok(EdgeDeletion { placement, images, result })
}

fn place(g: &FiniteGraph, order: &[usize], domain: &[Vertex], placement: &mut [Option<Vertex>]) -> bool {
    let Some((&i, rest)) = order.split_first() else {
        return true;
    };
    for v in domain {
        if placement.iter().flatten().any(|p| p == v) {
            continue;
        }
        let fits = placement
            .iter()
            .enumerate()
            .all(|(j, p)| p.as_ref().is_none_or(|p| bit_adjacent(p, v) == g.adjacent(i, j)));
        if fits {
            placement[i] = Some(v.clone());
            if place(g, rest, domain, placement) {
                return true;
            }
            placement[i] = None;
        }
    }
    false
}

/// Deletes the edges in turn, lowest index pair first, until none is left.
pub fn delete_all_edges(e: &FunctionSample, constants: (&Vertex, &Vertex), g: &FiniteGraph) -> Result<Vec<EdgeDeletion>, ClosureError> {
    let mut current = g.clone();
    let mut steps = Vec::new();
    while let Some(&edge) = current.edge_indices().first() {
        let step = delete_one_edge(e, constants, &current, edge)?;
        current = step.result.clone();
        steps.push(step);
    }
    Ok(steps)
}
