//! Condition trees over the meet-semilattice and the generator moves
//! `α₀ … α₄` acting on them.
//!
//! A [`Coercion`] is a certified sequence of generators; its program is the
//! composite `(α_{i₁})…(α_{i_k})τ`, with the rightmost generator applied first.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinators;
use crate::syntax::{app, inst, lam, var, Instruction, Name, Term};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Cond {
    Var(Name),
    Unit,
    Meet(Box<Cond>, Box<Cond>),
}

pub fn cvar(name: &str) -> Cond {
    Cond::Var(name.into())
}

pub fn meet(a: Cond, b: Cond) -> Cond {
    Cond::Meet(Box::new(a), Box::new(b))
}

impl Cond {
    pub fn leaves(&self) -> usize {
        match self {
            Cond::Meet(a, b) => a.leaves() + b.leaves(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Cond::Meet(a, b) => 1 + a.depth().max(b.depth()),
            _ => 1,
        }
    }

    /// Renames variables according to `map`; unmapped variables are kept.
    pub fn rename(&self, map: &HashMap<Name, Name>) -> Cond {
        match self {
            Cond::Var(x) => Cond::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
            Cond::Unit => Cond::Unit,
            Cond::Meet(a, b) => meet(a.rename(map), b.rename(map)),
        }
    }

    /// Replaces variables by condition trees.
    pub fn substitute(&self, map: &HashMap<Name, Cond>) -> Cond {
        match self {
            Cond::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Cond::Unit => Cond::Unit,
            Cond::Meet(a, b) => meet(a.substitute(map), b.substitute(map)),
        }
    }
}

/// Variables occurring in `t`; the unit contributes nothing.
pub fn support(t: &Cond) -> BTreeSet<Name> {
    fn go(t: &Cond, out: &mut BTreeSet<Name>) {
        match t {
            Cond::Var(x) => {
                out.insert(x.clone());
            }
            Cond::Unit => {}
            Cond::Meet(a, b) => {
                go(a, out);
                go(b, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

/// `dst` is obtainable from `src` by generator moves iff its support is
/// contained in that of `src`.
pub fn reachable(src: &Cond, dst: &Cond) -> bool {
    support(dst).is_subset(&support(src))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CondError {
    #[error("α{index} does not apply to {term}")]
    Shape { index: u8, term: String },
    #[error("generator index {0} out of range 0..=4")]
    BadIndex(u8),
    #[error("{src} cannot be coerced to {dst}: support not contained")]
    NotReachable { src: String, dst: String },
    #[error("condition syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("coercion certificate failed for {src} → {dst}")]
    Certificate { src: String, dst: String },
}

/// One root-level generator move.
pub fn apply_generator(i: u8, t: &Cond) -> Result<Cond, CondError> {
    let shape = || CondError::Shape { index: i, term: t.to_string() };
    match i {
        0 => match t {
            Cond::Meet(p, _) => Ok((**p).clone()),
            _ => Err(shape()),
        },
        1 => match t {
            Cond::Meet(p, q) => Ok(meet((**q).clone(), (**p).clone())),
            _ => Err(shape()),
        },
        2 => Ok(meet(t.clone(), t.clone())),
        3 => match t {
            Cond::Meet(p, qr) => match qr.as_ref() {
                Cond::Meet(q, r) => Ok(meet(meet((**p).clone(), (**q).clone()), (**r).clone())),
                _ => Err(shape()),
            },
            _ => Err(shape()),
        },
        4 => Ok(meet(t.clone(), Cond::Unit)),
        _ => Err(CondError::BadIndex(i)),
    }
}

/// A generator sequence with its source and target.
///
/// `generators` is written as in `(α_{i₁})…(α_{i_k})`: the last entry is
/// applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coercion {
    pub source: Cond,
    pub target: Cond,
    pub generators: Vec<u8>,
}

impl Coercion {
    /// Builds a coercion from moves listed in application order.
    pub fn from_moves(source: Cond, target: Cond, moves: &[u8]) -> Self {
        let mut generators = moves.to_vec();
        generators.reverse();
        Coercion { source, target, generators }
    }

    /// Moves in application order.
    pub fn moves(&self) -> Vec<u8> {
        self.generators.iter().rev().copied().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CoercionJson::from(self)).expect("coercion serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CondError> {
        let j: CoercionJson =
            serde_json::from_str(s).map_err(|e| CondError::Syntax { pos: e.column(), msg: e.to_string() })?;
        Ok(Coercion { source: parse_cond(&j.src)?, target: parse_cond(&j.dst)?, generators: j.gens })
    }
}

#[derive(Serialize, Deserialize)]
struct CoercionJson {
    src: String,
    dst: String,
    gens: Vec<u8>,
}

impl From<&Coercion> for CoercionJson {
    fn from(c: &Coercion) -> Self {
        CoercionJson { src: c.source.to_string(), dst: c.target.to_string(), gens: c.generators.clone() }
    }
}

/// Replays the generators from the source and compares with the target.
pub fn check_coercion(c: &Coercion) -> bool {
    let mut t = c.source.clone();
    for &i in c.generators.iter().rev() {
        match apply_generator(i, &t) {
            Ok(next) => t = next,
            Err(_) => return false,
        }
    }
    t == c.target
}

/// Moves in application order.
mod ops {
    /// (a R) → (a (a R))
    pub const DUP: &[u8] = &[2, 3, 0, 1];
    /// (a (b R)) → ((a b) R)
    pub const PAIR: &[u8] = &[3];
    /// (a (b R)) → (b R)
    pub const DROP: &[u8] = &[1, 0];
    /// (a R) → (1 (a R))
    pub const PUSH_UNIT: &[u8] = &[4, 1];
    /// (a (b R)) → (b (a R))
    pub const SWAP: &[u8] = &[1, 2, 3, 0, 3, 1, 3, 0, 3, 1, 3, 3, 0, 1];
    /// ((a b) R) → (a R)
    pub const FIRST: &[u8] = &[1, 3, 0, 1];
    /// ((a b) R) → (b R)
    pub const SECOND: &[u8] = &[1, 3, 1, 3, 0];
}

/// Limits for the shortest-path search tried before the structural compiler.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub max_nodes: usize,
    /// Extra leaves allowed above the larger of source and target.
    pub leaf_slack: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_depth: 10, max_nodes: 20_000, leaf_slack: 2 }
    }
}

/// A certified coercion from `src` to `dst`.
///
/// A bounded breadth-first search over generator moves is tried first; if it
/// finds nothing the target is compiled structurally, treating the tree as a
/// stack `(top rest)` with a unit sentinel and using fixed move macros for
/// duplicate, swap, pair, drop and projection.
pub fn synthesize(src: &Cond, dst: &Cond) -> Result<Coercion, CondError> {
    synthesize_with(src, dst, SearchBudget::default())
}

pub fn synthesize_with(src: &Cond, dst: &Cond, budget: SearchBudget) -> Result<Coercion, CondError> {
    if !reachable(src, dst) {
        return Err(CondError::NotReachable { src: src.to_string(), dst: dst.to_string() });
    }
    let moves = match search(src, dst, budget) {
        Some(m) => m,
        None => peephole(src, structural_moves(src, dst)),
    };
    let c = Coercion::from_moves(src.clone(), dst.clone(), &moves);
    if check_coercion(&c) {
        Ok(c)
    } else {
        Err(CondError::Certificate { src: src.to_string(), dst: dst.to_string() })
    }
}

fn search(src: &Cond, dst: &Cond, budget: SearchBudget) -> Option<Vec<u8>> {
    if src == dst {
        return Some(Vec::new());
    }
    let cap = src.leaves().max(dst.leaves()) + budget.leaf_slack;
    let mut parent: HashMap<Cond, (Cond, u8)> = HashMap::new();
    let mut queue = VecDeque::from([(src.clone(), 0usize)]);
    let mut seen = BTreeSet::from([src.clone()]);
    while let Some((t, d)) = queue.pop_front() {
        if d >= budget.max_depth {
            continue;
        }
        for i in 0..5u8 {
            let Ok(next) = apply_generator(i, &t) else { continue };
            if next.leaves() > cap || seen.contains(&next) {
                continue;
            }
            seen.insert(next.clone());
            parent.insert(next.clone(), (t.clone(), i));
            if &next == dst {
                let mut moves = Vec::new();
                let mut cur = next;
                while let Some((prev, i)) = parent.get(&cur) {
                    moves.push(*i);
                    cur = prev.clone();
                }
                moves.reverse();
                return Some(moves);
            }
            if seen.len() > budget.max_nodes {
                return None;
            }
            queue.push_back((next, d + 1));
        }
    }
    None
}

struct Compiler {
    state: Cond,
    moves: Vec<u8>,
}

impl Compiler {
    fn emit(&mut self, ops: &[u8]) {
        for &i in ops {
            self.state = apply_generator(i, &self.state).expect("move macro applies to stack shape");
            self.moves.push(i);
        }
    }

    fn top(&self) -> &Cond {
        match &self.state {
            Cond::Meet(a, _) => a,
            _ => unreachable!("compiler state is always (top rest)"),
        }
    }

    /// (X R) → (d R), consuming X.
    fn build(&mut self, d: &Cond) {
        match d {
            Cond::Var(v) => self.extract(v),
            Cond::Unit => {
                self.emit(ops::PUSH_UNIT);
                self.emit(ops::SWAP);
                self.emit(ops::DROP);
            }
            Cond::Meet(d1, d2) => {
                self.emit(ops::DUP);
                self.build(d1);
                self.emit(ops::SWAP);
                self.build(d2);
                self.emit(ops::SWAP);
                self.emit(ops::PAIR);
            }
        }
    }

    /// (X R) → (v R) for v in the support of X.
    fn extract(&mut self, v: &Name) {
        loop {
            match self.top().clone() {
                Cond::Var(_) => return,
                Cond::Meet(a, _) => {
                    if support(&a).contains(v) {
                        self.emit(ops::FIRST);
                    } else {
                        self.emit(ops::SECOND);
                    }
                }
                Cond::Unit => unreachable!("extract target lies in the support"),
            }
        }
    }
}

fn structural_moves(src: &Cond, dst: &Cond) -> Vec<u8> {
    let mut c = Compiler { state: src.clone(), moves: Vec::new() };
    c.emit(&[4]);
    c.build(dst);
    c.emit(&[0]);
    c.moves
}

/// Removes adjacent move pairs that cancel: `α₁α₁`, `α₂` then `α₀`, `α₄` then `α₀`.
fn peephole(src: &Cond, moves: Vec<u8>) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(moves.len());
    for m in moves {
        match (out.last(), m) {
            (Some(1), 1) | (Some(2), 0) | (Some(4), 0) => {
                out.pop();
            }
            _ => out.push(m),
        }
    }
    // every cancelled pair is the identity on any tree it applies to
    debug_assert!({
        let mut t = src.clone();
        out.iter().all(|&i| apply_generator(i, &t).map(|n| t = n).is_ok())
    });
    out
}

/// `(α_{i₁})…(α_{i_k})τ`.
pub fn coercion_apply(c: &Coercion, arg: Term) -> Term {
    c.generators.iter().rev().fold(arg, |acc, &i| app(combinators::alpha(i), acc))
}

/// `λz.(α_{i₁})…(α_{i_k})z`.
pub fn coercion_term(c: &Coercion) -> Term {
    lam("z", coercion_apply(c, var("z")))
}

/// `λx.(χ)λy.(χ'x)(γ)y`: rewrites the bottom token in place, then continues with `x`.
pub fn gamma_bar(c: &Coercion) -> Term {
    let inner = app(app(inst(Instruction::ChiPrime), var("x")), coercion_apply(c, var("y")));
    lam("x", app(inst(Instruction::Chi), lam("y", inner)))
}

/// Synthesizes the coercion `src → dst` and returns its wrapper.
pub fn gamma_bar_for(src: &str, dst: &str) -> Result<Term, CondError> {
    Ok(gamma_bar(&synthesize(&parse_cond(src)?, &parse_cond(dst)?)?))
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn part(t: &Cond, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Cond::Meet(..) => write!(f, "({t})"),
                _ => write!(f, "{t}"),
            }
        }
        match self {
            Cond::Var(x) => f.write_str(x),
            Cond::Unit => f.write_str("1"),
            Cond::Meet(a, b) => {
                part(a, f)?;
                part(b, f)
            }
        }
    }
}

fn is_cond_suffix(c: char) -> bool {
    c == '\'' || ('₀'..='₉').contains(&c)
}

/// Parses `pq`, `p(qr)`, `(pq)r`, `1`; juxtaposition associates to the left.
/// Variables are single letters with optional primes or subscript digits.
pub fn parse_cond(src: &str) -> Result<Cond, CondError> {
    let chars: Vec<(usize, char)> = src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut i = 0;
    let t = parse_cond_seq(src, &chars, &mut i)?;
    if i < chars.len() {
        return Err(CondError::Syntax { pos: chars[i].0, msg: format!("unexpected `{}`", chars[i].1) });
    }
    Ok(t)
}

fn parse_cond_seq(src: &str, chars: &[(usize, char)], i: &mut usize) -> Result<Cond, CondError> {
    let mut acc: Option<Cond> = None;
    while let Some(&(pos, c)) = chars.get(*i) {
        let item = match c {
            ')' => break,
            '(' => {
                *i += 1;
                let inner = parse_cond_seq(src, chars, i)?;
                match chars.get(*i) {
                    Some((_, ')')) => *i += 1,
                    _ => return Err(CondError::Syntax { pos, msg: "unmatched parenthesis".into() }),
                }
                inner
            }
            '1' => {
                *i += 1;
                Cond::Unit
            }
            c if c.is_alphabetic() => {
                let mut name = String::from(c);
                *i += 1;
                while let Some(&(_, s)) = chars.get(*i) {
                    if !is_cond_suffix(s) {
                        break;
                    }
                    name.push(s);
                    *i += 1;
                }
                Cond::Var(Arc::from(name.as_str()))
            }
            other => return Err(CondError::Syntax { pos, msg: format!("unexpected `{other}`") }),
        };
        acc = Some(match acc {
            None => item,
            Some(a) => meet(a, item),
        });
    }
    acc.ok_or_else(|| CondError::Syntax {
        pos: chars.get(*i).map(|c| c.0).unwrap_or(src.len()),
        msg: "expected a condition".into(),
    })
}

/// Coercion goals used by the program translation, as (source, target).
pub const STAR_GOALS: [(&str, &str); 6] = [
    ("pq", "p(pq)"),
    ("(pq)r", "pr"),
    ("(pq)r", "qr"),
    ("p(qr)", "q(rr)"),
    ("p(qr)", "qp"),
    ("(pq)r", "p(qr)"),
];

/// The six composites `γ₀ … γ₅`, synthesized once.
pub fn star_gammas() -> &'static [Coercion; 6] {
    static CACHE: std::sync::OnceLock<[Coercion; 6]> = std::sync::OnceLock::new();
    CACHE.get_or_init(|| {
        STAR_GOALS.map(|(s, d)| {
            synthesize(&parse_cond(s).expect("goal parses"), &parse_cond(d).expect("goal parses"))
                .expect("goal is reachable")
        })
    })
}

/// The single-generator coercion `α₃`.
pub fn alpha3_coercion() -> Coercion {
    let src = parse_cond("p(qr)").expect("parses");
    let dst = parse_cond("(pq)r").expect("parses");
    Coercion { source: src, target: dst, generators: vec![3] }
}
