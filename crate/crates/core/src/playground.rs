//! Eventually periodic subsets of ℕ as a concrete model of conditions:
//! the meet, the infinitude predicate `C[X]`, the order `X ≤ Y`, the
//! chain-condition meet, the selector `Prem`, and machine realizers of `C[X]`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use thiserror::Error;

use crate::combinators::{church, identity, pair};
use crate::machine::decode_numeral;
use crate::syntax::{apps, lam, probe_with, var, Process, ProbeFiring, ProbeRule, Stack, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaygroundError {
    #[error("set syntax error: {0}")]
    Syntax(String),
    #[error("set {0} is finite")]
    Finite(String),
    #[error("chain is not decreasing at index {0}")]
    NotDecreasing(usize),
    #[error("empty chain")]
    EmptyChain,
    #[error("partition syntax error: {0}")]
    Partition(String),
}

/// A set given by a finite prefix followed by a repeating period.
///
/// Values are always canonical: the period is primitive and the prefix does
/// not end with a copy of the period's last bit.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EvSet {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

impl EvSet {
    /// Builds and canonicalizes; an empty period is read as `0`.
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> EvSet {
        let period = if period.is_empty() { vec![false] } else { period };
        let mut s = EvSet { prefix, period };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        let n = self.period.len();
        if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| self.period[i] == self.period[i - d])) {
            self.period.truncate(d);
        }
        while let Some(&last) = self.prefix.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.prefix.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn unit() -> EvSet {
        EvSet::new(vec![], vec![true])
    }

    pub fn empty() -> EvSet {
        EvSet::new(vec![], vec![false])
    }

    /// `{n : n ≡ r (mod k)}`
    pub fn residue(k: usize, r: usize) -> EvSet {
        assert!(k > 0, "modulus must be positive");
        EvSet::new(vec![], (0..k).map(|i| i == r % k).collect())
    }

    /// A finite set.
    pub fn finite(members: &[u64]) -> EvSet {
        let len = members.iter().max().map_or(0, |m| *m as usize + 1);
        let mut prefix = vec![false; len];
        for &m in members {
            prefix[m as usize] = true;
        }
        EvSet::new(prefix, vec![false])
    }

    /// `{m : m > k}`
    pub fn above(k: u64) -> EvSet {
        EvSet::new(vec![false; k as usize + 1], vec![true])
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn contains(&self, n: u64) -> bool {
        let n = n as usize;
        match self.prefix.get(n) {
            Some(&b) => b,
            None => self.period[(n - self.prefix.len()) % self.period.len()],
        }
    }

    fn zip(&self, other: &EvSet, op: impl Fn(bool, bool) -> bool) -> EvSet {
        let l0 = self.prefix.len().max(other.prefix.len());
        let l1 = self.period.len().lcm(&other.period.len());
        let bit = |n: usize| op(self.contains(n as u64), other.contains(n as u64));
        EvSet::new((0..l0).map(bit).collect(), (l0..l0 + l1).map(bit).collect())
    }

    pub fn meet(&self, other: &EvSet) -> EvSet {
        self.zip(other, |a, b| a && b)
    }

    pub fn join(&self, other: &EvSet) -> EvSet {
        self.zip(other, |a, b| a || b)
    }

    pub fn diff(&self, other: &EvSet) -> EvSet {
        self.zip(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> EvSet {
        EvSet::new(self.prefix.iter().map(|b| !b).collect(), self.period.iter().map(|b| !b).collect())
    }

    /// `C[X]`: infinitely many members.
    pub fn is_infinite(&self) -> bool {
        self.period.contains(&true)
    }

    /// `X ≤ Y`: `X ∖ Y` is finite.
    pub fn leq_cond(&self, other: &EvSet) -> bool {
        !self.diff(other).is_infinite()
    }

    /// Least member `≥ n`, if any.
    pub fn next_member(&self, n: u64) -> Option<u64> {
        let horizon = n.max(self.prefix.len() as u64) + self.period.len() as u64;
        (n..horizon).find(|&m| self.contains(m))
    }

    /// Members below `bound`.
    pub fn members_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        (0..bound).filter(|&m| self.contains(m))
    }
}

fn bits(s: &str) -> Result<Vec<bool>, PlaygroundError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(PlaygroundError::Syntax(format!("`{c}` is not a bit"))),
        })
        .collect()
}

impl FromStr for EvSet {
    type Err = PlaygroundError;

    /// `prefix:period` in bits, e.g. `:10` for the even numbers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let Some((pre, per)) = s.split_once(':') else {
            return Err(PlaygroundError::Syntax(format!("`{s}` lacks `:`")));
        };
        let period = bits(per)?;
        if period.is_empty() {
            return Err(PlaygroundError::Syntax("empty period".into()));
        }
        Ok(EvSet::new(bits(pre)?, period))
    }
}

impl fmt::Display for EvSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(f, "{}:{}", show(&self.prefix), show(&self.period))
    }
}

/// Output of [`chain_meet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMeet {
    /// `(j, f(j))` for `j` below the last chain index.
    pub table: Vec<(u64, u64)>,
    /// The image of `f`: the table values together with every member of
    /// the whole intersection above the last index.
    pub image: EvSet,
    intersections: Vec<EvSet>,
}

impl ChainMeet {
    /// `f(j)`: the least `n > j` in `A_0 ∩ … ∩ A_j`, the last set repeating.
    pub fn f(&self, j: u64) -> u64 {
        let k = (j as usize).min(self.intersections.len() - 1);
        self.intersections[k].next_member(j + 1).expect("intersections are infinite")
    }
}

/// Meet of a finite decreasing chain of infinite sets, read through
/// `f(j) = min{n > j : n ∈ A_0 ∩ … ∩ A_j}`.
pub fn chain_meet(seq: &[EvSet]) -> Result<ChainMeet, PlaygroundError> {
    if seq.is_empty() {
        return Err(PlaygroundError::EmptyChain);
    }
    if let Some(a) = seq.iter().find(|a| !a.is_infinite()) {
        return Err(PlaygroundError::Finite(a.to_string()));
    }
    if let Some(i) = (1..seq.len()).find(|&i| !seq[i].leq_cond(&seq[i - 1])) {
        return Err(PlaygroundError::NotDecreasing(i));
    }
    let mut intersections = vec![seq[0].clone()];
    for a in &seq[1..] {
        let next = intersections.last().unwrap().meet(a);
        intersections.push(next);
    }
    let last = seq.len() as u64 - 1;
    let mut cm = ChainMeet { table: Vec::new(), image: EvSet::empty(), intersections };
    cm.table = (0..last).map(|j| (j, cm.f(j))).collect();
    let values: Vec<u64> = cm.table.iter().map(|e| e.1).collect();
    let tail = cm.intersections.last().unwrap().meet(&EvSet::above(last));
    cm.image = EvSet::finite(&values).join(&tail);
    Ok(cm)
}

/// A partition of ℕ given by a class function.
#[derive(Clone)]
pub enum PartitionSpec {
    /// Classes `n mod k`.
    Mod(u64),
    /// Finite blocks `n div k`.
    Div(u64),
    Custom(Arc<dyn Fn(u64) -> u64 + Send + Sync>),
}

impl PartitionSpec {
    pub fn class_of(&self, n: u64) -> u64 {
        match self {
            PartitionSpec::Mod(k) => n % k,
            PartitionSpec::Div(k) => n / k,
            PartitionSpec::Custom(f) => f(n),
        }
    }
}

impl fmt::Debug for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionSpec::Mod(k) => write!(f, "mod{k}"),
            PartitionSpec::Div(k) => write!(f, "div{k}"),
            PartitionSpec::Custom(_) => f.write_str("custom"),
        }
    }
}

impl FromStr for PartitionSpec {
    type Err = PlaygroundError;

    /// `mod<k>` or `div<k>` with `k ≥ 1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PlaygroundError::Partition(format!("`{s}`; expected mod<k> or div<k>"));
        let (ctor, digits): (fn(u64) -> PartitionSpec, &str) = if let Some(d) = s.strip_prefix("mod") {
            (PartitionSpec::Mod, d)
        } else if let Some(d) = s.strip_prefix("div") {
            (PartitionSpec::Div, d)
        } else {
            return Err(bad());
        };
        match digits.parse::<u64>() {
            Ok(k) if k > 0 => Ok(ctor(k)),
            _ => Err(bad()),
        }
    }
}

/// `{j ≤ bound : j ∈ X, and no earlier member of X shares j's class}`.
pub fn prem_set(x: &EvSet, z: &PartitionSpec, bound: u64) -> Vec<u64> {
    let mut seen = std::collections::HashSet::new();
    (0..=bound).filter(|&j| x.contains(j) && seen.insert(z.class_of(j))).collect()
}

/// A set built from leaves by meets; the shape decides the witness term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetExpr {
    Leaf(EvSet),
    Meet(Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    pub fn meet(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::Meet(Box::new(a), Box::new(b))
    }

    pub fn eval(&self) -> EvSet {
        match self {
            SetExpr::Leaf(x) => x.clone(),
            SetExpr::Meet(a, b) => a.eval().meet(&b.eval()),
        }
    }

    /// `I` at leaves, Church pairs at meets.
    pub fn witness(&self) -> Term {
        match self {
            SetExpr::Leaf(_) => identity(),
            SetExpr::Meet(a, b) => pair(a.witness(), b.witness()),
        }
    }
}

/// Decoding budget for the numeral argument of `find`.
const FIND_FUEL: u64 = 100_000;

/// `find[X] ⋆ m̄·h·π ≻ h ⋆ n̄·w·π` with `n` least such that `m+n ∈ X`.
#[derive(Debug)]
struct FindRule {
    set: EvSet,
    witness: Term,
}

impl ProbeRule for FindRule {
    fn fire(&self, stack: &Stack) -> ProbeFiring {
        let mut stack = stack.clone();
        let (Some(m), Some(h)) = (stack.pop(), stack.pop()) else {
            return ProbeFiring::Stuck("find needs two arguments".into());
        };
        let m = match decode_numeral(&m, FIND_FUEL) {
            Ok(m) => m,
            Err(e) => return ProbeFiring::Stuck(format!("first argument is not a numeral: {e}")),
        };
        let Some(hit) = self.set.next_member(m) else {
            return ProbeFiring::Stuck(format!("no member of {} at or above {m}", self.set));
        };
        stack.push(self.witness.clone());
        stack.push(church(hit - m));
        ProbeFiring::Continue(Process::new(h, stack))
    }
}

/// `λm.λh.(find[X])m h`, a realizer of `C[X]` for infinite `X`.
pub fn c_realizer(x: &SetExpr) -> Result<Term, PlaygroundError> {
    let set = x.eval();
    if !set.is_infinite() {
        return Err(PlaygroundError::Finite(set.to_string()));
    }
    let rule = Arc::new(FindRule { set, witness: x.witness() });
    let find = probe_with("find", rule);
    Ok(lam("m", lam("h", apps(find, [var("m"), var("h")]))))
}
