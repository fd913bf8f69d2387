use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

/// Identifier used for variables, binders and instruction families.
pub type Name = Arc<str>;

/// Host-side reduction rule attached to a probe instruction.
///
/// The machine hands the rule the stack found under the probe and expects
/// either a new process, a halt, or a stuck diagnostic back.
pub trait ProbeRule: Send + Sync + fmt::Debug {
    fn fire(&self, stack: &Stack) -> ProbeFiring;
}

#[derive(Debug, Clone)]
pub enum ProbeFiring {
    Continue(Process),
    Halt,
    Stuck(String),
}

#[derive(Clone, Debug)]
pub enum Instruction {
    Cc,
    Chi,
    ChiPrime,
    Sigma,
    V,
    /// The runtime constant `ξk_π` produced by `V`.
    AppliedCont(Arc<Term>, Arc<Stack>),
    StoreT(Name),
    StoreS(Name),
    Opaque(Name),
    Probe(Name, Option<Arc<dyn ProbeRule>>),
}

impl Instruction {
    /// Stable tag used in diagnostics.
    pub fn symbol(&self) -> String {
        match self {
            Instruction::Cc => "cc".into(),
            Instruction::Chi => "chi".into(),
            Instruction::ChiPrime => "chi_prime".into(),
            Instruction::Sigma => "sigma".into(),
            Instruction::V => "V".into(),
            Instruction::AppliedCont(..) => "applied_cont".into(),
            Instruction::StoreT(u) => format!("T[{u}]"),
            Instruction::StoreS(u) => format!("S[{u}]"),
            Instruction::Opaque(n) => format!("#{n}"),
            Instruction::Probe(n, _) => format!("@{n}"),
        }
    }
}

impl PartialEq for Instruction {
    fn eq(&self, other: &Self) -> bool {
        use Instruction::*;
        match (self, other) {
            (Cc, Cc) | (Chi, Chi) | (ChiPrime, ChiPrime) | (Sigma, Sigma) | (V, V) => true,
            (AppliedCont(a, s), AppliedCont(b, t)) => a == b && s == t,
            (StoreT(a), StoreT(b)) | (StoreS(a), StoreS(b)) | (Opaque(a), Opaque(b)) => a == b,
            (Probe(a, pa), Probe(b, pb)) => {
                a == b
                    && match (pa, pb) {
                        (None, None) => true,
                        (Some(x), Some(y)) => Arc::ptr_eq(x, y),
                        _ => false,
                    }
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Var(Name),
    Lam(Name, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Inst(Instruction),
    /// Continuation constant `k_π`.
    Cont(Arc<Stack>),
    /// Inert sequence token `U<n>`.
    Seq(Name, u64),
}

/// Machine stack. Items are stored bottom first; index 0 of the public API is the top.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Stack {
    items: Vec<Term>,
    pub base: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Process {
    pub term: Term,
    pub stack: Stack,
}

pub fn var(name: &str) -> Term {
    Term::Var(name.into())
}

pub fn lam(binder: &str, body: Term) -> Term {
    Term::Lam(binder.into(), Arc::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Arc::new(f), Arc::new(a))
}

/// Left-nested application `f a1 a2 …`.
pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
    args.into_iter().fold(f, app)
}

pub fn inst(i: Instruction) -> Term {
    Term::Inst(i)
}

pub fn opaque(name: &str) -> Term {
    Term::Inst(Instruction::Opaque(name.into()))
}

pub fn probe(name: &str) -> Term {
    Term::Inst(Instruction::Probe(name.into(), None))
}

pub fn probe_with(name: &str, rule: Arc<dyn ProbeRule>) -> Term {
    Term::Inst(Instruction::Probe(name.into(), Some(rule)))
}

impl Term {
    pub fn is_closed(&self) -> bool {
        free_vars(self).is_empty()
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(a.as_ref());
            head = f.as_ref();
        }
        args.reverse();
        (head, args)
    }

    /// True for quasi-proofs: variables, abstractions, applications and `cc` only.
    pub fn is_quasi_proof(&self) -> bool {
        match self {
            Term::Var(_) | Term::Inst(Instruction::Cc) => true,
            Term::Lam(_, b) => b.is_quasi_proof(),
            Term::App(f, a) => f.is_quasi_proof() && a.is_quasi_proof(),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Lam(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            _ => 1,
        }
    }
}

impl Stack {
    pub fn new(base: u32) -> Self {
        Stack { items: Vec::new(), base }
    }

    /// Builds a stack from items listed top first.
    pub fn from_top_first(items: impl IntoIterator<Item = Term>, base: u32) -> Self {
        let mut items: Vec<Term> = items.into_iter().collect();
        items.reverse();
        Stack { items, base }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Term) {
        self.items.push(t);
    }

    pub fn pop(&mut self) -> Option<Term> {
        self.items.pop()
    }

    pub fn top(&self) -> Option<&Term> {
        self.items.last()
    }

    /// Item `i` counted from the top.
    pub fn get(&self, i: usize) -> Option<&Term> {
        self.items.len().checked_sub(i + 1).map(|k| &self.items[k])
    }

    pub fn iter_top_first(&self) -> impl DoubleEndedIterator<Item = &Term> + ExactSizeIterator {
        self.items.iter().rev()
    }

    pub fn to_top_first(&self) -> Vec<Term> {
        self.iter_top_first().cloned().collect()
    }

    /// Item adjacent to the stack constant.
    pub fn bottom(&self) -> Option<&Term> {
        self.items.first()
    }

    /// `π^τ`: adds `τ` at the bottom, next to the stack constant.
    pub fn push_bottom(&mut self, t: Term) {
        self.items.insert(0, t);
    }

    pub fn pop_bottom(&mut self) -> Option<Term> {
        if self.items.is_empty() {
            None
        } else {
            Some(self.items.remove(0))
        }
    }

    pub fn with_bottom(mut self, t: Term) -> Self {
        self.push_bottom(t);
        self
    }
}

impl Process {
    pub fn new(term: Term, stack: Stack) -> Self {
        Process { term, stack }
    }
}

/// Exact set of free variables.
pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(t, &mut bound, &mut out);
    out
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        _ => {}
    }
}

fn occurs_free(t: &Term, x: &str) -> bool {
    match t {
        Term::Var(y) => y.as_ref() == x,
        Term::Lam(y, b) => y.as_ref() != x && occurs_free(b, x),
        Term::App(f, a) => occurs_free(f, x) || occurs_free(a, x),
        _ => false,
    }
}

/// Picks `base`, `base'`, `base''`, … avoiding every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &dyn Fn(&str) -> bool) -> Name {
    let mut candidate = base.to_string();
    while avoid(&candidate) {
        candidate.push('\'');
    }
    candidate.into()
}

/// Single-variable substitution of a closed term; the machine's grab rule.
pub fn subst_closed(t: &Term, x: &str, v: &Term) -> Term {
    match t {
        Term::Var(y) if y.as_ref() == x => v.clone(),
        Term::Lam(y, b) if y.as_ref() != x && occurs_free(b, x) => {
            Term::Lam(y.clone(), Arc::new(subst_closed(b, x, v)))
        }
        Term::App(f, a) => {
            let f2 = if occurs_free(f, x) { Arc::new(subst_closed(f, x, v)) } else { f.clone() };
            let a2 = if occurs_free(a, x) { Arc::new(subst_closed(a, x, v)) } else { a.clone() };
            Term::App(f2, a2)
        }
        _ => t.clone(),
    }
}

/// Simultaneous capture-avoiding substitution.
///
/// Replacements may be open; binders that would capture a free variable of a
/// replacement, or that collide with a substituted name, are renamed.
pub fn substitute(t: &Term, bindings: &HashMap<Name, Term>) -> Term {
    if bindings.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(x) => bindings.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, a) => app(substitute(f, bindings), substitute(a, bindings)),
        Term::Lam(x, b) => {
            let mut inner: HashMap<Name, Term> = bindings
                .iter()
                .filter(|(k, _)| *k != x && occurs_free(b, k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return t.clone();
            }
            let captured = inner.values().any(|v| occurs_free(v, x));
            if captured {
                let body_fv = free_vars(b);
                let repl_fv: BTreeSet<Name> = inner.values().flat_map(free_vars).collect();
                let fresh = fresh_name(x, &|c: &str| {
                    body_fv.contains(c) || repl_fv.contains(c) || inner.contains_key(c)
                });
                inner.insert(x.clone(), Term::Var(fresh.clone()));
                Term::Lam(fresh, Arc::new(substitute(b, &inner)))
            } else {
                Term::Lam(x.clone(), Arc::new(substitute(b, &inner)))
            }
        }
        _ => t.clone(),
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    alpha_eq_in(a, b, &mut Vec::new())
}

fn alpha_eq_in(a: &Term, b: &Term, env: &mut Vec<(Name, Name)>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if l == x || r == y {
                    return l == x && r == y;
                }
            }
            x == y
        }
        (Term::Lam(x, s), Term::Lam(y, t)) => {
            env.push((x.clone(), y.clone()));
            let eq = alpha_eq_in(s, t, env);
            env.pop();
            eq
        }
        (Term::App(f, s), Term::App(g, t)) => alpha_eq_in(f, g, env) && alpha_eq_in(s, t, env),
        (Term::Cont(s), Term::Cont(t)) => stack_alpha_eq(s, t),
        (Term::Inst(Instruction::AppliedCont(x, s)), Term::Inst(Instruction::AppliedCont(y, t))) => {
            alpha_eq(x, y) && stack_alpha_eq(s, t)
        }
        (Term::Inst(i), Term::Inst(j)) => i == j,
        (Term::Seq(u, n), Term::Seq(v, m)) => u == v && n == m,
        _ => false,
    }
}

/// Item-wise alpha-equivalence with identical stack constants.
pub fn stack_alpha_eq(s: &Stack, t: &Stack) -> bool {
    s.base == t.base
        && s.len() == t.len()
        && s.items.iter().zip(t.items.iter()).all(|(a, b)| alpha_eq(a, b))
}

pub fn process_alpha_eq(p: &Process, q: &Process) -> bool {
    alpha_eq(&p.term, &q.term) && stack_alpha_eq(&p.stack, &q.stack)
}

/// Canonical nameless rendering; equal strings iff alpha-equivalent terms.
pub fn nameless_key(t: &Term) -> String {
    let mut out = String::new();
    write_nameless(t, &mut Vec::new(), &mut out);
    out
}

/// Canonical nameless rendering of a stack.
pub fn stack_key(s: &Stack) -> String {
    let mut out = format!("π{}", s.base);
    for item in s.iter_top_first() {
        out.push('|');
        write_nameless(item, &mut Vec::new(), &mut out);
    }
    out
}

fn write_nameless(t: &Term, env: &mut Vec<Name>, out: &mut String) {
    use std::fmt::Write;
    match t {
        Term::Var(x) => match env.iter().rev().position(|y| y == x) {
            Some(i) => {
                let _ = write!(out, "{i}");
            }
            None => {
                let _ = write!(out, "${x}");
            }
        },
        Term::Lam(x, b) => {
            out.push('L');
            env.push(x.clone());
            write_nameless(b, env, out);
            env.pop();
        }
        Term::App(f, a) => {
            out.push('(');
            write_nameless(f, env, out);
            out.push(' ');
            write_nameless(a, env, out);
            out.push(')');
        }
        Term::Cont(s) => {
            out.push_str("k[");
            out.push_str(&stack_key(s));
            out.push(']');
        }
        Term::Inst(Instruction::AppliedCont(x, s)) => {
            out.push_str("ak[");
            write_nameless(x, &mut Vec::new(), out);
            out.push(';');
            out.push_str(&stack_key(s));
            out.push(']');
        }
        Term::Inst(i) => {
            out.push('!');
            out.push_str(&i.symbol());
        }
        Term::Seq(u, n) => {
            let _ = write!(out, "{u}<{n}>");
        }
    }
}
