//! Derivation trees in classical second-order natural deduction, their
//! checker, and quasi-proof extraction.
//!
//! The `.drv` format is an s-expression tree; formulas are quoted strings in
//! the `.fml` syntax and `;` starts a comment:
//!
//! ```text
//! (context (h "A → B") (a "A"))
//! (mp (axiom h) (axiom a))
//! ```
//!
//! Node forms:
//!
//! | form | conclusion | extracted term |
//! |------|------------|----------------|
//! | `(axiom x)` | the context formula of `x` | `x` |
//! | `(mp D E)` | `B` from `D : A → B`, `E : A` | `(t)u` |
//! | `(intro x "A" D)` | `A → B` from `D : B` under `x : A` | `λx.t` |
//! | `(peirce "A" "B")` | `((A → B) → A) → A` | `cc` |
//! | `(gen "v" D)` | `∀v. F`; `v` is `x`, `X`, `X⁺` or `p^P` | `t` |
//! | `(gen-int x n D)` | `∀x^int. F` from `D : F` under `n : int(x)` | `λn.t` |
//! | `(inst D "t")` | `F[t/x]`; for `∀x^int` it is `int(t) → F[t/x]` | `t` |
//! | `(inst-pred D "F" x1 …)` | `B[F/X x1 …]` from `D : ∀X. B` | `t` |

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::text::{parse_ind_term, INT_PRED};
use super::{implies, parse_formula, subst_second_order, Formula, IndTerm, Subst};
use crate::conditions::{parse_cond, Cond};
use crate::syntax::{app, inst, lam, var, Instruction, Name, Term};

/// Variable bound by a `gen` node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binder {
    Ind(Name),
    Cond(Name),
    Pred(Name),
    PredPlus(Name),
}

impl Binder {
    pub fn parse(s: &str) -> Option<Binder> {
        let ident = |t: &str| !t.is_empty() && t.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
        if let Some(p) = s.strip_suffix("^P") {
            return ident(p).then(|| Binder::Cond(p.into()));
        }
        if let Some(x) = s.strip_suffix('⁺').or_else(|| s.strip_suffix('+')) {
            return (ident(x) && x.starts_with(char::is_uppercase)).then(|| Binder::PredPlus(x.into()));
        }
        if !ident(s) {
            return None;
        }
        Some(if s.starts_with(char::is_uppercase) { Binder::Pred(s.into()) } else { Binder::Ind(s.into()) })
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binder::Ind(x) | Binder::Pred(x) => f.write_str(x),
            Binder::Cond(p) => write!(f, "{p}^P"),
            Binder::PredPlus(x) => write!(f, "{x}⁺"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Derivation {
    Axiom(Name),
    Mp(Box<Derivation>, Box<Derivation>),
    Intro(Name, Formula, Box<Derivation>),
    Peirce(Formula, Formula),
    Gen(Binder, Box<Derivation>),
    GenInt(Name, Name, Box<Derivation>),
    /// The instantiating term is kept as text and parsed by the sort of
    /// the quantifier it eliminates.
    Inst(Box<Derivation>, String),
    InstPred(Box<Derivation>, Formula, Vec<Name>),
}

/// A `.drv` file: hypotheses and one derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct DrvFile {
    pub context: Vec<(Name, Formula)>,
    pub root: Derivation,
}

/// Result of a successful check.
#[derive(Clone, Debug)]
pub struct Checked {
    pub context: Vec<(Name, Formula)>,
    pub term: Term,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("derivation syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("at node {path}: {msg}")]
    Rule { path: String, msg: String },
}

// ---------------------------------------------------------------- s-exprs

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Result<T, DerivationError> {
    Err(DerivationError::Syntax { pos, msg: msg.into() })
}

fn read_sexps(src: &str) -> Result<Vec<Sexp>, DerivationError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut stack: Vec<(Vec<Sexp>, usize)> = vec![(Vec::new(), 0)];
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            ';' => {
                while i < chars.len() && chars[i].1 != '\n' {
                    i += 1;
                }
            }
            c if c.is_whitespace() => i += 1,
            '(' => {
                stack.push((Vec::new(), pos));
                i += 1;
            }
            ')' => {
                if stack.len() == 1 {
                    return syntax(pos, "unbalanced `)`");
                }
                let (items, start) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Sexp::List(items, start));
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return syntax(pos, "unterminated string"),
                        Some((_, '"')) => break,
                        Some((_, '\\')) => {
                            match chars.get(i + 1) {
                                Some((_, e @ ('"' | '\\'))) => s.push(*e),
                                _ => return syntax(chars[i].0, "bad escape"),
                            }
                            i += 2;
                        }
                        Some((_, d)) => {
                            s.push(*d);
                            i += 1;
                        }
                    }
                }
                i += 1;
                stack.last_mut().unwrap().0.push(Sexp::Str(s, pos));
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].1.is_whitespace() && !"()\";".contains(chars[i].1) {
                    i += 1;
                }
                let atom: String = chars[start..i].iter().map(|c| c.1).collect();
                stack.last_mut().unwrap().0.push(Sexp::Atom(atom, pos));
            }
        }
    }
    if stack.len() != 1 {
        return syntax(stack.last().unwrap().1, "unclosed `(`");
    }
    Ok(stack.pop().unwrap().0)
}

fn formula_at(s: &Sexp) -> Result<Formula, DerivationError> {
    match s {
        Sexp::Str(text, pos) => {
            parse_formula(text).map_err(|e| DerivationError::Syntax { pos: pos + 1 + e.pos, msg: e.msg })
        }
        _ => syntax(s.pos(), "expected a quoted formula"),
    }
}

fn symbol_at(s: &Sexp) -> Result<Name, DerivationError> {
    match s {
        Sexp::Atom(a, _) | Sexp::Str(a, _) => Ok(a.as_str().into()),
        _ => syntax(s.pos(), "expected a name"),
    }
}

fn node(s: &Sexp) -> Result<Derivation, DerivationError> {
    let Sexp::List(items, pos) = s else { return syntax(s.pos(), "expected a derivation node") };
    let Some(Sexp::Atom(tag, _)) = items.first() else { return syntax(*pos, "expected a rule tag") };
    let args = &items[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            syntax(*pos, format!("`{tag}` takes {n} arguments"))
        }
    };
    let sub = |i: usize| node(&args[i]).map(Box::new);
    Ok(match tag.as_str() {
        "axiom" => {
            arity(1)?;
            Derivation::Axiom(symbol_at(&args[0])?)
        }
        "mp" => {
            arity(2)?;
            Derivation::Mp(sub(0)?, sub(1)?)
        }
        "intro" => {
            arity(3)?;
            Derivation::Intro(symbol_at(&args[0])?, formula_at(&args[1])?, sub(2)?)
        }
        "peirce" => {
            arity(2)?;
            Derivation::Peirce(formula_at(&args[0])?, formula_at(&args[1])?)
        }
        "gen" => {
            arity(2)?;
            let b = symbol_at(&args[0])?;
            let Some(binder) = Binder::parse(&b) else { return syntax(args[0].pos(), format!("bad binder `{b}`")) };
            Derivation::Gen(binder, sub(1)?)
        }
        "gen-int" => {
            arity(3)?;
            Derivation::GenInt(symbol_at(&args[0])?, symbol_at(&args[1])?, sub(2)?)
        }
        "inst" => {
            arity(2)?;
            let Sexp::Str(t, _) = &args[1] else { return syntax(args[1].pos(), "expected a quoted term") };
            Derivation::Inst(sub(0)?, t.clone())
        }
        "inst-pred" => {
            if args.len() < 2 {
                return syntax(*pos, "`inst-pred` takes a derivation, a formula and parameters");
            }
            let params = args[2..].iter().map(symbol_at).collect::<Result<_, _>>()?;
            Derivation::InstPred(sub(0)?, formula_at(&args[1])?, params)
        }
        other => return syntax(*pos, format!("unknown rule `{other}`")),
    })
}

/// Parses a `.drv` file.
pub fn parse_derivation(src: &str) -> Result<DrvFile, DerivationError> {
    let forms = read_sexps(src)?;
    let mut context = Vec::new();
    let mut rest = &forms[..];
    if let Some(Sexp::List(items, _)) = rest.first() {
        if matches!(items.first(), Some(Sexp::Atom(a, _)) if a == "context") {
            for entry in &items[1..] {
                match entry {
                    Sexp::List(kv, _) if kv.len() == 2 => context.push((symbol_at(&kv[0])?, formula_at(&kv[1])?)),
                    _ => return syntax(entry.pos(), "context entries are `(name \"formula\")`"),
                }
            }
            rest = &rest[1..];
        }
    }
    match rest {
        [root] => Ok(DrvFile { context, root: node(root)? }),
        [] => syntax(src.len(), "missing derivation"),
        [_, extra, ..] => syntax(extra.pos(), "more than one derivation"),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Derivation::Axiom(x) => write!(f, "(axiom {x})"),
            Derivation::Mp(d, e) => write!(f, "(mp {d} {e})"),
            Derivation::Intro(x, a, d) => write!(f, "(intro {x} {} {d})", quote(&a.to_string())),
            Derivation::Peirce(a, b) => write!(f, "(peirce {} {})", quote(&a.to_string()), quote(&b.to_string())),
            Derivation::Gen(b, d) => write!(f, "(gen {} {d})", quote(&b.to_string())),
            Derivation::GenInt(x, n, d) => write!(f, "(gen-int {x} {n} {d})"),
            Derivation::Inst(d, t) => write!(f, "(inst {d} {})", quote(t)),
            Derivation::InstPred(d, g, params) => {
                write!(f, "(inst-pred {d} {}", quote(&g.to_string()))?;
                for p in params {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for DrvFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.context.is_empty() {
            f.write_str("(context")?;
            for (x, a) in &self.context {
                write!(f, " ({x} {})", quote(&a.to_string()))?;
            }
            f.write_str(")\n")?;
        }
        writeln!(f, "{}", self.root)
    }
}

// ------------------------------------------------------- alpha-equivalence

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sort {
    Ind,
    Cond,
    Pred,
    PredPlus,
}

struct Env<'a> {
    binders: Vec<(Sort, &'a Name, &'a Name)>,
}

impl Env<'_> {
    fn same(&self, sort: Sort, x: &Name, y: &Name) -> bool {
        for (s, a, b) in self.binders.iter().rev() {
            if *s != sort {
                continue;
            }
            let (hit_a, hit_b) = (*a == x, *b == y);
            if hit_a || hit_b {
                return hit_a && hit_b;
            }
        }
        x == y
    }

    fn ind(&self, a: &IndTerm, b: &IndTerm) -> bool {
        match (a, b) {
            (IndTerm::Var(x), IndTerm::Var(y)) => self.same(Sort::Ind, x, y),
            (IndTerm::Num(m), IndTerm::Num(n)) => m == n,
            (IndTerm::Fn(f, xs), IndTerm::Fn(g, ys)) => f == g && self.inds(xs, ys),
            _ => false,
        }
    }

    fn inds(&self, xs: &[IndTerm], ys: &[IndTerm]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| self.ind(a, b))
    }

    fn cond(&self, a: &Cond, b: &Cond) -> bool {
        match (a, b) {
            (Cond::Var(x), Cond::Var(y)) => self.same(Sort::Cond, x, y),
            (Cond::Unit, Cond::Unit) => true,
            (Cond::Meet(a1, a2), Cond::Meet(b1, b2)) => self.cond(a1, b1) && self.cond(a2, b2),
            _ => false,
        }
    }
}

/// Equality of formulas up to renaming of bound variables.
pub fn formula_alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn go<'a>(a: &'a Formula, b: &'a Formula, env: &mut Env<'a>) -> bool {
        use Formula::*;
        let bind = |sort, x: &'a Name, y: &'a Name, g: &'a Formula, h: &'a Formula, env: &mut Env<'a>| {
            env.binders.push((sort, x, y));
            let r = go(g, h, env);
            env.binders.pop();
            r
        };
        match (a, b) {
            (NeqInd(a1, a2), NeqInd(b1, b2)) => env.ind(a1, b1) && env.ind(a2, b2),
            (NeqCond(a1, a2), NeqCond(b1, b2)) => env.cond(a1, b1) && env.cond(a2, b2),
            (Pred(x, xs), Pred(y, ys)) => env.same(Sort::Pred, x, y) && env.inds(xs, ys),
            (PredPlus(x, xs), PredPlus(y, ys)) => env.same(Sort::PredPlus, x, y) && env.inds(xs, ys),
            (Opposes(s, x, xs), Opposes(t, y, ys)) => {
                env.cond(s, t) && env.same(Sort::PredPlus, x, y) && env.inds(xs, ys)
            }
            (InGeneric(s), InGeneric(t)) => env.cond(s, t),
            (Implies(a1, a2), Implies(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (CGuard(s, g), CGuard(t, h)) => env.cond(s, t) && go(g, h, env),
            (ForallInd(x, g), ForallInd(y, h)) | (ForallInt(x, g), ForallInt(y, h)) => bind(Sort::Ind, x, y, g, h, env),
            (ForallCond(x, g), ForallCond(y, h)) => bind(Sort::Cond, x, y, g, h, env),
            (ForallPred(x, g), ForallPred(y, h)) => bind(Sort::Pred, x, y, g, h, env),
            (ForallPredPlus(x, g), ForallPredPlus(y, h)) => bind(Sort::PredPlus, x, y, g, h, env),
            _ => false,
        }
    }
    go(a, b, &mut Env { binders: Vec::new() })
}

// ----------------------------------------------------------------- checker

struct Checker {
    context: Vec<(Name, Formula)>,
}

fn path_string(path: &[usize]) -> String {
    std::iter::once("root".to_string()).chain(path.iter().map(|i| i.to_string())).collect::<Vec<_>>().join(".")
}

fn rule<T>(path: &[usize], msg: impl Into<String>) -> Result<T, DerivationError> {
    Err(DerivationError::Rule { path: path_string(path), msg: msg.into() })
}

impl Checker {
    fn free_in_context(&self, b: &Binder) -> bool {
        self.context.iter().any(|(_, f)| {
            let fv = f.free_vars();
            match b {
                Binder::Ind(x) => fv.ind.contains(x),
                Binder::Cond(p) => fv.cond.contains(p),
                Binder::Pred(x) => fv.pred.contains(x),
                Binder::PredPlus(x) => fv.pred_plus.contains(x),
            }
        })
    }

    fn with_hyp<T>(&mut self, x: &Name, a: Formula, k: impl FnOnce(&mut Self) -> T) -> T {
        self.context.push((x.clone(), a));
        let r = k(self);
        self.context.pop();
        r
    }

    fn check(&mut self, d: &Derivation, path: &mut Vec<usize>) -> Result<(Term, Formula), DerivationError> {
        let child = |this: &mut Self, i: usize, d: &Derivation, path: &mut Vec<usize>| {
            path.push(i);
            let r = this.check(d, path);
            path.pop();
            r
        };
        match d {
            Derivation::Axiom(x) => match self.context.iter().rev().find(|(y, _)| y == x) {
                Some((_, f)) => Ok((var(x), f.clone())),
                None => rule(path, format!("no hypothesis named `{x}`")),
            },
            Derivation::Mp(d1, d2) => {
                let (t, f) = child(self, 0, d1, path)?;
                let (u, a) = child(self, 1, d2, path)?;
                let Formula::Implies(a0, b) = f else {
                    return rule(path, format!("major premise `{f}` is not an implication"));
                };
                if !formula_alpha_eq(&a0, &a) {
                    return rule(path, format!("minor premise `{a}` does not match `{a0}`"));
                }
                Ok((app(t, u), *b))
            }
            Derivation::Intro(x, a, d1) => {
                let (t, b) = self.with_hyp(x, a.clone(), |this| child(this, 0, d1, path))?;
                Ok((lam(x, t), implies(a.clone(), b)))
            }
            Derivation::Peirce(a, b) => {
                let f = implies(implies(implies(a.clone(), b.clone()), a.clone()), a.clone());
                Ok((inst(Instruction::Cc), f))
            }
            Derivation::Gen(binder, d1) => {
                if self.free_in_context(binder) {
                    return rule(path, format!("`{binder}` is free in the context"));
                }
                let (t, f) = child(self, 0, d1, path)?;
                let f = Box::new(f);
                let g = match binder {
                    Binder::Ind(x) => Formula::ForallInd(x.clone(), f),
                    Binder::Cond(p) => Formula::ForallCond(p.clone(), f),
                    Binder::Pred(x) => Formula::ForallPred(x.clone(), f),
                    Binder::PredPlus(x) => Formula::ForallPredPlus(x.clone(), f),
                };
                Ok((t, g))
            }
            Derivation::GenInt(x, n, d1) => {
                if self.free_in_context(&Binder::Ind(x.clone())) {
                    return rule(path, format!("`{x}` is free in the context"));
                }
                let hyp = Formula::Pred(INT_PRED.into(), vec![IndTerm::Var(x.clone())]);
                let (t, f) = self.with_hyp(n, hyp, |this| child(this, 0, d1, path))?;
                Ok((lam(n, t), Formula::ForallInt(x.clone(), Box::new(f))))
            }
            Derivation::Inst(d1, text) => {
                let (t, f) = child(self, 0, d1, path)?;
                let bad = |e: String| DerivationError::Rule { path: path_string(path), msg: e };
                let g = match &f {
                    Formula::ForallInd(x, body) | Formula::ForallInt(x, body) => {
                        let u = parse_ind_term(text).map_err(|e| bad(e.to_string()))?;
                        let s = Subst { ind: HashMap::from([(x.clone(), u.clone())]), ..Default::default() };
                        let inst = s.apply(body);
                        if matches!(f, Formula::ForallInt(..)) {
                            implies(Formula::Pred(INT_PRED.into(), vec![u]), inst)
                        } else {
                            inst
                        }
                    }
                    Formula::ForallCond(p, body) => {
                        let u = parse_cond(text).map_err(|e| bad(e.to_string()))?;
                        let s = Subst { cond: HashMap::from([(p.clone(), u)]), ..Default::default() };
                        s.apply(body)
                    }
                    Formula::ForallPred(..) | Formula::ForallPredPlus(..) => {
                        return rule(path, "use `inst-pred` to eliminate a predicate quantifier");
                    }
                    _ => return rule(path, format!("`{f}` is not universally quantified")),
                };
                Ok((t, g))
            }
            Derivation::InstPred(d1, g, params) => {
                let (t, f) = child(self, 0, d1, path)?;
                let Formula::ForallPred(x, body) = &f else {
                    return rule(path, format!("`{f}` does not start with a predicate quantifier"));
                };
                let out = subst_second_order(body, x, g, params).map_err(|e| DerivationError::Rule {
                    path: path_string(path),
                    msg: e.to_string(),
                })?;
                Ok((t, out))
            }
        }
    }
}

/// Checks every node and returns the extracted quasi-proof with its formula.
pub fn check_derivation(file: &DrvFile) -> Result<Checked, DerivationError> {
    let mut checker = Checker { context: file.context.clone() };
    let (term, formula) = checker.check(&file.root, &mut Vec::new())?;
    Ok(Checked { context: file.context.clone(), term, formula })
}
