//! Multi-sorted second-order formulas, their syntactic classes, substitution,
//! and the derivation checker with program extraction.

mod derivation;
mod text;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::conditions::{meet, Cond};
use crate::syntax::{fresh_name, Name};

pub use derivation::{
    check_derivation, formula_alpha_eq, parse_derivation, Binder, Checked, Derivation, DerivationError, DrvFile,
};
pub use text::{parse_formula, parse_ind_term, FormulaParseError, INT_PRED};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum IndTerm {
    Var(Name),
    Num(u64),
    Fn(Name, Vec<IndTerm>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    NeqInd(IndTerm, IndTerm),
    NeqCond(Cond, Cond),
    Pred(Name, Vec<IndTerm>),
    PredPlus(Name, Vec<IndTerm>),
    /// `t ∉ X⁺(…)`
    Opposes(Cond, Name, Vec<IndTerm>),
    /// `J(t)`
    InGeneric(Cond),
    Implies(Box<Formula>, Box<Formula>),
    /// `C[t] → F`
    CGuard(Cond, Box<Formula>),
    ForallInd(Name, Box<Formula>),
    ForallInt(Name, Box<Formula>),
    ForallCond(Name, Box<Formula>),
    ForallPred(Name, Box<Formula>),
    ForallPredPlus(Name, Box<Formula>),
}

pub fn ivar(x: &str) -> IndTerm {
    IndTerm::Var(x.into())
}

pub fn bottom() -> Formula {
    Formula::NeqInd(IndTerm::Num(0), IndTerm::Num(0))
}

pub fn top() -> Formula {
    Formula::NeqInd(IndTerm::Num(0), IndTerm::Num(1))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn not(a: Formula) -> Formula {
    implies(a, bottom())
}

pub fn c_guard(t: Cond, f: Formula) -> Formula {
    Formula::CGuard(t, Box::new(f))
}

/// `¬C[t]`
pub fn not_c(t: Cond) -> Formula {
    c_guard(t, bottom())
}

pub fn pred(x: &str, args: Vec<IndTerm>) -> Formula {
    Formula::Pred(x.into(), args)
}

pub fn pred_plus(x: &str, args: Vec<IndTerm>) -> Formula {
    Formula::PredPlus(x.into(), args)
}

pub fn forall_ind(x: &str, f: Formula) -> Formula {
    Formula::ForallInd(x.into(), Box::new(f))
}

pub fn forall_int(x: &str, f: Formula) -> Formula {
    Formula::ForallInt(x.into(), Box::new(f))
}

pub fn forall_cond(p: &str, f: Formula) -> Formula {
    Formula::ForallCond(p.into(), Box::new(f))
}

pub fn forall_pred(x: &str, f: Formula) -> Formula {
    Formula::ForallPred(x.into(), Box::new(f))
}

pub fn forall_pred_plus(x: &str, f: Formula) -> Formula {
    Formula::ForallPredPlus(x.into(), Box::new(f))
}

/// Built-in total functions on ℕ usable as individual function symbols.
pub fn builtin_function(name: &str) -> Option<(usize, fn(&[u64]) -> u64)> {
    Some(match name {
        "succ" => (1, |a| a[0].saturating_add(1)),
        "pred" => (1, |a| a[0].saturating_sub(1)),
        "add" => (2, |a| a[0].saturating_add(a[1])),
        "sub" => (2, |a| a[0].saturating_sub(a[1])),
        "mul" => (2, |a| a[0].saturating_mul(a[1])),
        "max" => (2, |a| a[0].max(a[1])),
        "min" => (2, |a| a[0].min(a[1])),
        _ => return None,
    })
}

impl IndTerm {
    fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            IndTerm::Var(x) => {
                out.insert(x.clone());
            }
            IndTerm::Num(_) => {}
            IndTerm::Fn(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Evaluates closed applications of built-in function symbols.
    pub fn normalize(&self) -> IndTerm {
        match self {
            IndTerm::Fn(f, args) => {
                let args: Vec<IndTerm> = args.iter().map(IndTerm::normalize).collect();
                let nums: Option<Vec<u64>> =
                    args.iter().map(|a| if let IndTerm::Num(n) = a { Some(*n) } else { None }).collect();
                match (builtin_function(f), nums) {
                    (Some((arity, func)), Some(ns)) if arity == ns.len() => IndTerm::Num(func(&ns)),
                    _ => IndTerm::Fn(f.clone(), args),
                }
            }
            _ => self.clone(),
        }
    }

    pub fn subst(&self, map: &HashMap<Name, IndTerm>) -> IndTerm {
        match self {
            IndTerm::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            IndTerm::Num(_) => self.clone(),
            IndTerm::Fn(f, args) => IndTerm::Fn(f.clone(), args.iter().map(|a| a.subst(map)).collect()).normalize(),
        }
    }
}

/// Free variables of a formula, by sort.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub ind: BTreeSet<Name>,
    pub cond: BTreeSet<Name>,
    pub pred: BTreeSet<Name>,
    pub pred_plus: BTreeSet<Name>,
}

impl FreeVars {
    fn extend(&mut self, other: FreeVars) {
        self.ind.extend(other.ind);
        self.cond.extend(other.cond);
        self.pred.extend(other.pred);
        self.pred_plus.extend(other.pred_plus);
    }
}

fn cond_vars(t: &Cond, out: &mut BTreeSet<Name>) {
    out.extend(crate::conditions::support(t));
}

/// Every condition variable name appearing in `f`, free or bound.
pub fn all_cond_names(f: &Formula) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    fn go(f: &Formula, out: &mut BTreeSet<Name>) {
        use Formula::*;
        match f {
            NeqCond(a, b) => {
                cond_vars(a, out);
                cond_vars(b, out);
            }
            Opposes(t, _, _) | InGeneric(t) => cond_vars(t, out),
            CGuard(t, g) => {
                cond_vars(t, out);
                go(g, out);
            }
            Implies(a, b) => {
                go(a, out);
                go(b, out);
            }
            ForallCond(p, g) => {
                out.insert(p.clone());
                go(g, out);
            }
            ForallInd(_, g) | ForallInt(_, g) | ForallPred(_, g) | ForallPredPlus(_, g) => go(g, out),
            NeqInd(..) | Pred(..) | PredPlus(..) => {}
        }
    }
    go(f, &mut out);
    out
}

impl Formula {
    pub fn free_vars(&self) -> FreeVars {
        use Formula::*;
        let mut fv = FreeVars::default();
        match self {
            NeqInd(a, b) => {
                a.collect_vars(&mut fv.ind);
                b.collect_vars(&mut fv.ind);
            }
            NeqCond(a, b) => {
                cond_vars(a, &mut fv.cond);
                cond_vars(b, &mut fv.cond);
            }
            Pred(x, args) => {
                fv.pred.insert(x.clone());
                args.iter().for_each(|a| a.collect_vars(&mut fv.ind));
            }
            PredPlus(x, args) => {
                fv.pred_plus.insert(x.clone());
                args.iter().for_each(|a| a.collect_vars(&mut fv.ind));
            }
            Opposes(t, x, args) => {
                cond_vars(t, &mut fv.cond);
                fv.pred_plus.insert(x.clone());
                args.iter().for_each(|a| a.collect_vars(&mut fv.ind));
            }
            InGeneric(t) => cond_vars(t, &mut fv.cond),
            Implies(a, b) => {
                fv = a.free_vars();
                fv.extend(b.free_vars());
            }
            CGuard(t, g) => {
                fv = g.free_vars();
                cond_vars(t, &mut fv.cond);
            }
            ForallInd(x, g) | ForallInt(x, g) => {
                fv = g.free_vars();
                fv.ind.remove(x);
            }
            ForallCond(p, g) => {
                fv = g.free_vars();
                fv.cond.remove(p);
            }
            ForallPred(x, g) => {
                fv = g.free_vars();
                fv.pred.remove(x);
            }
            ForallPredPlus(x, g) => {
                fv = g.free_vars();
                fv.pred_plus.remove(x);
            }
        }
        fv
    }

    /// Arity of every predicate variable occurrence, checking consistency
    /// within each binding scope.
    pub fn check_arities(&self) -> Result<(), LogicError> {
        fn go(
            f: &Formula,
            pred: &mut HashMap<Name, Vec<usize>>,
            plus: &mut HashMap<Name, Vec<usize>>,
        ) -> Result<(), LogicError> {
            use Formula::*;
            let record = |table: &mut HashMap<Name, Vec<usize>>, x: &Name, n: usize| {
                let slot = table.entry(x.clone()).or_default();
                match slot.last() {
                    Some(&m) if m != usize::MAX && m != n => {
                        Err(LogicError::Arity { name: x.to_string(), expected: m, found: n })
                    }
                    Some(&m) if m == usize::MAX => {
                        *slot.last_mut().unwrap() = n;
                        Ok(())
                    }
                    Some(_) => Ok(()),
                    None => {
                        slot.push(n);
                        Ok(())
                    }
                }
            };
            match f {
                Pred(x, args) => record(pred, x, args.len()),
                PredPlus(x, args) | Opposes(_, x, args) => record(plus, x, args.len()),
                Implies(a, b) => {
                    go(a, pred, plus)?;
                    go(b, pred, plus)
                }
                CGuard(_, g) | ForallInd(_, g) | ForallInt(_, g) | ForallCond(_, g) => go(g, pred, plus),
                ForallPred(x, g) => {
                    pred.entry(x.clone()).or_default().push(usize::MAX);
                    let r = go(g, pred, plus);
                    pred.get_mut(x).unwrap().pop();
                    r
                }
                ForallPredPlus(x, g) => {
                    plus.entry(x.clone()).or_default().push(usize::MAX);
                    let r = go(g, pred, plus);
                    plus.get_mut(x).unwrap().pop();
                    r
                }
                NeqInd(..) | NeqCond(..) | InGeneric(_) => Ok(()),
            }
        }
        go(self, &mut HashMap::new(), &mut HashMap::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("predicate {name} used with arity {found}, expected {expected}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("unknown sugar `{0}`")]
    UnknownSugar(String),
    #[error("sugar `{name}` expects {expected} arguments")]
    SugarArgs { name: String, expected: usize },
}

/// Membership flags for the six syntactic classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FormulaClass {
    pub sr0: bool,
    pub sr0_usual: bool,
    pub sr0_restricted: bool,
    pub sr1: bool,
    pub sr1_restricted: bool,
    pub sr1_extended: bool,
}

impl FormulaClass {
    const ALL: FormulaClass = FormulaClass {
        sr0: true,
        sr0_usual: true,
        sr0_restricted: true,
        sr1: true,
        sr1_restricted: true,
        sr1_extended: true,
    };

    fn and(self, o: FormulaClass) -> FormulaClass {
        FormulaClass {
            sr0: self.sr0 && o.sr0,
            sr0_usual: self.sr0_usual && o.sr0_usual,
            sr0_restricted: self.sr0_restricted && o.sr0_restricted,
            sr1: self.sr1 && o.sr1,
            sr1_restricted: self.sr1_restricted && o.sr1_restricted,
            sr1_extended: self.sr1_extended && o.sr1_extended,
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        [
            (self.sr0, "SR0"),
            (self.sr0_usual, "SR0_usual"),
            (self.sr0_restricted, "SR0_restricted"),
            (self.sr1, "SR1"),
            (self.sr1_restricted, "SR1_restricted"),
            (self.sr1_extended, "SR1_extended"),
        ]
        .into_iter()
        .filter_map(|(b, n)| b.then_some(n))
        .collect()
    }
}

impl fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(", "))
    }
}

/// Largest set of classes whose grammar generates `f`.
pub fn classify(f: &Formula) -> FormulaClass {
    use Formula::*;
    let none = FormulaClass::default();
    match f {
        NeqInd(..) | Pred(..) => FormulaClass::ALL,
        NeqCond(..) | Opposes(..) => FormulaClass { sr0: true, ..none },
        PredPlus(..) => FormulaClass { sr1: true, sr1_restricted: true, sr1_extended: true, ..none },
        InGeneric(_) => FormulaClass { sr1_extended: true, ..none },
        Implies(a, b) => classify(a).and(classify(b)),
        CGuard(_, g) => {
            let c = classify(g);
            FormulaClass { sr0: c.sr0, sr1_extended: c.sr1_extended, ..none }
        }
        ForallInt(_, g) | ForallPred(_, g) => classify(g),
        ForallInd(_, g) => FormulaClass { sr0_restricted: false, sr1_restricted: false, ..classify(g) },
        ForallCond(_, g) => {
            let c = classify(g);
            FormulaClass { sr0: c.sr0, sr1_extended: c.sr1_extended, ..none }
        }
        ForallPredPlus(_, g) => {
            let c = classify(g);
            FormulaClass { sr0_usual: false, sr0_restricted: false, ..c }
        }
    }
}

/// Simultaneous capture-avoiding substitution of individual terms, condition
/// terms, and predicate abstractions `X ↦ λx⃗.F`.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    pub ind: HashMap<Name, IndTerm>,
    pub cond: HashMap<Name, Cond>,
    pub pred: HashMap<Name, (Vec<Name>, Formula)>,
}

impl Subst {
    fn is_empty(&self) -> bool {
        self.ind.is_empty() && self.cond.is_empty() && self.pred.is_empty()
    }

    /// Variables free in the replacements, by sort.
    fn replacement_vars(&self) -> FreeVars {
        let mut fv = FreeVars::default();
        for t in self.ind.values() {
            t.collect_vars(&mut fv.ind);
        }
        for c in self.cond.values() {
            cond_vars(c, &mut fv.cond);
        }
        for (params, body) in self.pred.values() {
            let mut inner = body.free_vars();
            for p in params {
                inner.ind.remove(p);
            }
            fv.extend(inner);
        }
        fv
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        if self.is_empty() {
            return f.clone();
        }
        use Formula::*;
        let terms = |args: &[IndTerm]| args.iter().map(|a| a.subst(&self.ind)).collect::<Vec<_>>();
        match f {
            NeqInd(a, b) => NeqInd(a.subst(&self.ind), b.subst(&self.ind)),
            NeqCond(a, b) => NeqCond(a.substitute(&self.cond), b.substitute(&self.cond)),
            Pred(x, args) => {
                let args = terms(args);
                match self.pred.get(x) {
                    Some((params, body)) => {
                        let inner = Subst {
                            ind: params.iter().cloned().zip(args).collect(),
                            ..Default::default()
                        };
                        inner.apply(body)
                    }
                    None => Pred(x.clone(), args),
                }
            }
            PredPlus(x, args) => PredPlus(x.clone(), terms(args)),
            Opposes(t, x, args) => Opposes(t.substitute(&self.cond), x.clone(), terms(args)),
            InGeneric(t) => InGeneric(t.substitute(&self.cond)),
            Implies(a, b) => implies(self.apply(a), self.apply(b)),
            CGuard(t, g) => c_guard(t.substitute(&self.cond), self.apply(g)),
            ForallInd(x, g) | ForallInt(x, g) => {
                let (x2, g2) = self.under_binder(Sort::Ind, x, g);
                if matches!(f, ForallInd(..)) {
                    ForallInd(x2, Box::new(g2))
                } else {
                    ForallInt(x2, Box::new(g2))
                }
            }
            ForallCond(p, g) => {
                let (p2, g2) = self.under_binder(Sort::Cond, p, g);
                ForallCond(p2, Box::new(g2))
            }
            ForallPred(x, g) => {
                let (x2, g2) = self.under_binder(Sort::Pred, x, g);
                ForallPred(x2, Box::new(g2))
            }
            ForallPredPlus(x, g) => {
                let (x2, g2) = self.under_binder(Sort::PredPlus, x, g);
                ForallPredPlus(x2, Box::new(g2))
            }
        }
    }

    fn under_binder(&self, sort: Sort, x: &Name, body: &Formula) -> (Name, Formula) {
        let mut inner = self.clone();
        match sort {
            Sort::Ind => {
                inner.ind.remove(x);
            }
            Sort::Cond => {
                inner.cond.remove(x);
            }
            Sort::Pred => {
                inner.pred.remove(x);
            }
            Sort::PredPlus => {}
        }
        if inner.is_empty() {
            return (x.clone(), body.clone());
        }
        let repl = inner.replacement_vars();
        let clash = match sort {
            Sort::Ind => repl.ind.contains(x),
            Sort::Cond => repl.cond.contains(x),
            Sort::Pred => repl.pred.contains(x),
            Sort::PredPlus => repl.pred_plus.contains(x),
        };
        if !clash {
            return (x.clone(), inner.apply(body));
        }
        let body_fv = body.free_vars();
        let (in_body, in_repl) = match sort {
            Sort::Ind => (&body_fv.ind, &repl.ind),
            Sort::Cond => (&body_fv.cond, &repl.cond),
            Sort::Pred => (&body_fv.pred, &repl.pred),
            Sort::PredPlus => (&body_fv.pred_plus, &repl.pred_plus),
        };
        let fresh = fresh_name(x, &|c: &str| in_body.contains(c) || in_repl.contains(c));
        match sort {
            Sort::Ind => {
                inner.ind.insert(x.clone(), IndTerm::Var(fresh.clone()));
            }
            Sort::Cond => {
                inner.cond.insert(x.clone(), Cond::Var(fresh.clone()));
            }
            Sort::Pred | Sort::PredPlus => {
                // rename first, then substitute
                let renamed = rename_pred(body, x, &fresh, sort == Sort::PredPlus);
                return (fresh, inner.apply(&renamed));
            }
        }
        (fresh, inner.apply(body))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sort {
    Ind,
    Cond,
    Pred,
    PredPlus,
}

/// Renames free occurrences of predicate variable `x` to `y`.
fn rename_pred(f: &Formula, x: &Name, y: &Name, plus: bool) -> Formula {
    use Formula::*;
    let r = |g: &Formula| rename_pred(g, x, y, plus);
    match f {
        Pred(z, args) if !plus && z == x => Pred(y.clone(), args.clone()),
        PredPlus(z, args) if plus && z == x => PredPlus(y.clone(), args.clone()),
        Opposes(t, z, args) if plus && z == x => Opposes(t.clone(), y.clone(), args.clone()),
        Implies(a, b) => implies(r(a), r(b)),
        CGuard(t, g) => c_guard(t.clone(), r(g)),
        ForallInd(z, g) => ForallInd(z.clone(), Box::new(r(g))),
        ForallInt(z, g) => ForallInt(z.clone(), Box::new(r(g))),
        ForallCond(z, g) => ForallCond(z.clone(), Box::new(r(g))),
        ForallPred(z, g) if plus || z != x => ForallPred(z.clone(), Box::new(r(g))),
        ForallPredPlus(z, g) if !plus || z != x => ForallPredPlus(z.clone(), Box::new(r(g))),
        _ => f.clone(),
    }
}

/// `B[F/X x⃗]`: every atom `X(t⃗)` of `B` becomes `F[t⃗/x⃗]`.
pub fn subst_second_order(b: &Formula, x: &str, f: &Formula, params: &[Name]) -> Result<Formula, LogicError> {
    let mut arity_err = None;
    fn scan(b: &Formula, x: &str, n: usize, err: &mut Option<LogicError>) {
        use Formula::*;
        match b {
            Pred(y, args) if y.as_ref() == x && args.len() != n => {
                *err = Some(LogicError::Arity { name: x.into(), expected: n, found: args.len() });
            }
            Implies(a, c) => {
                scan(a, x, n, err);
                scan(c, x, n, err);
            }
            CGuard(_, g) | ForallInd(_, g) | ForallInt(_, g) | ForallCond(_, g) | ForallPredPlus(_, g) => {
                scan(g, x, n, err)
            }
            ForallPred(y, g) if y.as_ref() != x => scan(g, x, n, err),
            _ => {}
        }
    }
    scan(b, x, params.len(), &mut arity_err);
    if let Some(e) = arity_err {
        return Err(e);
    }
    let s = Subst { pred: HashMap::from([(Name::from(x), (params.to_vec(), f.clone()))]), ..Default::default() };
    Ok(s.apply(b))
}

/// Fresh condition variable names: `q`, `r`, `s`, … then primed variants.
pub fn fresh_cond_name(avoid: &BTreeSet<Name>) -> Name {
    for c in ['q', 'r', 's', 't', 'u', 'v', 'w'] {
        let s = c.to_string();
        if !avoid.contains(s.as_str()) {
            return s.into();
        }
    }
    fresh_name("q", &|c: &str| avoid.contains(c))
}

fn fresh_pred_name(avoid: &BTreeSet<Name>) -> Name {
    fresh_name("X", &|c: &str| avoid.contains(c))
}

/// `A ∧ B ≡ ∀Z((A → B → Z) → Z)`
pub fn conj(a: Formula, b: Formula) -> Formula {
    let mut avoid = a.free_vars().pred;
    avoid.extend(b.free_vars().pred);
    let z = fresh_name("Z", &|c: &str| avoid.contains(c));
    let zf = Formula::Pred(z.clone(), vec![]);
    Formula::ForallPred(z, Box::new(implies(implies(a, implies(b, zf.clone())), zf)))
}

/// Argument for [`sugar`].
#[derive(Clone, Debug)]
pub enum SugarArg {
    Ind(IndTerm),
    Cond(Cond),
    Pred(Name),
}

/// Notation builders: `eq`, `leq_cond`, `sim`, `subseteq`, `simeq`, `decides`.
pub fn sugar(name: &str, args: &[SugarArg]) -> Result<Formula, LogicError> {
    let bad = |expected| LogicError::SugarArgs { name: name.into(), expected };
    match (name, args) {
        ("eq", [SugarArg::Ind(x), SugarArg::Ind(y)]) => Ok(eq(x.clone(), y.clone())),
        ("leq_cond", [SugarArg::Cond(p), SugarArg::Cond(q)]) => Ok(leq_cond(p, q)),
        ("sim", [SugarArg::Cond(p), SugarArg::Cond(q)]) => Ok(conj(leq_cond(p, q), leq_cond(q, p))),
        ("subseteq", [SugarArg::Pred(x), SugarArg::Pred(y)]) => Ok(subseteq(x, y)),
        ("simeq", [SugarArg::Pred(x), SugarArg::Pred(y)]) => Ok(conj(subseteq(x, y), subseteq(y, x))),
        ("decides", [SugarArg::Cond(p), SugarArg::Pred(x), SugarArg::Ind(n)]) => Ok(decides(p, x, n)),
        ("eq" | "leq_cond" | "sim" | "subseteq" | "simeq", _) => Err(bad(2)),
        ("decides", _) => Err(bad(3)),
        _ => Err(LogicError::UnknownSugar(name.into())),
    }
}

/// `x = y ≡ ∀X(X x → X y)`
pub fn eq(x: IndTerm, y: IndTerm) -> Formula {
    let z = fresh_pred_name(&BTreeSet::new());
    Formula::ForallPred(z.clone(), Box::new(implies(Formula::Pred(z.clone(), vec![x]), Formula::Pred(z, vec![y]))))
}

/// `p ≤ q ≡ ∀r(¬C[qr] → ¬C[pr])`
pub fn leq_cond(p: &Cond, q: &Cond) -> Formula {
    let mut avoid = crate::conditions::support(p);
    avoid.extend(crate::conditions::support(q));
    let r = fresh_cond_name(&avoid);
    let rv = Cond::Var(r.clone());
    Formula::ForallCond(r, Box::new(implies(not_c(meet(q.clone(), rv.clone())), not_c(meet(p.clone(), rv)))))
}

/// `X ⊆ Y ≡ ∀x^int(X x → Y x)`
pub fn subseteq(x: &Name, y: &Name) -> Formula {
    let v = IndTerm::Var("x".into());
    Formula::ForallInt(
        "x".into(),
        Box::new(implies(Formula::Pred(x.clone(), vec![v.clone()]), Formula::Pred(y.clone(), vec![v]))),
    )
}

/// `p` decides `X⁺ n`: `∀q∀r(C[pq] → C[pr] → (q ⊩ X⁺n) → r ∉ X⁺n)`.
pub fn decides(p: &Cond, x: &Name, n: &IndTerm) -> Formula {
    let mut avoid = crate::conditions::support(p);
    let q = fresh_cond_name(&avoid);
    avoid.insert(q.clone());
    let r = fresh_cond_name(&avoid);
    avoid.insert(r.clone());
    let qv = Cond::Var(q.clone());
    let rv = Cond::Var(r.clone());
    let forced = crate::forcing::force(&qv, &Formula::PredPlus(x.clone(), vec![n.clone()]))
        .expect("atomic X⁺ formulas are forceable");
    let body = c_guard(
        meet(p.clone(), qv),
        c_guard(meet(p.clone(), rv.clone()), implies(forced, Formula::Opposes(rv, x.clone(), vec![n.clone()]))),
    );
    Formula::ForallCond(q, Box::new(Formula::ForallCond(r, Box::new(body))))
}
