#![allow(dead_code)]

use kforce::machine::{Machine, MachineConfig, Outcome, HaltReason};
use kforce::syntax::{app, lam, opaque, var, Instruction, Name, Process, Stack, Term};
use proptest::prelude::*;

/// Terms over the variables `x`, `y`, `z` with `cc` and two opaque constants.
pub fn any_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(var),
        Just(Term::Inst(Instruction::Cc)),
        prop::sample::select(vec!["a", "b"]).prop_map(opaque),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["x", "y", "z"]), inner.clone()).prop_map(|(x, b)| lam(x, b)),
            (inner.clone(), inner).prop_map(|(f, a)| app(f, a)),
        ]
    })
}

/// Quasi-proofs: terms over `x`, `y`, `z` and `cc` only.
pub fn any_quasi_proof() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        3 => prop::sample::select(vec!["x", "y", "z"]).prop_map(var),
        1 => Just(Term::Inst(Instruction::Cc)),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["x", "y", "z"]), inner.clone()).prop_map(|(x, b)| lam(x, b)),
            (inner.clone(), inner).prop_map(|(f, a)| app(f, a)),
        ]
    })
}

/// Closes a term by abstracting its free variables.
pub fn close(t: Term) -> Term {
    kforce::syntax::free_vars(&t).into_iter().fold(t, |acc, x| lam(&x, acc))
}

pub fn stack(items: Vec<Term>) -> Stack {
    Stack::from_top_first(items, 0)
}

pub fn run_default(term: Term, items: Vec<Term>, fuel: u64) -> kforce::machine::RunResult {
    Machine::new(MachineConfig::default()).run(Process::new(term, stack(items)), fuel)
}

/// Name of the opaque constant a run halts on, if any.
pub fn halting_constant(outcome: &Outcome) -> Option<Name> {
    match outcome {
        Outcome::Halted(_, HaltReason::Opaque(n)) => Some(n.clone()),
        _ => None,
    }
}

/// Runs `t ⋆ selectors·π0` and reports the opaque constant it halts on.
pub fn observe(t: Term, selectors: &[Term]) -> Option<Name> {
    halting_constant(&run_default(t, selectors.to_vec(), 10_000).outcome)
}

/// Reads the leaves of a nested Church pair by projecting with `1`/`0`;
/// `path` lists the projections from the outside in (`true` is first).
pub fn project(t: &Term, path: &[bool]) -> Option<Name> {
    use kforce::combinators::{pair_false, pair_true};
    let sels: Vec<Term> = path.iter().map(|&b| if b { pair_true() } else { pair_false() }).collect();
    observe(t.clone(), &sels)
}

/// Formulas over `X`, `Y` (unary), `U⁺` (unary), individual `x`, `y` and
/// condition variables `p`, `q`.
pub fn any_formula() -> impl Strategy<Value = kforce::logic::Formula> {
    use kforce::conditions::{cvar, Cond};
    use kforce::logic::{Formula, IndTerm};
    let ind = prop_oneof![
        prop::sample::select(vec!["x", "y"]).prop_map(|x| IndTerm::Var(x.into())),
        (0u64..3).prop_map(IndTerm::Num),
    ];
    let cond = prop_oneof![
        prop::sample::select(vec!["p", "q"]).prop_map(cvar),
        Just(Cond::Unit),
    ];
    let atom = prop_oneof![
        (ind.clone(), ind.clone()).prop_map(|(a, b)| Formula::NeqInd(a, b)),
        (prop::sample::select(vec!["X", "Y"]), ind.clone()).prop_map(|(x, a)| Formula::Pred(x.into(), vec![a])),
        ind.clone().prop_map(|a| Formula::PredPlus("U".into(), vec![a])),
        (cond.clone(), ind.clone()).prop_map(|(c, a)| Formula::Opposes(c, "U".into(), vec![a])),
        cond.clone().prop_map(Formula::InGeneric),
        (cond.clone(), cond.clone()).prop_map(|(a, b)| Formula::NeqCond(a, b)),
    ];
    atom.prop_recursive(4, 24, 2, move |inner| {
        let b = |f| Box::new(f);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Formula::Implies(b(a), b(c))),
            (cond.clone(), inner.clone()).prop_map(move |(c, g)| Formula::CGuard(c, b(g))),
            (prop::sample::select(vec!["x", "y"]), inner.clone()).prop_map(move |(x, g)| Formula::ForallInd(x.into(), b(g))),
            (prop::sample::select(vec!["x", "y"]), inner.clone()).prop_map(move |(x, g)| Formula::ForallInt(x.into(), b(g))),
            (prop::sample::select(vec!["p", "q"]), inner.clone()).prop_map(move |(p, g)| Formula::ForallCond(p.into(), b(g))),
            inner.clone().prop_map(move |g| Formula::ForallPred("Y".into(), b(g))),
            inner.prop_map(move |g| Formula::ForallPredPlus("U".into(), b(g))),
        ]
    })
}

/// Formulas built from `≠` and unary `X`, `Y` atoms with `→`, `∀x`, `∀x^int`
/// and `∀Y`.
pub fn usual_formula() -> impl Strategy<Value = kforce::logic::Formula> {
    use kforce::logic::{Formula, IndTerm};
    let ind = prop_oneof![
        prop::sample::select(vec!["x", "y"]).prop_map(|x| IndTerm::Var(x.into())),
        (0u64..3).prop_map(IndTerm::Num),
    ];
    let atom = prop_oneof![
        (ind.clone(), ind.clone()).prop_map(|(a, b)| Formula::NeqInd(a, b)),
        (prop::sample::select(vec!["X", "Y"]), ind).prop_map(|(x, a)| Formula::Pred(x.into(), vec![a])),
    ];
    atom.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, c)| Formula::Implies(Box::new(a), Box::new(c))),
            (prop::sample::select(vec!["x", "y"]), inner.clone()).prop_map(|(x, g)| Formula::ForallInd(x.into(), Box::new(g))),
            (prop::sample::select(vec!["x", "y"]), inner.clone()).prop_map(|(x, g)| Formula::ForallInt(x.into(), Box::new(g))),
            inner.prop_map(|g| Formula::ForallPred("Y".into(), Box::new(g))),
        ]
    })
}

/// Raw `(prefix, period)` bit vectors, not necessarily canonical.
pub fn any_bits() -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
    (prop::collection::vec(any::<bool>(), 0..7), prop::collection::vec(any::<bool>(), 1..7))
}

/// Membership read directly off raw bit vectors.
pub fn raw_contains(prefix: &[bool], period: &[bool], n: u64) -> bool {
    let n = n as usize;
    if n < prefix.len() {
        prefix[n]
    } else {
        period[(n - prefix.len()) % period.len()]
    }
}
