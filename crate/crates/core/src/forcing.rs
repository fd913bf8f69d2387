//! The forcing transformation on programs (`t ↦ t*`) and on formulas
//! (`p ⊩ F`), and the recursive bridge terms between the two levels.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::combinators;
use crate::conditions::{
    alpha3_coercion, coercion_apply, gamma_bar, meet, parse_cond, star_gammas, support, synthesize, Cond, CondError,
};
use crate::logic::{all_cond_names, bottom, c_guard, classify, fresh_cond_name, implies, Formula};
use crate::syntax::{app, apps, free_vars, fresh_name, inst, lam, substitute, var, Instruction, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcingError {
    #[error("`{0}` cannot be translated: only λ, application, variables and cc are allowed")]
    MachineOnly(String),
    #[error("`{formula}` is not in class {class}")]
    Class { formula: String, class: &'static str },
    #[error("coercion synthesis failed: {0}")]
    Synthesis(#[from] CondError),
}

fn chi() -> Term {
    inst(Instruction::Chi)
}

fn chi_prime() -> Term {
    inst(Instruction::ChiPrime)
}

fn gbar(i: usize) -> Term {
    gamma_bar(&star_gammas()[i])
}

/// `k* = λx.(χ)λy.(k)((χ')x)(γ₄)y`, open in `k`.
pub fn k_star_open(k: &str) -> Term {
    let x = fresh_name("x", &|c: &str| c == k);
    let y = fresh_name("y", &|c: &str| c == k || c == &*x);
    let body = app(var(k), app(app(chi_prime(), var(&x)), coercion_apply(&star_gammas()[4], var(&y))));
    lam(&x, app(chi(), lam(&y, body)))
}

/// `cc* = λx.(χ)λy.(cc)λk.((χ')x)(γ₃)y k*`
pub fn cc_star() -> Term {
    let saved = app(app(chi_prime(), var("x")), coercion_apply(&star_gammas()[3], var("y")));
    let body = app(inst(Instruction::Cc), lam("k", app(saved, k_star_open("k"))));
    lam("x", app(chi(), lam("y", body)))
}

/// The program translation `t ↦ t*` on quasi-proofs.
pub fn star(t: &Term) -> Result<Term, ForcingError> {
    match t {
        Term::Var(_) => Ok(t.clone()),
        Term::App(f, a) => Ok(apps(gbar(0), [star(f)?, star(a)?])),
        Term::Lam(x, b) => {
            let body = star(b)?;
            let map: HashMap<Name, Term> = free_vars(&body)
                .into_iter()
                .map(|y| {
                    let wrap = if y == *x { gbar(2) } else { gbar(1) };
                    let v = var(&y);
                    (y, app(wrap, v))
                })
                .collect();
            Ok(app(gamma_bar(&alpha3_coercion()), lam(x, substitute(&body, &map))))
        }
        Term::Inst(Instruction::Cc) => Ok(cc_star()),
        _ => Err(ForcingError::MachineOnly(t.to_string())),
    }
}

/// `(γ̄₅)ξη`: the program of the product of two forcing pairs.
pub fn app_sr1(xi: Term, eta: Term) -> Term {
    apps(gbar(5), [xi, eta])
}

fn class_error(f: &Formula, class: &'static str) -> ForcingError {
    ForcingError::Class { formula: f.to_string(), class }
}

/// `p ⊩ F` for `F` in SR1_extended; the result is an SR0 formula.
pub fn force(p: &Cond, f: &Formula) -> Result<Formula, ForcingError> {
    if !classify(f).sr1_extended {
        return Err(class_error(f, "SR1_extended"));
    }
    let mut scope = support(p);
    scope.extend(all_cond_names(f));
    Ok(force_rec(p, f, &scope))
}

/// `scope` holds every condition name visible around `f`; fresh names avoid it.
fn force_rec(p: &Cond, f: &Formula, scope: &BTreeSet<Name>) -> Formula {
    use Formula::*;
    let fresh = || {
        let mut avoid = scope.clone();
        avoid.extend(support(p));
        avoid.extend(all_cond_names(f));
        fresh_cond_name(&avoid)
    };
    let with = |q: &Name| {
        let mut s = scope.clone();
        s.insert(q.clone());
        s
    };
    match f {
        PredPlus(x, args) => {
            let q = fresh();
            let qv = Cond::Var(q.clone());
            let body = c_guard(meet(p.clone(), qv.clone()), Opposes(qv, x.clone(), args.clone()));
            ForallCond(q, Box::new(body))
        }
        Pred(..) | NeqInd(..) => c_guard(p.clone(), f.clone()),
        InGeneric(t) => c_guard(meet(p.clone(), t.clone()), bottom()),
        Implies(g, h) => {
            let q = fresh();
            let qv = Cond::Var(q.clone());
            let inner = with(&q);
            let body = implies(force_rec(&qv, g, &inner), force_rec(&meet(p.clone(), qv), h, &inner));
            ForallCond(q, Box::new(body))
        }
        CGuard(t, g) => c_guard(t.clone(), force_rec(p, g, scope)),
        ForallInd(x, g) => ForallInd(x.clone(), Box::new(force_rec(p, g, scope))),
        ForallInt(x, g) => ForallInt(x.clone(), Box::new(force_rec(p, g, scope))),
        ForallPred(x, g) => ForallPred(x.clone(), Box::new(force_rec(p, g, scope))),
        ForallPredPlus(x, g) => ForallPredPlus(x.clone(), Box::new(force_rec(p, g, scope))),
        ForallCond(r, g) => {
            if support(p).contains(r) {
                let r2 = fresh();
                let renamed = crate::logic::Subst {
                    cond: HashMap::from([(r.clone(), Cond::Var(r2.clone()))]),
                    ..Default::default()
                }
                .apply(g);
                ForallCond(r2.clone(), Box::new(force_rec(p, &renamed, &with(&r2))))
            } else {
                ForallCond(r.clone(), Box::new(force_rec(p, g, scope)))
            }
        }
        NeqCond(..) | Opposes(..) => unreachable!("excluded by the class check"),
    }
}

fn cond(s: &str) -> Cond {
    parse_cond(s).expect("built-in condition parses")
}

/// `(α)arg` for the composite `src → dst`.
fn tower(src: &str, dst: &str, arg: Term) -> Result<Term, ForcingError> {
    Ok(coercion_apply(&synthesize(&cond(src), &cond(dst))?, arg))
}

/// `ᾱ` for the composite `src → dst`.
fn bar(src: &str, dst: &str) -> Result<Term, ForcingError> {
    Ok(gamma_bar(&synthesize(&cond(src), &cond(dst))?))
}

/// `(χ_F, χ'_F)`: converts between realizers of `p ⊩ F` at the two levels.
pub fn chi_pair(f: &Formula) -> Result<(Term, Term), ForcingError> {
    if !classify(f).sr1_extended {
        return Err(class_error(f, "SR1_extended"));
    }
    chi_pair_rec(f)
}

/// `λxλn(ᾱχ_G)(x)n` and `λxλn(χ'_G)(ᾱ)xn`, shared by `∀x^int` and guards.
fn guarded_pair(g: &Formula) -> Result<(Term, Term), ForcingError> {
    let (c, c1) = chi_pair_rec(g)?;
    let into = bar("p(1q)", "pq")?;
    let out = bar("pq", "p(1q)")?;
    let first = lam("x", lam("n", app(app(into, c), app(var("x"), var("n")))));
    let second = lam("x", lam("n", app(c1, apps(out, [var("x"), var("n")]))));
    Ok((first, second))
}

fn chi_pair_rec(f: &Formula) -> Result<(Term, Term), ForcingError> {
    use Formula::*;
    match f {
        PredPlus(..) | InGeneric(_) => Ok((chi(), chi_prime())),
        Pred(..) | NeqInd(..) => {
            let first = lam("x", app(chi(), lam("y", app(var("x"), app(combinators::alpha(0), var("y"))))));
            let second =
                lam("x", lam("y", app(app(chi_prime(), var("x")), app(combinators::alpha(4), var("y")))));
            Ok((first, second))
        }
        ForallInd(_, g) | ForallPred(_, g) | ForallPredPlus(_, g) | ForallCond(_, g) => chi_pair_rec(g),
        ForallInt(_, g) | CGuard(_, g) => guarded_pair(g),
        Implies(g, h) => {
            let (cg, cg1) = chi_pair_rec(g)?;
            let (ch, ch1) = chi_pair_rec(h)?;
            let inner = lam("x", lam("y", app(ch, app(var("x"), app(cg1, var("y"))))));
            let first = app(bar("p(qr)", "(pq)r")?, inner);
            let second = lam(
                "x",
                lam("y", app(ch1, app(app(bar("(pq)r", "p(qr)")?, var("x")), app(cg, var("y"))))),
            );
            Ok((first, second))
        }
        NeqCond(..) | Opposes(..) => Err(class_error(f, "SR1_extended")),
    }
}

fn require_sr0_usual(f: &Formula) -> Result<(), ForcingError> {
    if classify(f).sr0_usual {
        Ok(())
    } else {
        Err(class_error(f, "SR0_usual"))
    }
}

/// `(χ⁰_F, χ¹_F)` for usual SR0 formulas.
pub fn chi01(f: &Formula) -> Result<(Term, Term), ForcingError> {
    require_sr0_usual(f)?;
    chi01_rec(f)
}

fn chi01_rec(f: &Formula) -> Result<(Term, Term), ForcingError> {
    use Formula::*;
    match f {
        ForallInd(_, g) | ForallPred(_, g) => chi01_rec(g),
        ForallInt(_, g) => {
            let (c0, c1) = chi01_rec(g)?;
            let first = lam("x", lam("y", lam("z", app(app(c0, app(var("x"), var("z"))), var("y")))));
            let second = lam("x", lam("y", app(c1, lam("z", apps(var("x"), [var("z"), var("y")])))));
            Ok((first, second))
        }
        Implies(g, h) => {
            let (g0, g1) = chi01_rec(g)?;
            let (h0, h1) = chi01_rec(h)?;
            let inner = app(h0, app(var("x"), app(g1, lam("d", var("z")))));
            let first = lam("x", lam("y", lam("z", app(inner, tower("p", "pp", var("y"))?))));
            let body = apps(
                var("x"),
                [tower("pq", "p", var("z"))?, app(app(g0, var("y")), tower("pq", "q", var("z"))?)],
            );
            let second = lam("x", lam("y", app(h1, lam("z", body))));
            Ok((first, second))
        }
        _ => Ok((combinators::identity(), combinators::identity())),
    }
}

/// `(χ⁺_F, χ⁻_F) = (λx.(χ⁰_F)(χ'_F)x, λx.(χ_F)(χ¹_F)x)`.
pub fn chi_pm(f: &Formula) -> Result<(Term, Term), ForcingError> {
    require_sr0_usual(f)?;
    let (c, c1) = chi_pair(f)?;
    let (c0, c_one) = chi01_rec(f)?;
    Ok((lam("x", app(c0, app(c1, var("x")))), lam("x", app(c, app(c_one, var("x"))))))
}

/// `λx(χ'_F)(γ̄₁)(χ_F)x` and `λx(χ'_F)(γ̄₂)(χ_F)x`: weakening of a forced
/// formula along the two projections of a product condition.
pub fn weakening_terms(f: &Formula) -> Result<(Term, Term), ForcingError> {
    let (c, c1) = chi_pair(f)?;
    let w = |i| lam("x", app(c1.clone(), app(gbar(i), app(c.clone(), var("x")))));
    Ok((w(1), w(2)))
}
