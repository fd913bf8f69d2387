//! Named closed terms: Church encodings, storage operators, the pair
//! combinators `β₀ … β₄`, their lifts `α_i = Hβ_i`, and the witness gallery.

use std::collections::HashMap;

use thiserror::Error;

use crate::conditions::{self, coercion_apply, gamma_bar, parse_cond, synthesize, CondError};
use crate::forcing;
use crate::syntax::{app, apps, inst, lam, parse_term, substitute, var, Instruction, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatorError {
    #[error("unknown combinator `{0}`")]
    Unknown(String),
    #[error("witness `{0}` has no explicit construction")]
    NotConstructed(String),
    #[error("coercion synthesis failed: {0}")]
    Synthesis(#[from] CondError),
}

fn fixed(src: &str) -> Term {
    parse_term(src).unwrap_or_else(|e| panic!("built-in term `{src}` must parse: {e}"))
}

pub fn identity() -> Term {
    lam("x", var("x"))
}

/// `λf.λx.(f)^n x`
pub fn church(n: u64) -> Term {
    let body = (0..n).fold(var("x"), |acc, _| app(var("f"), acc));
    lam("f", lam("x", body))
}

/// `s = λn.λf.λx.(f)(n)f x`
pub fn succ() -> Term {
    let body = app(var("f"), apps(var("n"), [var("f"), var("x")]));
    lam("n", lam("f", lam("x", body)))
}

/// `s^n 0̄`
pub fn succ_numeral(n: u64) -> Term {
    (0..n).fold(church(0), |acc, _| app(succ(), acc))
}

/// `1 = λx.λy.x`
pub fn pair_true() -> Term {
    lam("x", lam("y", var("x")))
}

/// `0 = λx.λy.y`
pub fn pair_false() -> Term {
    lam("x", lam("y", var("y")))
}

/// `λf.(f) a b`; `a` and `b` should be closed.
pub fn pair(a: Term, b: Term) -> Term {
    lam("f", apps(var("f"), [a, b]))
}

/// `T₀ = λf.λn.((n)λg.λx.(g)(s)x)f 0̄`
pub fn t0() -> Term {
    fixed("λf.λn.((n)λg.λx.(g)(s)x)f 0\u{304}")
}

/// `S₀ = λg.λx.(g)(s)x`
pub fn s0() -> Term {
    fixed("λg.λx.(g)(s)x")
}

/// `H = λf.λu.λm.λh.(u m)λn.λx.(h n)(f)x`
pub fn h() -> Term {
    fixed("λf.λu.λm.λh.(u m)λn.λx.(h n)(f)x")
}

/// `β₀ … β₄`; `β₂ = β₄`.
pub fn beta(i: u8) -> Term {
    match i {
        0 => fixed("λz.(z)1"),
        1 => fixed("λz.λf.((f)(z)0)(z)1"),
        2 | 4 => fixed("λx.λf.(f)x x"),
        3 => fixed("λz.λf.((f)λg.((g)(z)1)(z)0 1)(z)0 0"),
        _ => panic!("β index {i} out of range"),
    }
}

/// `α_i = (H)β_i`
pub fn alpha(i: u8) -> Term {
    app(h(), beta(i))
}

/// `λx.(x)I`, `λx.λy.(y)x`, and the transport term `λx.λy.(cc)λk.(x)(k)y`.
pub fn equality_terms() -> (Term, Term, Term) {
    (fixed("λx.(x)λz.z"), fixed("λx.λy.(y)x"), fixed("λx.λy.(cc)λk.(x)(k)y"))
}

/// Looks up a combinator by name.
///
/// Accepted names: `I`, `s`, `T0`, `S0`, `1`/`true`, `0`/`false`, `H`,
/// `beta0`…`beta4`, `alpha0`…`alpha4` (also `β₀`, `α₀`, …), and `church<n>`.
pub fn get(name: &str) -> Result<Term, CombinatorError> {
    let subscript = |s: &str| -> Option<u8> {
        let c = s.chars().next()?;
        if s.chars().count() != 1 {
            return None;
        }
        let d = c.to_digit(10).or_else(|| ('₀'..='₉').position(|x| x == c).map(|p| p as u32))?;
        Some(d as u8)
    };
    let indexed = |prefixes: &[&str]| {
        prefixes
            .iter()
            .find_map(|p| name.strip_prefix(p).and_then(subscript))
            .filter(|&i| i <= 4)
    };
    Ok(match name {
        "I" => identity(),
        "s" => succ(),
        "T0" | "T₀" => t0(),
        "S0" | "S₀" => s0(),
        "1" | "true" => pair_true(),
        "0" | "false" => pair_false(),
        "H" => h(),
        _ => {
            if let Some(i) = indexed(&["beta", "β"]) {
                beta(i)
            } else if let Some(i) = indexed(&["alpha", "α"]) {
                alpha(i)
            } else if let Some(n) = name.strip_prefix("church").and_then(|s| s.parse().ok()) {
                church(n)
            } else {
                return Err(CombinatorError::Unknown(name.into()));
            }
        }
    })
}

/// `(γ)arg` for the composite coercing `src` to `dst`.
fn tower(src: &str, dst: &str, arg: Term) -> Result<Term, CondError> {
    Ok(coercion_apply(&synthesize(&parse_cond(src)?, &parse_cond(dst)?)?, arg))
}

fn bar(src: &str, dst: &str) -> Result<Term, CondError> {
    conditions::gamma_bar_for(src, dst)
}

fn chi() -> Term {
    inst(Instruction::Chi)
}

fn chi_prime() -> Term {
    inst(Instruction::ChiPrime)
}

/// Instantiates a template whose free variables name closed slot terms.
fn fill(template: &str, slots: &[(&str, Term)]) -> Term {
    let map: HashMap<Name, Term> = slots.iter().map(|(k, v)| (Name::from(*k), v.clone())).collect();
    substitute(&fixed(template), &map)
}

pub const WITNESSES: [&str; 11] = [
    "theta21_i",
    "theta21_ii",
    "theta21_iii",
    "theta21_iv",
    "theta21_v",
    "theta21_vi",
    "theta22",
    "vartheta22",
    "V_SR1",
    "T_SR1",
    "S_SR1",
];

/// Explicit realizers for properties of the generic and for the lifted
/// `V`, `T`, `S` instructions, with every coercion slot synthesized.
pub fn witness(name: &str) -> Result<Term, CombinatorError> {
    Ok(match name {
        // ᾱ with α: C[r(pq)] → C[p1]
        "theta21_i" => bar("r(pq)", "p1")?,
        // χλxλy((χ'y)(β)x)(α)x
        "theta21_ii" => {
            let body = app(
                app(app(chi_prime(), var("y")), tower("r(qp)", "q(1r)", var("x"))?),
                tower("r(qp)", "p", var("x"))?,
            );
            app(chi(), lam("x", lam("y", body)))
        }
        // λxλy(ᾱ)(x)(β̄)y
        "theta21_iii" => fill(
            "λx.λy.(A)(x)(B)y",
            &[("A", bar("r(p'(q'q))", "p'((q'q)1)")?), ("B", bar("(q'q)p", "q'(pq)")?)],
        ),
        "theta21_iv" | "theta21_v" | "theta21_vi" => return Err(CombinatorError::NotConstructed(name.into())),
        // (β̄)λxλy(x)(ϑ)y
        "theta22" => fill("(B)λx.λy.(x)(T)y", &[("B", bar("1(p(qr))", "p(1q)")?), ("T", vartheta22()?)]),
        "vartheta22" => vartheta22()?,
        // (χ)λτλxλy(cc)λk((χ')(γ̄y)(γ̄₅)x k*)τ
        "V_SR1" => {
            let g = bar("1(p(qr))", "q((pr)r)")?;
            let g5 = gamma_bar(&conditions::star_gammas()[5]);
            let inner = app(
                chi_prime(),
                app(app(g, var("y")), apps(g5, [var("x"), forcing::k_star_open("k")])),
            );
            let body = app(inst(Instruction::Cc), lam("k", app(inner, var("τ"))));
            app(chi(), lam("τ", lam("x", lam("y", body))))
        }
        // β̄λfλn(n)S f 0̄
        "T_SR1" => fill(
            "(B)λf.λn.(n)S' f 0\u{304}",
            &[("B", bar("1(p(qr))", "q(1(p(1r)))")?), ("S'", witness("S_SR1")?)],
        ),
        // ᾱλgλx(g)(s)x
        "S_SR1" => fill("(A)λg.λx.(g)(s)x", &[("A", bar("1p", "p")?)]),
        _ => return Err(CombinatorError::Unknown(name.into())),
    })
}

/// `ϑ = (χ)λdλxλy(χ'x)(α)y` with α: C[qr] → C[q(qr)].
fn vartheta22() -> Result<Term, CondError> {
    let body = app(app(chi_prime(), var("x")), tower("qr", "q(qr)", var("y"))?);
    Ok(app(chi(), lam("d", lam("x", lam("y", body)))))
}
