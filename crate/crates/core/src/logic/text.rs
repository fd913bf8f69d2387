//! Concrete syntax of formulas.
//!
//! ```text
//! ∀x. F   ∀x^int. F   ∀p^P. F   ∀X. F   ∀X⁺. F      (also `forall`, `X+`)
//! F → G   ¬F   C[pq] → F   ¬C[pq]                   (also `->`, `~`)
//! t ≠ u   X(t, u)   X   X⁺(t)   J(pq)   [p] ≠ [q]   [p] ∉ X⁺(t)   ⊥   ⊤
//! ```
//! Individual terms are lowercase variables, numerals, or `f(t, …)`;
//! condition terms use the juxtaposition grammar of [`crate::conditions`].

use std::fmt;

use thiserror::Error;

use super::{bottom, c_guard, implies, top, Formula, IndTerm};
use crate::conditions::{parse_cond, Cond};
use crate::syntax::Name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula syntax error at {pos}: {msg}")]
pub struct FormulaParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for IndTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndTerm::Var(x) => f.write_str(x),
            IndTerm::Num(n) => write!(f, "{n}"),
            IndTerm::Fn(g, args) => {
                write!(f, "{g}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[IndTerm]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

fn write_pred(f: &mut fmt::Formatter<'_>, name: &str, plus: bool, args: &[IndTerm]) -> fmt::Result {
    f.write_str(name)?;
    if plus {
        f.write_str("⁺")?;
    }
    if !args.is_empty() {
        f.write_str("(")?;
        write_args(f, args)?;
        f.write_str(")")?;
    }
    Ok(())
}

fn is_bottom(f: &Formula) -> bool {
    *f == bottom()
}

/// Formulas that can stand as the left side of `→` without parentheses.
fn is_tight(f: &Formula) -> bool {
    match f {
        Formula::Implies(_, b) | Formula::CGuard(_, b) => is_bottom(b),
        Formula::ForallInd(..)
        | Formula::ForallInt(..)
        | Formula::ForallCond(..)
        | Formula::ForallPred(..)
        | Formula::ForallPredPlus(..) => false,
        _ => true,
    }
}

fn write_tight(f: &mut fmt::Formatter<'_>, g: &Formula) -> fmt::Result {
    if is_tight(g) {
        write!(f, "{g}")
    } else {
        write!(f, "({g})")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            NeqInd(IndTerm::Num(0), IndTerm::Num(0)) => f.write_str("⊥"),
            NeqInd(IndTerm::Num(0), IndTerm::Num(1)) => f.write_str("⊤"),
            NeqInd(a, b) => write!(f, "{a} ≠ {b}"),
            NeqCond(a, b) => write!(f, "[{a}] ≠ [{b}]"),
            Pred(x, args) => write_pred(f, x, false, args),
            PredPlus(x, args) => write_pred(f, x, true, args),
            Opposes(t, x, args) => {
                write!(f, "[{t}] ∉ ")?;
                write_pred(f, x, true, args)
            }
            InGeneric(t) => write!(f, "J({t})"),
            Implies(a, b) if is_bottom(b) => {
                f.write_str("¬")?;
                write_tight(f, a)
            }
            Implies(a, b) => {
                write_tight(f, a)?;
                write!(f, " → {b}")
            }
            CGuard(t, b) if is_bottom(b) => write!(f, "¬C[{t}]"),
            CGuard(t, b) => write!(f, "C[{t}] → {b}"),
            ForallInd(x, g) => write!(f, "∀{x}. {g}"),
            ForallInt(x, g) => write!(f, "∀{x}^int. {g}"),
            ForallCond(p, g) => write!(f, "∀{p}^P. {g}"),
            ForallPred(x, g) => write!(f, "∀{x}. {g}"),
            ForallPredPlus(x, g) => write!(f, "∀{x}⁺. {g}"),
        }
    }
}

/// Left side of an implication: a formula, or the guard marker `C[t]`.
enum Lhs {
    Formula(Formula),
    Guard(Cond),
}

struct P<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || ('₀'..='₉').contains(&c)
}

impl P<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaParseError> {
        let pos = self.chars.get(self.i).map(|c| c.0).unwrap_or(self.src.len());
        Err(FormulaParseError { pos, msg: msg.into() })
    }

    fn ws(&mut self) {
        while self.chars.get(self.i).is_some_and(|c| c.1.is_whitespace()) {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.i).map(|c| c.1)
    }

    fn rest_starts(&mut self, s: &str) -> bool {
        self.ws();
        let mut k = self.i;
        for c in s.chars() {
            match self.chars.get(k) {
                Some(&(_, d)) if d == c => k += 1,
                _ => return false,
            }
        }
        true
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest_starts(s) {
            self.i += s.chars().count();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), FormulaParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let start = self.i;
        while self.chars.get(self.i).is_some_and(|c| is_ident_char(c.1)) {
            self.i += 1;
        }
        (self.i > start).then(|| self.chars[start..self.i].iter().map(|c| c.1).collect())
    }

    fn keyword_ahead(&mut self, kw: &str) -> bool {
        if !self.rest_starts(kw) {
            return false;
        }
        let after = self.chars.get(self.i + kw.chars().count()).map(|c| c.1);
        !after.is_some_and(is_ident_char)
    }

    fn formula(&mut self) -> Result<Formula, FormulaParseError> {
        if self.eat("∀") || (self.keyword_ahead("forall") && self.eat("forall")) {
            return self.quantifier();
        }
        let lhs = self.unary()?;
        if self.eat("→") || self.eat("->") {
            let rhs = self.formula()?;
            return Ok(match lhs {
                Lhs::Formula(a) => implies(a, rhs),
                Lhs::Guard(t) => c_guard(t, rhs),
            });
        }
        match lhs {
            Lhs::Formula(a) => Ok(a),
            Lhs::Guard(_) => self.err("`C[…]` must be followed by `→` or preceded by `¬`"),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, FormulaParseError> {
        let Some(name) = self.ident() else { return self.err("expected a bound variable") };
        let upper = name.chars().next().is_some_and(char::is_uppercase);
        let kind = if self.eat("^int") {
            'i'
        } else if self.eat("^P") {
            'p'
        } else if self.eat("⁺") || self.eat("+") {
            '+'
        } else {
            ' '
        };
        self.expect(".")?;
        let body = Box::new(self.formula()?);
        let name: Name = name.as_str().into();
        Ok(match (upper, kind) {
            (false, ' ') => Formula::ForallInd(name, body),
            (false, 'i') => Formula::ForallInt(name, body),
            (false, 'p') => Formula::ForallCond(name, body),
            (true, ' ') => Formula::ForallPred(name, body),
            (true, '+') => Formula::ForallPredPlus(name, body),
            _ => return self.err("binder sort does not match the variable's case"),
        })
    }

    fn unary(&mut self) -> Result<Lhs, FormulaParseError> {
        if self.eat("¬") || self.eat("~") {
            return Ok(Lhs::Formula(match self.unary_operand()? {
                Lhs::Formula(a) => implies(a, bottom()),
                Lhs::Guard(t) => c_guard(t, bottom()),
            }));
        }
        if self.rest_starts("C[") {
            self.i += 2;
            let t = self.cond_until(']')?;
            return Ok(Lhs::Guard(t));
        }
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(Lhs::Formula(f));
        }
        Ok(Lhs::Formula(self.atom()?))
    }

    fn unary_operand(&mut self) -> Result<Lhs, FormulaParseError> {
        if self.rest_starts("∀") || self.keyword_ahead("forall") {
            return Ok(Lhs::Formula(self.formula()?));
        }
        self.unary()
    }

    fn cond_until(&mut self, close: char) -> Result<Cond, FormulaParseError> {
        let start = self.i;
        let mut depth = 0usize;
        while let Some(&(_, c)) = self.chars.get(self.i) {
            if c == '(' {
                depth += 1;
            } else if c == ')' && depth > 0 {
                depth -= 1;
            } else if c == close && depth == 0 {
                break;
            }
            self.i += 1;
        }
        if self.i >= self.chars.len() {
            return self.err(format!("expected `{close}`"));
        }
        let text: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
        let offset = self.chars[start].0;
        self.i += 1;
        parse_cond(&text).map_err(|e| FormulaParseError { pos: offset, msg: e.to_string() })
    }

    fn atom(&mut self) -> Result<Formula, FormulaParseError> {
        if self.eat("⊥") {
            return Ok(bottom());
        }
        if self.eat("⊤") {
            return Ok(top());
        }
        if self.eat("[") {
            let t = self.cond_until(']')?;
            if self.eat("≠") || self.eat("!=") {
                self.expect("[")?;
                let u = self.cond_until(']')?;
                return Ok(Formula::NeqCond(t, u));
            }
            if self.eat("∉") || (self.keyword_ahead("notin") && self.eat("notin")) {
                let Some(x) = self.ident() else { return self.err("expected a predicate variable") };
                if !(self.eat("⁺") || self.eat("+")) {
                    return self.err("expected `⁺` after the predicate of `∉`");
                }
                let args = self.pred_args()?;
                return Ok(Formula::Opposes(t, x.as_str().into(), args));
            }
            return self.err("expected `≠` or `∉` after a condition term");
        }
        if self.rest_starts("J(") {
            self.i += 2;
            let t = self.cond_until(')')?;
            return Ok(Formula::InGeneric(t));
        }
        let save = self.i;
        if let Some(name) = self.ident() {
            let reserved_int = name == INT_PRED && self.chars.get(self.i).map(|c| c.1) == Some('(');
            if reserved_int || name.chars().next().is_some_and(char::is_uppercase) {
                let plus = self.eat("⁺") || self.eat("+");
                let args = self.pred_args()?;
                let name: Name = name.as_str().into();
                return Ok(if plus { Formula::PredPlus(name, args) } else { Formula::Pred(name, args) });
            }
        }
        self.i = save;
        let a = self.ind_term()?;
        if !(self.eat("≠") || self.eat("!=")) {
            return self.err("expected `≠`");
        }
        let b = self.ind_term()?;
        Ok(Formula::NeqInd(a, b))
    }

    fn pred_args(&mut self) -> Result<Vec<IndTerm>, FormulaParseError> {
        // no space between the predicate and its argument list
        if self.chars.get(self.i).map(|c| c.1) != Some('(') {
            return Ok(Vec::new());
        }
        self.i += 1;
        self.term_list()
    }

    fn term_list(&mut self) -> Result<Vec<IndTerm>, FormulaParseError> {
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        loop {
            args.push(self.ind_term()?);
            if self.eat(")") {
                return Ok(args);
            }
            self.expect(",")?;
        }
    }

    fn ind_term(&mut self) -> Result<IndTerm, FormulaParseError> {
        self.ws();
        let start = self.i;
        if self.chars.get(self.i).is_some_and(|c| c.1.is_ascii_digit()) {
            while self.chars.get(self.i).is_some_and(|c| c.1.is_ascii_digit()) {
                self.i += 1;
            }
            let digits: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
            return digits.parse().map(IndTerm::Num).or_else(|_| self.err("numeral too large"));
        }
        let Some(name) = self.ident() else { return self.err("expected an individual term") };
        if name.chars().next().is_some_and(char::is_uppercase) {
            self.i = start;
            return self.err("individual variables start with a lowercase letter");
        }
        if self.chars.get(self.i).map(|c| c.1) == Some('(') {
            self.i += 1;
            let args = self.term_list()?;
            return Ok(IndTerm::Fn(name.as_str().into(), args).normalize());
        }
        Ok(IndTerm::Var(name.as_str().into()))
    }
}

/// Name of the reserved unary predicate `int(t)` used by `∀x^int` rules.
pub const INT_PRED: &str = "int";

/// Parses an individual term such as `add(x, 2)`.
pub fn parse_ind_term(src: &str) -> Result<IndTerm, FormulaParseError> {
    let mut p = P { src, chars: src.char_indices().collect(), i: 0 };
    let t = p.ind_term()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

/// Parses a formula; see the module documentation for the grammar.
pub fn parse_formula(src: &str) -> Result<Formula, FormulaParseError> {
    let mut p = P { src, chars: src.char_indices().collect(), i: 0 };
    let f = p.formula()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    f.check_arities().map_err(|e| FormulaParseError { pos: 0, msg: e.to_string() })?;
    Ok(f)
}
