//! Text rendering shared by the command-line front end and its tests.
//!
//! Each function takes the raw inputs of one command and returns exactly what
//! the command prints on standard output.

use std::collections::HashMap;

use thiserror::Error;

use crate::conditions::{gamma_bar, parse_cond, synthesize, CondError};
use crate::forcing::{self, ForcingError};
use crate::logic::{check_derivation, parse_derivation, parse_formula, DerivationError, FormulaParseError};
use crate::machine::{Machine, MachineConfig, Outcome};
use crate::playground::{chain_meet, prem_set, EvSet, PartitionSpec, PlaygroundError};
use crate::syntax::{free_vars, opaque, parse_term, print_process, print_term, substitute, Name, ParseError, Process, Stack, Term};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Term(#[from] ParseError),
    #[error(transparent)]
    Formula(#[from] FormulaParseError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Forcing(#[from] ForcingError),
    #[error(transparent)]
    Cond(#[from] CondError),
    #[error(transparent)]
    Playground(#[from] PlaygroundError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFormat {
    Json,
    Text,
}

/// `parse`: the canonical printing of a term.
pub fn parse(src: &str) -> Result<String, ReportError> {
    Ok(format!("{}\n", print_term(&parse_term(src)?)))
}

/// Splits a comma-separated list, ignoring commas inside brackets.
fn split_items(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '⟨' => depth += 1,
            ')' | ']' | '⟩' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().map(str::trim).filter(|x| !x.is_empty()).collect()
}

/// Parses a stack item; its free variables become opaque constants.
pub fn stack_item(src: &str) -> Result<Term, ReportError> {
    let t = parse_term(src)?;
    let map: HashMap<Name, Term> = free_vars(&t).into_iter().map(|x| (x.clone(), opaque(&x))).collect();
    Ok(substitute(&t, &map))
}

/// `run`: optional trace, outcome, step count and final process. The flag is
/// false when the run did not halt.
pub fn run(src: &str, stack: &str, fuel: u64, trace: Option<TraceFormat>) -> Result<(String, bool), ReportError> {
    let term = parse_term(src)?;
    let items = split_items(stack).into_iter().map(stack_item).collect::<Result<Vec<_>, _>>()?;
    let config = MachineConfig::default().with_trace(if trace.is_some() { None } else { Some(0) });
    let result = Machine::new(config).run(Process::new(term, Stack::from_top_first(items, 0)), fuel);
    let mut out = String::new();
    if let Some(format) = trace {
        for e in &result.trace.entries {
            out.push_str(&match format {
                TraceFormat::Json => e.to_json(),
                TraceFormat::Text => e.to_text(),
            });
            out.push('\n');
        }
    }
    out.push_str(&format!("{}\nsteps: {}\n{}\n", result.outcome.describe(), result.steps, print_process(result.outcome.process())));
    Ok((out, matches!(result.outcome, Outcome::Halted(..))))
}

/// `transform`: the translation `t*`.
pub fn transform(src: &str) -> Result<String, ReportError> {
    Ok(format!("{}\n", print_term(&forcing::star(&parse_term(src)?)?)))
}

/// `force`: the formula `p ⊩ F`.
pub fn force(cond: &str, formula: &str) -> Result<String, ReportError> {
    let f = forcing::force(&parse_cond(cond)?, &parse_formula(formula)?)?;
    Ok(format!("{f}\n"))
}

/// `synth`: the certified generator sequence and its wrapper term.
pub fn synth(src: &str, dst: &str) -> Result<String, ReportError> {
    let c = synthesize(&parse_cond(src)?, &parse_cond(dst)?)?;
    let gens: Vec<String> = c.generators.iter().map(|g| format!("α{g}")).collect();
    Ok(format!("{}\n{}\n{}\n", c.to_json(), gens.join(" "), print_term(&gamma_bar(&c))))
}

/// `check`: the extracted term and the proved formula.
pub fn check(src: &str) -> Result<String, ReportError> {
    let c = check_derivation(&parse_derivation(src)?)?;
    Ok(format!("term: {}\nformula: {}\n", print_term(&c.term), c.formula))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiMode {
    Pair,
    ZeroOne,
    PlusMinus,
}

/// `chi`: the two bridge terms of a formula.
pub fn chi(mode: ChiMode, formula: &str) -> Result<String, ReportError> {
    let f = parse_formula(formula)?;
    let ((a, b), (la, lb)) = match mode {
        ChiMode::Pair => (forcing::chi_pair(&f)?, ("χ", "χ'")),
        ChiMode::ZeroOne => (forcing::chi01(&f)?, ("χ⁰", "χ¹")),
        ChiMode::PlusMinus => (forcing::chi_pm(&f)?, ("χ⁺", "χ⁻")),
    };
    Ok(format!("{la}: {}\n{lb}: {}\n", print_term(&a), print_term(&b)))
}

fn sets(items: &[String]) -> Result<Vec<EvSet>, ReportError> {
    Ok(items.iter().map(|s| s.parse()).collect::<Result<Vec<EvSet>, _>>()?)
}

/// `play meet`: the meet of the given sets and whether it is infinite.
pub fn play_meet(items: &[String]) -> Result<String, ReportError> {
    let m = sets(items)?.into_iter().reduce(|a, b| a.meet(&b)).unwrap_or_else(EvSet::unit);
    Ok(format!("{m}\ninfinite: {}\n", m.is_infinite()))
}

/// `play chain`: CSV of `j,f(j)` for the first `rows` values, then the image.
pub fn play_chain(items: &[String], rows: u64) -> Result<String, ReportError> {
    let c = chain_meet(&sets(items)?)?;
    let mut out = String::from("j,f(j)\n");
    for j in 0..rows {
        out.push_str(&format!("{j},{}\n", c.f(j)));
    }
    out.push_str(&format!("image,{}\n", c.image));
    Ok(out)
}

/// `play prem`: CSV of the selected elements and their classes.
pub fn play_prem(set: &str, partition: &str, bound: u64) -> Result<String, ReportError> {
    let x: EvSet = set.parse()?;
    let z: PartitionSpec = partition.parse()?;
    let mut out = String::from("j,class\n");
    for j in prem_set(&x, &z, bound) {
        out.push_str(&format!("{j},{}\n", z.class_of(j)));
    }
    Ok(out)
}
