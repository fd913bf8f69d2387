use std::collections::BTreeSet;
use std::fmt;

use super::term::{free_vars, Instruction, Name, Process, Stack, Term};

/// Prints a term in Krivine style: `(h)a b`, `(f)(g)x` for `f (g x)`.
///
/// Binders that would shadow an enclosing binder are renamed, so the output
/// never relies on shadowing and parses back to an alpha-equivalent term.
pub fn print_term(t: &Term) -> String {
    let free = free_vars(t);
    let mut out = String::new();
    Printer { free: &free, scope: Vec::new() }.term(t, &mut out);
    out
}

/// `a · b · π0`, top first.
pub fn print_stack(s: &Stack) -> String {
    let mut parts: Vec<String> = s.iter_top_first().map(print_term).collect();
    parts.push(format!("π{}", s.base));
    parts.join(" · ")
}

pub fn print_process(p: &Process) -> String {
    format!("{} ⋆ {}", print_term(&p.term), print_stack(&p.stack))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_stack(self))
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_process(self))
    }
}

struct Printer<'a> {
    free: &'a BTreeSet<Name>,
    /// (source name, printed name), innermost last
    scope: Vec<(Name, Name)>,
}

fn is_atomic(t: &Term) -> bool {
    !matches!(t, Term::Lam(..) | Term::App(..))
}

impl Printer<'_> {
    fn term(&mut self, t: &Term, out: &mut String) {
        match t {
            Term::Var(x) => {
                let printed = self.scope.iter().rev().find(|(s, _)| s == x).map(|(_, p)| p.clone());
                out.push_str(printed.as_deref().unwrap_or(x));
            }
            Term::Lam(x, body) => {
                let taken = |c: &str| self.scope.iter().any(|(_, p)| p.as_ref() == c) || self.free.contains(c);
                let printed: Name = if self.scope.iter().any(|(_, p)| p == x) {
                    let mut candidate = x.to_string();
                    while taken(&candidate) {
                        candidate.push('\'');
                    }
                    candidate.into()
                } else {
                    x.clone()
                };
                out.push('λ');
                out.push_str(&printed);
                out.push('.');
                self.scope.push((x.clone(), printed));
                self.term(body, out);
                self.scope.pop();
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                out.push('(');
                self.term(head, out);
                out.push(')');
                let n = args.len();
                for (i, a) in args.into_iter().enumerate() {
                    let last = i + 1 == n;
                    if is_atomic(a) || (last && matches!(a, Term::Lam(..))) {
                        if i > 0 {
                            out.push(' ');
                        }
                        self.term(a, out);
                    } else if last && i == 0 {
                        // adjacency: `(h)(g)x` applies h to the remainder
                        self.term(a, out);
                    } else {
                        out.push_str(" (");
                        self.term(a, out);
                        out.push(')');
                    }
                }
            }
            Term::Inst(i) => self.instruction(i, out),
            Term::Cont(s) => {
                out.push_str("kont[");
                out.push_str(&print_stack(s));
                out.push(']');
            }
            Term::Seq(u, n) => {
                out.push_str(&format!("{u}<{n}>"));
            }
        }
    }

    fn instruction(&mut self, i: &Instruction, out: &mut String) {
        match i {
            Instruction::Cc => out.push_str("cc"),
            Instruction::Chi => out.push('χ'),
            Instruction::ChiPrime => out.push_str("χ'"),
            Instruction::Sigma => out.push('σ'),
            Instruction::V => out.push_str("!V"),
            Instruction::AppliedCont(x, s) => {
                out.push_str("apk[");
                out.push_str(&print_term(x));
                out.push_str(" ; ");
                out.push_str(&print_stack(s));
                out.push(']');
            }
            Instruction::StoreT(u) => out.push_str(&format!("T[{u}]")),
            Instruction::StoreS(u) => out.push_str(&format!("S[{u}]")),
            Instruction::Opaque(n) => out.push_str(&format!("#{n}")),
            Instruction::Probe(n, _) => out.push_str(&format!("@{n}")),
        }
    }
}
