use std::sync::Arc;

use thiserror::Error;

use super::term::{app, apps, lam, var, Instruction, Name, Term};
use crate::combinators;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown instruction `!{name}` at {line}:{col}")]
    UnknownInstruction { name: String, line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Comma,
    LAngle,
    RAngle,
    Ident(String),
    Opaque(String),
    Probe(String),
    Bang(String),
    Numeral(u64),
    Bool(bool),
    Store { family: char, name: String },
    SeqTok(String, u64),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
    space_before: bool,
}

const MACRON: char = '\u{0304}';

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() && c != 'λ') || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '_' || c == '\'' || c == MACRON
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
}

impl<'a> Lexer<'a> {
    fn error(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        let (line, col) = line_col(self.src, pos);
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.i).map(|&(p, _)| p).unwrap_or(self.src.len())
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            s.push(c);
            self.i += 1;
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        let mut space_before = true;
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.i += 1;
                space_before = true;
                continue;
            }
            if c == '-' && self.chars.get(self.i + 1).map(|p| p.1) == Some('-') {
                // line comment
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.i += 1;
                }
                space_before = true;
                continue;
            }
            let pos = self.pos();
            let tok = match c {
                'λ' | '\\' => {
                    self.i += 1;
                    Tok::Lambda
                }
                '.' => {
                    self.i += 1;
                    Tok::Dot
                }
                '(' => {
                    self.i += 1;
                    Tok::LParen
                }
                ')' => {
                    self.i += 1;
                    Tok::RParen
                }
                ',' => {
                    self.i += 1;
                    Tok::Comma
                }
                '⟨' => {
                    self.i += 1;
                    Tok::LAngle
                }
                '⟩' => {
                    self.i += 1;
                    Tok::RAngle
                }
                '#' | '@' | '!' => {
                    self.i += 1;
                    let name = self.take_while(is_ident_continue);
                    if name.is_empty() {
                        return Err(self.error(pos, format!("expected a name after `{c}`")));
                    }
                    match c {
                        '#' => Tok::Opaque(name),
                        '@' => Tok::Probe(name),
                        _ => Tok::Bang(name),
                    }
                }
                '%' => {
                    self.i += 1;
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    let n = digits
                        .parse()
                        .map_err(|_| self.error(pos, "expected digits after `%`"))?;
                    Tok::Numeral(n)
                }
                c if c.is_ascii_digit() => {
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    if self.peek() == Some(MACRON) {
                        self.i += 1;
                        Tok::Numeral(digits.parse().map_err(|_| self.error(pos, "numeral too large"))?)
                    } else {
                        match digits.as_str() {
                            "0" => Tok::Bool(false),
                            "1" => Tok::Bool(true),
                            _ => {
                                return Err(self.error(
                                    pos,
                                    format!("bare number `{digits}`; write `{digits}\u{0304}` or `%{digits}`"),
                                ))
                            }
                        }
                    }
                }
                c if is_ident_start(c) => {
                    let name = self.take_while(is_ident_continue);
                    match self.peek() {
                        Some('[') if name == "kont" || name == "apk" => {
                            return Err(self.error(pos, "continuation constants cannot appear in source"))
                        }
                        Some('[') if name == "T" || name == "S" => {
                            self.i += 1;
                            let fam = self.take_while(is_ident_continue);
                            if fam.is_empty() || self.peek() != Some(']') {
                                return Err(self.error(pos, "expected `T[name]` or `S[name]`"));
                            }
                            self.i += 1;
                            Tok::Store { family: name.chars().next().unwrap(), name: fam }
                        }
                        Some('<') => {
                            self.i += 1;
                            let digits = self.take_while(|c| c.is_ascii_digit());
                            if digits.is_empty() || self.peek() != Some('>') {
                                return Err(self.error(pos, "expected `name<index>`"));
                            }
                            self.i += 1;
                            Tok::SeqTok(name, digits.parse().map_err(|_| self.error(pos, "index too large"))?)
                        }
                        _ => Tok::Ident(name),
                    }
                }
                other => return Err(self.error(pos, format!("unexpected character `{other}`"))),
            };
            out.push(Token { tok, pos, space_before });
            space_before = false;
        }
        Ok(out)
    }
}

fn line_col(src: &str, pos: usize) -> (usize, usize) {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    i: usize,
    bound: Vec<Name>,
}

impl<'a> Parser<'a> {
    fn error(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        let (line, col) = line_col(self.src, pos);
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.pos).unwrap_or(self.src.len())
    }

    fn is_bound(&self, name: &str) -> bool {
        self.bound.iter().any(|b| b.as_ref() == name)
    }

    /// A maximal application sequence, ending before `)`, `,`, `⟩` or end of input.
    fn sequence(&mut self) -> Result<Term, ParseError> {
        let start = self.here();
        let mut items: Vec<Term> = Vec::new();
        loop {
            let Some(tok) = self.peek() else { break };
            match tok.tok {
                Tok::RParen | Tok::Comma | Tok::RAngle => break,
                Tok::Lambda => {
                    items.push(self.lambda()?);
                    break;
                }
                Tok::LParen => {
                    let group = self.group()?;
                    // `(t)(u)…` applies t to the whole remainder
                    if matches!(self.peek(), Some(Token { tok: Tok::LParen, space_before: false, .. })) {
                        let rest = self.sequence()?;
                        items.push(app(group, rest));
                        break;
                    }
                    items.push(group);
                }
                _ => items.push(self.atom()?),
            }
        }
        let mut it = items.into_iter();
        let head = it.next().ok_or_else(|| self.error(start, "expected a term"))?;
        Ok(apps(head, it))
    }

    fn group(&mut self) -> Result<Term, ParseError> {
        let open = self.here();
        self.i += 1;
        let t = self.sequence()?;
        match self.peek() {
            Some(Token { tok: Tok::RParen, .. }) => {
                self.i += 1;
                Ok(t)
            }
            _ => Err(self.error(open, "unmatched parenthesis")),
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.i += 1;
        let pos = self.here();
        let binder = match self.peek().map(|t| &t.tok) {
            Some(Tok::Ident(name)) if keyword(name).is_none() => name.clone(),
            _ => return Err(self.error(pos, "expected a binder name after λ")),
        };
        self.i += 1;
        if matches!(self.peek(), Some(Token { tok: Tok::Dot, .. })) {
            self.i += 1;
        }
        self.bound.push(binder.as_str().into());
        let body = self.sequence();
        self.bound.pop();
        Ok(lam(&binder, body?))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let tok = self.peek().cloned().expect("atom called at end of input");
        self.i += 1;
        Ok(match tok.tok {
            Tok::Ident(name) => {
                if let Some(i) = keyword(&name) {
                    Term::Inst(i)
                } else if name == "s" && !self.is_bound("s") {
                    combinators::succ()
                } else {
                    var(&name)
                }
            }
            Tok::Opaque(n) => Term::Inst(Instruction::Opaque(n.into())),
            Tok::Probe(n) => Term::Inst(Instruction::Probe(n.into(), None)),
            Tok::Bang(n) => match n.as_str() {
                "cc" => Term::Inst(Instruction::Cc),
                "chi" => Term::Inst(Instruction::Chi),
                "chi'" => Term::Inst(Instruction::ChiPrime),
                "sigma" => Term::Inst(Instruction::Sigma),
                "V" => Term::Inst(Instruction::V),
                _ => {
                    let (line, col) = line_col(self.src, tok.pos);
                    return Err(ParseError::UnknownInstruction { name: n, line, col });
                }
            },
            Tok::Numeral(n) => combinators::church(n),
            Tok::Bool(b) => {
                if b {
                    combinators::pair_true()
                } else {
                    combinators::pair_false()
                }
            }
            Tok::Store { family, name } => {
                let name: Name = Arc::from(name.as_str());
                Term::Inst(if family == 'T' { Instruction::StoreT(name) } else { Instruction::StoreS(name) })
            }
            Tok::SeqTok(name, n) => Term::Seq(name.into(), n),
            Tok::LAngle => {
                let a = self.sequence()?;
                if !matches!(self.peek(), Some(Token { tok: Tok::Comma, .. })) {
                    return Err(self.error(self.here(), "expected `,` in pair"));
                }
                self.i += 1;
                let b = self.sequence()?;
                if !matches!(self.peek(), Some(Token { tok: Tok::RAngle, .. })) {
                    return Err(self.error(tok.pos, "unclosed pair"));
                }
                self.i += 1;
                combinators::pair(a, b)
            }
            Tok::Dot => return Err(self.error(tok.pos, "unexpected `.`")),
            _ => return Err(self.error(tok.pos, "unexpected token")),
        })
    }
}

fn keyword(name: &str) -> Option<Instruction> {
    Some(match name {
        "cc" => Instruction::Cc,
        "chi" | "χ" => Instruction::Chi,
        "chi'" | "χ'" => Instruction::ChiPrime,
        "sigma" | "σ" => Instruction::Sigma,
        _ => return None,
    })
}

/// Parses one term. Both `(t)u v` and `t u v` denote left-nested application;
/// a parenthesized term directly followed by `(` is applied to the rest of
/// the sequence, so `(f)(f)x` reads as `f (f x)`.
pub fn parse_term(source: &str) -> Result<Term, ParseError> {
    let toks = Lexer { src: source, chars: source.char_indices().collect(), i: 0 }.tokens()?;
    let mut p = Parser { src: source, toks, i: 0, bound: Vec::new() };
    let t = p.sequence()?;
    if let Some(tok) = p.peek() {
        let msg = match tok.tok {
            Tok::RParen => "unmatched parenthesis",
            _ => "unexpected trailing input",
        };
        return Err(p.error(tok.pos, msg));
    }
    Ok(t)
}
