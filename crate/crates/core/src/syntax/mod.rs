//! Terms, stacks and processes of the machine, with a parser and a
//! Krivine-style printer.

mod parse;
mod print;
mod term;

pub use parse::{parse_term, ParseError};
pub use print::{print_process, print_stack, print_term};
pub use term::*;
