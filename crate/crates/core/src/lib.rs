//! Abstract machine, forcing transpiler and verification harness for
//! classical realizability.
//!
//! The [`machine`] executes processes `t ⋆ π` of the lambda-calculus with
//! `cc`, continuations, the stack-bottom instructions `χ`/`χ'` and the
//! signature `σ`. [`forcing`] compiles quasi-proofs `t ↦ t*` and formulas
//! `F ↦ p ⊩ F`, relying on [`conditions`] to synthesize the semilattice
//! coercions. [`logic`] checks derivations and extracts their programs, and
//! [`playground`] models conditions as eventually periodic subsets of ℕ.

pub mod combinators;
pub mod conditions;
pub mod forcing;
pub mod logic;
pub mod machine;
pub mod playground;
pub mod report;
pub mod syntax;
